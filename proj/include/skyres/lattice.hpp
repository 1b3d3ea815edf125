#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "skyres/errors.hpp"
#include "skyres/rng.hpp"
#include "skyres/vec3.hpp"

namespace skyres {

enum class Boundary { Open, Periodic };

inline const char* to_string(Boundary b) {
    return b == Boundary::Open ? "open" : "periodic";
}

/// Material constants in reduced units: the exchange constant J sets the
/// energy scale, time is measured in 1/(gyromagnetic ratio * J), and
/// field_scale converts an applied field in Oe to the reduced Zeeman
/// strength.
struct MaterialParams {
    double exchange_j = 1.0;
    double dmi_d = 0.45;
    double anisotropy_k = 0.10;
    double field_scale = 0.01;  // reduced field per Oe
    double damping_alpha = 0.25;
    double temperature = 0.0;
    double dt = 0.01;

    void validate() const {
        if (!(damping_alpha > 0.0)) throw ConfigError("damping_alpha must be > 0");
        if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
        if (dmi_d < 0.0) throw ConfigError("dmi_d must be >= 0");
        if (anisotropy_k < 0.0) throw ConfigError("anisotropy_k must be >= 0");
        if (temperature < 0.0) throw ConfigError("temperature must be >= 0");
        if (!(exchange_j > 0.0)) throw ConfigError("exchange_j must be > 0");
    }
};

/// 2D grid of unit spins. Row-major storage, index (x, y) -> y*nx + x.
struct SpinLattice {
    int nx = 0, ny = 0;
    double cell_size_um = 0.625;
    std::vector<Vec3> spins;

    SpinLattice() = default;
    SpinLattice(int nx_, int ny_, double cell_um = 0.625)
        : nx(nx_), ny(ny_), cell_size_um(cell_um), spins(static_cast<size_t>(nx_) * ny_) {
        if (nx < 8 || ny < 8) throw GeometryError("lattice extents must be >= 8");
        if (!(cell_size_um > 0.0)) throw GeometryError("cell_size_um must be > 0");
    }

    int site(int x, int y) const { return y * nx + x; }
    Vec3& at(int x, int y) { return spins[site(x, y)]; }
    const Vec3& at(int x, int y) const { return spins[site(x, y)]; }
    int n_sites() const { return nx * ny; }

    double mean_mz() const {
        double s = 0.0;
        for (const Vec3& m : spins) s += m.z;
        return s / static_cast<double>(spins.size());
    }

    /// Mean m_z over the centered window covering the given fraction of
    /// each extent (the Hall-cross read area).
    double window_mean_mz(double fraction) const {
        const int wx = std::max(1, static_cast<int>(std::lround(nx * fraction)));
        const int wy = std::max(1, static_cast<int>(std::lround(ny * fraction)));
        const int x0 = (nx - wx) / 2, y0 = (ny - wy) / 2;
        double s = 0.0;
        for (int y = y0; y < y0 + wy; ++y)
            for (int x = x0; x < x0 + wx; ++x) s += at(x, y).z;
        return s / (static_cast<double>(wx) * wy);
    }

    double max_norm_deviation() const {
        double worst = 0.0;
        for (const Vec3& m : spins) worst = std::max(worst, std::abs(norm(m) - 1.0));
        return worst;
    }
};

enum class TextureKind { UniformUp, UniformDown, Skyrmion, Random, Labyrinth };

/// Néel skyrmion profile: polar angle pi at the core falling linearly to 0
/// at the rim, in-plane component radial. `chirality` +1 points the
/// in-plane component outward, -1 inward.
inline void stamp_skyrmion(SpinLattice& lat, double cx, double cy, double radius, int chirality) {
    if (radius < 2.0) throw GeometryError("skyrmion radius must be >= 2 cells");
    if (cx - radius < 0 || cx + radius > lat.nx - 1 || cy - radius < 0 || cy + radius > lat.ny - 1)
        throw GeometryError("skyrmion does not fit inside the grid");
    for (int y = 0; y < lat.ny; ++y) {
        for (int x = 0; x < lat.nx; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double r = std::sqrt(dx * dx + dy * dy);
            if (r >= radius) continue;
            const double theta = M_PI * std::clamp(1.0 - r / radius, 0.0, 1.0);
            double ux = 1.0, uy = 0.0;
            if (r > 1e-12) { ux = dx / r; uy = dy / r; }
            const double s = std::sin(theta) * chirality;
            lat.at(x, y) = Vec3{s * ux, s * uy, std::cos(theta)};
        }
    }
}

inline SpinLattice seed_texture(TextureKind kind, int nx, int ny, double cell_um = 0.625,
                                std::uint64_t seed = 0, double sk_radius = 6.0,
                                double dmi_sign = 1.0) {
    SpinLattice lat(nx, ny, cell_um);
    switch (kind) {
        case TextureKind::UniformUp:
            for (Vec3& m : lat.spins) m = Vec3{0, 0, 1};
            break;
        case TextureKind::UniformDown:
            for (Vec3& m : lat.spins) m = Vec3{0, 0, -1};
            break;
        case TextureKind::Skyrmion: {
            for (Vec3& m : lat.spins) m = Vec3{0, 0, 1};
            // D > 0 prefers the inward-pointing Néel wall in this DMI convention
            stamp_skyrmion(lat, (nx - 1) / 2.0, (ny - 1) / 2.0, sk_radius,
                           dmi_sign >= 0.0 ? -1 : +1);
            break;
        }
        case TextureKind::Random: {
            RngCursor rng(seed, 0x7e);
            for (Vec3& m : lat.spins) {
                // Marsaglia rejection for a uniform direction
                for (;;) {
                    const double a = 2.0 * rng.uniform() - 1.0;
                    const double b = 2.0 * rng.uniform() - 1.0;
                    const double q = a * a + b * b;
                    if (q >= 1.0) continue;
                    const double s = 2.0 * std::sqrt(1.0 - q);
                    m = Vec3{a * s, b * s, 1.0 - 2.0 * q};
                    break;
                }
            }
            break;
        }
        case TextureKind::Labyrinth: {
            RngCursor rng(seed, 0x1ab);
            const double phase = 2.0 * M_PI * rng.uniform();
            const double angle = M_PI * rng.uniform();
            const double kx = std::cos(angle), ky = std::sin(angle);
            const double wavelength = 8.0;
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < nx; ++x) {
                    const double u = std::sin(2.0 * M_PI * (kx * x + ky * y) / wavelength + phase);
                    const double jitter = 0.4 * (rng.uniform() - 0.5);
                    lat.at(x, y) = normalized(Vec3{jitter, 0.3 * (rng.uniform() - 0.5),
                                                   u >= 0 ? 1.0 : -1.0});
                }
            break;
        }
    }
    return lat;
}

} // namespace skyres
