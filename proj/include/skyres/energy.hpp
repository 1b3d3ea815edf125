#pragma once

#include <vector>

#include "skyres/lattice.hpp"

namespace skyres {

// Thin-film energetics on the square lattice, reduced units:
//
//   E = -J sum_<ij> m_i . m_j
//       - D [ sum_x-bonds (m_i^z m_j^x - m_i^x m_j^z)
//           - sum_y-bonds (m_i^y m_j^z - m_i^z m_j^y) ]
//       - K sum_i (m_i^z)^2
//       - h sum_i m_i^z,          h = field_scale * h_z[Oe]
//
// The DMI form is the interfacial (Néel) one, D_ij = D (z x e_ij), each
// bond counted once. effective_field below is its exact negative gradient;
// the finite-difference test pins the two together.

namespace detail {

inline int wrap(int i, int n) { return i < 0 ? i + n : (i >= n ? i - n : i); }

} // namespace detail

inline double total_energy(const SpinLattice& lat, const MaterialParams& p, double h_z_oe,
                           Boundary bc = Boundary::Open) {
    const int nx = lat.nx, ny = lat.ny;
    const double J = p.exchange_j, D = p.dmi_d, K = p.anisotropy_k;
    const double h = p.field_scale * h_z_oe;
    const bool periodic = bc == Boundary::Periodic;
    double e = 0.0;
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            const Vec3& m = lat.at(x, y);
            if (x + 1 < nx || periodic) {
                const Vec3& r = lat.at(detail::wrap(x + 1, nx), y);
                e -= J * dot(m, r);
                e -= D * (m.z * r.x - m.x * r.z);
            }
            if (y + 1 < ny || periodic) {
                const Vec3& u = lat.at(x, detail::wrap(y + 1, ny));
                e -= J * dot(m, u);
                e += D * (m.y * u.z - m.z * u.y);
            }
            e -= K * m.z * m.z + h * m.z;
        }
    }
    return e;
}

/// Writes -dE/dm_i for every site into `out` (resized as needed).
/// Returns the maximum field magnitude, used for the step-size check.
inline double effective_field(const SpinLattice& lat, const MaterialParams& p, double h_z_oe,
                              Boundary bc, std::vector<Vec3>& out) {
    const int nx = lat.nx, ny = lat.ny;
    const double J = p.exchange_j, D = p.dmi_d, twoK = 2.0 * p.anisotropy_k;
    const double h = p.field_scale * h_z_oe;
    const bool periodic = bc == Boundary::Periodic;
    out.resize(lat.spins.size());
    double max_sq = 0.0;
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            const Vec3& m = lat.at(x, y);
            Vec3 f{0.0, 0.0, twoK * m.z + h};
            if (x + 1 < nx || periodic) {
                const Vec3& r = lat.at(detail::wrap(x + 1, nx), y);
                f += J * r;
                f.x -= D * r.z;
                f.z += D * r.x;
            }
            if (x - 1 >= 0 || periodic) {
                const Vec3& l = lat.at(detail::wrap(x - 1, nx), y);
                f += J * l;
                f.x += D * l.z;
                f.z -= D * l.x;
            }
            if (y + 1 < ny || periodic) {
                const Vec3& u = lat.at(x, detail::wrap(y + 1, ny));
                f += J * u;
                f.y -= D * u.z;
                f.z += D * u.y;
            }
            if (y - 1 >= 0 || periodic) {
                const Vec3& d = lat.at(x, detail::wrap(y - 1, ny));
                f += J * d;
                f.y += D * d.z;
                f.z -= D * d.y;
            }
            out[lat.site(x, y)] = f;
            max_sq = std::max(max_sq, dot(f, f));
        }
    }
    return std::sqrt(max_sq);
}

inline std::vector<Vec3> effective_field(const SpinLattice& lat, const MaterialParams& p,
                                         double h_z_oe, Boundary bc = Boundary::Open) {
    std::vector<Vec3> out;
    effective_field(lat, p, h_z_oe, bc, out);
    return out;
}

} // namespace skyres
