#pragma once

#include <cmath>
#include <vector>

#include "skyres/energy.hpp"
#include "skyres/lattice.hpp"
#include "skyres/rng.hpp"

namespace skyres {

/// Documented integrator stability bound: dt * max|H_eff| must stay below
/// this value or llg_step refuses to proceed.
inline constexpr double kStabilityBound = 0.1;

struct LlgWorkspace {
    std::vector<Vec3> field;
    std::vector<Vec3> slope;
    std::vector<Vec3> noise;
    SpinLattice predictor;
};

// Damped precession right-hand side: dm/dt = -m x H - alpha m x (m x H).
inline Vec3 llg_rhs(const Vec3& m, const Vec3& H, double alpha) {
    const Vec3 mxH = cross(m, H);
    return -1.0 * mxH - alpha * cross(m, mxH);
}

/// One stochastic Heun step. The thermal field is drawn once per step per
/// site from the counter-based stream (block index = step_index * n_sites
/// + site) and reused in both stages, so trajectories are bit-reproducible
/// for a given (lattice, params, field sequence, stream, step_index).
///
/// Throws StabilityViolation if the documented bound dt*max|H| >= 0.1 is
/// hit or any spin would rotate by more than pi/2.
inline void llg_step_inplace(SpinLattice& lat, const MaterialParams& p, double h_z_oe,
                             Boundary bc, const RngStream& rng, std::uint64_t step_index,
                             LlgWorkspace& ws) {
    const int n = lat.n_sites();
    const double dt = p.dt, alpha = p.damping_alpha;
    const bool thermal = p.temperature > 0.0;

    if (thermal) {
        // fluctuation-dissipation: per-component std sqrt(2 alpha T / dt),
        // so the integrated kick over one step has variance 2 alpha T dt
        const double sigma = std::sqrt(2.0 * alpha * p.temperature / dt);
        ws.noise.resize(n);
        const std::uint64_t base = step_index * static_cast<std::uint64_t>(n);
        for (int i = 0; i < n; ++i) {
            double g[3];
            rng.gauss3_at(base + static_cast<std::uint64_t>(i), g);
            ws.noise[i] = Vec3{sigma * g[0], sigma * g[1], sigma * g[2]};
        }
    }

    const double max_field = effective_field(lat, p, h_z_oe, bc, ws.field);
    if (dt * max_field >= kStabilityBound)
        throw StabilityViolation("dt * max|H_eff| = " + std::to_string(dt * max_field) +
                                 " exceeds the stability bound 0.1; reduce dt");

    if (ws.predictor.nx != lat.nx || ws.predictor.ny != lat.ny) ws.predictor = lat;
    ws.slope.resize(n);

    for (int i = 0; i < n; ++i) {
        Vec3 H = ws.field[i];
        if (thermal) H += ws.noise[i];
        const Vec3 f = llg_rhs(lat.spins[i], H, alpha);
        ws.slope[i] = f;
        ws.predictor.spins[i] = lat.spins[i] + dt * f;
    }

    effective_field(ws.predictor, p, h_z_oe, bc, ws.field);

    for (int i = 0; i < n; ++i) {
        Vec3 H = ws.field[i];
        if (thermal) H += ws.noise[i];
        const Vec3 f2 = llg_rhs(ws.predictor.spins[i], H, alpha);
        const Vec3 next = lat.spins[i] + (0.5 * dt) * (ws.slope[i] + f2);
        if (dot(next, lat.spins[i]) < 0.0)
            throw StabilityViolation("spin rotated by more than pi/2 in one step");
        lat.spins[i] = normalized(next);
    }
}

/// Functional form of the step (spec surface); the in-place variant above
/// is the hot path.
inline SpinLattice llg_step(const SpinLattice& lat, const MaterialParams& p, double h_z_oe,
                            const RngStream& rng, std::uint64_t step_index = 0,
                            Boundary bc = Boundary::Open) {
    SpinLattice next = lat;
    LlgWorkspace ws;
    llg_step_inplace(next, p, h_z_oe, bc, rng, step_index, ws);
    return next;
}

} // namespace skyres
