#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "skyres/errors.hpp"
#include "skyres/lattice.hpp"
#include "skyres/llg.hpp"
#include "skyres/rng.hpp"

namespace skyres {

// ---------------------------------------------------------------------------
// micromagnetic backend: the skyrmion lattice driven by the LLG integrator

struct MicromagneticConfig {
    MaterialParams params;
    int nx = 64, ny = 64;
    double cell_size_um = 0.625; // 64 cells -> 40 um Hall-bar width
    Boundary boundary = Boundary::Open;
    long equilibration_steps = 10000;
    double reset_pulse_oe = 400.0;
    long reset_pulse_steps = 1000;
    /// Map from protocol seconds to reduced time units.
    double wall_units_per_second = 2000.0;
    /// Central window fraction read by the Hall cross.
    double hall_window_fraction = 0.5;
    double v_gain = 1.0, v_offset = 0.0;

    void validate() const {
        params.validate();
        if (nx < 8 || ny < 8) throw ConfigError("grid extents must be >= 8");
        if (equilibration_steps < 0) throw ConfigError("equilibration_steps must be >= 0");
        if (reset_pulse_steps < 0) throw ConfigError("reset_pulse_steps must be >= 0");
        if (!(wall_units_per_second > 0)) throw ConfigError("wall_units_per_second must be > 0");
        if (!(hall_window_fraction > 0.0) || hall_window_fraction > 1.0)
            throw ConfigError("hall_window_fraction must be in (0, 1]");
    }
};

struct MicromagneticState {
    MicromagneticConfig cfg;
    SpinLattice lattice;
    RngStream rng;
    std::uint64_t steps_done = 0;     // all integrator steps, including reset
    std::uint64_t protocol_step0 = 0; // steps consumed before protocol time zero
    double elapsed_seconds = 0.0;
    LlgWorkspace ws;

    double steps_per_second() const { return cfg.wall_units_per_second / cfg.params.dt; }
};

inline MicromagneticState backend_reset(const MicromagneticConfig& cfg, double h_const_oe,
                                        RngStream stream) {
    cfg.validate();
    MicromagneticState st;
    st.cfg = cfg;
    st.rng = stream;
    st.lattice = seed_texture(TextureKind::UniformUp, cfg.nx, cfg.ny, cfg.cell_size_um, 0, 6.0,
                              cfg.params.dmi_d);
    for (long s = 0; s < cfg.reset_pulse_steps; ++s)
        llg_step_inplace(st.lattice, cfg.params, cfg.reset_pulse_oe, cfg.boundary, st.rng,
                         st.steps_done++, st.ws);
    for (long s = 0; s < cfg.equilibration_steps; ++s)
        llg_step_inplace(st.lattice, cfg.params, h_const_oe, cfg.boundary, st.rng,
                         st.steps_done++, st.ws);
    st.protocol_step0 = st.steps_done;
    st.elapsed_seconds = 0.0;
    return st;
}

inline void backend_advance(MicromagneticState& st, double h_total_oe, double duration_s) {
    if (!(duration_s > 0)) throw ConfigError("backend_advance: duration must be > 0");
    const double target_s = st.elapsed_seconds + duration_s;
    const auto target_steps =
        static_cast<std::uint64_t>(std::llround(target_s * st.steps_per_second()));
    while (st.steps_done - st.protocol_step0 < target_steps)
        llg_step_inplace(st.lattice, st.cfg.params, h_total_oe, st.cfg.boundary, st.rng,
                         st.steps_done++, st.ws);
    st.elapsed_seconds = target_s;
}

inline double read_voltage(const MicromagneticState& st) {
    return st.cfg.v_gain * st.lattice.window_mean_mz(st.cfg.hall_window_fraction) +
           st.cfg.v_offset;
}

// ---------------------------------------------------------------------------
// surrogate backend: bank of independent leaky tanh nodes, fast enough for
// CI and for exercising the pipeline without the physics

struct SurrogateParams {
    int n_nodes = 64;
    /// Retained fraction of the state per update: 1 keeps everything
    /// (pure integrator), smaller values leak.
    double leak_gamma = 0.9;
    double input_gain_min = 0.004, input_gain_max = 0.06; // |a| per Oe, log-spaced
    double feedback_gain_max = 0.05;                      // |b|
    double bias_max = 0.4;                                // |c|
    std::uint64_t seed = 1;
    /// Discrete clock of the node update map.
    double update_rate_hz = 100.0;

    void validate() const {
        if (n_nodes < 1) throw ConfigError("n_nodes must be >= 1");
        if (!(leak_gamma > 0.0) || leak_gamma > 1.0)
            throw ConfigError("leak_gamma must be in (0, 1]");
        if (!(update_rate_hz > 0)) throw ConfigError("update_rate_hz must be > 0");
        if (!(input_gain_min > 0) || input_gain_max < input_gain_min)
            throw ConfigError("input gain range invalid");
        if (feedback_gain_max < 0 || bias_max < 0)
            throw ConfigError("feedback/bias scales must be >= 0");
    }

    /// Echo-state contraction margin 1 - max_i(gamma + |b_i|). Positive
    /// guarantees fading memory; gamma = 1 (integrator mode) is allowed
    /// but reported as non-fading by validators.
    double echo_state_margin() const { return 1.0 - (leak_gamma + feedback_gain_max); }
};

struct SurrogateConfig {
    SurrogateParams params;
    double v_gain = 1.0, v_offset = 0.0;

    void validate() const { params.validate(); }
};

struct SurrogateState {
    SurrogateConfig cfg;
    std::vector<double> a, b, c; // per-node gains
    std::vector<double> x;       // node activations
    std::uint64_t updates_done = 0;
    double elapsed_seconds = 0.0;

    void update(double u_oe) {
        const double g = cfg.params.leak_gamma;
        for (size_t i = 0; i < x.size(); ++i)
            x[i] = g * x[i] + std::tanh(a[i] * u_oe + b[i] * x[i] + c[i]);
    }
};

inline SurrogateState backend_reset(const SurrogateConfig& cfg, double h_const_oe,
                                    RngStream /*stream*/) {
    cfg.validate();
    const SurrogateParams& p = cfg.params;
    SurrogateState st;
    st.cfg = cfg;
    st.a.resize(p.n_nodes);
    st.b.resize(p.n_nodes);
    st.c.resize(p.n_nodes);
    st.x.assign(p.n_nodes, 0.0);
    RngCursor rng(p.seed, 0x5e);
    const double log_lo = std::log(p.input_gain_min), log_hi = std::log(p.input_gain_max);
    for (int i = 0; i < p.n_nodes; ++i) {
        const double mag = std::exp(log_lo + (log_hi - log_lo) * rng.uniform());
        st.a[i] = rng.uniform() < 0.5 ? mag : -mag;
        st.b[i] = p.feedback_gain_max * (2.0 * rng.uniform() - 1.0);
        st.c[i] = p.bias_max * (2.0 * rng.uniform() - 1.0);
    }
    // deterministic settling at the bias point
    for (int w = 0; w < 64; ++w) st.update(h_const_oe);
    return st;
}

inline void backend_advance(SurrogateState& st, double h_total_oe, double duration_s) {
    if (!(duration_s > 0)) throw ConfigError("backend_advance: duration must be > 0");
    const double target_s = st.elapsed_seconds + duration_s;
    const auto target =
        static_cast<std::uint64_t>(std::llround(target_s * st.cfg.params.update_rate_hz));
    while (st.updates_done < target) {
        st.update(h_total_oe);
        ++st.updates_done;
    }
    st.elapsed_seconds = target_s;
}

inline double read_voltage(const SurrogateState& st) {
    double mean = 0.0;
    for (double v : st.x) mean += v;
    mean /= static_cast<double>(st.x.size());
    return st.cfg.v_gain * mean + st.cfg.v_offset;
}

// ---------------------------------------------------------------------------
// runtime-dispatched wrappers

using BackendConfig = std::variant<MicromagneticConfig, SurrogateConfig>;
using BackendState = std::variant<MicromagneticState, SurrogateState>;

inline std::string backend_kind(const BackendConfig& c) {
    return std::holds_alternative<MicromagneticConfig>(c) ? "micromagnetic" : "surrogate";
}

inline BackendState backend_reset(const BackendConfig& cfg, double h_const_oe,
                                  RngStream stream) {
    return std::visit(
        [&](const auto& c) -> BackendState { return backend_reset(c, h_const_oe, stream); },
        cfg);
}

inline void backend_advance(BackendState& st, double h_total_oe, double duration_s) {
    std::visit([&](auto& s) { backend_advance(s, h_total_oe, duration_s); }, st);
}

inline double read_voltage(const BackendState& st) {
    return std::visit([](const auto& s) { return read_voltage(s); }, st);
}

inline double elapsed_seconds(const BackendState& st) {
    return std::visit([](const auto& s) { return s.elapsed_seconds; }, st);
}

} // namespace skyres
