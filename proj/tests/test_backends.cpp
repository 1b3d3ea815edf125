#include <catch2/catch_amalgamated.hpp>

#include "skyres/analysis.hpp"
#include "skyres/backend.hpp"
#include "skyres/lattice.hpp"

using namespace skyres;

namespace {

MicromagneticConfig small_device(double temperature = 0.06) {
    MicromagneticConfig c;
    c.nx = 32;
    c.ny = 32;
    c.params.dmi_d = 0.55;
    c.params.anisotropy_k = 0.10;
    c.params.damping_alpha = 0.25;
    c.params.temperature = temperature;
    c.params.dt = 0.01;
    c.params.field_scale = 0.005;
    c.reset_pulse_steps = 500;
    c.reset_pulse_oe = 400.0;
    c.equilibration_steps = 6000;
    c.wall_units_per_second = 200.0;
    return c;
}

SurrogateConfig small_surrogate(std::uint64_t seed = 3) {
    SurrogateConfig c;
    c.params.n_nodes = 16;
    c.params.seed = seed;
    c.params.update_rate_hz = 100.0;
    return c;
}

} // namespace

TEST_CASE("surrogate reset is deterministic in (seed, h_const)", "[backends]") {
    auto a = backend_reset(small_surrogate(7), 1.2, RngStream::derive(1, 0));
    auto b = backend_reset(small_surrogate(7), 1.2, RngStream::derive(9, 5));
    REQUIRE(a.x.size() == b.x.size());
    for (size_t i = 0; i < a.x.size(); ++i) REQUIRE(a.x[i] == b.x[i]);

    auto c = backend_reset(small_surrogate(7), -0.4, RngStream::derive(1, 0));
    bool differs = false;
    for (size_t i = 0; i < a.x.size(); ++i) differs |= a.x[i] != c.x[i];
    CHECK(differs);
}

TEST_CASE("very large h_const saturates the micromagnetic resting texture", "[backends]") {
    auto cfg = small_device();
    auto st = backend_reset(cfg, 400.0, RngStream::derive(11, 0));
    const auto rep = count_skyrmions(st.lattice);
    CHECK(rep.skyrmion_count == 0);
    CHECK(rep.mean_mz > 0.9);
}

TEST_CASE("device-A resting texture near zero bias holds skyrmions", "[backends]") {
    auto cfg = small_device();
    auto st = backend_reset(cfg, 1.12, RngStream::derive(11, 0));
    const auto rep = count_skyrmions(st.lattice);
    INFO("count " << rep.skyrmion_count << " mean_mz " << rep.mean_mz);
    CHECK(rep.skyrmion_count >= 1);
}

TEST_CASE("advancing a saturated state leaves the voltage fixed", "[backends]") {
    auto cfg = small_device(0.0); // T = 0: exact fixed point
    cfg.equilibration_steps = 2000;
    auto st = backend_reset(cfg, 400.0, RngStream::derive(2, 0));
    const double v0 = read_voltage(st);
    backend_advance(st, 400.0, 0.25);
    CHECK(std::abs(read_voltage(st) - v0) < 1e-9);
}

TEST_CASE("surrogate advances compose exactly", "[backends]") {
    auto cfg = small_surrogate();
    auto one = backend_reset(cfg, 0.5, RngStream::derive(3, 0));
    auto two = one;
    backend_advance(one, 3.0, 0.25);
    backend_advance(two, 3.0, 0.125);
    backend_advance(two, 3.0, 0.125);
    REQUIRE(one.updates_done == two.updates_done);
    for (size_t i = 0; i < one.x.size(); ++i) REQUIRE(one.x[i] == two.x[i]);
}

TEST_CASE("micromagnetic advance dissipates energy at T = 0", "[backends]") {
    auto cfg = small_device(0.0);
    cfg.equilibration_steps = 300; // stop well short of equilibrium
    auto st = backend_reset(cfg, 1.0, RngStream::derive(5, 0));
    const double e0 = total_energy(st.lattice, cfg.params, 1.0, cfg.boundary);
    backend_advance(st, 1.0, 0.05);
    const double e1 = total_energy(st.lattice, cfg.params, 1.0, cfg.boundary);
    CHECK(e1 <= e0 + 1e-9);
}

TEST_CASE("read_voltage is affine in the window mean m_z", "[backends]") {
    auto cfg = small_device();
    cfg.v_gain = 2.5;
    cfg.v_offset = 0.75;
    MicromagneticState st;
    st.cfg = cfg;
    st.lattice = seed_texture(TextureKind::UniformUp, 32, 32);
    CHECK(read_voltage(st) == Catch::Approx(2.5 * 1.0 + 0.75).epsilon(1e-12));

    st.lattice = seed_texture(TextureKind::Random, 32, 32, 0.625, 17);
    const double v_plus = read_voltage(st) - cfg.v_offset;
    for (Vec3& m : st.lattice.spins) m = -m;
    const double v_minus = read_voltage(st) - cfg.v_offset;
    CHECK(v_plus == Catch::Approx(-v_minus).epsilon(1e-12));
}

TEST_CASE("seeded skyrmion depresses the window voltage by its core area", "[backends]") {
    const int n = 64;
    const double radius = 6.0;
    MicromagneticState st;
    st.cfg = small_device();
    st.cfg.v_gain = 1.0;
    st.cfg.v_offset = 0.0;
    st.cfg.hall_window_fraction = 0.5;
    st.lattice = seed_texture(TextureKind::Skyrmion, n, n, 0.625, 0, radius, 1.0);

    // analytic window integral of the seeded profile: mz = cos(pi (1 - r/R))
    // inside r < R and +1 outside; the 32x32 window holds the whole core
    const double window_cells = (n / 2.0) * (n / 2.0);
    double integral = 0.0;
    const int grid = 4000;
    for (int i = 0; i < grid; ++i) {
        const double r = (i + 0.5) / grid * radius;
        integral += std::cos(M_PI * (1.0 - r / radius)) * 2.0 * M_PI * r * (radius / grid);
    }
    const double expected = 1.0 + (integral - M_PI * radius * radius) / window_cells;
    const double v = read_voltage(st);
    INFO("expected " << expected << " got " << v);
    CHECK(std::abs(v - expected) < 0.1 * std::abs(1.0 - expected));
}

TEST_CASE("surrogate fading memory decays after the drive stops", "[backends]") {
    auto cfg = small_surrogate();
    cfg.params.leak_gamma = 0.8;
    cfg.params.feedback_gain_max = 0.0;
    cfg.params.bias_max = 0.0;
    REQUIRE(cfg.params.echo_state_margin() > 0.0);

    auto st = backend_reset(cfg, 0.0, RngStream::derive(1, 0));
    for (int k = 0; k < 50; ++k) backend_advance(st, 20.0 * std::sin(0.3 * k), 0.01);
    const double v_peak = std::abs(read_voltage(st));
    REQUIRE(v_peak > 0.0);
    int updates = 0;
    while (std::abs(read_voltage(st)) > 0.01 * v_peak && updates < 200) {
        backend_advance(st, 0.0, 0.01);
        ++updates;
    }
    // documented horizon: gamma^k < 1%  ->  k = ceil(ln 0.01 / ln gamma)
    const int horizon = static_cast<int>(std::ceil(std::log(0.01) / std::log(0.8)));
    CHECK(updates <= horizon + 1);
}

TEST_CASE("voltage response is nonlinear in drive amplitude", "[backends]") {
    const std::vector<double> amps = {4.0, 8.0, 16.0, 32.0, 64.0};

    SECTION("surrogate") {
        auto probe = nonlinearity_probe(small_surrogate(), 0.5, amps);
        CHECK(probe.nonlinear);
        CHECK(probe.r_squared < 0.999);
    }
    SECTION("micromagnetic") {
        auto cfg = small_device();
        cfg.equilibration_steps = 3000;
        ProbeOptions opt;
        opt.period_s = 1.25;
        opt.drive_rate_hz = 20.0;
        auto probe = nonlinearity_probe(cfg, 1.12, amps, 2.5, opt);
        INFO("relative residual " << probe.relative_residual);
        CHECK(probe.nonlinear);
    }
}

TEST_CASE("echo-state margin flags integrator-mode configurations", "[backends]") {
    SurrogateParams p;
    p.leak_gamma = 1.0;
    p.feedback_gain_max = 0.0;
    CHECK(p.echo_state_margin() <= 0.0);
    p.leak_gamma = 0.9;
    p.feedback_gain_max = 0.05;
    CHECK(p.echo_state_margin() > 0.0);
}

TEST_CASE("backend config validation rejects bad parameters", "[backends]") {
    SurrogateConfig s;
    s.params.leak_gamma = 0.0;
    CHECK_THROWS_AS(backend_reset(s, 0.0, RngStream::derive(1, 0)), ConfigError);
    s.params.leak_gamma = 1.5;
    CHECK_THROWS_AS(backend_reset(s, 0.0, RngStream::derive(1, 0)), ConfigError);

    MicromagneticConfig m;
    m.params.dt = 0.0;
    CHECK_THROWS_AS(backend_reset(m, 0.0, RngStream::derive(1, 0)), ConfigError);
}
