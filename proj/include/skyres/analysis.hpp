#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "skyres/encoding.hpp"
#include "skyres/energy.hpp"
#include "skyres/errors.hpp"
#include "skyres/harness.hpp"
#include "skyres/lattice.hpp"

namespace skyres {

struct TextureReport {
    int skyrmion_count = 0;
    double mean_mz = 0.0;
    double topological_charge = 0.0;
    std::vector<double> particle_sizes_um2; // every reversed-region component, unfiltered
};

/// Lattice topological charge: sum of signed spherical triangle areas over
/// a fixed triangulation of the grid (two triangles per plaquette),
/// divided by 4 pi.
inline double topological_charge(const SpinLattice& lat) {
    auto solid_angle = [](const Vec3& a, const Vec3& b, const Vec3& c) {
        const double num = dot(a, cross(b, c));
        const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
        return 2.0 * std::atan2(num, den);
    };
    double omega = 0.0;
    for (int y = 0; y + 1 < lat.ny; ++y) {
        for (int x = 0; x + 1 < lat.nx; ++x) {
            const Vec3& m00 = lat.at(x, y);
            const Vec3& m10 = lat.at(x + 1, y);
            const Vec3& m11 = lat.at(x + 1, y + 1);
            const Vec3& m01 = lat.at(x, y + 1);
            omega += solid_angle(m00, m10, m11);
            omega += solid_angle(m00, m11, m01);
        }
    }
    return omega / (4.0 * M_PI);
}

/// Binarize on m_z below threshold, label 4-connected components, and
/// classify each by area: below `max_size_um2` counts as a skyrmion,
/// anything larger is a domain.
inline TextureReport count_skyrmions(const SpinLattice& lat, double mz_threshold = 0.0,
                                     double max_size_um2 = 36.0,
                                     Boundary bc = Boundary::Open) {
    const int nx = lat.nx, ny = lat.ny;
    const bool periodic = bc == Boundary::Periodic;
    std::vector<std::uint8_t> mask(static_cast<size_t>(nx) * ny), seen(mask.size(), 0);
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = lat.spins[i].z < mz_threshold ? 1 : 0;

    TextureReport rep;
    rep.mean_mz = lat.mean_mz();
    rep.topological_charge = topological_charge(lat);

    const double cell_area = lat.cell_size_um * lat.cell_size_um;
    std::queue<int> frontier;
    for (int start = 0; start < nx * ny; ++start) {
        if (!mask[start] || seen[start]) continue;
        seen[start] = 1;
        frontier.push(start);
        long cells = 0;
        while (!frontier.empty()) {
            const int s = frontier.front();
            frontier.pop();
            ++cells;
            const int x = s % nx, y = s / nx;
            const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                int xn = x + dx[k], yn = y + dy[k];
                if (periodic) {
                    xn = detail::wrap(xn, nx);
                    yn = detail::wrap(yn, ny);
                } else if (xn < 0 || xn >= nx || yn < 0 || yn >= ny) {
                    continue;
                }
                const int sn = yn * nx + xn;
                if (mask[sn] && !seen[sn]) {
                    seen[sn] = 1;
                    frontier.push(sn);
                }
            }
        }
        const double area = cells * cell_area;
        rep.particle_sizes_um2.push_back(area);
        if (area < max_size_um2) ++rep.skyrmion_count;
    }
    return rep;
}

/// Time average of per-snapshot skyrmion counts divided by the film area.
inline double mean_skyrmion_density(const std::vector<TextureReport>& snapshots,
                                    double area_um2) {
    if (snapshots.empty()) throw DegenerateInput("mean_skyrmion_density: no snapshots");
    double sum = 0.0;
    for (const auto& s : snapshots) sum += s.skyrmion_count;
    return sum / snapshots.size() / area_um2;
}

// ---------------------------------------------------------------------------
// response probes
//
// Templated over the backend config so the same probe code runs against the
// micromagnetic lattice, the surrogate, the runtime variant, or a test mock
// (anything with backend_reset / backend_advance / read_voltage).

struct ProbeOptions {
    double period_s = 1.0;
    double drive_rate_hz = 100.0;
    std::uint64_t master_seed = 1;
    std::uint64_t alt_seed = 2; // second thermal seed for the noise floor
};

/// Voltage at every drive step of the protocol.
template <class Config>
std::vector<double> trace_voltage(const Config& backend, double h_const_oe,
                                  const FieldProtocol& protocol, RngStream stream,
                                  double* v_initial = nullptr) {
    auto state = backend_reset(backend, h_const_oe, stream);
    if (v_initial) *v_initial = read_voltage(state);
    std::vector<double> v;
    v.reserve(protocol.size());
    for (size_t j = 0; j < protocol.size(); ++j) {
        backend_advance(state, h_const_oe + protocol.h_ac_oe[j], protocol.spacing_s);
        v.push_back(read_voltage(state));
    }
    return v;
}

namespace detail {

/// RMS difference between two windows, normalized by the centered RMS of
/// the first.
inline double normalized_rms_difference(const std::vector<double>& a,
                                        const std::vector<double>& b, size_t begin,
                                        size_t end) {
    double mean_a = 0;
    for (size_t k = begin; k < end; ++k) mean_a += a[k];
    mean_a /= static_cast<double>(end - begin);
    double diff2 = 0, sig2 = 0;
    for (size_t k = begin; k < end; ++k) {
        diff2 += (a[k] - b[k]) * (a[k] - b[k]);
        sig2 += (a[k] - mean_a) * (a[k] - mean_a);
    }
    return std::sqrt(diff2) / std::max(std::sqrt(sig2), 1e-300);
}

inline FieldProtocol two_segment_protocol(SegmentKind first, SegmentKind second,
                                          double amplitude_oe, const ProbeOptions& opt) {
    WaveformSpec spec;
    spec.segments = {first, second};
    spec.amplitude_oe = amplitude_oe;
    spec.period_s = opt.period_s;
    spec.drive_rate_hz = opt.drive_rate_hz;
    return generate_waveform(spec).first;
}

} // namespace detail

struct MemoryProbeResult {
    std::vector<double> sine_sine;
    std::vector<double> square_sine;
    std::vector<double> sine_sine_alt; // same drive, different thermal seed
    double divergence = 0.0;           // second-cycle nrmsd(sine_sine, square_sine)
    double noise_floor = 0.0;          // second-cycle nrmsd(sine_sine, sine_sine_alt)
};

/// Drive sine+sine and square+sine from identical resets. The second cycle
/// of the two inputs is the same; any difference in the second-cycle output
/// is memory of the first cycle.
template <class Config>
MemoryProbeResult memory_probe(const Config& backend, double h_const_oe, double amplitude_oe,
                               const ProbeOptions& opt = {}) {
    const FieldProtocol sine_sine =
        detail::two_segment_protocol(SegmentKind::Sine, SegmentKind::Sine, amplitude_oe, opt);
    const FieldProtocol square_sine =
        detail::two_segment_protocol(SegmentKind::Square, SegmentKind::Sine, amplitude_oe, opt);

    MemoryProbeResult r;
    r.sine_sine = trace_voltage(backend, h_const_oe, sine_sine,
                                RngStream::derive(opt.master_seed, 0));
    r.square_sine = trace_voltage(backend, h_const_oe, square_sine,
                                  RngStream::derive(opt.master_seed, 0));
    r.sine_sine_alt = trace_voltage(backend, h_const_oe, sine_sine,
                                    RngStream::derive(opt.alt_seed, 0));

    const size_t n = r.sine_sine.size();
    r.divergence = detail::normalized_rms_difference(r.sine_sine, r.square_sine, n / 2, n);
    r.noise_floor = detail::normalized_rms_difference(r.sine_sine, r.sine_sine_alt, n / 2, n);
    return r;
}

struct NonlinearityProbeResult {
    std::vector<double> amplitudes_oe;
    std::vector<double> delta_v; // V(probe_time) - V(rest), per amplitude
    double linear_coefficient = 0.0;
    double relative_residual = 0.0; // of the best proportional fit
    double r_squared = 0.0;         // of the best affine fit
    bool nonlinear = false;
    bool sign_change = false;
};

/// Drive two sine cycles per amplitude and record the response at
/// `probe_time_s`. The default period (1.25 s) puts two full cycles in
/// exactly 2.5 s so the probe instant is the last drive step.
template <class Config>
NonlinearityProbeResult nonlinearity_probe(const Config& backend, double h_const_oe,
                                           const std::vector<double>& amplitudes_oe,
                                           double probe_time_s = 2.5, ProbeOptions opt = {
                                               /*period_s=*/1.25, /*drive_rate_hz=*/100.0}) {
    if (amplitudes_oe.size() < 5)
        throw ConfigError("nonlinearity_probe needs at least 5 amplitudes");
    NonlinearityProbeResult r;
    r.amplitudes_oe = amplitudes_oe;
    const size_t probe_idx =
        static_cast<size_t>(std::lround(probe_time_s * opt.drive_rate_hz)) - 1;
    for (double amp : amplitudes_oe) {
        const FieldProtocol proto =
            detail::two_segment_protocol(SegmentKind::Sine, SegmentKind::Sine, amp, opt);
        if (probe_idx >= proto.size())
            throw ConfigError("probe_time exceeds the two-cycle drive window");
        double v0 = 0.0;
        const auto v = trace_voltage(backend, h_const_oe, proto,
                                     RngStream::derive(opt.master_seed, 0), &v0);
        r.delta_v.push_back(v[probe_idx] - v0);
    }

    // proportional fit dV = c * A
    double saa = 0, sav = 0;
    for (size_t i = 0; i < r.delta_v.size(); ++i) {
        saa += amplitudes_oe[i] * amplitudes_oe[i];
        sav += amplitudes_oe[i] * r.delta_v[i];
    }
    r.linear_coefficient = saa > 0 ? sav / saa : 0.0;
    double res2 = 0, tot2 = 0;
    for (size_t i = 0; i < r.delta_v.size(); ++i) {
        const double e = r.delta_v[i] - r.linear_coefficient * amplitudes_oe[i];
        res2 += e * e;
        tot2 += r.delta_v[i] * r.delta_v[i];
    }
    r.relative_residual = std::sqrt(res2) / std::max(std::sqrt(tot2), 1e-300);
    r.nonlinear = r.relative_residual > 0.05;

    // affine fit for the R^2 diagnostic
    {
        const size_t n = r.delta_v.size();
        double ma = 0, mv = 0;
        for (size_t i = 0; i < n; ++i) { ma += amplitudes_oe[i]; mv += r.delta_v[i]; }
        ma /= n;
        mv /= n;
        double sxx = 0, sxy = 0, syy = 0;
        for (size_t i = 0; i < n; ++i) {
            sxx += (amplitudes_oe[i] - ma) * (amplitudes_oe[i] - ma);
            sxy += (amplitudes_oe[i] - ma) * (r.delta_v[i] - mv);
            syy += (r.delta_v[i] - mv) * (r.delta_v[i] - mv);
        }
        r.r_squared = syy > 0 && sxx > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    }

    bool pos = false, neg = false;
    for (double dv : r.delta_v) {
        if (dv > 0) pos = true;
        if (dv < 0) neg = true;
    }
    r.sign_change = pos && neg;
    return r;
}

struct FadingProbeResult {
    std::vector<double> times;
    std::vector<double> v;
    double v_initial = 0.0;
    double peak_deviation = 0.0;
    double drive_end_s = 0.0;
    double horizon_s = -1.0; // time after drive off to fall below 1% of peak
    bool reached = false;
};

struct FadingProbeOptions {
    double amplitude_oe = 24.0;
    double period_s = 1.0;
    double drive_rate_hz = 100.0;
    double budget_s = 10.0;          // relaxation window after the drive
    double smooth_window_s = 0.0;    // moving-average window for the check
    std::uint64_t master_seed = 1;
};

/// Two sine cycles, then zero drive; report when |V - V_initial| falls
/// below 1% of its peak, or that it never does within the budget.
template <class Config>
FadingProbeResult fading_probe(const Config& backend, double h_const_oe,
                               const FadingProbeOptions& opt = {}) {
    ProbeOptions pov;
    pov.period_s = opt.period_s;
    pov.drive_rate_hz = opt.drive_rate_hz;
    FieldProtocol proto = detail::two_segment_protocol(SegmentKind::Sine, SegmentKind::Sine,
                                                       opt.amplitude_oe, pov);
    const size_t drive_n = proto.size();
    const size_t relax_n = static_cast<size_t>(std::lround(opt.budget_s * opt.drive_rate_hz));
    for (size_t j = 0; j < relax_n; ++j) {
        proto.times.push_back(proto.times.back() + proto.spacing_s);
        proto.h_ac_oe.push_back(0.0);
    }

    FadingProbeResult r;
    r.drive_end_s = drive_n * proto.spacing_s;
    r.v = trace_voltage(backend, h_const_oe, proto, RngStream::derive(opt.master_seed, 0),
                        &r.v_initial);
    r.times.reserve(r.v.size());
    for (size_t j = 0; j < r.v.size(); ++j)
        r.times.push_back(static_cast<double>(j + 1) * proto.spacing_s);

    std::vector<double> dev(r.v.size());
    for (size_t j = 0; j < r.v.size(); ++j) dev[j] = std::abs(r.v[j] - r.v_initial);

    // optional smoothing for thermal traces
    std::vector<double> smooth = dev;
    const int w = static_cast<int>(std::lround(opt.smooth_window_s * opt.drive_rate_hz));
    if (w > 1) {
        for (size_t j = 0; j < dev.size(); ++j) {
            const size_t lo = j >= static_cast<size_t>(w / 2) ? j - w / 2 : 0;
            const size_t hi = std::min(dev.size(), j + static_cast<size_t>(w - w / 2));
            double s = 0;
            for (size_t k = lo; k < hi; ++k) s += dev[k];
            smooth[j] = s / static_cast<double>(hi - lo);
        }
    }

    for (size_t j = 0; j < drive_n; ++j) r.peak_deviation = std::max(r.peak_deviation, dev[j]);
    const double target = 0.01 * r.peak_deviation;
    for (size_t j = drive_n; j < smooth.size(); ++j) {
        if (smooth[j] < target) {
            r.horizon_s = r.times[j] - r.drive_end_s;
            r.reached = true;
            break;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// feature-matrix diagnostics

struct DimensionalityReport {
    std::vector<double> singular_values; // descending
    int effective_rank = 0;
    double sv_threshold = 0.01;
};

/// Column-center the features and count singular values above
/// sv_threshold * sigma_1.
inline DimensionalityReport dimensionality_report(const FeatureMatrix& fm,
                                                  double sv_threshold = 0.01) {
    if (fm.values.rows() <= fm.values.cols())
        throw DimensionMismatch("dimensionality_report needs more samples than columns");
    Eigen::MatrixXd centered = fm.values;
    centered.rowwise() -= fm.values.colwise().mean();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    DimensionalityReport rep;
    rep.sv_threshold = sv_threshold;
    rep.singular_values.assign(svd.singularValues().data(),
                               svd.singularValues().data() + svd.singularValues().size());
    const double s1 = rep.singular_values.empty() ? 0.0 : rep.singular_values.front();
    for (double s : rep.singular_values)
        if (s1 > 0 && s > sv_threshold * s1) ++rep.effective_rank;
    return rep;
}

/// (V_i, V_j) pairs for Lissajous-style plots.
inline std::vector<std::pair<double, double>> pair_table(const FeatureMatrix& fm, int i, int j) {
    if (i < 0 || j < 0 || i >= fm.values.cols() || j >= fm.values.cols())
        throw DimensionMismatch("pair_table: column out of range");
    std::vector<std::pair<double, double>> out;
    out.reserve(fm.values.rows());
    for (long r = 0; r < fm.values.rows(); ++r) out.emplace_back(fm.values(r, i), fm.values(r, j));
    return out;
}

struct DriftReport {
    std::vector<double> slopes;            // baseline trend per column, V per second
    std::vector<double> normalized_slopes; // slope / oscillation amplitude
    int window = 0;
};

/// Per-column linear trend of a moving-average baseline, normalized by the
/// residual oscillation amplitude. Edge windows are discarded from the fit.
inline DriftReport drift_probe(const FeatureMatrix& fm, int window = 0) {
    const long k = fm.values.rows();
    if (k < 100) throw DimensionMismatch("drift_probe needs at least 100 samples");
    if (window <= 0) window = static_cast<int>(std::max<long>(5, k / 20));
    if (window % 2 == 0) ++window;
    const long half = window / 2;

    DriftReport rep;
    rep.window = window;
    for (long c = 0; c < fm.values.cols(); ++c) {
        // moving average over the valid interior
        std::vector<double> base;
        std::vector<double> ts;
        for (long r = half; r + half < k; ++r) {
            double s = 0;
            for (long q = r - half; q <= r + half; ++q) s += fm.values(q, c);
            base.push_back(s / window);
            ts.push_back(fm.sample_times[r]);
        }
        double mt = 0, mb = 0;
        for (size_t q = 0; q < base.size(); ++q) { mt += ts[q]; mb += base[q]; }
        mt /= base.size();
        mb /= base.size();
        double sxx = 0, sxy = 0;
        for (size_t q = 0; q < base.size(); ++q) {
            sxx += (ts[q] - mt) * (ts[q] - mt);
            sxy += (ts[q] - mt) * (base[q] - mb);
        }
        const double slope = sxx > 0 ? sxy / sxx : 0.0;

        double amp = 0.0;
        for (long r = half; r + half < k; ++r)
            amp = std::max(amp, std::abs(fm.values(r, c) - base[r - half]));
        rep.slopes.push_back(slope);
        rep.normalized_slopes.push_back(slope / std::max(amp, 1e-300));
    }
    return rep;
}

/// Pearson correlation coefficient.
inline double pearson_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw DimensionMismatch("pearson: size mismatch");
    const size_t n = xs.size();
    if (n < 3) throw DegenerateInput("pearson: need at least 3 points");
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("pearson: a coordinate is constant");
    return sxy / std::sqrt(sxx * syy);
}

/// Correlation between mean skyrmion density and task accuracy across runs.
inline double count_accuracy_correlation(
    const std::vector<std::pair<double, double>>& density_accuracy) {
    std::vector<double> xs, ys;
    for (const auto& [d, a] : density_accuracy) {
        xs.push_back(d);
        ys.push_back(a);
    }
    return pearson_correlation(xs, ys);
}

} // namespace skyres
