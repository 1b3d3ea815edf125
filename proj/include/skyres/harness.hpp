#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "skyres/backend.hpp"
#include "skyres/encoding.hpp"
#include "skyres/errors.hpp"

namespace skyres {

struct SubsectionSpec {
    double h_const_oe = 0.0;
    std::optional<double> amplitude_override_oe;
    BackendConfig backend;
    std::string id;
};

/// K sampling instants x N subsections (plus optional trailing bias column
/// of ones).
struct FeatureMatrix {
    Eigen::MatrixXd values;
    std::vector<double> sample_times;
    std::vector<std::string> subsection_ids;
    bool includes_bias = false;

    long n_samples() const { return values.rows(); }
    long n_features() const { return values.cols(); }
};

struct RunManifest {
    std::uint64_t master_seed = 0;
    double sample_rate_hz = 0.0;
    int workers = 0;
    bool include_bias = true;
    std::vector<std::string> backend_kinds;
    std::string config_hash;
    std::string software_version;
    double wall_seconds = 0.0;
};

struct RunOptions {
    std::uint64_t master_seed = 0;
    int workers = 0; // 0 = hardware concurrency
    bool include_bias = true;
    /// Protocol-time cadence for texture snapshots (micromagnetic
    /// subsections only); 0 disables. The observer may be called from
    /// worker threads, one subsection per thread.
    double snapshot_every_s = 0.0;
    std::function<void(int subsection, double t, const SpinLattice&)> snapshot_observer;
};

namespace detail {

inline int sampling_stride(const FieldProtocol& protocol, double sample_rate_hz) {
    const double ratio = protocol.drive_rate_hz() / sample_rate_hz;
    const double rounded = std::round(ratio);
    if (!(sample_rate_hz > 0) || std::abs(ratio - rounded) > 1e-9 || rounded < 1.0)
        throw ConfigError("drive rate must be an integer multiple of the sample rate");
    return static_cast<int>(rounded);
}

} // namespace detail

/// Drive one subsection through the protocol and sample its voltage on the
/// t_k = k / sample_rate grid (k = 1..K; the drive grid is required to be
/// an integer refinement, so reads land exactly on drive steps).
inline std::pair<std::vector<double>, std::vector<double>> run_subsection(
    const SubsectionSpec& spec, const FieldProtocol& protocol, double sample_rate_hz,
    RngStream stream, int subsection_index = 0,
    const RunOptions* opts = nullptr) {
    protocol.validate();
    const int stride = detail::sampling_stride(protocol, sample_rate_hz);
    double scale = 1.0;
    if (spec.amplitude_override_oe) {
        if (!(protocol.amplitude_ref_oe > 0))
            throw ConfigError("protocol amplitude_ref must be > 0 to apply overrides");
        scale = *spec.amplitude_override_oe / protocol.amplitude_ref_oe;
    }

    BackendState state = backend_reset(spec.backend, spec.h_const_oe, stream);

    const bool snapshots = opts && opts->snapshot_every_s > 0.0 && opts->snapshot_observer &&
                           std::holds_alternative<MicromagneticState>(state);
    int snap_stride = 0;
    if (snapshots) {
        snap_stride = std::max(
            1, static_cast<int>(std::lround(opts->snapshot_every_s / protocol.spacing_s)));
    }

    std::vector<double> column, times;
    column.reserve(protocol.size() / stride);
    times.reserve(protocol.size() / stride);
    for (size_t j = 0; j < protocol.size(); ++j) {
        backend_advance(state, spec.h_const_oe + scale * protocol.h_ac_oe[j],
                        protocol.spacing_s);
        const auto k = j + 1;
        if (snapshots && k % static_cast<size_t>(snap_stride) == 0)
            opts->snapshot_observer(subsection_index, k * protocol.spacing_s,
                                    std::get<MicromagneticState>(state).lattice);
        if (k % static_cast<size_t>(stride) == 0) {
            column.push_back(read_voltage(state));
            times.push_back(static_cast<double>(k / stride) / sample_rate_hz);
        }
    }
    return {std::move(column), std::move(times)};
}

/// Run every subsection over the same protocol (in parallel when asked)
/// and assemble the feature matrix. Per-subsection RNG streams are keyed
/// by (master_seed, subsection index), so the result is bit-identical for
/// any worker count.
inline FeatureMatrix run_reservoir(const std::vector<SubsectionSpec>& specs,
                                   const FieldProtocol& protocol, double sample_rate_hz,
                                   const RunOptions& opts = {}) {
    if (specs.empty()) throw ConfigError("need at least one subsection");
    protocol.validate();

    const int n = static_cast<int>(specs.size());
    std::vector<std::vector<double>> columns(n);
    std::vector<std::string> errors(n);

    int workers = opts.workers > 0 ? opts.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, n));

    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                columns[i] = run_subsection(specs[i], protocol, sample_rate_hz,
                                            RngStream::derive(opts.master_seed, i), i, &opts)
                                 .first;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::string failure;
    for (int i = 0; i < n; ++i)
        if (!errors[i].empty())
            failure += (failure.empty() ? "" : "; ") +
                       (specs[i].id.empty() ? "subsection " + std::to_string(i) : specs[i].id) +
                       ": " + errors[i];
    if (!failure.empty()) throw Error("reservoir run failed: " + failure);

    const long k = static_cast<long>(columns[0].size());
    if (k == 0) throw Error("protocol shorter than one sampling interval");

    FeatureMatrix fm;
    fm.includes_bias = opts.include_bias;
    fm.values.resize(k, n + (opts.include_bias ? 1 : 0));
    fm.sample_times.reserve(k);
    for (long i = 1; i <= k; ++i)
        fm.sample_times.push_back(static_cast<double>(i) / sample_rate_hz);
    for (int i = 0; i < n; ++i) {
        if (static_cast<long>(columns[i].size()) != k)
            throw Error("subsection column length mismatch");
        for (long r = 0; r < k; ++r) fm.values(r, i) = columns[i][r];
        fm.subsection_ids.push_back(specs[i].id.empty() ? "s" + std::to_string(i)
                                                        : specs[i].id);
    }
    if (opts.include_bias) {
        fm.values.col(n).setOnes();
        fm.subsection_ids.push_back("bias");
    }
    if (!fm.values.allFinite()) throw Error("feature matrix contains non-finite values");
    return fm;
}

} // namespace skyres
