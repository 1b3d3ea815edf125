#pragma once
#include <algorithm>

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "skyres/errors.hpp"
#include "skyres/rng.hpp"

namespace skyres {

/// Time series of the applied AC field, uniformly sampled from t = 0.
struct FieldProtocol {
    std::vector<double> times;
    std::vector<double> h_ac_oe;
    double spacing_s = 0.0;
    /// Amplitude the protocol was generated with; per-subsection amplitude
    /// overrides rescale relative to this.
    double amplitude_ref_oe = 1.0;

    size_t size() const { return times.size(); }
    double drive_rate_hz() const { return 1.0 / spacing_s; }
    double duration_s() const { return spacing_s * static_cast<double>(times.size()); }

    void validate() const {
        if (times.empty()) throw ConfigError("protocol is empty");
        if (times.size() != h_ac_oe.size()) throw ConfigError("protocol arrays mismatch");
        if (times.front() != 0.0) throw ConfigError("protocol must start at t = 0");
        if (!(spacing_s > 0)) throw ConfigError("protocol spacing must be > 0");
        for (size_t i = 0; i < times.size(); ++i) {
            if (!std::isfinite(h_ac_oe[i])) throw ConfigError("protocol contains non-finite h");
            if (i > 0 && !(times[i] > times[i - 1]))
                throw ConfigError("protocol times must be strictly increasing");
        }
    }
};

enum class SegmentKind { Sine, Square };

struct WaveformSpec {
    std::vector<SegmentKind> segments;
    double amplitude_oe = 24.0;
    double period_s = 1.0;
    double drive_rate_hz = 100.0;
    std::uint64_t seed = 0; // records which seed drew the segment list

    void validate() const {
        if (segments.empty()) throw ConfigError("waveform needs at least one segment");
        if (!(amplitude_oe > 0)) throw ConfigError("amplitude must be > 0");
        if (!(period_s > 0)) throw ConfigError("period must be > 0");
        const double spp = period_s * drive_rate_hz;
        if (std::abs(spp - std::round(spp)) > 1e-9 || std::lround(spp) < 2)
            throw ConfigError("period * drive_rate must be an integer >= 2");
        const bool any_square =
            std::find(segments.begin(), segments.end(), SegmentKind::Square) != segments.end();
        if (any_square && std::lround(spp) % 2 != 0)
            throw ConfigError("square segments need an even number of samples per period");
    }
};

/// Draw a random sine/square segment list.
inline WaveformSpec random_waveform_spec(int n_segments, std::uint64_t seed,
                                         double amplitude_oe = 24.0, double period_s = 1.0,
                                         double drive_rate_hz = 100.0) {
    if (n_segments < 1) throw ConfigError("need at least one segment");
    WaveformSpec spec;
    spec.amplitude_oe = amplitude_oe;
    spec.period_s = period_s;
    spec.drive_rate_hz = drive_rate_hz;
    spec.seed = seed;
    RngCursor rng(seed, 0x3a7e);
    spec.segments.reserve(n_segments);
    for (int i = 0; i < n_segments; ++i)
        spec.segments.push_back(rng.uniform() < 0.5 ? SegmentKind::Sine : SegmentKind::Square);
    return spec;
}

/// Emit the drive samples plus the per-sample +1 (sine) / -1 (square) label.
inline std::pair<FieldProtocol, std::vector<int>> generate_waveform(const WaveformSpec& spec) {
    spec.validate();
    const int spp = static_cast<int>(std::lround(spec.period_s * spec.drive_rate_hz));
    const double dt = 1.0 / spec.drive_rate_hz;
    FieldProtocol proto;
    proto.spacing_s = dt;
    proto.amplitude_ref_oe = spec.amplitude_oe;
    std::vector<int> labels;
    const size_t total = spec.segments.size() * static_cast<size_t>(spp);
    proto.times.reserve(total);
    proto.h_ac_oe.reserve(total);
    labels.reserve(total);
    for (size_t s = 0; s < spec.segments.size(); ++s) {
        const bool sine = spec.segments[s] == SegmentKind::Sine;
        for (int j = 0; j < spp; ++j) {
            const size_t idx = s * spp + j;
            proto.times.push_back(static_cast<double>(idx) * dt);
            if (sine) {
                proto.h_ac_oe.push_back(spec.amplitude_oe *
                                        std::sin(2.0 * M_PI * j / static_cast<double>(spp)));
            } else {
                proto.h_ac_oe.push_back(j < spp / 2 ? spec.amplitude_oe : -spec.amplitude_oe);
            }
            labels.push_back(sine ? +1 : -1);
        }
    }
    return {std::move(proto), std::move(labels)};
}

/// Pick the label seen at each voltage sampling instant (the last drive
/// sample of each sampling window).
inline std::vector<int> subsample_labels(const std::vector<int>& drive_labels, int stride) {
    if (stride < 1 || drive_labels.size() % stride != 0)
        throw ConfigError("label subsampling stride does not divide the drive length");
    std::vector<int> out;
    out.reserve(drive_labels.size() / stride);
    for (size_t k = stride - 1; k < drive_labels.size(); k += stride)
        out.push_back(drive_labels[k]);
    return out;
}

// ---------------------------------------------------------------------------
// MNIST

struct MnistImage {
    std::array<double, 28 * 28> pixels{}; // intensities in [0, 1]
    int label = 0;

    double at(int row, int col) const { return pixels[row * 28 + col]; }
};

enum class FlattenOrder { RowMajor, ColMajor };

struct MnistEncodingOptions {
    int crop_row0 = 3; // rows 3..24 inclusive -> 22
    int crop_col0 = 4; // cols 4..23 inclusive -> 20
    FlattenOrder flatten = FlattenOrder::RowMajor;
};

inline constexpr int kCropRows = 22;
inline constexpr int kCropCols = 20;
inline constexpr int kSamplesPerPoint = 20;

/// Crop to 22x20, flatten to 440 points, and modulate each point onto one
/// 20-sample sine cycle: 8800 drive samples, cycle duration 1/f.
inline FieldProtocol preprocess_mnist(const MnistImage& image, double drive_frequency_hz,
                                      double amplitude_oe,
                                      const MnistEncodingOptions& opt = {}) {
    if (!(drive_frequency_hz > 0)) throw ConfigError("drive frequency must be > 0");
    if (opt.crop_row0 < 0 || opt.crop_row0 + kCropRows > 28 || opt.crop_col0 < 0 ||
        opt.crop_col0 + kCropCols > 28)
        throw ConfigError("crop window out of range");

    std::vector<double> flat;
    flat.reserve(kCropRows * kCropCols);
    if (opt.flatten == FlattenOrder::RowMajor) {
        for (int r = 0; r < kCropRows; ++r)
            for (int c = 0; c < kCropCols; ++c)
                flat.push_back(image.at(opt.crop_row0 + r, opt.crop_col0 + c));
    } else {
        for (int c = 0; c < kCropCols; ++c)
            for (int r = 0; r < kCropRows; ++r)
                flat.push_back(image.at(opt.crop_row0 + r, opt.crop_col0 + c));
    }

    FieldProtocol proto;
    proto.spacing_s = 1.0 / (kSamplesPerPoint * drive_frequency_hz);
    proto.amplitude_ref_oe = amplitude_oe;
    const size_t total = flat.size() * kSamplesPerPoint;
    proto.times.reserve(total);
    proto.h_ac_oe.reserve(total);
    for (size_t p = 0; p < flat.size(); ++p) {
        for (int k = 0; k < kSamplesPerPoint; ++k) {
            const size_t idx = p * kSamplesPerPoint + k;
            proto.times.push_back(static_cast<double>(idx) * proto.spacing_s);
            proto.h_ac_oe.push_back(flat[p] * amplitude_oe *
                                    std::sin(2.0 * M_PI * k / double(kSamplesPerPoint)));
        }
    }
    return proto;
}

} // namespace skyres
