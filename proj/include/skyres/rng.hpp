#pragma once

#include <cmath>
#include <cstdint>

namespace skyres {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

/// Counter-based random stream: the n-th draw is a pure function of
/// (key, n), so any consumer that indexes draws by a stable counter
/// gets identical values regardless of thread scheduling.
struct RngStream {
    std::uint64_t key = 0;

    static RngStream derive(std::uint64_t master_seed, std::uint64_t stream_index) {
        std::uint64_t k = detail::mix64(master_seed + detail::kGolden * (stream_index + 1));
        return RngStream{detail::mix64(k ^ 0xD1B54A32D192ED03ull)};
    }

    std::uint64_t bits_at(std::uint64_t pos) const {
        return detail::mix64(key + detail::kGolden * (pos + 1));
    }

    /// Uniform double strictly inside (0, 1).
    double uniform_at(std::uint64_t pos) const {
        return (static_cast<double>(bits_at(pos) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Three standard normals from four uniforms (Box-Muller), addressed
    /// by a single block index so noise is schedule-independent.
    void gauss3_at(std::uint64_t block, double out[3]) const {
        const std::uint64_t p = block * 4;
        const double u0 = uniform_at(p), u1 = uniform_at(p + 1);
        const double u2 = uniform_at(p + 2), u3 = uniform_at(p + 3);
        const double r0 = std::sqrt(-2.0 * std::log(u0));
        const double r1 = std::sqrt(-2.0 * std::log(u2));
        const double a0 = 2.0 * M_PI * u1;
        const double a1 = 2.0 * M_PI * u3;
        out[0] = r0 * std::cos(a0);
        out[1] = r0 * std::sin(a0);
        out[2] = r1 * std::cos(a1);
    }
};

/// Sequential cursor over a stream, for consumers that just want the
/// usual draw-after-draw interface (splits, texture seeding, waveform
/// segment choices).
struct RngCursor {
    RngStream stream;
    std::uint64_t pos = 0;

    explicit RngCursor(RngStream s) : stream(s) {}
    RngCursor(std::uint64_t master_seed, std::uint64_t stream_index)
        : stream(RngStream::derive(master_seed, stream_index)) {}

    std::uint64_t bits() { return stream.bits_at(pos++); }
    double uniform() { return stream.uniform_at(pos++); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return bits() % n; }

    double gauss() {
        const double u0 = uniform(), u1 = uniform();
        return std::sqrt(-2.0 * std::log(u0)) * std::cos(2.0 * M_PI * u1);
    }
};

} // namespace skyres
