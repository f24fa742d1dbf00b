#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace oscproc {

/// Counter-splittable random stream (splitmix64).
///
/// Streams are derived by hashing (seed, tag, counters) so that any
/// (time, particle) pair owns a private generator. Results are therefore
/// identical whether particles are processed serially or in parallel, and
/// independent of resampling history.
class RngStream {
public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform draw in (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Gamma(shape, scale) via Marsaglia-Tsang; shape boost for shape < 1.
    double gamma(double shape, double scale) {
        if (!(shape > 0.0) || !(scale > 0.0))
            throw std::invalid_argument("gamma: shape and scale must be positive");
        if (shape < 1.0) {
            double u = uniform_pos();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

private:
    std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
} // namespace detail

/// Derive a private stream from a master seed and up to three counters.
inline RngStream derive_stream(std::uint64_t seed, std::uint64_t tag,
                               std::uint64_t c1 = 0, std::uint64_t c2 = 0) {
    std::uint64_t h = detail::mix64(seed ^ 0xA0761D6478BD642Full);
    h = detail::mix64(h ^ tag);
    h = detail::mix64(h ^ c1);
    h = detail::mix64(h ^ c2);
    return RngStream(h);
}

/// Stream tags, one per consumer of randomness.
namespace stream_tag {
inline constexpr std::uint64_t sim = 0x01;
inline constexpr std::uint64_t cloud_init = 0x02;
inline constexpr std::uint64_t proposal = 0x03;
inline constexpr std::uint64_t resample = 0x04;
} // namespace stream_tag

} // namespace oscproc
