#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shisha {

// Bad user input: malformed files, unknown names, inconsistent parameters.
// The CLI maps these to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File could not be parsed; message names the offending field or position.
struct ParseError : ConfigError {
    using ConfigError::ConfigError;
};

// uniform integer in [0, n) from a mt19937_64. Hand-rolled so that traces are
// reproducible across standard library implementations (std::uniform_int_distribution
// is not pinned by the standard).
inline std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_u64: n must be > 0");
    const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
    std::uint64_t x = rng();
    while (x > limit) x = rng();
    return x % n;
}

// uniform double in [0, 1)
inline double uniform_real01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// standard normal via Box-Muller (same cross-library reproducibility concern)
inline double normal_sample(std::mt19937_64& rng, double stddev) {
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = uniform_real01(rng);
    return stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Fisher-Yates using uniform_u64
template <typename T>
void shuffle_seeded(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_u64(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Shortest round-trip decimal form, used for every double written to traces
// and reports so that identical runs produce identical bytes.
inline std::string fmt_double(double x) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) throw std::logic_error("fmt_double: to_chars failed");
    return std::string(buf, p);
}

inline double parse_double(std::string_view s) {
    double x = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError("bad floating point literal: '" + std::string(s) + "'");
    return x;
}

}  // namespace shisha
