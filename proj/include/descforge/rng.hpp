#pragma once

#include "descforge/common.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace descforge {

// Finalizer from the splitmix64 generator; whitens derived seeds so that
// nearby stream ids do not yield correlated engine states.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Stream derivation used everywhere randomness fans out (per-run, per-iteration,
// per-replicate): independent of execution order, so any thread count replays
// the exact same draws.
inline std::uint64_t derived_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ index);
}

// mt19937_64 with hand-rolled output transforms. The engine's output sequence
// is fully specified by the standard; the std::* distributions are not, so the
// uniform/normal/shuffle transforms live here to keep results reproducible
// across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // (0, 1], safe as a log() argument
    double uniform01_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // [0, n) via multiply-shift; bias is O(n / 2^64)
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Box-Muller, two engine draws per deviate
    double normal() {
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Fisher-Yates
    void shuffle(std::vector<Index>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// k of {0..m-1} without replacement (partial Fisher-Yates), returned sorted so
// downstream row gathers are order-stable no matter how the draw went.
inline std::vector<Index> sample_without_replacement(Index m, Index k, Rng& rng) {
    if (k < 0 || k > m) throw config_error("sample_without_replacement: k out of range");
    std::vector<Index> pool = iota_indices(m);
    for (Index i = 0; i < k; ++i) {
        const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace descforge
