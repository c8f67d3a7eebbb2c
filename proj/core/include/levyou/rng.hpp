#pragma once

#include <cstdint>
#include <random>

namespace levyou {

// Seeded random stream. fork(k) derives an independent child stream from
// (seed, k) alone, so run k of a Monte Carlo study sees the same numbers no
// matter which worker executes it.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    RngStream fork(std::uint64_t index) const;

    std::uint64_t seed() const noexcept { return seed_; }

    // Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    double exponential();
    std::uint64_t poisson(double mean);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// SplitMix64 finalizer, used to derive child seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace levyou
