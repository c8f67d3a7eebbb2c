#include "levyou/rng.hpp"

#include <cmath>

namespace levyou {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

RngStream RngStream::fork(std::uint64_t index) const {
    return RngStream(mix64(seed_ ^ mix64(index + 0x632BE59BD9B4E019ULL)));
}

double RngStream::uniform() {
    // 53 random bits, shifted off zero.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::exponential() { return -std::log(uniform()); }

std::uint64_t RngStream::poisson(double mean) {
    if (mean <= 0.0) {
        return 0;
    }
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(engine_);
}

}  // namespace levyou
