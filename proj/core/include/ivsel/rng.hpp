#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ivsel {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for replicate `index` of a study started from `base_seed`.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

/// A single random stream: 64-bit Mersenne Twister for raw bits, with uniform
/// and normal variates from fixed transforms. A seed gives the same draws on
/// any standard library.
class Rng {
public:
    static constexpr std::string_view algorithm = "mt19937_64+u53+marsaglia-polar";

    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;

    /// Uniform integer in [0, bound), bound > 0.
    std::uint64_t uniform_index(std::uint64_t bound) noexcept;

    double normal() noexcept;
    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

    /// Child stream with a seed derived from this stream's seed and `stream_id`.
    Rng split(std::uint64_t stream_id) const noexcept;

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ivsel
