#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace fsel {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent seed for a named consumer ("split", "model",
/// "search") or an indexed one. Changing one consumer's draws never shifts
/// another's.
std::uint64_t substream(std::uint64_t root, std::string_view name) noexcept;
std::uint64_t substream(std::uint64_t root, std::uint64_t index) noexcept;

/// Counter-based generator: the i-th draw is a pure function of (seed, i),
/// so a block of draws can be produced in any order or in parallel.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    /// Raw 64-bit value at an absolute counter position.
    result_type at(std::uint64_t index) const noexcept;
    /// Uniform on [0,1) with 53 random bits, at an absolute counter position.
    double uniform_at(std::uint64_t index) const noexcept;

    result_type operator()() noexcept { return at(counter_++); }
    double uniform() noexcept { return uniform_at(counter_++); }
    double uniform(double lo, double hi) noexcept;
    /// Unbiased integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) noexcept;
    /// Standard normal via Box-Muller.
    double normal() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace fsel
