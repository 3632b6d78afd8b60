#include "fsel/rng.hpp"

#include <cmath>
#include <numbers>

namespace fsel {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t substream(std::uint64_t root, std::string_view name) noexcept {
    // FNV-1a over the name, then mixed with the root.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(root) ^ h);
}

std::uint64_t substream(std::uint64_t root, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(root ^ 0x5851f42d4c957f2dULL) + splitmix64(index));
}

CounterRng::result_type CounterRng::at(std::uint64_t index) const noexcept {
    return splitmix64(splitmix64(seed_) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double CounterRng::uniform_at(std::uint64_t index) const noexcept {
    return static_cast<double>(at(index) >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
    if (bound <= 1) {
        return 0;
    }
    // Reject the incomplete top bucket to avoid modulo bias.
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t v = (*this)();
    while (v >= limit) {
        v = (*this)();
    }
    return v % bound;
}

double CounterRng::normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace fsel
