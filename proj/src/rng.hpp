#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace radsynth {

// All randomness in the project flows through this generator so that any
// run is reproducible from a single 64-bit seed, independent of platform
// or standard-library version.
//
// The stream is splitmix64: the state advances by the 64-bit golden-ratio
// constant and each output is scrambled by the finalizer below.

constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

// splitmix64 output scrambler.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed for sub-stream `index` of a parent seed. Equals the splitmix64
// output taken index+1 steps from `seed`, so sibling streams never overlap
// the parent's own outputs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * kGolden64);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden64;
        return mix64(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n). Unbiased enough for any n that fits in 53 bits:
    // takes the high 64 bits of a 128-bit product.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller. Consumes two uniforms per value; the
    // sine branch is discarded to keep the draw count per call fixed.
    double next_normal() {
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace radsynth
