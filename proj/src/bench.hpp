#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glcm.hpp"

namespace radsynth {

struct BenchRow {
    std::string strategy;
    std::int64_t height = 0;
    std::int64_t width = 0;
    std::uint32_t g = 0;
    std::uint32_t window = 0;
    double seconds = 0.0;
    double pixels_per_sec = 0.0;
    double speedup_vs_naive = 0.0;  // NaN when naive was not benchmarked at this size
};

// Times each map strategy on seeded uniform-noise images, one row per
// (size, strategy). Strategies: "naive", "incremental". Correctness is
// asserted as it goes: on every size the strategies' maps must agree to
// 1e-9 per pixel.
std::vector<BenchRow> bench_entropy_maps(const std::vector<std::int64_t>& sizes,
                                         const GlcmParams& params,
                                         const std::vector<std::string>& strategies,
                                         std::uint64_t seed, int threads = 0);

// bench CSV: strategy,height,width,g,window,seconds,pixels_per_sec,speedup_vs_naive
void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path);

}  // namespace radsynth
