#include "bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "error.hpp"
#include "image_io.hpp"
#include "rng.hpp"

namespace radsynth {

namespace {

QuantizedImage noise_image(std::int64_t size, std::uint32_t g, std::uint64_t seed) {
    QuantizedImage img;
    img.height = size;
    img.width = size;
    img.g = g;
    img.levels.resize(static_cast<std::size_t>(size * size));
    Rng rng(seed);
    for (auto& l : img.levels) l = static_cast<std::uint16_t>(rng.next_below(g));
    return img;
}

}  // namespace

std::vector<BenchRow> bench_entropy_maps(const std::vector<std::int64_t>& sizes,
                                         const GlcmParams& params,
                                         const std::vector<std::string>& strategies,
                                         std::uint64_t seed, int threads) {
    validate(params);
    if (sizes.empty() || strategies.empty())
        throw Error(ErrorKind::invalid_argument, "bench needs at least one size and one strategy");
    for (const auto& s : strategies)
        if (s != "naive" && s != "incremental")
            throw Error(ErrorKind::invalid_argument,
                        "unknown strategy '" + s + "' (expected naive or incremental)");
    for (std::int64_t size : sizes)
        if (size < params.window)
            throw Error(ErrorKind::invalid_argument, "bench image smaller than the window");

    std::vector<BenchRow> rows;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const std::int64_t size = sizes[si];
        const QuantizedImage img = noise_image(size, params.g, derive_seed(seed, si));
        double naive_seconds = std::numeric_limits<double>::quiet_NaN();
        std::vector<FeatureMap> maps;
        std::vector<std::size_t> row_at;
        for (const auto& strat : strategies) {
            const auto t0 = std::chrono::steady_clock::now();
            FeatureMap map = strat == "naive" ? entropy_map_naive(img, params, threads)
                                              : entropy_map_incremental(img, params, threads);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (strat == "naive") naive_seconds = secs;
            BenchRow row;
            row.strategy = strat;
            row.height = size;
            row.width = size;
            row.g = params.g;
            row.window = params.window;
            row.seconds = secs;
            row.pixels_per_sec = static_cast<double>(size * size) / (secs > 0.0 ? secs : 1e-9);
            row_at.push_back(rows.size());
            rows.push_back(row);
            maps.push_back(std::move(map));
        }
        for (std::size_t i = 0; i < row_at.size(); ++i)
            rows[row_at[i]].speedup_vs_naive = naive_seconds / rows[row_at[i]].seconds;
        // the strategies must agree on the answer, not just be fast
        for (std::size_t i = 1; i < maps.size(); ++i)
            for (std::size_t p = 0; p < maps[0].values.size(); ++p)
                if (std::fabs(maps[i].values[p] - maps[0].values[p]) > 1e-9)
                    throw Error(ErrorKind::domain,
                                "strategies disagree at size " + std::to_string(size));
    }
    return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
    std::string out = "strategy,height,width,g,window,seconds,pixels_per_sec,speedup_vs_naive\n";
    char line[200];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof(line), "%s,%lld,%lld,%u,%u,%.6f,%.1f,%.3f\n",
                      r.strategy.c_str(), static_cast<long long>(r.height),
                      static_cast<long long>(r.width), r.g, r.window, r.seconds,
                      r.pixels_per_sec, r.speedup_vs_naive);
        out += line;
    }
    atomic_write_file(path, out);
}

}  // namespace radsynth
