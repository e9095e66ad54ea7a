#pragma once

#include <cstdint>
#include <vector>

#include "image.hpp"

namespace radsynth {

enum class LogBase { natural, base2 };

// Co-occurrence parameters. `offset` is the (row, col) displacement between
// paired pixels; `symmetric` also counts the mirrored pair.
struct GlcmParams {
    std::uint32_t g = 64;
    std::uint32_t window = 5;
    std::int32_t offset_dr = 0;
    std::int32_t offset_dc = 1;
    bool symmetric = true;
    LogBase log_base = LogBase::natural;
};

void validate(const GlcmParams& params);

// Number of co-occurrence increments in one full window. Constant across
// centers once the image is replicate-padded.
std::uint64_t pairs_per_window(const GlcmParams& params);

struct Glcm {
    std::vector<std::uint32_t> counts;  // g * g, row-major
    std::uint64_t total = 0;
    GlcmParams params;

    std::uint32_t at(std::uint32_t a, std::uint32_t b) const { return counts[a * params.g + b]; }
};

// Per-pixel entropy image. Values are in nats or bits per params.log_base.
struct FeatureMap {
    std::int64_t height = 0;
    std::int64_t width = 0;
    std::vector<double> values;
    GlcmParams params;

    double at(std::int64_t r, std::int64_t c) const { return values[r * width + c]; }
    double& at(std::int64_t r, std::int64_t c) { return values[r * width + c]; }
};

// Build the co-occurrence matrix of one W x W window.
Glcm glcm_from_window(const std::uint16_t* window, const GlcmParams& params);
Glcm glcm_from_window(const std::vector<std::uint16_t>& window, const GlcmParams& params);

// Entropy of a normalized GLCM: -sum over nonzero cells of p*log(p) with
// p = count / total. A zero-total matrix is an error, not zero.
double glcm_entropy(const Glcm& glcm);

// Reference entropy map: for every pixel, rebuild the window GLCM from
// scratch and score it with a full cell scan. O(N^2 (W^2 + G^2)).
FeatureMap entropy_map_naive(const QuantizedImage& img, const GlcmParams& params,
                             int threads = 0);

// Fast path: slides the window one column at a time, updating only the O(W)
// pairs that enter and leave, and keeps S = sum c*log(c) so each entropy is
// log(T) - S/T. Matches the naive map within 1e-9 per pixel.
FeatureMap entropy_map_incremental(const QuantizedImage& img, const GlcmParams& params,
                                   int threads = 0);

}  // namespace radsynth
