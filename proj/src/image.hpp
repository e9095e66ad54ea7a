#pragma once

#include <cstdint>
#include <vector>

namespace radsynth {

// Real-valued grayscale image, row-major, row 0 at the top.
struct GrayImage {
    std::int64_t height = 0;
    std::int64_t width = 0;
    std::vector<double> pixels;  // height * width intensities

    double at(std::int64_t r, std::int64_t c) const { return pixels[r * width + c]; }
    double& at(std::int64_t r, std::int64_t c) { return pixels[r * width + c]; }
};

// Integer gray-level image with levels in [0, g).
struct QuantizedImage {
    std::int64_t height = 0;
    std::int64_t width = 0;
    std::uint32_t g = 0;  // number of gray levels
    std::vector<std::uint16_t> levels;

    std::uint16_t at(std::int64_t r, std::int64_t c) const { return levels[r * width + c]; }
    std::uint16_t& at(std::int64_t r, std::int64_t c) { return levels[r * width + c]; }
};

// Boolean region-of-interest mask, same grid as the image it annotates.
struct RoiMask {
    std::int64_t height = 0;
    std::int64_t width = 0;
    std::vector<std::uint8_t> flags;  // 0 or 1

    bool at(std::int64_t r, std::int64_t c) const { return flags[r * width + c] != 0; }
    std::int64_t count_true() const;
};

// Flattened stack of W x W level windows, one per extracted center.
struct PatchSet {
    std::uint32_t patch_size = 0;
    std::int64_t count = 0;
    std::vector<std::uint16_t> levels;        // count * patch_size^2, row-major per patch
    std::vector<std::int64_t> center_rows;
    std::vector<std::int64_t> center_cols;
    std::vector<float> targets;               // empty, or one label per patch

    const std::uint16_t* patch(std::int64_t i) const {
        return levels.data() + i * patch_size * patch_size;
    }
};

void validate(const GrayImage& img);
void validate(const QuantizedImage& img);

// Linear min-max binning into g levels:
//   level = min(g-1, floor((v - vmin) / (vmax - vmin) * g))
// A constant image maps to all zeros.
QuantizedImage quantize(const GrayImage& img, std::uint32_t g);

// Grow the image by `margin` on every side, replicating edge pixels.
QuantizedImage replicate_pad(const QuantizedImage& img, std::int64_t margin);

// One patch per pixel: the patch_size x patch_size window centered there in
// the replicate-padded image. When `labels` is given, each patch carries the
// label value at its center.
PatchSet extract_patches(const QuantizedImage& img, std::uint32_t patch_size,
                         const std::vector<double>* labels = nullptr);

}  // namespace radsynth
