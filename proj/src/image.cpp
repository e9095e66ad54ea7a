#include "image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace radsynth {

std::int64_t RoiMask::count_true() const {
    std::int64_t n = 0;
    for (std::uint8_t f : flags) n += (f != 0);
    return n;
}

void validate(const GrayImage& img) {
    if (img.height < 1 || img.width < 1)
        throw Error(ErrorKind::invalid_argument, "image dimensions must be at least 1x1");
    if (img.pixels.size() != static_cast<std::size_t>(img.height * img.width))
        throw Error(ErrorKind::invalid_argument, "pixel buffer does not match image dimensions");
    for (double v : img.pixels)
        if (!std::isfinite(v))
            throw Error(ErrorKind::invalid_argument, "image contains non-finite intensity");
}

void validate(const QuantizedImage& img) {
    if (img.height < 1 || img.width < 1)
        throw Error(ErrorKind::invalid_argument, "image dimensions must be at least 1x1");
    if (img.g < 2 || img.g > 65536)
        throw Error(ErrorKind::invalid_argument, "gray level count must be in [2, 65536]");
    if (img.levels.size() != static_cast<std::size_t>(img.height * img.width))
        throw Error(ErrorKind::invalid_argument, "level buffer does not match image dimensions");
    for (std::uint16_t l : img.levels)
        if (l >= img.g)
            throw Error(ErrorKind::invalid_argument,
                        "level " + std::to_string(l) + " out of range for g=" + std::to_string(img.g));
}

QuantizedImage quantize(const GrayImage& img, std::uint32_t g) {
    validate(img);
    if (g < 2 || g > 65536)
        throw Error(ErrorKind::invalid_argument, "gray level count must be in [2, 65536]");

    auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    double vmin = *lo, vmax = *hi;

    QuantizedImage out;
    out.height = img.height;
    out.width = img.width;
    out.g = g;
    out.levels.resize(img.pixels.size());

    if (vmax == vmin) {
        std::fill(out.levels.begin(), out.levels.end(), std::uint16_t{0});
        return out;
    }
    double scale = static_cast<double>(g) / (vmax - vmin);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        double bin = std::floor((img.pixels[i] - vmin) * scale);
        if (bin > g - 1) bin = g - 1;
        out.levels[i] = static_cast<std::uint16_t>(bin);
    }
    return out;
}

QuantizedImage replicate_pad(const QuantizedImage& img, std::int64_t margin) {
    validate(img);
    if (margin < 0)
        throw Error(ErrorKind::invalid_argument, "pad margin must be non-negative");

    QuantizedImage out;
    out.height = img.height + 2 * margin;
    out.width = img.width + 2 * margin;
    out.g = img.g;
    out.levels.resize(out.height * out.width);

    for (std::int64_t r = 0; r < out.height; ++r) {
        std::int64_t sr = std::clamp(r - margin, std::int64_t{0}, img.height - 1);
        for (std::int64_t c = 0; c < out.width; ++c) {
            std::int64_t sc = std::clamp(c - margin, std::int64_t{0}, img.width - 1);
            out.at(r, c) = img.at(sr, sc);
        }
    }
    return out;
}

PatchSet extract_patches(const QuantizedImage& img, std::uint32_t patch_size,
                         const std::vector<double>* labels) {
    validate(img);
    if (patch_size % 2 == 0)
        throw Error(ErrorKind::invalid_argument, "patch size must be odd");
    if (img.height < patch_size || img.width < patch_size)
        throw Error(ErrorKind::invalid_argument, "image smaller than patch size");
    if (labels && labels->size() != static_cast<std::size_t>(img.height * img.width))
        throw Error(ErrorKind::invalid_argument, "label map does not match image dimensions");

    std::int64_t margin = patch_size / 2;
    QuantizedImage padded = replicate_pad(img, margin);

    PatchSet set;
    set.patch_size = patch_size;
    set.count = img.height * img.width;
    set.levels.resize(set.count * patch_size * patch_size);
    set.center_rows.resize(set.count);
    set.center_cols.resize(set.count);
    if (labels) set.targets.resize(set.count);

    std::int64_t i = 0;
    for (std::int64_t r = 0; r < img.height; ++r) {
        for (std::int64_t c = 0; c < img.width; ++c, ++i) {
            std::uint16_t* dst = set.levels.data() + i * patch_size * patch_size;
            for (std::uint32_t wr = 0; wr < patch_size; ++wr) {
                const std::uint16_t* src = padded.levels.data() + (r + wr) * padded.width + c;
                std::copy(src, src + patch_size, dst + wr * patch_size);
            }
            set.center_rows[i] = r;
            set.center_cols[i] = c;
            if (labels) set.targets[i] = static_cast<float>((*labels)[r * img.width + c]);
        }
    }
    return set;
}

}  // namespace radsynth
