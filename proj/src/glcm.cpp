#include "glcm.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "error.hpp"
#include "parallel.hpp"

namespace radsynth {

namespace {

constexpr double kInvLn2 = 1.4426950408889634074;

double base_factor(LogBase base) {
    return base == LogBase::base2 ? kInvLn2 : 1.0;
}

// Accumulate window pairs into a zeroed g*g count buffer.
void fill_counts(const std::uint16_t* win, std::int64_t stride, const GlcmParams& p,
                 std::uint32_t* counts) {
    const std::int64_t w = p.window;
    const std::int64_t dr = p.offset_dr, dc = p.offset_dc;
    const std::int64_t ylo = std::max<std::int64_t>(0, -dr);
    const std::int64_t yhi = w - 1 - std::max<std::int64_t>(0, dr);
    const std::int64_t xlo = std::max<std::int64_t>(0, -dc);
    const std::int64_t xhi = w - 1 - std::max<std::int64_t>(0, dc);
    const std::uint32_t g = p.g;

    for (std::int64_t y = ylo; y <= yhi; ++y) {
        const std::uint16_t* row = win + y * stride;
        const std::uint16_t* row_off = win + (y + dr) * stride + dc;
        for (std::int64_t x = xlo; x <= xhi; ++x) {
            std::uint32_t a = row[x];
            std::uint32_t b = row_off[x];
            ++counts[a * g + b];
            if (p.symmetric) ++counts[b * g + a];
        }
    }
}

}  // namespace

void validate(const GlcmParams& params) {
    if (params.g < 2 || params.g > 65536)
        throw Error(ErrorKind::invalid_argument, "gray level count must be in [2, 65536]");
    if (params.window < 3 || params.window % 2 == 0)
        throw Error(ErrorKind::invalid_argument, "window must be odd and at least 3");
    if (params.offset_dr == 0 && params.offset_dc == 0)
        throw Error(ErrorKind::invalid_argument, "offset must be nonzero");
    if (std::abs(params.offset_dr) >= static_cast<std::int32_t>(params.window) ||
        std::abs(params.offset_dc) >= static_cast<std::int32_t>(params.window))
        throw Error(ErrorKind::invalid_argument, "offset magnitude must be smaller than the window");
}

std::uint64_t pairs_per_window(const GlcmParams& params) {
    validate(params);
    std::uint64_t ny = params.window - std::abs(params.offset_dr);
    std::uint64_t nx = params.window - std::abs(params.offset_dc);
    return ny * nx * (params.symmetric ? 2 : 1);
}

Glcm glcm_from_window(const std::uint16_t* window, const GlcmParams& params) {
    validate(params);
    const std::int64_t n = static_cast<std::int64_t>(params.window) * params.window;
    for (std::int64_t i = 0; i < n; ++i)
        if (window[i] >= params.g)
            throw Error(ErrorKind::invalid_argument,
                        "window level " + std::to_string(window[i]) +
                            " out of range for g=" + std::to_string(params.g));

    Glcm out;
    out.params = params;
    out.counts.assign(static_cast<std::size_t>(params.g) * params.g, 0);
    fill_counts(window, params.window, params, out.counts.data());
    out.total = pairs_per_window(params);
    return out;
}

Glcm glcm_from_window(const std::vector<std::uint16_t>& window, const GlcmParams& params) {
    validate(params);
    if (window.size() != static_cast<std::size_t>(params.window) * params.window)
        throw Error(ErrorKind::invalid_argument, "window buffer does not match params.window");
    return glcm_from_window(window.data(), params);
}

double glcm_entropy(const Glcm& glcm) {
    if (glcm.total == 0)
        throw Error(ErrorKind::domain, "entropy of an empty GLCM is undefined");
    const double total = static_cast<double>(glcm.total);
    double h = 0.0;
    for (std::uint32_t c : glcm.counts) {
        if (c == 0) continue;
        double pr = static_cast<double>(c) / total;
        h -= pr * std::log(pr);
    }
    return h * base_factor(glcm.params.log_base);
}

FeatureMap entropy_map_naive(const QuantizedImage& img, const GlcmParams& params, int threads) {
    validate(img);
    validate(params);
    if (img.g != params.g)
        throw Error(ErrorKind::invalid_argument, "image gray levels do not match params.g");

    const std::int64_t w = params.window;
    const std::int64_t margin = w / 2;
    const QuantizedImage padded = replicate_pad(img, margin);
    const double total = static_cast<double>(pairs_per_window(params));
    const double factor = base_factor(params.log_base);

    FeatureMap map;
    map.height = img.height;
    map.width = img.width;
    map.params = params;
    map.values.resize(img.height * img.width);

    const std::size_t cells = static_cast<std::size_t>(params.g) * params.g;
    parallel_chunks(img.height, threads, [&](std::int64_t r0, std::int64_t r1) {
        std::vector<std::uint32_t> counts(cells);
        for (std::int64_t r = r0; r < r1; ++r) {
            for (std::int64_t c = 0; c < img.width; ++c) {
                std::memset(counts.data(), 0, cells * sizeof(std::uint32_t));
                fill_counts(padded.levels.data() + r * padded.width + c, padded.width,
                            params, counts.data());
                double h = 0.0;
                for (std::size_t i = 0; i < cells; ++i) {
                    if (counts[i] == 0) continue;
                    double pr = static_cast<double>(counts[i]) / total;
                    h -= pr * std::log(pr);
                }
                map.at(r, c) = h * factor;
            }
        }
    });
    return map;
}

FeatureMap entropy_map_incremental(const QuantizedImage& img, const GlcmParams& params,
                                   int threads) {
    validate(img);
    validate(params);
    if (img.g != params.g)
        throw Error(ErrorKind::invalid_argument, "image gray levels do not match params.g");

    const std::int64_t w = params.window;
    const std::int64_t margin = w / 2;
    const std::int64_t dr = params.offset_dr, dc = params.offset_dc;
    const QuantizedImage padded = replicate_pad(img, margin);
    const std::uint16_t* pix = padded.levels.data();
    const std::int64_t stride = padded.width;
    const std::uint32_t g = params.g;
    const bool symmetric = params.symmetric;

    const std::uint64_t total_u = pairs_per_window(params);
    const double total = static_cast<double>(total_u);
    const double log_total = std::log(total);
    const double factor = base_factor(params.log_base);

    // Counts never exceed the per-window pair total, so c*log(c) is a table.
    std::vector<double> nlogn(total_u + 1);
    nlogn[0] = 0.0;
    for (std::uint64_t n = 1; n <= total_u; ++n)
        nlogn[n] = static_cast<double>(n) * std::log(static_cast<double>(n));

    FeatureMap map;
    map.height = img.height;
    map.width = img.width;
    map.params = params;
    map.values.resize(img.height * img.width);

    const std::size_t cells = static_cast<std::size_t>(g) * g;
    parallel_chunks(img.height, threads, [&](std::int64_t r0, std::int64_t r1) {
        std::vector<std::uint32_t> counts(cells);
        for (std::int64_t r = r0; r < r1; ++r) {
            // Per-row rebuild bounds accumulator drift across the slide.
            std::memset(counts.data(), 0, cells * sizeof(std::uint32_t));
            double s = 0.0;  // running sum of c*log(c)

            auto update = [&](std::uint32_t a, std::uint32_t b, std::int64_t delta) {
                std::uint32_t& cell = counts[a * g + b];
                s -= nlogn[cell];
                cell = static_cast<std::uint32_t>(cell + delta);
                s += nlogn[cell];
            };
            auto add_pair = [&](std::int64_t y, std::int64_t x, std::int64_t delta) {
                std::uint32_t a = pix[y * stride + x];
                std::uint32_t b = pix[(y + dr) * stride + x + dc];
                update(a, b, delta);
                if (symmetric) update(b, a, delta);
            };

            const std::int64_t ylo = r + std::max<std::int64_t>(0, -dr);
            const std::int64_t yhi = r + w - 1 - std::max<std::int64_t>(0, dr);

            // Initial window of this row, at output column 0.
            for (std::int64_t y = ylo; y <= yhi; ++y)
                for (std::int64_t x = std::max<std::int64_t>(0, -dc);
                     x <= w - 1 - std::max<std::int64_t>(0, dc); ++x)
                    add_pair(y, x, +1);
            map.at(r, 0) = (log_total - s / total) * factor;

            for (std::int64_t c = 1; c < img.width; ++c) {
                const std::int64_t x_rm = (c - 1) + std::max<std::int64_t>(0, -dc);
                const std::int64_t x_add = (c - 1) + w - std::max<std::int64_t>(0, dc);
                for (std::int64_t y = ylo; y <= yhi; ++y) {
                    add_pair(y, x_rm, -1);
                    add_pair(y, x_add, +1);
                }
                map.at(r, c) = (log_total - s / total) * factor;
            }
        }
    });
    return map;
}

}  // namespace radsynth
