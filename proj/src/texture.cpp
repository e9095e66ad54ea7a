#include "texture.hpp"

#include <algorithm>

#include "error.hpp"
#include "rng.hpp"

namespace radsynth {

namespace {

void check_dims(const TextureSpec& s) {
    if (s.height < 1 || s.width < 1)
        throw Error(ErrorKind::invalid_argument, "texture dimensions must be positive");
}

GrayImage blank(std::int64_t h, std::int64_t w) {
    GrayImage img;
    img.height = h;
    img.width = w;
    img.pixels.assign(static_cast<std::size_t>(h * w), 0.0);
    return img;
}

std::int64_t clamp_idx(std::int64_t i, std::int64_t n) {
    return std::max<std::int64_t>(0, std::min(i, n - 1));
}

GrayImage gen_smoothed_noise(const TextureSpec& s) {
    if (s.corr_len < 0)
        throw Error(ErrorKind::invalid_argument, "correlation length must be non-negative");
    GrayImage img = blank(s.height, s.width);
    Rng rng(s.seed);
    for (auto& p : img.pixels) p = rng.next_double();
    const std::int64_t k = s.corr_len;
    if (k == 0) return img;
    const double inv = 1.0 / static_cast<double>(2 * k + 1);
    // horizontal then vertical mean over [i-k, i+k], indices clamped to the
    // edge (so border pixels are repeated, not the window shrunk)
    GrayImage tmp = blank(s.height, s.width);
    for (std::int64_t r = 0; r < s.height; ++r) {
        for (std::int64_t c = 0; c < s.width; ++c) {
            double sum = 0.0;
            for (std::int64_t d = -k; d <= k; ++d) sum += img.at(r, clamp_idx(c + d, s.width));
            tmp.at(r, c) = sum * inv;
        }
    }
    for (std::int64_t c = 0; c < s.width; ++c) {
        for (std::int64_t r = 0; r < s.height; ++r) {
            double sum = 0.0;
            for (std::int64_t d = -k; d <= k; ++d) sum += tmp.at(clamp_idx(r + d, s.height), c);
            img.at(r, c) = sum * inv;
        }
    }
    return img;
}

GrayImage gen_checker(const TextureSpec& s) {
    if (s.period < 1)
        throw Error(ErrorKind::invalid_argument, "checker period must be positive");
    GrayImage img = blank(s.height, s.width);
    for (std::int64_t r = 0; r < s.height; ++r)
        for (std::int64_t c = 0; c < s.width; ++c)
            img.at(r, c) = static_cast<double>((r / s.period + c / s.period) % 2);
    return img;
}

GrayImage gen_gradient(const TextureSpec& s) {
    // integer ramp directions keep the projection exact; the seed picks one
    // unless the spec names a direction itself
    static constexpr std::int64_t kDirs[8][2] = {
        {0, 1}, {1, 0}, {1, 1}, {1, -1}, {1, 2}, {2, 1}, {2, -1}, {1, -2},
    };
    std::int64_t d[2] = {s.grad_dr, s.grad_dc};
    if (d[0] == 0 && d[1] == 0) {
        Rng rng(s.seed);
        const auto& pick = kDirs[rng.next_below(8)];
        d[0] = pick[0];
        d[1] = pick[1];
    }
    GrayImage img = blank(s.height, s.width);
    const double lo = std::min<std::int64_t>({0, d[0] * (s.height - 1), d[1] * (s.width - 1),
                                              d[0] * (s.height - 1) + d[1] * (s.width - 1)});
    const double hi = std::max<std::int64_t>({0, d[0] * (s.height - 1), d[1] * (s.width - 1),
                                              d[0] * (s.height - 1) + d[1] * (s.width - 1)});
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::int64_t r = 0; r < s.height; ++r)
        for (std::int64_t c = 0; c < s.width; ++c)
            img.at(r, c) = (static_cast<double>(d[0] * r + d[1] * c) - lo) / span;
    return img;
}

GrayImage gen_blob_mixture(const TextureSpec& s) {
    if (s.blob_count < 0)
        throw Error(ErrorKind::invalid_argument, "blob count must be non-negative");
    if (!(s.blob_radius > 0.0))
        throw Error(ErrorKind::invalid_argument, "blob radius must be positive");
    GrayImage img = blank(s.height, s.width);
    Rng rng(s.seed);
    for (auto& p : img.pixels) p = 0.2 * rng.next_double();  // noise floor
    for (std::int64_t b = 0; b < s.blob_count; ++b) {
        // fixed draw order per blob: center row, center col, radius, amplitude, sign
        const std::int64_t cy = static_cast<std::int64_t>(rng.next_below(
            static_cast<std::uint64_t>(s.height)));
        const std::int64_t cx = static_cast<std::int64_t>(rng.next_below(
            static_cast<std::uint64_t>(s.width)));
        const double radius = s.blob_radius * (0.5 + rng.next_double());
        double amp = s.blob_contrast * (0.25 + 0.75 * rng.next_double());
        if (rng.next_u64() & 1) amp = -amp;
        const double r2 = radius * radius;
        const std::int64_t ri = static_cast<std::int64_t>(radius) + 1;
        const std::int64_t y0 = clamp_idx(cy - ri, s.height), y1 = clamp_idx(cy + ri, s.height);
        const std::int64_t x0 = clamp_idx(cx - ri, s.width), x1 = clamp_idx(cx + ri, s.width);
        for (std::int64_t y = y0; y <= y1; ++y) {
            for (std::int64_t x = x0; x <= x1; ++x) {
                const double d2 = static_cast<double>((y - cy) * (y - cy) + (x - cx) * (x - cx));
                if (d2 >= r2) continue;
                const double t = 1.0 - d2 / r2;
                img.at(y, x) += amp * t * t;
            }
        }
    }
    return img;
}

}  // namespace

const char* kind_name(TextureKind kind) {
    switch (kind) {
        case TextureKind::smoothed_noise: return "smoothed_noise";
        case TextureKind::checker: return "checker";
        case TextureKind::gradient: return "gradient";
        case TextureKind::blob_mixture: return "blob_mixture";
    }
    throw Error(ErrorKind::invalid_argument, "unknown texture kind");
}

TextureKind kind_from_name(const std::string& name) {
    if (name == "smoothed_noise") return TextureKind::smoothed_noise;
    if (name == "checker") return TextureKind::checker;
    if (name == "gradient") return TextureKind::gradient;
    if (name == "blob_mixture") return TextureKind::blob_mixture;
    throw Error(ErrorKind::invalid_argument, "unknown texture kind '" + name + "'");
}

GrayImage gen_texture(const TextureSpec& spec) {
    check_dims(spec);
    switch (spec.kind) {
        case TextureKind::smoothed_noise: return gen_smoothed_noise(spec);
        case TextureKind::checker: return gen_checker(spec);
        case TextureKind::gradient: return gen_gradient(spec);
        case TextureKind::blob_mixture: return gen_blob_mixture(spec);
    }
    throw Error(ErrorKind::invalid_argument, "unknown texture kind");
}

}  // namespace radsynth
