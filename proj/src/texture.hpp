#pragma once

#include <cstdint>
#include <string>

#include "image.hpp"

namespace radsynth {

enum class TextureKind { smoothed_noise, checker, gradient, blob_mixture };

const char* kind_name(TextureKind kind);
TextureKind kind_from_name(const std::string& name);

// Recipe for one synthetic image. Only the fields of the chosen kind matter;
// two specs with equal relevant fields produce identical pixels on any
// IEEE-754 platform (the generators use nothing beyond +, -, *, /).
struct TextureSpec {
    TextureKind kind = TextureKind::smoothed_noise;
    std::int64_t height = 128;
    std::int64_t width = 128;
    std::uint64_t seed = 0;
    std::int64_t corr_len = 3;    // smoothed_noise: box-blur half-width (0 = raw noise)
    std::int64_t period = 4;      // checker: block edge length in pixels
    std::int64_t grad_dr = 0;     // gradient: ramp direction; both zero = pick from seed
    std::int64_t grad_dc = 0;
    std::int64_t blob_count = 8;  // blob_mixture
    double blob_radius = 10.0;    // blob_mixture: base radius in pixels
    double blob_contrast = 1.0;   // blob_mixture: bump amplitude scale
};

// smoothed_noise: uniform white noise, box-blurred (separable, edge pixels
//   replicated) with half-width corr_len.
// checker: alternating 0/1 blocks of edge `period`.
// gradient: linear ramp along (grad_dr, grad_dc), or a seed-chosen direction
//   when both are zero, normalized to [0, 1].
// blob_mixture: a low-amplitude noise floor plus signed compact radial bumps
//   ((1 - (d/R)^2)^2 inside radius R) at seeded positions.
GrayImage gen_texture(const TextureSpec& spec);

}  // namespace radsynth
