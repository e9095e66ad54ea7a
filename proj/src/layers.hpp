#pragma once

// Layer kernels for the surrogate network. Everything is templated on the
// scalar type: float for production, double for finite-difference checks.
//
// Layouts. Activations are (h, w, c) row-major with channels innermost, so
// the hot loops run over a contiguous channel axis. Convolution weights are
// stored [ky][kx][cin][cout] with cout innermost: the forward pass then
// broadcasts one input scalar against a contiguous cout row, which the
// vectorizer handles without needing to reassociate any sums.
//
// Determinism: every reduction uses a fixed lane/combine order, so results
// depend only on the input bytes, never on thread count.

#include <cstdint>
#include <cstring>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace radsynth {

// Dot product with eight independent partial sums. The lanes map onto vector
// registers, and the combine order is fixed, so the result is reproducible.
template <typename T>
T dot_lanes(const T* a, const T* b, std::int64_t n) {
    T lane[8] = {};
    std::int64_t i = 0;
    for (; i + 8 <= n; i += 8)
        for (int j = 0; j < 8; ++j) lane[j] += a[i + j] * b[i + j];
    T tail = T(0);
    for (; i < n; ++i) tail += a[i] * b[i];
    return ((lane[0] + lane[1]) + (lane[2] + lane[3])) +
           ((lane[4] + lane[5]) + (lane[6] + lane[7])) + tail;
}

// --- convolution, 3x3, stride 1, zero ("same") padding ---------------------

// Out-of-range taps contribute zero, so they are skipped instead of padded.
template <typename T>
void conv3x3_forward(const T* in, std::int64_t h, std::int64_t w, std::int64_t cin,
                     const T* wts, const T* bias, std::int64_t cout, T* out) {
    for (std::int64_t y = 0; y < h; ++y) {
        for (std::int64_t x = 0; x < w; ++x) {
            T* o = out + (y * w + x) * cout;
            for (std::int64_t f = 0; f < cout; ++f) o[f] = bias[f];
            for (int ky = 0; ky < 3; ++ky) {
                const std::int64_t iy = y + ky - 1;
                if (iy < 0 || iy >= h) continue;
                for (int kx = 0; kx < 3; ++kx) {
                    const std::int64_t ix = x + kx - 1;
                    if (ix < 0 || ix >= w) continue;
                    const T* src = in + (iy * w + ix) * cin;
                    const T* wt = wts + (ky * 3 + kx) * cin * cout;
                    for (std::int64_t c = 0; c < cin; ++c) {
                        const T s = src[c];
                        const T* wr = wt + c * cout;
                        for (std::int64_t f = 0; f < cout; ++f) o[f] += s * wr[f];
                    }
                }
            }
        }
    }
}

// Accumulates into dw/db (callers zero them per batch); din, when wanted,
// must arrive zeroed per sample.
template <typename T>
void conv3x3_backward(const T* in, std::int64_t h, std::int64_t w, std::int64_t cin,
                      const T* wts, std::int64_t cout, const T* dout,
                      T* dw, T* db, T* din) {
    for (std::int64_t y = 0; y < h; ++y) {
        for (std::int64_t x = 0; x < w; ++x) {
            const T* dO = dout + (y * w + x) * cout;
            for (std::int64_t f = 0; f < cout; ++f) db[f] += dO[f];
            for (int ky = 0; ky < 3; ++ky) {
                const std::int64_t iy = y + ky - 1;
                if (iy < 0 || iy >= h) continue;
                for (int kx = 0; kx < 3; ++kx) {
                    const std::int64_t ix = x + kx - 1;
                    if (ix < 0 || ix >= w) continue;
                    const T* src = in + (iy * w + ix) * cin;
                    T* dsrc = din ? din + (iy * w + ix) * cin : nullptr;
                    const std::int64_t tap = (ky * 3 + kx) * cin * cout;
                    const T* wt = wts + tap;
                    T* dwt = dw + tap;
                    for (std::int64_t c = 0; c < cin; ++c) {
                        const T s = src[c];
                        T* dwr = dwt + c * cout;
                        for (std::int64_t f = 0; f < cout; ++f) dwr[f] += s * dO[f];
                        if (dsrc) dsrc[c] += dot_lanes(dO, wt + c * cout, cout);
                    }
                }
            }
        }
    }
}

// --- batch normalization ----------------------------------------------------

// Population statistics (divide by n) over rows x channels; accumulation in
// double regardless of T. Single pass for the mean, second for the variance.
template <typename T>
void bn_batch_stats(const T* x, std::int64_t rows, std::int64_t ch,
                    std::vector<double>& mean, std::vector<double>& var) {
    mean.assign(static_cast<std::size_t>(ch), 0.0);
    var.assign(static_cast<std::size_t>(ch), 0.0);
    for (std::int64_t r = 0; r < rows; ++r) {
        const T* row = x + r * ch;
        for (std::int64_t c = 0; c < ch; ++c) mean[static_cast<std::size_t>(c)] += row[c];
    }
    const double inv_n = 1.0 / static_cast<double>(rows);
    for (std::int64_t c = 0; c < ch; ++c) mean[static_cast<std::size_t>(c)] *= inv_n;
    for (std::int64_t r = 0; r < rows; ++r) {
        const T* row = x + r * ch;
        for (std::int64_t c = 0; c < ch; ++c) {
            const double d = row[c] - mean[static_cast<std::size_t>(c)];
            var[static_cast<std::size_t>(c)] += d * d;
        }
    }
    for (std::int64_t c = 0; c < ch; ++c) var[static_cast<std::size_t>(c)] *= inv_n;
}

template <typename T>
void bn_apply(const T* x, std::int64_t rows, std::int64_t ch,
              const double* mean, const double* inv_std,
              const T* gamma, const T* beta, T* out) {
    for (std::int64_t r = 0; r < rows; ++r) {
        const T* row = x + r * ch;
        T* o = out + r * ch;
        for (std::int64_t c = 0; c < ch; ++c) {
            const T xhat = static_cast<T>((row[c] - mean[c]) * inv_std[c]);
            o[c] = gamma[c] * xhat + beta[c];
        }
    }
}

// dgamma/dbeta come out exact (they double as the channel sums the input
// gradient needs); dx = gamma * inv_std * (dy - mean(dy) - xhat * mean(dy*xhat)).
template <typename T>
void bn_backward(const T* x, const T* dy, std::int64_t rows, std::int64_t ch,
                 const double* mean, const double* inv_std,
                 const T* gamma, T* dgamma, T* dbeta, T* dx) {
    std::vector<double> sum_dy(static_cast<std::size_t>(ch), 0.0);
    std::vector<double> sum_dy_xhat(static_cast<std::size_t>(ch), 0.0);
    for (std::int64_t r = 0; r < rows; ++r) {
        const T* xr = x + r * ch;
        const T* dr = dy + r * ch;
        for (std::int64_t c = 0; c < ch; ++c) {
            const double xhat = (xr[c] - mean[c]) * inv_std[c];
            sum_dy[static_cast<std::size_t>(c)] += dr[c];
            sum_dy_xhat[static_cast<std::size_t>(c)] += dr[c] * xhat;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(rows);
    for (std::int64_t c = 0; c < ch; ++c) {
        dgamma[c] = static_cast<T>(sum_dy_xhat[static_cast<std::size_t>(c)]);
        dbeta[c] = static_cast<T>(sum_dy[static_cast<std::size_t>(c)]);
    }
    for (std::int64_t r = 0; r < rows; ++r) {
        const T* xr = x + r * ch;
        const T* dr = dy + r * ch;
        T* dxr = dx + r * ch;
        for (std::int64_t c = 0; c < ch; ++c) {
            const std::size_t cc = static_cast<std::size_t>(c);
            const double xhat = (xr[c] - mean[c]) * inv_std[c];
            const double g = gamma[c] * inv_std[c];
            dxr[c] = static_cast<T>(g * (dr[c] - sum_dy[cc] * inv_n - xhat * sum_dy_xhat[cc] * inv_n));
        }
    }
}

// --- relu -------------------------------------------------------------------

template <typename T>
void relu_inplace(T* x, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) x[i] = x[i] > T(0) ? x[i] : T(0);
}

// The gate can be read off the layer's own output: out > 0 iff in > 0.
template <typename T>
void relu_backward_inplace(const T* out, T* d, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i)
        if (!(out[i] > T(0))) d[i] = T(0);
}

// --- max pooling, 2x2, stride 2 (floor semantics) ----------------------------

// argmax records which of the four window cells won (scan order: top-left,
// top-right, bottom-left, bottom-right; first maximum wins ties).
template <typename T>
void maxpool2x2_forward(const T* in, std::int64_t h, std::int64_t w, std::int64_t ch,
                        T* out, std::uint8_t* argmax) {
    const std::int64_t oh = h / 2, ow = w / 2;
    for (std::int64_t oy = 0; oy < oh; ++oy) {
        for (std::int64_t ox = 0; ox < ow; ++ox) {
            const T* p00 = in + ((2 * oy) * w + 2 * ox) * ch;
            const T* p01 = p00 + ch;
            const T* p10 = p00 + w * ch;
            const T* p11 = p10 + ch;
            T* o = out + (oy * ow + ox) * ch;
            std::uint8_t* a = argmax + (oy * ow + ox) * ch;
            for (std::int64_t c = 0; c < ch; ++c) {
                T best = p00[c];
                std::uint8_t which = 0;
                if (p01[c] > best) { best = p01[c]; which = 1; }
                if (p10[c] > best) { best = p10[c]; which = 2; }
                if (p11[c] > best) { best = p11[c]; which = 3; }
                o[c] = best;
                a[c] = which;
            }
        }
    }
}

template <typename T>
void maxpool2x2_backward(std::int64_t h, std::int64_t w, std::int64_t ch,
                         const T* dout, const std::uint8_t* argmax, T* din) {
    const std::int64_t oh = h / 2, ow = w / 2;
    std::memset(din, 0, static_cast<std::size_t>(h * w * ch) * sizeof(T));
    for (std::int64_t oy = 0; oy < oh; ++oy) {
        for (std::int64_t ox = 0; ox < ow; ++ox) {
            const T* d = dout + (oy * ow + ox) * ch;
            const std::uint8_t* a = argmax + (oy * ow + ox) * ch;
            for (std::int64_t c = 0; c < ch; ++c) {
                const std::int64_t iy = 2 * oy + (a[c] >> 1);
                const std::int64_t ix = 2 * ox + (a[c] & 1);
                din[(iy * w + ix) * ch + c] += d[c];
            }
        }
    }
}

// --- dropout ------------------------------------------------------------------

// Inverted dropout. An element is kept when the uniform draw lands at or
// above the rate (probability 1 - rate) and is scaled by 1/(1 - rate), so the
// expected value is preserved; masks are drawn once per batch, in element
// order, from the caller's generator.
template <typename T>
void make_dropout_mask(Rng& rng, double rate, std::vector<T>& mask) {
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    for (auto& m : mask) m = rng.next_double() >= rate ? scale : T(0);
}

template <typename T>
void apply_mask(const T* in, const T* mask, std::int64_t n, T* out) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = in[i] * mask[i];
}

// --- tensor-level wrappers ----------------------------------------------------

template <typename T>
TensorT<T> relu(const TensorT<T>& t) {
    TensorT<T> out = t;
    relu_inplace(out.data.data(), out.numel());
    return out;
}

template <typename T>
TensorT<T> dropout(const TensorT<T>& t, double rate, bool training, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0)
        throw Error(ErrorKind::invalid_argument, "dropout rate must lie in [0, 1)");
    if (!training) return t;
    TensorT<T> out(t.shape);
    std::vector<T> mask(t.data.size());
    make_dropout_mask(rng, rate, mask);
    apply_mask(t.data.data(), mask.data(), t.numel(), out.data.data());
    return out;
}

}  // namespace radsynth
