#pragma once

// The surrogate network: four conv(3x3) + batch-norm + ReLU blocks with 2x2
// max pooling after the first two, dropout on the last block's activations,
// and a single linear output unit. Templated on the scalar type so the same
// code runs in float for training and in double for derivative checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "error.hpp"
#include "layers.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace radsynth {

struct StageShape {
    std::int64_t h = 0, w = 0, c = 0;
    std::int64_t numel() const { return h * w * c; }
};

// Static shape arithmetic for the fixed topology. Pooling uses floor
// semantics, so odd extents lose their last row/column.
struct NetPlan {
    std::int64_t patch = 0;
    std::array<StageShape, 4> conv_in{};
    std::array<StageShape, 4> conv_out{};
    std::array<StageShape, 2> pool_out{};
    std::int64_t flat = 0;
};

inline NetPlan make_plan(std::uint32_t patch_size, const std::array<std::uint32_t, 4>& filters) {
    if (patch_size < 3 || patch_size % 2 == 0)
        throw Error(ErrorKind::invalid_argument, "patch size must be odd and at least 3");
    for (std::uint32_t f : filters)
        if (f == 0) throw Error(ErrorKind::invalid_argument, "filter counts must be positive");
    NetPlan p;
    p.patch = patch_size;
    StageShape cur{patch_size, patch_size, 1};
    for (int b = 0; b < 4; ++b) {
        p.conv_in[static_cast<std::size_t>(b)] = cur;
        cur.c = filters[static_cast<std::size_t>(b)];
        p.conv_out[static_cast<std::size_t>(b)] = cur;
        if (b < 2) {
            if (cur.h < 2 || cur.w < 2)
                throw Error(ErrorKind::invalid_argument,
                            "maxpool2x2 after conv block " + std::to_string(b) +
                                ": spatial extent " + std::to_string(cur.h) + "x" +
                                std::to_string(cur.w) + " cannot be pooled");
            cur.h /= 2;
            cur.w /= 2;
            p.pool_out[static_cast<std::size_t>(b)] = cur;
        }
    }
    p.flat = cur.numel();
    return p;
}

template <typename T>
struct Conv {
    std::int64_t in_ch = 0, out_ch = 0;
    std::vector<T> w;  // [ky][kx][in_ch][out_ch]
    std::vector<T> b;  // [out_ch]
};

template <typename T>
struct BatchNorm {
    std::int64_t ch = 0;
    std::vector<T> gamma, beta;
    std::vector<T> run_mean, run_var;
    bool stats_ready = false;
};

template <typename T>
struct Dense {
    std::int64_t in = 0, out = 0;
    std::vector<T> w, b;
};

template <typename T>
struct ModelT {
    std::uint32_t g = 64;
    std::uint32_t patch_size = 5;
    std::array<std::uint32_t, 4> filters{128, 64, 32, 16};
    double dropout_rate = 0.2;
    double bn_eps = 1e-5;
    double bn_momentum = 0.1;
    std::array<Conv<T>, 4> conv;
    std::array<BatchNorm<T>, 4> bn;
    Dense<T> dense;
    NetPlan plan;
};

using Model = ModelT<float>;

// He-normal weight init (std = sqrt(2 / fan_in)), biases zero, batch-norm at
// identity. Weights are drawn in storage order from a single generator, so a
// seed pins every parameter.
template <typename T>
ModelT<T> make_model(std::uint32_t g, std::uint32_t patch_size,
                     const std::array<std::uint32_t, 4>& filters, std::uint64_t seed,
                     double dropout_rate = 0.2) {
    if (g < 2) throw Error(ErrorKind::invalid_argument, "quantizer level count must be at least 2");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw Error(ErrorKind::invalid_argument, "dropout rate must lie in [0, 1)");
    ModelT<T> m;
    m.g = g;
    m.patch_size = patch_size;
    m.filters = filters;
    m.dropout_rate = dropout_rate;
    m.plan = make_plan(patch_size, filters);
    Rng rng(seed);
    for (int i = 0; i < 4; ++i) {
        auto& c = m.conv[static_cast<std::size_t>(i)];
        c.in_ch = m.plan.conv_in[static_cast<std::size_t>(i)].c;
        c.out_ch = m.plan.conv_out[static_cast<std::size_t>(i)].c;
        c.w.resize(static_cast<std::size_t>(9 * c.in_ch * c.out_ch));
        c.b.assign(static_cast<std::size_t>(c.out_ch), T(0));
        const double std_dev = std::sqrt(2.0 / static_cast<double>(9 * c.in_ch));
        for (auto& v : c.w) v = static_cast<T>(rng.next_normal() * std_dev);
        auto& n = m.bn[static_cast<std::size_t>(i)];
        n.ch = c.out_ch;
        n.gamma.assign(static_cast<std::size_t>(n.ch), T(1));
        n.beta.assign(static_cast<std::size_t>(n.ch), T(0));
        n.run_mean.assign(static_cast<std::size_t>(n.ch), T(0));
        n.run_var.assign(static_cast<std::size_t>(n.ch), T(1));
    }
    m.dense.in = m.plan.flat;
    m.dense.out = 1;
    m.dense.w.resize(static_cast<std::size_t>(m.plan.flat));
    m.dense.b.assign(1, T(0));
    const double std_dev = std::sqrt(2.0 / static_cast<double>(m.plan.flat));
    for (auto& v : m.dense.w) v = static_cast<T>(rng.next_normal() * std_dev);
    return m;
}

// The canonical shape trace: activations after every conv block, after each
// pool, after flatten, and at the output.
template <typename T>
std::vector<std::vector<std::int64_t>> shape_trace(const ModelT<T>& m) {
    const NetPlan& p = m.plan;
    std::vector<std::vector<std::int64_t>> t;
    t.push_back({p.conv_out[0].h, p.conv_out[0].w, p.conv_out[0].c});
    t.push_back({p.pool_out[0].h, p.pool_out[0].w, p.pool_out[0].c});
    t.push_back({p.conv_out[1].h, p.conv_out[1].w, p.conv_out[1].c});
    t.push_back({p.pool_out[1].h, p.pool_out[1].w, p.pool_out[1].c});
    t.push_back({p.conv_out[2].h, p.conv_out[2].w, p.conv_out[2].c});
    t.push_back({p.conv_out[3].h, p.conv_out[3].w, p.conv_out[3].c});
    t.push_back({p.flat});
    t.push_back({1});
    return t;
}

// Gradient (and optimizer-state) storage mirroring the parameter layout.
template <typename T>
struct ParamGrads {
    std::array<std::vector<T>, 4> conv_w, conv_b, bn_gamma, bn_beta;
    std::vector<T> dense_w, dense_b;

    void init_like(const ModelT<T>& m) {
        for (int i = 0; i < 4; ++i) {
            const auto s = static_cast<std::size_t>(i);
            conv_w[s].assign(m.conv[s].w.size(), T(0));
            conv_b[s].assign(m.conv[s].b.size(), T(0));
            bn_gamma[s].assign(m.bn[s].gamma.size(), T(0));
            bn_beta[s].assign(m.bn[s].beta.size(), T(0));
        }
        dense_w.assign(m.dense.w.size(), T(0));
        dense_b.assign(m.dense.b.size(), T(0));
    }
    void zero() {
        for (int i = 0; i < 4; ++i) {
            const auto s = static_cast<std::size_t>(i);
            std::fill(conv_w[s].begin(), conv_w[s].end(), T(0));
            std::fill(conv_b[s].begin(), conv_b[s].end(), T(0));
            std::fill(bn_gamma[s].begin(), bn_gamma[s].end(), T(0));
            std::fill(bn_beta[s].begin(), bn_beta[s].end(), T(0));
        }
        std::fill(dense_w.begin(), dense_w.end(), T(0));
        std::fill(dense_b.begin(), dense_b.end(), T(0));
    }
    void add(const ParamGrads& o) {
        for (int i = 0; i < 4; ++i) {
            const auto s = static_cast<std::size_t>(i);
            for (std::size_t j = 0; j < conv_w[s].size(); ++j) conv_w[s][j] += o.conv_w[s][j];
            for (std::size_t j = 0; j < conv_b[s].size(); ++j) conv_b[s][j] += o.conv_b[s][j];
        }
        for (std::size_t j = 0; j < dense_w.size(); ++j) dense_w[j] += o.dense_w[j];
        for (std::size_t j = 0; j < dense_b.size(); ++j) dense_b[j] += o.dense_b[j];
    }
};

// Visits every (parameter block, mirror block) pair in a fixed order.
template <typename T, typename Fn>
void for_each_param_block(ModelT<T>& m, ParamGrads<T>& g, Fn&& fn) {
    for (int i = 0; i < 4; ++i) {
        const auto s = static_cast<std::size_t>(i);
        fn(m.conv[s].w, g.conv_w[s]);
        fn(m.conv[s].b, g.conv_b[s]);
        fn(m.bn[s].gamma, g.bn_gamma[s]);
        fn(m.bn[s].beta, g.bn_beta[s]);
    }
    fn(m.dense.w, g.dense_w);
    fn(m.dense.b, g.dense_b);
}

template <typename T, typename Fn>
void for_each_param_block(ModelT<T>& m, ParamGrads<T>& g, ParamGrads<T>& v, Fn&& fn) {
    for (int i = 0; i < 4; ++i) {
        const auto s = static_cast<std::size_t>(i);
        fn(m.conv[s].w, g.conv_w[s], v.conv_w[s]);
        fn(m.conv[s].b, g.conv_b[s], v.conv_b[s]);
        fn(m.bn[s].gamma, g.bn_gamma[s], v.bn_gamma[s]);
        fn(m.bn[s].beta, g.bn_beta[s], v.bn_beta[s]);
    }
    fn(m.dense.w, g.dense_w, v.dense_w);
    fn(m.dense.b, g.dense_b, v.dense_b);
}

// Everything the backward pass needs from the forward pass, plus the scratch
// gradient buffers, kept together so minibatch loops reuse the allocations.
template <typename T>
struct ForwardCache {
    std::int64_t batch = 0;
    std::vector<T> input;                          // B x P x P x 1
    std::array<std::vector<T>, 4> z;               // conv outputs (pre-norm)
    std::array<std::vector<T>, 4> act;             // post norm + relu
    std::array<std::vector<T>, 2> pooled;
    std::array<std::vector<std::uint8_t>, 2> argmax;
    std::array<std::vector<double>, 4> bn_mean, bn_inv_std;
    std::vector<T> mask;                           // dropout mask, B x flat
    std::vector<T> dense_in;                       // B x flat
    std::vector<T> preds;                          // B
    // gradient scratch
    std::array<std::vector<T>, 4> dz, dact;
    std::array<std::vector<T>, 2> dpooled;
    std::vector<T> ddense_in;
    std::vector<ParamGrads<T>> chunk_grads;
};

namespace detail {

template <typename T>
void resize_cache(const NetPlan& p, std::int64_t B, ForwardCache<T>& c) {
    for (int i = 0; i < 4; ++i) {
        const auto s = static_cast<std::size_t>(i);
        c.z[s].resize(static_cast<std::size_t>(B * p.conv_out[s].numel()));
        c.act[s].resize(static_cast<std::size_t>(B * p.conv_out[s].numel()));
    }
    for (int i = 0; i < 2; ++i) {
        const auto s = static_cast<std::size_t>(i);
        c.pooled[s].resize(static_cast<std::size_t>(B * p.pool_out[s].numel()));
        c.argmax[s].resize(static_cast<std::size_t>(B * p.pool_out[s].numel()));
    }
    c.dense_in.resize(static_cast<std::size_t>(B * p.flat));
    c.preds.resize(static_cast<std::size_t>(B));
}

// Per-block input pointer/shape: pool output for blocks 1 and 2's successor,
// activations otherwise.
template <typename T>
const T* block_input(const ForwardCache<T>& c, int block) {
    switch (block) {
        case 0: return c.input.data();
        case 1: return c.pooled[0].data();
        case 2: return c.pooled[1].data();
        default: return c.act[2].data();
    }
}

}  // namespace detail

// Train-mode forward over a batch. The caller fills cache.input (B patches,
// already normalized) and cache.mask (B x flat dropout scales); batch-norm
// uses batch statistics and folds them into the running estimates.
template <typename T>
void forward_train(ModelT<T>& m, ForwardCache<T>& c, int threads = 0) {
    const NetPlan& p = m.plan;
    const std::int64_t B = c.batch;
    if (B <= 0) throw Error(ErrorKind::invalid_argument, "empty batch");
    if (c.input.size() != static_cast<std::size_t>(B * p.conv_in[0].numel()))
        throw Error(ErrorKind::invalid_argument, "conv block 0: input size does not match batch");
    if (c.mask.size() != static_cast<std::size_t>(B * p.flat))
        throw Error(ErrorKind::invalid_argument, "dropout: mask size does not match batch");
    const int workers = resolve_threads(threads);
    detail::resize_cache(p, B, c);

    for (int blk = 0; blk < 4; ++blk) {
        const auto s = static_cast<std::size_t>(blk);
        const StageShape in_s = p.conv_in[s];
        const StageShape out_s = p.conv_out[s];
        const T* in = detail::block_input(c, blk);
        const Conv<T>& cv = m.conv[s];
        T* z = c.z[s].data();
        parallel_chunks(B, workers, [&](std::int64_t b0, std::int64_t b1) {
            for (std::int64_t b = b0; b < b1; ++b)
                conv3x3_forward(in + b * in_s.numel(), in_s.h, in_s.w, in_s.c,
                                cv.w.data(), cv.b.data(), cv.out_ch, z + b * out_s.numel());
        });

        BatchNorm<T>& bn = m.bn[s];
        const std::int64_t rows = B * out_s.h * out_s.w;
        bn_batch_stats(z, rows, bn.ch, c.bn_mean[s], c.bn_inv_std[s]);
        auto& inv_std = c.bn_inv_std[s];
        for (std::int64_t ch = 0; ch < bn.ch; ++ch) {
            const auto cc = static_cast<std::size_t>(ch);
            const double var = inv_std[cc];
            bn.run_mean[cc] = static_cast<T>((1.0 - m.bn_momentum) * bn.run_mean[cc] +
                                             m.bn_momentum * c.bn_mean[s][cc]);
            bn.run_var[cc] = static_cast<T>((1.0 - m.bn_momentum) * bn.run_var[cc] +
                                            m.bn_momentum * var);
            inv_std[cc] = 1.0 / std::sqrt(var + m.bn_eps);
        }
        bn.stats_ready = true;
        T* act = c.act[s].data();
        const std::int64_t per_sample_rows = out_s.h * out_s.w;
        parallel_chunks(B, workers, [&](std::int64_t b0, std::int64_t b1) {
            const std::int64_t r0 = b0 * per_sample_rows, r1 = b1 * per_sample_rows;
            bn_apply(z + r0 * bn.ch, r1 - r0, bn.ch, c.bn_mean[s].data(),
                     c.bn_inv_std[s].data(), bn.gamma.data(), bn.beta.data(), act + r0 * bn.ch);
            relu_inplace(act + r0 * bn.ch, (r1 - r0) * bn.ch);
        });

        if (blk < 2) {
            const StageShape po = p.pool_out[s];
            T* pooled = c.pooled[s].data();
            std::uint8_t* am = c.argmax[s].data();
            parallel_chunks(B, workers, [&](std::int64_t b0, std::int64_t b1) {
                for (std::int64_t b = b0; b < b1; ++b)
                    maxpool2x2_forward(act + b * out_s.numel(), out_s.h, out_s.w, out_s.c,
                                       pooled + b * po.numel(), am + b * po.numel());
            });
        }
    }

    parallel_chunks(B, workers, [&](std::int64_t b0, std::int64_t b1) {
        apply_mask(c.act[3].data() + b0 * p.flat, c.mask.data() + b0 * p.flat,
                   (b1 - b0) * p.flat, c.dense_in.data() + b0 * p.flat);
        for (std::int64_t b = b0; b < b1; ++b)
            c.preds[static_cast<std::size_t>(b)] =
                m.dense.b[0] + dot_lanes(m.dense.w.data(), c.dense_in.data() + b * p.flat, p.flat);
    });
}

// loss = sqrt(mean((pred - target)^2)); the gradient divides by the loss, so
// it is floored to keep the derivative finite on an exact fit.
template <typename T>
double rmse_loss(const std::vector<T>& preds, const std::vector<T>& targets,
                 std::vector<T>* dpred = nullptr) {
    if (preds.empty() || preds.size() != targets.size())
        throw Error(ErrorKind::invalid_argument, "loss needs matching, non-empty predictions and targets");
    const std::int64_t n = static_cast<std::int64_t>(preds.size());
    double sq = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(preds[static_cast<std::size_t>(i)]) -
                         static_cast<double>(targets[static_cast<std::size_t>(i)]);
        sq += d * d;
    }
    const double loss = std::sqrt(sq / static_cast<double>(n));
    if (dpred) {
        dpred->resize(preds.size());
        const double denom = static_cast<double>(n) * std::max(loss, 1e-12);
        for (std::int64_t i = 0; i < n; ++i) {
            const auto s = static_cast<std::size_t>(i);
            (*dpred)[s] = static_cast<T>((static_cast<double>(preds[s]) -
                                          static_cast<double>(targets[s])) / denom);
        }
    }
    return loss;
}

// Backward pass. Weight gradients are accumulated into fixed 256-sample
// chunks that are then reduced in chunk order, so the result is identical for
// any worker count; batch-norm reductions run single-threaded in double.
template <typename T>
void backward(ModelT<T>& m, ForwardCache<T>& c, const std::vector<T>& dpred,
              ParamGrads<T>& grads, int threads = 0) {
    const NetPlan& p = m.plan;
    const std::int64_t B = c.batch;
    const int workers = resolve_threads(threads);
    grads.zero();

    constexpr std::int64_t kChunk = 256;
    const std::int64_t n_chunks = (B + kChunk - 1) / kChunk;
    auto& chunk = c.chunk_grads;
    if (chunk.size() < static_cast<std::size_t>(n_chunks)) {
        chunk.resize(static_cast<std::size_t>(n_chunks));
        for (auto& ch : chunk) ch.init_like(m);
    } else {
        chunk.resize(static_cast<std::size_t>(n_chunks));
        for (auto& ch : chunk) ch.zero();
    }

    for (int i = 0; i < 4; ++i) {
        const auto s = static_cast<std::size_t>(i);
        c.dz[s].resize(c.z[s].size());
        c.dact[s].resize(c.act[s].size());
    }
    for (int i = 0; i < 2; ++i)
        c.dpooled[static_cast<std::size_t>(i)].resize(c.pooled[static_cast<std::size_t>(i)].size());
    c.ddense_in.resize(c.dense_in.size());

    // dense + dropout
    parallel_chunks(n_chunks, workers, [&](std::int64_t k0, std::int64_t k1) {
        for (std::int64_t k = k0; k < k1; ++k) {
            auto& g = chunk[static_cast<std::size_t>(k)];
            const std::int64_t b0 = k * kChunk, b1 = std::min(B, b0 + kChunk);
            for (std::int64_t b = b0; b < b1; ++b) {
                const T d = dpred[static_cast<std::size_t>(b)];
                g.dense_b[0] += d;
                const T* in = c.dense_in.data() + b * p.flat;
                T* dw = g.dense_w.data();
                for (std::int64_t j = 0; j < p.flat; ++j) dw[j] += d * in[j];
                T* di = c.ddense_in.data() + b * p.flat;
                const T* w = m.dense.w.data();
                for (std::int64_t j = 0; j < p.flat; ++j) di[j] = d * w[j];
            }
        }
    });
    parallel_chunks(B, workers, [&](std::int64_t b0, std::int64_t b1) {
        apply_mask(c.ddense_in.data() + b0 * p.flat, c.mask.data() + b0 * p.flat,
                   (b1 - b0) * p.flat, c.dact[3].data() + b0 * p.flat);
    });

    for (int blk = 3; blk >= 0; --blk) {
        const auto s = static_cast<std::size_t>(blk);
        const StageShape in_s = p.conv_in[s];
        const StageShape out_s = p.conv_out[s];
        BatchNorm<T>& bn = m.bn[s];
        const std::int64_t n_elems = B * out_s.numel();

        parallel_chunks(B, workers, [&](std::int64_t b0, std::int64_t b1) {
            relu_backward_inplace(c.act[s].data() + b0 * out_s.numel(),
                                  c.dact[s].data() + b0 * out_s.numel(),
                                  (b1 - b0) * out_s.numel());
        });
        (void)n_elems;
        bn_backward(c.z[s].data(), c.dact[s].data(), B * out_s.h * out_s.w, bn.ch,
                    c.bn_mean[s].data(), c.bn_inv_std[s].data(), bn.gamma.data(),
                    grads.bn_gamma[s].data(), grads.bn_beta[s].data(), c.dz[s].data());

        const T* in = detail::block_input(c, blk);
        // gradient target for this block's input
        T* din_all = nullptr;
        if (blk == 3) din_all = c.dact[2].data();
        else if (blk == 2) din_all = c.dpooled[1].data();
        else if (blk == 1) din_all = c.dpooled[0].data();
        if (din_all) {
            const std::int64_t in_elems = in_s.numel();
            parallel_chunks(B, workers, [&](std::int64_t b0, std::int64_t b1) {
                std::memset(din_all + b0 * in_elems, 0,
                            static_cast<std::size_t>((b1 - b0) * in_elems) * sizeof(T));
            });
        }
        const Conv<T>& cv = m.conv[s];
        parallel_chunks(n_chunks, workers, [&](std::int64_t k0, std::int64_t k1) {
            for (std::int64_t k = k0; k < k1; ++k) {
                auto& g = chunk[static_cast<std::size_t>(k)];
                const std::int64_t b0 = k * kChunk, b1 = std::min(B, b0 + kChunk);
                for (std::int64_t b = b0; b < b1; ++b)
                    conv3x3_backward(in + b * in_s.numel(), in_s.h, in_s.w, in_s.c,
                                     cv.w.data(), cv.out_ch, c.dz[s].data() + b * out_s.numel(),
                                     g.conv_w[s].data(), g.conv_b[s].data(),
                                     din_all ? din_all + b * in_s.numel() : nullptr);
            }
        });

        if (blk == 2 || blk == 1) {
            // route the pooled gradient back through the argmax
            const int pi = blk - 1;  // pool feeding this block
            const auto ps = static_cast<std::size_t>(pi);
            const StageShape pre = p.conv_out[ps];
            const StageShape po = p.pool_out[ps];
            parallel_chunks(B, workers, [&](std::int64_t b0, std::int64_t b1) {
                for (std::int64_t b = b0; b < b1; ++b)
                    maxpool2x2_backward(pre.h, pre.w, pre.c,
                                        c.dpooled[ps].data() + b * po.numel(),
                                        c.argmax[ps].data() + b * po.numel(),
                                        c.dact[ps].data() + b * pre.numel());
            });
        }
    }

    for (const auto& ch : chunk) grads.add(ch);
}

// Per-sample inference scratch; reusable across calls.
template <typename T>
struct InferScratch {
    std::array<std::vector<T>, 4> z;
    std::array<std::vector<T>, 2> pooled;
    // folded batch-norm: y = x * scale + shift, precomputed per channel
    std::array<std::vector<T>, 4> bn_scale, bn_shift;
    bool folded = false;

    void init(const ModelT<T>& m) {
        for (int i = 0; i < 4; ++i) {
            const auto s = static_cast<std::size_t>(i);
            z[s].resize(static_cast<std::size_t>(m.plan.conv_out[s].numel()));
        }
        for (int i = 0; i < 2; ++i) {
            const auto s = static_cast<std::size_t>(i);
            pooled[s].resize(static_cast<std::size_t>(m.plan.pool_out[s].numel()));
        }
        for (int i = 0; i < 4; ++i) {
            const auto s = static_cast<std::size_t>(i);
            const BatchNorm<T>& bn = m.bn[s];
            if (!bn.stats_ready)
                throw Error(ErrorKind::invalid_argument,
                            "batch-norm statistics uninitialized: train or load a trained model "
                            "before running inference");
            bn_scale[s].resize(static_cast<std::size_t>(bn.ch));
            bn_shift[s].resize(static_cast<std::size_t>(bn.ch));
            for (std::int64_t ch = 0; ch < bn.ch; ++ch) {
                const auto cc = static_cast<std::size_t>(ch);
                const double sc = bn.gamma[cc] / std::sqrt(static_cast<double>(bn.run_var[cc]) + m.bn_eps);
                bn_scale[s][cc] = static_cast<T>(sc);
                bn_shift[s][cc] = static_cast<T>(bn.beta[cc] - bn.run_mean[cc] * sc);
            }
        }
        folded = true;
    }
};

// Inference on one normalized patch. Batch norm runs off the running
// statistics and dropout is the identity.
template <typename T>
T forward_infer_one(const ModelT<T>& m, const T* patch, InferScratch<T>& s) {
    if (!s.folded) s.init(m);
    const NetPlan& p = m.plan;
    const T* cur = patch;
    for (int blk = 0; blk < 4; ++blk) {
        const auto bs = static_cast<std::size_t>(blk);
        const StageShape in_s = p.conv_in[bs];
        const StageShape out_s = p.conv_out[bs];
        T* z = s.z[bs].data();
        conv3x3_forward(cur, in_s.h, in_s.w, in_s.c, m.conv[bs].w.data(), m.conv[bs].b.data(),
                        m.conv[bs].out_ch, z);
        const T* scale = s.bn_scale[bs].data();
        const T* shift = s.bn_shift[bs].data();
        const std::int64_t ch = out_s.c;
        for (std::int64_t r = 0; r < out_s.h * out_s.w; ++r) {
            T* row = z + r * ch;
            for (std::int64_t c = 0; c < ch; ++c) {
                const T v = row[c] * scale[c] + shift[c];
                row[c] = v > T(0) ? v : T(0);
            }
        }
        if (blk < 2) {
            const StageShape po = p.pool_out[bs];
            // argmax is irrelevant here; reuse a throwaway buffer
            thread_local std::vector<std::uint8_t> am;
            am.resize(static_cast<std::size_t>(po.numel()));
            maxpool2x2_forward(z, out_s.h, out_s.w, out_s.c, s.pooled[bs].data(), am.data());
            cur = s.pooled[bs].data();
        } else {
            cur = z;
        }
    }
    return m.dense.b[0] + dot_lanes(m.dense.w.data(), cur, p.flat);
}

}  // namespace radsynth
