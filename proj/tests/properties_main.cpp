// Randomized property suites, runnable on their own. Each suite draws its
// cases from a fixed seed, checks an invariant per case, and prints one
// summary line; the exit code is the number of failing suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "error.hpp"
#include "glcm.hpp"
#include "image.hpp"
#include "layers.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "test_util.hpp"

using namespace radsynth;

namespace {

constexpr int kCases = 64;

int g_failed_suites = 0;

// Runs `body(case_rng)` kCases times; body returns an empty string on
// success or a description of the violation.
template <typename Body>
void suite(const char* name, std::uint64_t seed, Body&& body) {
    int failures = 0;
    std::string first_failure;
    for (int i = 0; i < kCases; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const std::string msg = body(rng, i);
        if (!msg.empty()) {
            ++failures;
            if (first_failure.empty())
                first_failure = "case " + std::to_string(i) + ": " + msg;
        }
    }
    if (failures == 0) {
        std::printf("ok   %-28s %d cases\n", name, kCases);
    } else {
        std::printf("FAIL %-28s %d/%d cases failed; %s\n", name, failures, kCases,
                    first_failure.c_str());
        ++g_failed_suites;
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- suites -------------------------------------------------------------------

// Renaming gray levels permutes GLCM cells but not the count multiset, so
// the entropy map must not move.
std::string relabel_case(Rng& rng, int i) {
    const std::int64_t h = 6 + static_cast<std::int64_t>(rng.next_below(18));
    const std::int64_t w = 6 + static_cast<std::int64_t>(rng.next_below(18));
    const std::uint32_t g = 3 + static_cast<std::uint32_t>(rng.next_below(8));
    GlcmParams p;
    p.g = g;
    p.window = i % 2 == 0 ? 3 : 5;
    const std::int32_t offsets[][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
    p.offset_dr = offsets[i % 4][0];
    p.offset_dc = offsets[i % 4][1];
    p.symmetric = i % 3 != 0;

    QuantizedImage img = testutil::random_qimage(rng.next_u64(), h, w, g);
    std::vector<std::uint16_t> perm(g);
    for (std::uint32_t l = 0; l < g; ++l) perm[l] = static_cast<std::uint16_t>(l);
    rng.shuffle(perm);
    QuantizedImage relabeled = img;
    for (auto& v : relabeled.levels) v = perm[v];

    const FeatureMap a = entropy_map_incremental(img, p);
    const FeatureMap b = entropy_map_incremental(relabeled, p);
    const double d = testutil::max_abs_diff(a, b);
    if (d > 1e-9) return "entropy moved by " + fmt(d) + " under relabeling";
    return "";
}

std::string relu_case(Rng& rng, int) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng.next_below(500));
    std::vector<float> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = static_cast<float>(rng.next_normal() * 3.0);
    std::vector<float> once = x;
    relu_inplace(once.data(), n);
    std::vector<float> twice = once;
    relu_inplace(twice.data(), n);
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        if (once[s] < 0.0f) return "negative output " + fmt(once[s]);
        if (once[s] != twice[s]) return "not idempotent at " + std::to_string(i);
        if (x[s] > 0.0f && once[s] != x[s]) return "positive input changed";
        if (x[s] <= 0.0f && once[s] != 0.0f) return "non-positive input not clamped";
    }
    return "";
}

// Inverted dropout keeps the expectation: the mask itself averages to 1.
std::string dropout_case(Rng& rng, int) {
    const double rate = 0.05 + 0.30 * rng.next_double();
    std::vector<float> mask(10000);
    make_dropout_mask(rng, rate, mask);
    double sum = 0.0;
    for (float m : mask) {
        if (m != 0.0f && std::abs(m - 1.0 / (1.0 - rate)) > 1e-6)
            return "kept element not scaled by 1/(1-rate)";
        sum += m;
    }
    const double mean = sum / static_cast<double>(mask.size());
    if (std::abs(mean - 1.0) > 0.02)
        return "mask mean " + fmt(mean) + " at rate " + fmt(rate);
    return "";
}

// Training-mode batch norm leaves each channel with mean beta and variance
// gamma^2 (up to the epsilon in the denominator).
std::string bn_case(Rng& rng, int) {
    const std::int64_t rows = 64 + static_cast<std::int64_t>(rng.next_below(200));
    const std::int64_t ch = 1 + static_cast<std::int64_t>(rng.next_below(8));
    std::vector<double> x(static_cast<std::size_t>(rows * ch));
    for (auto& v : x) v = rng.next_normal() * (1.0 + rng.next_double() * 4.0);
    std::vector<double> gamma(static_cast<std::size_t>(ch)), beta(static_cast<std::size_t>(ch));
    for (auto& v : gamma) v = 0.5 + rng.next_double();
    for (auto& v : beta) v = rng.next_normal();

    std::vector<double> mean, var;
    bn_batch_stats(x.data(), rows, ch, mean, var);
    std::vector<double> inv_std(static_cast<std::size_t>(ch));
    const double eps = 1e-12;
    for (std::int64_t c = 0; c < ch; ++c)
        inv_std[static_cast<std::size_t>(c)] = 1.0 / std::sqrt(var[static_cast<std::size_t>(c)] + eps);
    std::vector<double> y(x.size());
    bn_apply(x.data(), rows, ch, mean.data(), inv_std.data(), gamma.data(), beta.data(),
             y.data());

    for (std::int64_t c = 0; c < ch; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        double m = 0.0;
        for (std::int64_t r = 0; r < rows; ++r) m += y[static_cast<std::size_t>(r * ch + c)];
        m /= static_cast<double>(rows);
        double v = 0.0;
        for (std::int64_t r = 0; r < rows; ++r) {
            const double d = y[static_cast<std::size_t>(r * ch + c)] - m;
            v += d * d;
        }
        v /= static_cast<double>(rows);
        if (std::abs(m - beta[cc]) > 1e-9)
            return "channel mean " + fmt(m) + " != beta " + fmt(beta[cc]);
        if (std::abs(v - gamma[cc] * gamma[cc]) > 1e-6 * std::max(1.0, gamma[cc] * gamma[cc]))
            return "channel variance " + fmt(v) + " != gamma^2 " + fmt(gamma[cc] * gamma[cc]);
    }
    return "";
}

// Swapping reference and test negates the bias and mirrors the limits.
std::string ba_case(Rng& rng, int) {
    const std::size_t n = 2 + rng.next_below(200);
    PairedSample s;
    s.reference.resize(n);
    s.test.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.reference[i] = rng.next_normal() * 5.0;
        s.test[i] = s.reference[i] + rng.next_normal();
    }
    const BlandAltman fwd = bland_altman(s);
    std::swap(s.reference, s.test);
    const BlandAltman rev = bland_altman(s);
    if (fwd.bias != -rev.bias) return "bias not antisymmetric";
    if (fwd.loa_low != -rev.loa_high || fwd.loa_high != -rev.loa_low)
        return "limits of agreement not mirrored";
    return "";
}

// r(x, a*y + b) = sign(a) * r(x, y)
std::string pearson_affine_case(Rng& rng, int) {
    const std::size_t n = 3 + rng.next_below(100);
    PairedSample s;
    s.reference.resize(n);
    s.test.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.reference[i] = rng.next_normal();
        s.test[i] = 0.3 * s.reference[i] + rng.next_normal();
    }
    double a = 0.0;
    while (std::abs(a) < 0.1) a = (rng.next_double() - 0.5) * 6.0;
    const double b = (rng.next_double() - 0.5) * 10.0;

    double r0, r1;
    try {
        r0 = pearson(s);
        PairedSample t = s;
        for (auto& v : t.test) v = a * v + b;
        r1 = pearson(t);
    } catch (const Error&) {
        return "unexpected degenerate sample";
    }
    const double want = a > 0 ? r0 : -r0;
    if (std::abs(r1 - want) > 1e-9)
        return "r " + fmt(r1) + " != " + fmt(want) + " after affine map";
    return "";
}

}  // namespace

int main() {
    suite("entropy_relabel_invariance", 0xA1, relabel_case);
    suite("relu_idempotent_nonneg", 0xA2, relu_case);
    suite("dropout_expectation", 0xA3, dropout_case);
    suite("bn_train_normalization", 0xA4, bn_case);
    suite("bland_altman_antisymmetry", 0xA5, ba_case);
    suite("pearson_affine_invariance", 0xA6, pearson_affine_case);
    if (g_failed_suites == 0) {
        std::printf("all property suites passed\n");
    } else {
        std::printf("%d property suite(s) failed\n", g_failed_suites);
    }
    return g_failed_suites;
}
