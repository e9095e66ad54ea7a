#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glcm.hpp"
#include "image.hpp"

namespace radsynth {

// Two measurements of the same quantity, index-aligned.
struct PairedSample {
    std::vector<double> reference;
    std::vector<double> test;
};

// Pearson product-moment correlation. Undefined when either series is
// constant; that raises a domain error rather than returning a value.
double pearson(const PairedSample& s);

struct PctDiff {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

// Per-pair fractional difference |test - ref| / |ref|. References smaller
// than 1e-12 in magnitude make the ratio meaningless; they raise a domain
// error naming the offending indices.
PctDiff percentage_difference(const PairedSample& s);

struct BlandAltman {
    double bias = 0.0;      // mean of (reference - test)
    double loa_low = 0.0;   // bias - 1.96 * sd
    double loa_high = 0.0;  // bias + 1.96 * sd
};

BlandAltman bland_altman(const PairedSample& s);

// Values of `map` at the mask's true pixels, row-major order. The mask must
// match the map's grid and select at least one pixel.
std::vector<double> roi_extract(const FeatureMap& map, const RoiMask& mask);

// One row of an agreement table. Degenerate statistics (constant series for
// r, every reference excluded for the fractional difference) are reported as
// NaN rather than failing the whole report; `excluded` counts the reference
// values below 1e-12 that were left out of the fractional difference.
struct AgreementRow {
    std::string label;
    std::int64_t n = 0;
    double pearson_r = 0.0;
    double pct_mean = 0.0;
    double pct_std = 0.0;
    double ba_bias = 0.0;
    double ba_loa_low = 0.0;
    double ba_loa_high = 0.0;
    std::int64_t excluded = 0;
};

// One image's contribution: a reference map, the map under test, and the
// labeled regions to score them over.
struct EvalInput {
    const FeatureMap* reference = nullptr;
    const FeatureMap* test = nullptr;
    std::vector<std::pair<std::string, const RoiMask*>> masks;
};

// Agreement table: one row per distinct label (pixels pooled across all
// inputs that use the label) plus a final "pooled" row over every labeled
// pixel. Row order follows first appearance of each label.
std::vector<AgreementRow> agreement_report(const std::vector<EvalInput>& inputs);

// report CSV: label,n,pearson_r,pct_mean,pct_std,ba_bias,ba_loa_low,ba_loa_high,excluded
void write_report_csv(const std::vector<AgreementRow>& rows, const std::string& path);

// Scatter/difference pairs behind the report, one CSV row per pixel:
// label,oracle_value,synth_value,pair_mean,pair_diff
void write_plot_csv(const std::vector<EvalInput>& inputs, const std::string& path);

}  // namespace radsynth
