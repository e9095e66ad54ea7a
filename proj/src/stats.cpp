#include "stats.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "error.hpp"
#include "image_io.hpp"

namespace radsynth {

namespace {

constexpr double kNearZero = 1e-12;

void check_pair(const PairedSample& s) {
    if (s.reference.empty() || s.reference.size() != s.test.size())
        throw Error(ErrorKind::invalid_argument,
                    "paired sample needs equal-length, non-empty series");
}

double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

// r with NaN for the degenerate constant-series case; the public pearson()
// turns that into an error, reports keep the NaN.
double pearson_or_nan(const PairedSample& s) {
    const double mx = mean_of(s.reference);
    const double my = mean_of(s.test);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < s.reference.size(); ++i) {
        const double dx = s.reference[i] - mx;
        const double dy = s.test[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

struct PctDiffOrNan {
    double mean, stddev;
    std::int64_t excluded;
};

PctDiffOrNan pct_diff_excluding(const PairedSample& s) {
    std::vector<double> d;
    d.reserve(s.reference.size());
    std::int64_t excluded = 0;
    for (std::size_t i = 0; i < s.reference.size(); ++i) {
        if (std::fabs(s.reference[i]) < kNearZero) {
            ++excluded;
            continue;
        }
        d.push_back(std::fabs(s.test[i] - s.reference[i]) / std::fabs(s.reference[i]));
    }
    if (d.empty())
        return {std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN(), excluded};
    const double m = mean_of(d);
    double var = 0.0;
    for (double x : d) var += (x - m) * (x - m);
    var /= static_cast<double>(d.size());
    return {m, std::sqrt(var), excluded};
}

AgreementRow row_from(const std::string& label, const PairedSample& s) {
    AgreementRow row;
    row.label = label;
    row.n = static_cast<std::int64_t>(s.reference.size());
    row.pearson_r = pearson_or_nan(s);
    const PctDiffOrNan pd = pct_diff_excluding(s);
    row.pct_mean = pd.mean;
    row.pct_std = pd.stddev;
    row.excluded = pd.excluded;
    const BlandAltman ba = bland_altman(s);
    row.ba_bias = ba.bias;
    row.ba_loa_low = ba.loa_low;
    row.ba_loa_high = ba.loa_high;
    return row;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double pearson(const PairedSample& s) {
    check_pair(s);
    const double r = pearson_or_nan(s);
    if (std::isnan(r))
        throw Error(ErrorKind::domain,
                    "correlation is undefined when a series is constant");
    return r;
}

PctDiff percentage_difference(const PairedSample& s) {
    check_pair(s);
    std::string bad;
    for (std::size_t i = 0; i < s.reference.size(); ++i) {
        if (std::fabs(s.reference[i]) < kNearZero) {
            if (!bad.empty()) bad += ", ";
            bad += std::to_string(i);
        }
    }
    if (!bad.empty())
        throw Error(ErrorKind::domain,
                    "percentage difference undefined for near-zero references at indices " + bad);
    const PctDiffOrNan pd = pct_diff_excluding(s);
    return {pd.mean, pd.stddev};
}

BlandAltman bland_altman(const PairedSample& s) {
    check_pair(s);
    const std::size_t n = s.reference.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += s.reference[i] - s.test[i];
    const double bias = sum / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (s.reference[i] - s.test[i]) - bias;
        var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    return {bias, bias - 1.96 * sd, bias + 1.96 * sd};
}

std::vector<double> roi_extract(const FeatureMap& map, const RoiMask& mask) {
    if (map.height != mask.height || map.width != mask.width)
        throw Error(ErrorKind::invalid_argument, "mask grid does not match the map");
    std::vector<double> out;
    for (std::size_t i = 0; i < map.values.size(); ++i)
        if (mask.flags[i]) out.push_back(map.values[i]);
    if (out.empty())
        throw Error(ErrorKind::invalid_argument, "mask selects no pixels");
    return out;
}

std::vector<AgreementRow> agreement_report(const std::vector<EvalInput>& inputs) {
    if (inputs.empty())
        throw Error(ErrorKind::invalid_argument, "agreement report needs at least one map pair");
    std::vector<std::string> labels;
    std::vector<PairedSample> per_label;
    PairedSample pooled;
    for (const auto& in : inputs) {
        if (!in.reference || !in.test)
            throw Error(ErrorKind::invalid_argument, "agreement input is missing a map");
        if (in.reference->height != in.test->height || in.reference->width != in.test->width)
            throw Error(ErrorKind::invalid_argument, "paired maps disagree on size");
        for (const auto& [label, mask] : in.masks) {
            if (!mask) throw Error(ErrorKind::invalid_argument, "agreement input is missing a mask");
            const std::vector<double> ref = roi_extract(*in.reference, *mask);
            const std::vector<double> test = roi_extract(*in.test, *mask);
            std::size_t li = 0;
            while (li < labels.size() && labels[li] != label) ++li;
            if (li == labels.size()) {
                labels.push_back(label);
                per_label.emplace_back();
            }
            auto append = [](PairedSample& dst, const std::vector<double>& r,
                             const std::vector<double>& t) {
                dst.reference.insert(dst.reference.end(), r.begin(), r.end());
                dst.test.insert(dst.test.end(), t.begin(), t.end());
            };
            append(per_label[li], ref, test);
            append(pooled, ref, test);
        }
    }
    if (pooled.reference.empty())
        throw Error(ErrorKind::invalid_argument, "agreement report needs at least one mask");

    std::vector<AgreementRow> rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
        rows.push_back(row_from(labels[i], per_label[i]));
    rows.push_back(row_from("pooled", pooled));
    return rows;
}

void write_report_csv(const std::vector<AgreementRow>& rows, const std::string& path) {
    std::string out =
        "label,n,pearson_r,pct_mean,pct_std,ba_bias,ba_loa_low,ba_loa_high,excluded\n";
    for (const auto& r : rows) {
        out += r.label + "," + std::to_string(r.n) + "," + fmt_double(r.pearson_r) + "," +
               fmt_double(r.pct_mean) + "," + fmt_double(r.pct_std) + "," +
               fmt_double(r.ba_bias) + "," + fmt_double(r.ba_loa_low) + "," +
               fmt_double(r.ba_loa_high) + "," + std::to_string(r.excluded) + "\n";
    }
    atomic_write_file(path, out);
}

void write_plot_csv(const std::vector<EvalInput>& inputs, const std::string& path) {
    std::string out = "label,oracle_value,synth_value,pair_mean,pair_diff\n";
    for (const auto& in : inputs) {
        for (const auto& [label, mask] : in.masks) {
            const std::vector<double> ref = roi_extract(*in.reference, *mask);
            const std::vector<double> test = roi_extract(*in.test, *mask);
            for (std::size_t i = 0; i < ref.size(); ++i) {
                out += label + "," + fmt_double(ref[i]) + "," + fmt_double(test[i]) + "," +
                       fmt_double(0.5 * (ref[i] + test[i])) + "," +
                       fmt_double(ref[i] - test[i]) + "\n";
            }
        }
    }
    atomic_write_file(path, out);
}

}  // namespace radsynth
