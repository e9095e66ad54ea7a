#include <cmath>
#include <fstream>
#include <string>

#include "doctest.h"
#include "error.hpp"
#include "stats.hpp"
#include "test_util.hpp"

using namespace radsynth;

TEST_CASE("pearson on a worked example") {
    // means 2.5/2.5, cov 1, sd^2 1.25 each -> r = 1/1.25 = 0.6
    const PairedSample s{{1, 2, 3, 4}, {2, 1, 4, 3}};
    CHECK(pearson(s) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("pearson is exactly one for a positive affine image") {
    const PairedSample s{{1, 2, 3}, {2, 4, 6}};
    CHECK(std::abs(pearson(s) - 1.0) <= 1e-12);
}

TEST_CASE("pearson refuses constant series") {
    CHECK_THROWS_AS(pearson({{1, 1, 1}, {1, 2, 3}}), Error);
    CHECK_THROWS_AS(pearson({{1, 2, 3}, {5, 5, 5}}), Error);
    try {
        pearson({{2, 2}, {3, 4}});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
}

TEST_CASE("pearson validates shape") {
    CHECK_THROWS_AS(pearson({{}, {}}), Error);
    CHECK_THROWS_AS(pearson({{1, 2}, {1}}), Error);
    CHECK_THROWS_AS(pearson({{1}, {1}}), Error);  // a single pair has no correlation
}

TEST_CASE("percentage difference on a worked example") {
    const PctDiff d = percentage_difference({{2, 4}, {1, 5}});
    CHECK(std::abs(d.mean - 0.375) <= 1e-15);  // (0.5 + 0.25) / 2
    CHECK(std::abs(d.stddev - 0.125) <= 1e-15);
}

TEST_CASE("near-zero references make the ratio undefined") {
    try {
        percentage_difference({{1.0, 0.0, 2.0, 1e-13}, {1, 1, 1, 1}});
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
        const std::string msg = e.what();
        CHECK(msg.find("1") != std::string::npos);  // offending indices are listed
        CHECK(msg.find("3") != std::string::npos);
    }
}

TEST_CASE("bland-altman on worked examples") {
    const BlandAltman constant = bland_altman({{1, 2, 3}, {2, 3, 4}});
    CHECK(std::abs(constant.bias - (-1.0)) <= 1e-12);
    CHECK(std::abs(constant.loa_low - (-1.0)) <= 1e-12);  // zero spread
    CHECK(std::abs(constant.loa_high - (-1.0)) <= 1e-12);

    // differences {0, 2}: bias 1, population sd 1
    const BlandAltman spread = bland_altman({{0, 2}, {0, 0}});
    CHECK(spread.bias == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(spread.loa_low == doctest::Approx(1.0 - 1.96).epsilon(1e-15));
    CHECK(spread.loa_high == doctest::Approx(1.0 + 1.96).epsilon(1e-15));
}

TEST_CASE("roi extraction picks masked values in row-major order") {
    FeatureMap map;
    map.height = 2;
    map.width = 3;
    map.values = {10, 11, 12, 13, 14, 15};
    RoiMask mask;
    mask.height = 2;
    mask.width = 3;
    mask.flags = {1, 0, 1, 0, 0, 1};
    CHECK(roi_extract(map, mask) == std::vector<double>{10, 12, 15});

    mask.width = 2;
    mask.flags = {1, 0, 1, 0};
    CHECK_THROWS_AS(roi_extract(map, mask), Error);
    mask.width = 3;
    mask.flags = {0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(roi_extract(map, mask), Error);
}

namespace {

FeatureMap map_of(std::vector<double> v, std::int64_t h, std::int64_t w) {
    FeatureMap m;
    m.height = h;
    m.width = w;
    m.values = std::move(v);
    return m;
}

RoiMask mask_of(std::vector<std::uint8_t> f, std::int64_t h, std::int64_t w) {
    RoiMask m;
    m.height = h;
    m.width = w;
    m.flags = std::move(f);
    return m;
}

}  // namespace

TEST_CASE("agreement report pools labels across inputs and appends a pooled row") {
    const FeatureMap ref1 = map_of({1, 2, 3, 4}, 2, 2);
    const FeatureMap test1 = map_of({1.1, 2.2, 2.7, 4.4}, 2, 2);
    const FeatureMap ref2 = map_of({2, 4, 6, 8}, 2, 2);
    const FeatureMap test2 = map_of({2, 5, 5, 9}, 2, 2);
    const RoiMask left = mask_of({1, 0, 1, 0}, 2, 2);
    const RoiMask right = mask_of({0, 1, 0, 1}, 2, 2);

    std::vector<EvalInput> inputs(2);
    inputs[0].reference = &ref1;
    inputs[0].test = &test1;
    inputs[0].masks = {{"left", &left}, {"right", &right}};
    inputs[1].reference = &ref2;
    inputs[1].test = &test2;
    inputs[1].masks = {{"left", &left}};

    const auto rows = agreement_report(inputs);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].label == "left");
    CHECK(rows[1].label == "right");
    CHECK(rows[2].label == "pooled");
    CHECK(rows[0].n == 4);  // two pixels from each input
    CHECK(rows[1].n == 2);
    CHECK(rows[2].n == 6);
    CHECK(rows[2].excluded == 0);

    // pooled row equals the stats over all labeled pixels
    const PairedSample all{{1, 3, 2, 4, 2, 6}, {1.1, 2.7, 2.2, 4.4, 2, 5}};
    CHECK(rows[2].pearson_r == doctest::Approx(pearson(all)).epsilon(1e-12));
    const BlandAltman ba = bland_altman(all);
    CHECK(rows[2].ba_bias == doctest::Approx(ba.bias).epsilon(1e-12));
}

TEST_CASE("agreement report excludes near-zero references and flags degenerate stats") {
    const FeatureMap ref = map_of({0.0, 2, 3, 4}, 2, 2);
    const FeatureMap test = map_of({1, 2, 3, 4}, 2, 2);
    const RoiMask all = mask_of({1, 1, 1, 1}, 2, 2);
    std::vector<EvalInput> inputs(1);
    inputs[0].reference = &ref;
    inputs[0].test = &test;
    inputs[0].masks = {{"all", &all}};
    const auto rows = agreement_report(inputs);
    CHECK(rows[0].excluded == 1);  // the zero reference leaves the pct stats
    CHECK(rows[0].n == 4);         // but stays in r and bland-altman
    CHECK(std::isfinite(rows[0].pct_mean));

    // constant test series: r is undefined, reported as NaN rather than thrown
    const FeatureMap flat = map_of({5, 5, 5, 5}, 2, 2);
    inputs[0].test = &flat;
    const auto degenerate = agreement_report(inputs);
    CHECK(std::isnan(degenerate[0].pearson_r));
    CHECK(std::isfinite(degenerate[0].ba_bias));
}

TEST_CASE("report and plot CSVs carry the documented headers") {
    const std::string dir = testutil::scratch("stats_csv");
    const FeatureMap ref = map_of({1, 2, 3, 4}, 2, 2);
    const FeatureMap test = map_of({1, 2, 3, 5}, 2, 2);
    const RoiMask all = mask_of({1, 1, 1, 1}, 2, 2);
    std::vector<EvalInput> inputs(1);
    inputs[0].reference = &ref;
    inputs[0].test = &test;
    inputs[0].masks = {{"all", &all}};

    write_report_csv(agreement_report(inputs), dir + "/report.csv");
    std::ifstream rep(dir + "/report.csv");
    std::string line;
    std::getline(rep, line);
    CHECK(line == "label,n,pearson_r,pct_mean,pct_std,ba_bias,ba_loa_low,ba_loa_high,excluded");
    int rows = 0;
    while (std::getline(rep, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);  // all + pooled

    write_plot_csv(inputs, dir + "/plot.csv");
    std::ifstream plot(dir + "/plot.csv");
    std::getline(plot, line);
    CHECK(line == "label,oracle_value,synth_value,pair_mean,pair_diff");
    rows = 0;
    double mean4 = 0.0, diff4 = 0.0;
    while (std::getline(plot, line)) {
        if (line.empty()) continue;
        ++rows;
        if (rows == 4) {
            std::sscanf(line.c_str(), "all,%*[^,],%*[^,],%lf,%lf", &mean4, &diff4);
        }
    }
    CHECK(rows == 4);
    CHECK(mean4 == doctest::Approx(4.5));   // (4 + 5) / 2
    CHECK(diff4 == doctest::Approx(-1.0));  // reference minus test
}
