// Exercises the shared library strictly through the C header.
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "radsynth/radsynth.h"

namespace {

std::string scratch(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path("capi_scratch") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::vector<std::uint16_t> ramp_levels(std::int64_t h, std::int64_t w, std::uint32_t g) {
    std::vector<std::uint16_t> v(static_cast<std::size_t>(h * w));
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = static_cast<std::uint16_t>((i * 7 + i / 3) % g);
    return v;
}

}  // namespace

TEST_CASE("version and parameter defaults") {
    REQUIRE(rs_version() != nullptr);
    CHECK(std::string(rs_version()).find('.') != std::string::npos);
    rs_glcm_params p;
    rs_glcm_params_init(&p);
    CHECK(p.g == 64);
    CHECK(p.window == 5);
    CHECK(p.offset_dr == 0);
    CHECK(p.offset_dc == 1);
    CHECK(p.symmetric == 1);
    rs_train_config cfg;
    rs_train_config_init(&cfg);
    CHECK(cfg.minibatch == 2000);
    CHECK(cfg.epochs == 50);
    CHECK(cfg.folds == 2);
}

TEST_CASE("null arguments come back as RS_EINVAL with a message") {
    CHECK(rs_qimage_read(nullptr, nullptr) == RS_EINVAL);
    CHECK(std::strlen(rs_last_error()) > 0);
    rs_map* out = nullptr;
    CHECK(rs_entropy_map(nullptr, nullptr, "naive", 0, &out) == RS_EINVAL);
    double r = 0;
    CHECK(rs_pearson(nullptr, nullptr, 3, &r) == RS_EINVAL);
}

TEST_CASE("status codes separate io, parse and domain failures") {
    const std::string dir = scratch("status");
    rs_qimage* img = nullptr;
    CHECK(rs_qimage_read((dir + "/absent.pgm").c_str(), &img) == RS_EIO);

    std::ofstream(dir + "/garbage.pgm", std::ios::binary) << "not a pgm at all";
    CHECK(rs_qimage_read((dir + "/garbage.pgm").c_str(), &img) == RS_EPARSE);
    CHECK(std::strlen(rs_last_error()) > 0);

    const double flat[3] = {2, 2, 2};
    const double rise[3] = {1, 2, 3};
    double r = 0;
    CHECK(rs_pearson(flat, rise, 3, &r) == RS_EDOMAIN);
}

TEST_CASE("exact statistics through the C surface") {
    const double x[3] = {1, 2, 3};
    const double y[3] = {2, 4, 6};
    double r = 0;
    REQUIRE(rs_pearson(x, y, 3, &r) == RS_OK);
    CHECK(std::abs(r - 1.0) <= 1e-12);

    const double ref[2] = {2, 4};
    const double test[2] = {1, 5};
    double mean = 0, sd = 0;
    REQUIRE(rs_percentage_difference(ref, test, 2, &mean, &sd) == RS_OK);
    CHECK(std::abs(mean - 0.375) <= 1e-12);
    CHECK(std::abs(sd - 0.125) <= 1e-12);

    const double a[3] = {1, 2, 3};
    const double b[3] = {2, 3, 4};
    double bias = 0, lo = 0, hi = 0;
    REQUIRE(rs_bland_altman(a, b, 3, &bias, &lo, &hi) == RS_OK);
    CHECK(std::abs(bias + 1.0) <= 1e-12);
    CHECK(std::abs(lo + 1.0) <= 1e-12);
    CHECK(std::abs(hi + 1.0) <= 1e-12);
}

TEST_CASE("qimage round-trips through files and both map strategies agree") {
    const std::string dir = scratch("pipeline");
    const std::int64_t n = 24;
    const std::uint32_t g = 16;
    const auto levels = ramp_levels(n, n, g);

    rs_qimage* img = nullptr;
    REQUIRE(rs_qimage_create(n, n, g, levels.data(), &img) == RS_OK);
    CHECK(rs_qimage_height(img) == n);
    CHECK(rs_qimage_width(img) == n);
    CHECK(rs_qimage_g(img) == g);
    std::vector<std::uint16_t> got(levels.size());
    REQUIRE(rs_qimage_levels(img, got.data(), got.size()) == RS_OK);
    CHECK(got == levels);

    const std::string path = dir + "/img.pgm";
    REQUIRE(rs_qimage_write(img, path.c_str()) == RS_OK);
    rs_qimage* back = nullptr;
    REQUIRE(rs_qimage_read(path.c_str(), &back) == RS_OK);
    REQUIRE(rs_qimage_levels(back, got.data(), got.size()) == RS_OK);
    CHECK(got == levels);

    rs_glcm_params p;
    rs_glcm_params_init(&p);
    p.g = g;
    rs_map* naive = nullptr;
    rs_map* fast = nullptr;
    REQUIRE(rs_entropy_map(img, &p, "naive", 0, &naive) == RS_OK);
    REQUIRE(rs_entropy_map(img, &p, "incremental", 0, &fast) == RS_OK);
    REQUIRE(rs_map_height(naive) == n);
    std::vector<double> nv(static_cast<size_t>(n) * n), fv(nv.size());
    REQUIRE(rs_map_values(naive, nv.data(), nv.size()) == RS_OK);
    REQUIRE(rs_map_values(fast, fv.data(), fv.size()) == RS_OK);
    for (std::int64_t i = 0; i < n * n; ++i) CHECK(std::abs(nv[i] - fv[i]) <= 1e-9);

    CHECK(rs_entropy_map(img, &p, "magic", 0, &fast) == RS_EINVAL);

    const std::string mpath = dir + "/m.fmap";
    REQUIRE(rs_map_write(naive, mpath.c_str()) == RS_OK);
    rs_map* mback = nullptr;
    REQUIRE(rs_map_read(mpath.c_str(), &mback) == RS_OK);
    CHECK(rs_map_width(mback) == n);

    rs_map_free(mback);
    rs_map_free(naive);
    rs_map_free(fast);
    rs_qimage_free(back);
    rs_qimage_free(img);
}

TEST_CASE("quantize maps the level ramp onto itself") {
    const std::string dir = scratch("quantize");
    const std::uint32_t g = 4;
    const auto levels = ramp_levels(6, 6, g);
    rs_qimage* q = nullptr;
    REQUIRE(rs_qimage_create(6, 6, g, levels.data(), &q) == RS_OK);
    const std::string path = dir + "/q.pgm";
    REQUIRE(rs_qimage_write(q, path.c_str()) == RS_OK);

    rs_image* gray = nullptr;
    REQUIRE(rs_image_read(path.c_str(), &gray) == RS_OK);
    CHECK(rs_image_height(gray) == 6);
    rs_qimage* rq = nullptr;
    REQUIRE(rs_quantize(gray, g, &rq) == RS_OK);
    std::vector<std::uint16_t> got(levels.size());
    REQUIRE(rs_qimage_levels(rq, got.data(), got.size()) == RS_OK);
    CHECK(got == levels);
    rs_qimage_free(rq);
    rs_image_free(gray);
    rs_qimage_free(q);
}

TEST_CASE("agreement evaluation builds a labeled report") {
    const std::int64_t n = 16;
    const std::uint32_t g = 8;
    const auto levels = ramp_levels(n, n, g);
    rs_qimage* img = nullptr;
    REQUIRE(rs_qimage_create(n, n, g, levels.data(), &img) == RS_OK);
    rs_glcm_params p;
    rs_glcm_params_init(&p);
    p.g = g;
    rs_map* map = nullptr;
    REQUIRE(rs_entropy_map(img, &p, "incremental", 0, &map) == RS_OK);

    rs_mask* full = nullptr;
    REQUIRE(rs_mask_full(n, n, &full) == RS_OK);
    const rs_mask* masks[1] = {full};
    const char* labels[1] = {"everything"};
    rs_report* report = nullptr;
    const std::string dir = scratch("agreement");
    REQUIRE(rs_agreement_eval(map, map, masks, labels, 1, (dir + "/plot.csv").c_str(),
                              &report) == RS_OK);
    REQUIRE(rs_report_row_count(report) == 2);
    rs_report_row row;
    REQUIRE(rs_report_get_row(report, 0, &row) == RS_OK);
    CHECK(std::string(row.label) == "everything");
    CHECK(row.n == n * n);
    CHECK(row.pearson_r == doctest::Approx(1.0));
    CHECK(row.ba_bias == doctest::Approx(0.0));
    rs_report_row pooled;
    REQUIRE(rs_report_get_row(report, 1, &pooled) == RS_OK);
    CHECK(std::string(pooled.label) == "pooled");
    CHECK(rs_report_get_row(report, 2, &pooled) == RS_EINVAL);

    REQUIRE(rs_report_write_csv(report, (dir + "/report.csv").c_str()) == RS_OK);
    std::ifstream in(dir + "/report.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "label,n,pearson_r,pct_mean,pct_std,ba_bias,ba_loa_low,ba_loa_high,excluded");

    rs_report_free(report);
    rs_mask_free(full);
    rs_map_free(map);
    rs_qimage_free(img);
}

TEST_CASE("model loading reports missing and malformed files") {
    const std::string dir = scratch("model");
    rs_model* model = nullptr;
    CHECK(rs_model_load((dir + "/absent.rsyn").c_str(), &model) == RS_EIO);
    std::ofstream(dir + "/bad.rsyn", std::ios::binary) << "RSYNbutnotreally";
    CHECK(rs_model_load((dir + "/bad.rsyn").c_str(), &model) == RS_EPARSE);
}

TEST_CASE("frees accept null handles") {
    rs_image_free(nullptr);
    rs_qimage_free(nullptr);
    rs_map_free(nullptr);
    rs_mask_free(nullptr);
    rs_model_free(nullptr);
    rs_report_free(nullptr);
}
