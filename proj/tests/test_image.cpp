#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "image.hpp"
#include "test_util.hpp"

using namespace radsynth;

TEST_CASE("quantize bins by linear min-max") {
    GrayImage img{1, 3, {0.0, 5.0, 10.0}};
    const QuantizedImage q = quantize(img, 4);
    CHECK(q.g == 4);
    CHECK(q.levels[0] == 0);  // vmin
    CHECK(q.levels[1] == 2);  // 5/10*4 = 2
    CHECK(q.levels[2] == 3);  // vmax clamps to g-1
}

TEST_CASE("quantize puts the maximum in the top bin, not one past it") {
    GrayImage img{1, 5, {0.0, 0.25, 0.5, 0.75, 1.0}};
    const QuantizedImage q = quantize(img, 2);
    CHECK(q.levels[0] == 0);
    CHECK(q.levels[1] == 0);
    CHECK(q.levels[2] == 1);
    CHECK(q.levels[3] == 1);
    CHECK(q.levels[4] == 1);
}

TEST_CASE("quantizing a constant image yields level zero everywhere") {
    GrayImage img{2, 2, {3.5, 3.5, 3.5, 3.5}};
    const QuantizedImage q = quantize(img, 64);
    for (auto v : q.levels) CHECK(v == 0);
}

TEST_CASE("quantize rejects bad inputs") {
    GrayImage img{1, 2, {0.0, 1.0}};
    CHECK_THROWS_AS(quantize(img, 1), Error);
    GrayImage empty;
    CHECK_THROWS_AS(quantize(empty, 4), Error);
    GrayImage nan_img{1, 1, {std::nan("")}};
    CHECK_THROWS_AS(quantize(nan_img, 4), Error);
}

TEST_CASE("replicate padding copies the nearest edge pixel") {
    QuantizedImage img;
    img.height = 2;
    img.width = 2;
    img.g = 10;
    img.levels = {1, 2, 3, 4};
    const QuantizedImage p = replicate_pad(img, 2);
    REQUIRE(p.height == 6);
    REQUIRE(p.width == 6);
    CHECK(p.at(0, 0) == 1);  // corner
    CHECK(p.at(0, 5) == 2);
    CHECK(p.at(5, 0) == 3);
    CHECK(p.at(5, 5) == 4);
    CHECK(p.at(0, 2) == 1);  // above (0,0)
    CHECK(p.at(3, 0) == 3);  // left of (1,0)
    CHECK(p.at(2, 2) == 1);  // interior is untouched
    CHECK(p.at(3, 3) == 4);
}

TEST_CASE("extract_patches yields one centered window per pixel") {
    const QuantizedImage img = testutil::random_qimage(9, 6, 5, 8);
    const std::uint32_t ps = 5;
    const PatchSet set = extract_patches(img, ps);
    REQUIRE(set.count == img.height * img.width);
    CHECK(set.patch_size == ps);

    const QuantizedImage padded = replicate_pad(img, ps / 2);
    for (std::int64_t i = 0; i < set.count; ++i) {
        const std::int64_t r = set.center_rows[static_cast<std::size_t>(i)];
        const std::int64_t c = set.center_cols[static_cast<std::size_t>(i)];
        // row-major enumeration of centers
        CHECK(r == i / img.width);
        CHECK(c == i % img.width);
        const std::uint16_t* patch = set.patch(i);
        // patch center is the pixel itself; the rest mirrors the padded image
        CHECK(patch[(ps / 2) * ps + ps / 2] == img.at(r, c));
        for (std::uint32_t pr = 0; pr < ps; ++pr)
            for (std::uint32_t pc = 0; pc < ps; ++pc)
                CHECK(patch[pr * ps + pc] == padded.at(r + pr, c + pc));
    }
}

TEST_CASE("extract_patches carries per-center labels") {
    const QuantizedImage img = testutil::random_qimage(10, 4, 3, 6);
    std::vector<double> labels(static_cast<std::size_t>(img.height * img.width));
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = 0.25 * static_cast<double>(i);
    const PatchSet set = extract_patches(img, 3, &labels);
    REQUIRE(set.targets.size() == static_cast<std::size_t>(set.count));
    for (std::int64_t i = 0; i < set.count; ++i)
        CHECK(set.targets[static_cast<std::size_t>(i)] ==
              doctest::Approx(labels[static_cast<std::size_t>(i)]).epsilon(1e-6));
}

TEST_CASE("extract_patches validates its arguments") {
    const QuantizedImage img = testutil::random_qimage(1, 4, 4, 4);
    CHECK_THROWS_AS(extract_patches(img, 4), Error);  // even
    CHECK_THROWS_AS(extract_patches(img, 7), Error);  // larger than the image
    std::vector<double> short_labels(3);
    CHECK_THROWS_AS(extract_patches(img, 3, &short_labels), Error);
}
