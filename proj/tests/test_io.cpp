#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "error.hpp"
#include "image_io.hpp"
#include "test_util.hpp"

using namespace radsynth;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    const auto bytes = read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("binary PGM round-trips levels and g") {
    const std::string dir = testutil::scratch("io_pgm");
    const QuantizedImage img = testutil::random_qimage(5, 7, 9, 64);
    const std::string path = dir + "/a.pgm";
    write_qimage(img, path);
    const QuantizedImage back = read_qimage(path);
    CHECK(back.height == img.height);
    CHECK(back.width == img.width);
    CHECK(back.g == 64);  // maxval 63 -> 64 levels
    CHECK(back.levels == img.levels);
}

TEST_CASE("PGM uses two-byte samples above maxval 255") {
    const std::string dir = testutil::scratch("io_pgm16");
    QuantizedImage img = testutil::random_qimage(6, 4, 4, 1000);
    img.levels[0] = 999;  // force the full range
    img.levels[1] = 0;
    const std::string path = dir + "/wide.pgm";
    write_qimage(img, path);
    const QuantizedImage back = read_qimage(path);
    CHECK(back.g == 1000);
    CHECK(back.levels == img.levels);
}

TEST_CASE("text PGM round-trips too") {
    const std::string dir = testutil::scratch("io_pgm_text");
    const QuantizedImage img = testutil::random_qimage(7, 3, 5, 16);
    const std::string path = dir + "/t.pgm";
    write_qimage(img, path, /*binary=*/false);
    CHECK(slurp(path).substr(0, 2) == "P2");
    const QuantizedImage back = read_qimage(path);
    CHECK(back.levels == img.levels);
    CHECK(back.g == 16);
}

TEST_CASE("gray image read scales off the PGM maxval") {
    const std::string dir = testutil::scratch("io_gray");
    QuantizedImage img = testutil::constant_qimage(2, 2, 4, 3);
    img.levels = {0, 1, 2, 3};
    const std::string path = dir + "/g.pgm";
    write_qimage(img, path);
    const GrayImage gray = read_image(path);
    CHECK(gray.at(0, 0) == doctest::Approx(0.0));
    CHECK(gray.at(1, 1) == doctest::Approx(3.0));
}

TEST_CASE("feature map files round-trip bit-exactly") {
    const std::string dir = testutil::scratch("io_fmap");
    FeatureMap map;
    map.height = 3;
    map.width = 4;
    map.values = {0.0, 1.5, 2.25, 3.0, 0.125, 4.0, 0.6875, 1.0, 2.0, 0.75, 0.5, 3.5};
    const std::string a = dir + "/a.fmap";
    const std::string b = dir + "/b.fmap";
    write_map(map, a);
    const FeatureMap back = read_map(a);
    CHECK(back.height == 3);
    CHECK(back.width == 4);
    CHECK(back.values == map.values);
    write_map(back, b);
    CHECK(slurp(a) == slurp(b));

    // header layout: magic, version, height, width
    const std::string raw = slurp(a);
    CHECK(raw.substr(0, 4) == "FMAP");
    CHECK(raw.size() == 4 + 4 + 4 + 4 + map.values.size() * 4);
}

TEST_CASE("parse errors carry a path and byte offset") {
    const std::string dir = testutil::scratch("io_bad");

    spit(dir + "/bad.fmap", "FMAQ____________");
    CHECK_THROWS_WITH_AS(read_map(dir + "/bad.fmap"),
                         doctest::Contains("at byte offset 0"), Error);

    spit(dir + "/short.fmap", std::string("FMAP") + std::string(4, '\0'));
    try {
        read_map(dir + "/short.fmap");
        FAIL("truncated map should not parse");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse);
        CHECK(std::string(e.what()).find("short.fmap") != std::string::npos);
        CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }

    spit(dir + "/bad.pgm", "P7 2 2 3\n");
    CHECK_THROWS_AS(read_qimage(dir + "/bad.pgm"), Error);

    CHECK_THROWS_AS(read_qimage(dir + "/missing.pgm"), Error);
    try {
        read_qimage(dir + "/missing.pgm");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
    }
}

TEST_CASE("masks round-trip through PBM, text and binary") {
    const std::string dir = testutil::scratch("io_mask");
    RoiMask mask;
    mask.height = 3;
    mask.width = 5;
    mask.flags = {1, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 1, 1, 0, 0};
    for (bool binary : {true, false}) {
        const std::string path = dir + (binary ? "/m.pbm" : "/m_text.pbm");
        write_mask(mask, path, binary);
        const RoiMask back = read_mask(path);
        CHECK(back.height == mask.height);
        CHECK(back.width == mask.width);
        CHECK(back.flags == mask.flags);
    }
    CHECK(mask.count_true() == 8);
}

TEST_CASE("a 0/1 feature map doubles as a mask") {
    const std::string dir = testutil::scratch("io_mask_fmap");
    FeatureMap map;
    map.height = 2;
    map.width = 2;
    map.values = {1.0, 0.0, 0.0, 1.0};
    write_map(map, dir + "/m.fmap");
    const RoiMask mask = read_mask(dir + "/m.fmap");
    CHECK(mask.flags == std::vector<std::uint8_t>{1, 0, 0, 1});

    map.values[2] = 0.5;  // anything but exact 0/1 is rejected
    write_map(map, dir + "/bad.fmap");
    CHECK_THROWS_AS(read_mask(dir + "/bad.fmap"), Error);
}

TEST_CASE("writes are atomic: no temp file survives") {
    const std::string dir = testutil::scratch("io_atomic");
    const std::string path = dir + "/x.bin";
    atomic_write_file(path, std::string("payload"));
    CHECK(slurp(path) == "payload");
    CHECK_FALSE(fs::exists(path + ".tmp"));
    // overwrite keeps working
    atomic_write_file(path, std::string("second"));
    CHECK(slurp(path) == "second");
}

TEST_CASE("fnv1a64 matches its published test vectors") {
    CHECK(fnv1a64("", 0) == 0xCBF29CE484222325ull);
    CHECK(fnv1a64("a", 1) == 0xAF63DC4C8601EC8Cull);
    CHECK(fnv1a64("foobar", 6) == 0x85944171F73967E8ull);
}
