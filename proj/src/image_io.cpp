#include "image_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "error.hpp"

namespace radsynth {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t offset, const std::string& what) {
    throw Error(ErrorKind::parse,
                path + ": " + what + " at byte offset " + std::to_string(offset));
}

// Cursor over a loaded file with netpbm-style token scanning.
class Reader {
public:
    Reader(const std::string& path, std::vector<char> data)
        : path_(path), data_(std::move(data)) {}

    std::size_t pos() const { return pos_; }
    std::size_t size() const { return data_.size(); }
    const char* at(std::size_t p) const { return data_.data() + p; }

    [[noreturn]] void fail(const std::string& what) const { parse_fail(path_, pos_, what); }

    bool eof() const { return pos_ >= data_.size(); }
    char peek() const { return data_[pos_]; }
    char take() { return data_[pos_++]; }

    // Skip whitespace and '#' comments.
    void skip_space() {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && take() != '\n') {
                }
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::uint64_t next_uint(std::uint64_t max_value, const std::string& what) {
        skip_space();
        if (eof()) fail("truncated file while reading " + what);
        if (peek() < '0' || peek() > '9') fail("expected digit for " + what);
        std::uint64_t v = 0;
        while (!eof() && peek() >= '0' && peek() <= '9') {
            v = v * 10 + static_cast<std::uint64_t>(take() - '0');
            if (v > max_value) fail(what + " exceeds " + std::to_string(max_value));
        }
        return v;
    }

    void require_bytes(std::size_t n, const std::string& what) const {
        if (pos_ + n > data_.size()) parse_fail(path_, data_.size(), "truncated " + what);
    }

    void advance(std::size_t n) { pos_ += n; }

private:
    std::string path_;
    std::vector<char> data_;
    std::size_t pos_ = 0;
};

Reader open_reader(const std::string& path) {
    return Reader(path, read_file(path));
}

std::string read_magic(Reader& r) {
    r.skip_space();
    if (r.pos() + 2 > r.size()) r.fail("missing magic number");
    std::string magic(r.at(r.pos()), 2);
    r.advance(2);
    return magic;
}

// Shared PGM decoding; returns dimensions, maxval and raw sample values.
struct PgmData {
    std::int64_t height = 0;
    std::int64_t width = 0;
    std::uint32_t maxval = 0;
    std::vector<std::uint16_t> samples;
};

PgmData read_pgm(const std::string& path) {
    Reader r = open_reader(path);
    std::string magic = read_magic(r);
    if (magic != "P2" && magic != "P5") r.fail("not a PGM file (magic '" + magic + "')");
    bool binary = magic == "P5";

    PgmData pgm;
    pgm.width = static_cast<std::int64_t>(r.next_uint(1u << 20, "width"));
    pgm.height = static_cast<std::int64_t>(r.next_uint(1u << 20, "height"));
    if (pgm.width < 1 || pgm.height < 1) r.fail("image dimensions must be at least 1x1");
    pgm.maxval = static_cast<std::uint32_t>(r.next_uint(65535, "maxval"));
    if (pgm.maxval < 1) r.fail("maxval must be at least 1");

    std::size_t n = static_cast<std::size_t>(pgm.width) * static_cast<std::size_t>(pgm.height);
    pgm.samples.resize(n);

    if (binary) {
        if (r.eof()) r.fail("truncated file before pixel data");
        r.take();  // single whitespace byte after maxval
        if (pgm.maxval < 256) {
            r.require_bytes(n, "pixel data");
            for (std::size_t i = 0; i < n; ++i)
                pgm.samples[i] = static_cast<std::uint8_t>(*r.at(r.pos() + i));
            r.advance(n);
        } else {
            r.require_bytes(2 * n, "pixel data");
            for (std::size_t i = 0; i < n; ++i) {
                auto hi = static_cast<std::uint8_t>(*r.at(r.pos() + 2 * i));
                auto lo = static_cast<std::uint8_t>(*r.at(r.pos() + 2 * i + 1));
                pgm.samples[i] = static_cast<std::uint16_t>((hi << 8) | lo);
            }
            r.advance(2 * n);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            pgm.samples[i] = static_cast<std::uint16_t>(r.next_uint(65535, "pixel value"));
    }

    for (std::size_t i = 0; i < n; ++i)
        if (pgm.samples[i] > pgm.maxval)
            parse_fail(path, r.pos(), "pixel value " + std::to_string(pgm.samples[i]) +
                                          " exceeds maxval " + std::to_string(pgm.maxval));
    return pgm;
}

void write_pgm(const std::string& path, std::int64_t height, std::int64_t width,
               std::uint32_t maxval, const std::uint16_t* samples, bool binary) {
    std::string out;
    out.reserve(binary ? static_cast<std::size_t>(height * width) * 2 + 32
                       : static_cast<std::size_t>(height * width) * 6 + 32);
    out += binary ? "P5" : "P2";
    out += "\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
           std::to_string(maxval) + "\n";
    std::size_t n = static_cast<std::size_t>(height * width);
    if (binary) {
        if (maxval < 256) {
            for (std::size_t i = 0; i < n; ++i)
                out += static_cast<char>(static_cast<std::uint8_t>(samples[i]));
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                out += static_cast<char>(samples[i] >> 8);
                out += static_cast<char>(samples[i] & 0xFF);
            }
        }
    } else {
        for (std::int64_t r = 0; r < height; ++r) {
            for (std::int64_t c = 0; c < width; ++c) {
                out += std::to_string(samples[r * width + c]);
                out += (c + 1 == width) ? '\n' : ' ';
            }
        }
    }
    atomic_write_file(path, out.data(), out.size());
}

void append_u32_le(std::string& out, std::uint32_t v) {
    out += static_cast<char>(v & 0xFF);
    out += static_cast<char>((v >> 8) & 0xFF);
    out += static_cast<char>((v >> 16) & 0xFF);
    out += static_cast<char>((v >> 24) & 0xFF);
}

std::uint32_t read_u32_le(Reader& r, const std::string& what) {
    r.require_bytes(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(*r.at(r.pos() + i))) << (8 * i);
    r.advance(4);
    return v;
}

FeatureMap read_fmap(Reader& r, const std::string& path) {
    r.advance(4);  // magic checked by caller
    std::uint32_t version = read_u32_le(r, "FMAP version");
    if (version != 1) parse_fail(path, r.pos() - 4, "unsupported FMAP version " + std::to_string(version));
    std::uint32_t height = read_u32_le(r, "FMAP height");
    std::uint32_t width = read_u32_le(r, "FMAP width");
    if (height < 1 || width < 1) parse_fail(path, r.pos() - 8, "map dimensions must be at least 1x1");

    FeatureMap map;
    map.height = height;
    map.width = width;
    std::size_t n = static_cast<std::size_t>(height) * width;
    map.values.resize(n);
    r.require_bytes(4 * n, "FMAP payload");
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = 0;
        std::memcpy(&bits, r.at(r.pos() + 4 * i), 4);
        float f;
        std::memcpy(&f, &bits, 4);
        map.values[i] = f;
    }
    r.advance(4 * n);
    return map;
}

}  // namespace

std::vector<char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path);
    in.seekg(0, std::ios::end);
    auto size = in.tellg();
    if (size < 0) throw Error(ErrorKind::io, "cannot stat " + path);
    std::vector<char> data(static_cast<std::size_t>(size));
    in.seekg(0);
    if (size > 0) in.read(data.data(), size);
    if (!in) throw Error(ErrorKind::io, "cannot read " + path);
    return data;
}

void atomic_write_file(const std::string& path, const void* data, std::size_t size) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot open " + tmp + " for writing");
        if (size > 0) out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out) throw Error(ErrorKind::io, "cannot write " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Error(ErrorKind::io, "cannot rename " + tmp + " to " + path);
    }
}

void atomic_write_file(const std::string& path, const std::string& text) {
    atomic_write_file(path, text.data(), text.size());
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const std::uint8_t*>(data);
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

GrayImage read_image(const std::string& path) {
    PgmData pgm = read_pgm(path);
    GrayImage img;
    img.height = pgm.height;
    img.width = pgm.width;
    img.pixels.assign(pgm.samples.begin(), pgm.samples.end());
    return img;
}

void write_image(const GrayImage& img, const std::string& path, bool binary) {
    validate(img);
    std::size_t n = img.pixels.size();
    std::vector<std::uint16_t> samples(n);
    std::uint32_t maxval = 1;
    for (std::size_t i = 0; i < n; ++i) {
        double v = img.pixels[i];
        double rounded = std::round(v);
        if (std::abs(v - rounded) > 1e-9 || rounded < 0 || rounded > 65535)
            throw Error(ErrorKind::invalid_argument,
                        "PGM output requires integer intensities in [0, 65535], got " +
                            std::to_string(v));
        samples[i] = static_cast<std::uint16_t>(rounded);
        maxval = std::max(maxval, static_cast<std::uint32_t>(samples[i]));
    }
    write_pgm(path, img.height, img.width, maxval, samples.data(), binary);
}

QuantizedImage read_qimage(const std::string& path) {
    PgmData pgm = read_pgm(path);
    QuantizedImage img;
    img.height = pgm.height;
    img.width = pgm.width;
    img.g = pgm.maxval + 1;
    img.levels = std::move(pgm.samples);
    validate(img);
    return img;
}

void write_qimage(const QuantizedImage& img, const std::string& path, bool binary) {
    validate(img);
    write_pgm(path, img.height, img.width, img.g - 1, img.levels.data(), binary);
}

FeatureMap read_map(const std::string& path) {
    Reader r = open_reader(path);
    if (r.size() < 4 || std::memcmp(r.at(0), "FMAP", 4) != 0)
        parse_fail(path, 0, "not an FMAP file (bad magic)");
    return read_fmap(r, path);
}

void write_map(const FeatureMap& map, const std::string& path) {
    if (map.height < 1 || map.width < 1 ||
        map.values.size() != static_cast<std::size_t>(map.height * map.width))
        throw Error(ErrorKind::invalid_argument, "feature map dimensions are inconsistent");
    if (map.height > 0xFFFFFFFFll || map.width > 0xFFFFFFFFll)
        throw Error(ErrorKind::invalid_argument, "feature map too large for FMAP format");

    std::string out;
    out.reserve(16 + map.values.size() * 4);
    out += "FMAP";
    append_u32_le(out, 1);
    append_u32_le(out, static_cast<std::uint32_t>(map.height));
    append_u32_le(out, static_cast<std::uint32_t>(map.width));
    for (double v : map.values) {
        float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        append_u32_le(out, bits);
    }
    atomic_write_file(path, out.data(), out.size());
}

RoiMask read_mask(const std::string& path) {
    Reader r = open_reader(path);
    RoiMask mask;

    if (r.size() >= 4 && std::memcmp(r.at(0), "FMAP", 4) == 0) {
        FeatureMap map = read_fmap(r, path);
        mask.height = map.height;
        mask.width = map.width;
        mask.flags.resize(map.values.size());
        for (std::size_t i = 0; i < map.values.size(); ++i) {
            if (map.values[i] == 0.0)
                mask.flags[i] = 0;
            else if (map.values[i] == 1.0)
                mask.flags[i] = 1;
            else
                parse_fail(path, 16 + 4 * i, "mask FMAP values must be exactly 0.0 or 1.0");
        }
        return mask;
    }

    std::string magic = read_magic(r);
    if (magic != "P1" && magic != "P4") r.fail("not a PBM or FMAP mask (magic '" + magic + "')");
    mask.width = static_cast<std::int64_t>(r.next_uint(1u << 20, "width"));
    mask.height = static_cast<std::int64_t>(r.next_uint(1u << 20, "height"));
    if (mask.width < 1 || mask.height < 1) r.fail("mask dimensions must be at least 1x1");
    std::size_t n = static_cast<std::size_t>(mask.width) * static_cast<std::size_t>(mask.height);
    mask.flags.resize(n);

    if (magic == "P1") {
        for (std::size_t i = 0; i < n; ++i) {
            r.skip_space();
            if (r.eof()) r.fail("truncated mask data");
            char c = r.take();
            if (c != '0' && c != '1') r.fail("PBM P1 expects only 0 or 1");
            mask.flags[i] = (c == '1') ? 1 : 0;
        }
    } else {
        if (r.eof()) r.fail("truncated file before mask data");
        r.take();  // single whitespace byte after dimensions
        std::size_t row_bytes = static_cast<std::size_t>((mask.width + 7) / 8);
        r.require_bytes(row_bytes * static_cast<std::size_t>(mask.height), "mask data");
        for (std::int64_t row = 0; row < mask.height; ++row) {
            const char* src = r.at(r.pos() + static_cast<std::size_t>(row) * row_bytes);
            for (std::int64_t col = 0; col < mask.width; ++col) {
                auto byte = static_cast<std::uint8_t>(src[col / 8]);
                mask.flags[row * mask.width + col] = (byte >> (7 - col % 8)) & 1;
            }
        }
        r.advance(row_bytes * static_cast<std::size_t>(mask.height));
    }
    return mask;
}

void write_mask(const RoiMask& mask, const std::string& path, bool binary) {
    if (mask.height < 1 || mask.width < 1 ||
        mask.flags.size() != static_cast<std::size_t>(mask.height * mask.width))
        throw Error(ErrorKind::invalid_argument, "mask dimensions are inconsistent");

    std::string out;
    out += binary ? "P4" : "P1";
    out += "\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n";
    if (binary) {
        std::size_t row_bytes = static_cast<std::size_t>((mask.width + 7) / 8);
        for (std::int64_t row = 0; row < mask.height; ++row) {
            std::string packed(row_bytes, '\0');
            for (std::int64_t col = 0; col < mask.width; ++col)
                if (mask.flags[row * mask.width + col])
                    packed[col / 8] |= static_cast<char>(1 << (7 - col % 8));
            out += packed;
        }
    } else {
        for (std::int64_t row = 0; row < mask.height; ++row) {
            for (std::int64_t col = 0; col < mask.width; ++col) {
                out += mask.flags[row * mask.width + col] ? '1' : '0';
                out += (col + 1 == mask.width) ? '\n' : ' ';
            }
        }
    }
    atomic_write_file(path, out.data(), out.size());
}

}  // namespace radsynth
