#include "surrogate.hpp"

#include <cstring>

#include "image_io.hpp"
#include "parallel.hpp"

namespace radsynth {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'Y', 'N'};
constexpr std::uint32_t kVersion = 1;

// layer tags, in the order they appear in the file
enum : std::uint32_t {
    kTagConv = 1,
    kTagBatchNorm = 2,
    kTagRelu = 3,
    kTagMaxPool = 4,
    kTagDropout = 5,
    kTagFlatten = 6,
    kTagDense = 7,
};

// conv, bn, relu[, pool] for each block, then dropout, flatten, dense
constexpr std::uint32_t kLayerSequence[] = {
    kTagConv, kTagBatchNorm, kTagRelu, kTagMaxPool,
    kTagConv, kTagBatchNorm, kTagRelu, kTagMaxPool,
    kTagConv, kTagBatchNorm, kTagRelu,
    kTagConv, kTagBatchNorm, kTagRelu, kTagDropout,
    kTagFlatten, kTagDense,
};
constexpr std::uint32_t kLayerCount = sizeof(kLayerSequence) / sizeof(kLayerSequence[0]);

void put_u32(std::string& out, std::uint32_t v) {
    char b[4];
    b[0] = static_cast<char>(v & 0xFF);
    b[1] = static_cast<char>((v >> 8) & 0xFF);
    b[2] = static_cast<char>((v >> 16) & 0xFF);
    b[3] = static_cast<char>((v >> 24) & 0xFF);
    out.append(b, 4);
}

void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

void put_f32_block(std::string& out, const std::vector<float>& v) {
    for (float x : v) put_f32(out, x);
}

// Byte cursor that reports the offset of whatever failed to parse.
class Cursor {
public:
    Cursor(const std::string& path, const std::vector<char>& bytes)
        : path_(path), bytes_(bytes) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorKind::parse,
                    path_ + ": " + what + " at byte offset " + std::to_string(pos_));
    }

    std::uint32_t u32(const char* what) {
        need(4, what);
        const unsigned char* b = reinterpret_cast<const unsigned char*>(bytes_.data()) + pos_;
        pos_ += 4;
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    float f32(const char* what) {
        const std::uint32_t bits = u32(what);
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    void f32_block(std::vector<float>& out, std::size_t n, const char* what) {
        need(4 * n, what);
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t bits;
            std::memcpy(&bits, bytes_.data() + pos_ + 4 * i, 4);
            float v;
            std::memcpy(&v, &bits, 4);
            out[i] = v;
        }
        pos_ += 4 * n;
    }

    void magic() {
        need(4, "file magic");
        if (std::memcmp(bytes_.data(), kMagic, 4) != 0) fail("bad model magic");
        pos_ += 4;
    }

    bool at_end() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n, const char* what) const {
        if (pos_ + n > bytes_.size())
            throw Error(ErrorKind::parse, path_ + ": truncated " + what + " at byte offset " +
                                              std::to_string(pos_));
    }

    const std::string& path_;
    const std::vector<char>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_model(const Model& m, const std::string& path) {
    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, m.g);
    put_u32(out, m.patch_size);
    put_f32(out, static_cast<float>(m.dropout_rate));
    put_u32(out, kLayerCount);
    int conv_i = 0, bn_i = 0;
    for (std::uint32_t tag : kLayerSequence) {
        put_u32(out, tag);
        switch (tag) {
            case kTagConv: {
                const auto& c = m.conv[static_cast<std::size_t>(conv_i++)];
                put_u32(out, static_cast<std::uint32_t>(c.in_ch));
                put_u32(out, static_cast<std::uint32_t>(c.out_ch));
                put_f32_block(out, c.w);
                put_f32_block(out, c.b);
                break;
            }
            case kTagBatchNorm: {
                const auto& n = m.bn[static_cast<std::size_t>(bn_i++)];
                put_u32(out, static_cast<std::uint32_t>(n.ch));
                put_u32(out, n.stats_ready ? 1 : 0);
                put_f32_block(out, n.gamma);
                put_f32_block(out, n.beta);
                put_f32_block(out, n.run_mean);
                put_f32_block(out, n.run_var);
                break;
            }
            case kTagDropout:
                put_f32(out, static_cast<float>(m.dropout_rate));
                break;
            case kTagDense:
                put_u32(out, static_cast<std::uint32_t>(m.dense.in));
                put_u32(out, static_cast<std::uint32_t>(m.dense.out));
                put_f32_block(out, m.dense.w);
                put_f32_block(out, m.dense.b);
                break;
            default:
                break;  // relu / pool / flatten carry no payload
        }
    }
    atomic_write_file(path, out);
}

Model load_model(const std::string& path) {
    const std::vector<char> bytes = read_file(path);
    Cursor cur(path, bytes);
    cur.magic();
    if (cur.u32("version") != kVersion) cur.fail("unsupported model version");
    Model m;
    m.g = cur.u32("level count");
    m.patch_size = cur.u32("patch size");
    m.dropout_rate = cur.f32("dropout rate");
    if (m.g < 2) cur.fail("level count below 2");
    const std::uint32_t n_layers = cur.u32("layer count");
    if (n_layers != kLayerCount) cur.fail("unexpected layer count");
    int conv_i = 0, bn_i = 0;
    for (std::uint32_t expect : kLayerSequence) {
        const std::uint32_t tag = cur.u32("layer tag");
        if (tag != expect) cur.fail("layer sequence does not match the architecture");
        switch (tag) {
            case kTagConv: {
                auto& c = m.conv[static_cast<std::size_t>(conv_i)];
                c.in_ch = cur.u32("conv input channels");
                c.out_ch = cur.u32("conv output channels");
                if (c.in_ch < 1 || c.out_ch < 1) cur.fail("conv channel count below 1");
                cur.f32_block(c.w, static_cast<std::size_t>(9 * c.in_ch * c.out_ch), "conv weights");
                cur.f32_block(c.b, static_cast<std::size_t>(c.out_ch), "conv bias");
                m.filters[static_cast<std::size_t>(conv_i)] = static_cast<std::uint32_t>(c.out_ch);
                ++conv_i;
                break;
            }
            case kTagBatchNorm: {
                auto& n = m.bn[static_cast<std::size_t>(bn_i++)];
                n.ch = cur.u32("batch-norm channels");
                n.stats_ready = cur.u32("batch-norm stats flag") != 0;
                cur.f32_block(n.gamma, static_cast<std::size_t>(n.ch), "batch-norm gamma");
                cur.f32_block(n.beta, static_cast<std::size_t>(n.ch), "batch-norm beta");
                cur.f32_block(n.run_mean, static_cast<std::size_t>(n.ch), "batch-norm running mean");
                cur.f32_block(n.run_var, static_cast<std::size_t>(n.ch), "batch-norm running variance");
                break;
            }
            case kTagDropout: {
                const float rate = cur.f32("dropout rate");
                if (static_cast<float>(m.dropout_rate) != rate)
                    cur.fail("dropout rate disagrees with the header");
                break;
            }
            case kTagDense:
                m.dense.in = cur.u32("dense input width");
                m.dense.out = cur.u32("dense output width");
                cur.f32_block(m.dense.w, static_cast<std::size_t>(m.dense.in * m.dense.out),
                              "dense weights");
                cur.f32_block(m.dense.b, static_cast<std::size_t>(m.dense.out), "dense bias");
                break;
            default:
                break;
        }
    }
    if (!cur.at_end()) cur.fail("trailing bytes after the last layer");

    // cross-check the recorded shapes against the architecture
    m.plan = make_plan(m.patch_size, m.filters);
    for (int i = 0; i < 4; ++i) {
        const auto s = static_cast<std::size_t>(i);
        if (m.conv[s].in_ch != m.plan.conv_in[s].c || m.bn[s].ch != m.conv[s].out_ch)
            throw Error(ErrorKind::parse,
                        path + ": conv block " + std::to_string(i) + " shape is inconsistent");
    }
    if (m.dense.in != m.plan.flat || m.dense.out != 1)
        throw Error(ErrorKind::parse, path + ": dense layer shape is inconsistent");
    return m;
}

std::vector<float> patches_to_inputs(const PatchSet& patches, std::uint32_t g) {
    if (g < 2) throw Error(ErrorKind::invalid_argument, "level count must be at least 2");
    const float inv = 1.0f / static_cast<float>(g - 1);
    std::vector<float> out(patches.levels.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<float>(patches.levels[i]) * inv;
    return out;
}

FeatureMap synthesize_map(const Model& m, const QuantizedImage& img, int threads) {
    validate(img);
    if (img.g != m.g)
        throw Error(ErrorKind::invalid_argument,
                    "image has g=" + std::to_string(img.g) + " levels but the model expects g=" +
                        std::to_string(m.g));
    for (const auto& bn : m.bn)
        if (!bn.stats_ready)
            throw Error(ErrorKind::invalid_argument,
                        "batch-norm statistics uninitialized: train or load a trained model "
                        "before running inference");
    const PatchSet patches = extract_patches(img, m.patch_size);
    const std::vector<float> inputs = patches_to_inputs(patches, m.g);
    const std::int64_t per = static_cast<std::int64_t>(m.patch_size) * m.patch_size;

    FeatureMap map;
    map.height = img.height;
    map.width = img.width;
    map.values.resize(static_cast<std::size_t>(img.height * img.width));
    map.params.g = m.g;
    map.params.window = m.patch_size;

    const int workers = resolve_threads(threads);
    parallel_chunks(patches.count, workers, [&](std::int64_t b0, std::int64_t b1) {
        InferScratch<float> scratch;
        scratch.init(m);
        for (std::int64_t i = b0; i < b1; ++i)
            map.values[static_cast<std::size_t>(i)] =
                static_cast<double>(forward_infer_one(m, inputs.data() + i * per, scratch));
    });
    return map;
}

}  // namespace radsynth
