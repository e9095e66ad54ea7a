#include "corpus.hpp"

#include <array>
#include <cstdio>
#include <filesystem>

#include "error.hpp"
#include "image_io.hpp"
#include "rng.hpp"

namespace radsynth {

namespace {

const std::vector<TextureKind> kAllKinds = {
    TextureKind::smoothed_noise,
    TextureKind::checker,
    TextureKind::gradient,
    TextureKind::blob_mixture,
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Split one CSV line; fields here never contain commas or quotes.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

std::vector<CorpusItem> gen_corpus(const CorpusSpec& spec) {
    if (spec.n_images == 0)
        throw Error(ErrorKind::invalid_argument, "corpus needs at least one image");
    if (spec.size < spec.glcm.window)
        throw Error(ErrorKind::invalid_argument, "corpus images are smaller than the window");
    validate(spec.glcm);
    const auto& kinds = spec.kinds.empty() ? kAllKinds : spec.kinds;

    std::vector<CorpusItem> items;
    items.reserve(spec.n_images);
    std::array<std::int64_t, 4> seen{};  // per-kind ordinal
    for (std::uint32_t i = 0; i < spec.n_images; ++i) {
        Rng prng(derive_seed(spec.seed, i));
        TextureSpec ts;
        ts.kind = kinds[i % kinds.size()];
        ts.height = spec.size;
        ts.width = spec.size;
        ts.seed = prng.next_u64();
        // Knobs walk a fixed per-kind schedule (the seed varies the content,
        // the ordinal varies the recipe). Two constraints shape the values:
        // the corpus as a whole must sweep the entropy range, and the variants
        // of one kind must stay close enough that a fold trained on any subset
        // of them generalizes to the rest — cross-validation holds each image
        // out against siblings, not against itself.
        const std::int64_t ord = seen[static_cast<std::size_t>(ts.kind)]++;
        switch (ts.kind) {
            case TextureKind::smoothed_noise: {
                // mid-band sweep: long correlations give maps running from the
                // smooth low band up toward the blob plateau
                static constexpr std::int64_t kNum[3] = {5, 7, 10};
                ts.corr_len = spec.size * kNum[ord % 3] / 64;
                break;
            }
            case TextureKind::checker:
                // low anchor: flat corner blocks score zero, interiors cluster
                // near one; adjacent periods keep the block vocabulary shared
                ts.period = 4 + (ord % 3);
                break;
            case TextureKind::gradient: {
                // a narrow fan of diagonals, ~18 degrees apart
                static constexpr std::int64_t kDirs[3][2] = {{1, 2}, {1, 1}, {2, 1}};
                ts.grad_dr = kDirs[ord % 3][0];
                ts.grad_dc = kDirs[ord % 3][1];
                break;
            }
            case TextureKind::blob_mixture:
                // high anchor: the noise floor between bumps sits near the
                // per-window ceiling
                ts.blob_count = 5 + 3 * (ord % 3);
                ts.blob_radius = static_cast<double>(spec.size) * (0.06 + 0.03 * static_cast<double>(ord % 3));
                ts.blob_contrast = 0.8 + 0.2 * static_cast<double>(ord % 3);
                break;
        }
        CorpusItem item;
        item.spec = ts;
        item.image = quantize(gen_texture(ts), spec.glcm.g);
        item.labels = entropy_map_naive(item.image, spec.glcm, spec.threads);
        items.push_back(std::move(item));
    }
    return items;
}

std::string params_string(const TextureSpec& spec) {
    switch (spec.kind) {
        case TextureKind::smoothed_noise:
            return "corr=" + std::to_string(spec.corr_len);
        case TextureKind::checker:
            return "period=" + std::to_string(spec.period);
        case TextureKind::gradient:
            return "dr=" + std::to_string(spec.grad_dr) + ";dc=" + std::to_string(spec.grad_dc);
        case TextureKind::blob_mixture:
            return "blobs=" + std::to_string(spec.blob_count) + ";radius=" + fmt(spec.blob_radius) +
                   ";contrast=" + fmt(spec.blob_contrast);
    }
    throw Error(ErrorKind::invalid_argument, "unknown texture kind");
}

std::vector<std::string> write_corpus(const std::vector<CorpusItem>& items, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "images", ec);
    fs::create_directories(fs::path(dir) / "labels", ec);
    if (ec) throw Error(ErrorKind::io, dir + ": cannot create corpus directories");

    std::string manifest = "index,kind,seed,params,image_path,label_path\n";
    std::vector<std::string> written;
    char name[64];
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::snprintf(name, sizeof(name), "images/img_%04zu.pgm", i);
        const std::string img_rel = name;
        std::snprintf(name, sizeof(name), "labels/map_%04zu.fmap", i);
        const std::string map_rel = name;
        write_qimage(items[i].image, (fs::path(dir) / img_rel).string());
        write_map(items[i].labels, (fs::path(dir) / map_rel).string());
        manifest += std::to_string(i) + "," + kind_name(items[i].spec.kind) + "," +
                    std::to_string(items[i].spec.seed) + "," + params_string(items[i].spec) + "," +
                    img_rel + "," + map_rel + "\n";
        written.push_back(img_rel);
        written.push_back(map_rel);
    }
    atomic_write_file((fs::path(dir) / "manifest.csv").string(), manifest);
    written.push_back("manifest.csv");
    return written;
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    const std::vector<char> bytes = read_file(path);
    const std::string text(bytes.begin(), bytes.end());
    const std::string base = std::filesystem::path(path).parent_path().string();

    std::vector<ManifestEntry> entries;
    std::size_t pos = 0;
    std::int64_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "index,kind,seed,params,image_path,label_path")
                throw Error(ErrorKind::parse, path + ": unexpected manifest header");
            continue;
        }
        const std::vector<std::string> f = split_csv(line);
        if (f.size() != 6)
            throw Error(ErrorKind::parse,
                        path + ": manifest line " + std::to_string(line_no) + " has " +
                            std::to_string(f.size()) + " fields, expected 6");
        ManifestEntry e;
        try {
            e.index = std::stoll(f[0]);
            e.seed = std::stoull(f[2]);
        } catch (const std::exception&) {
            throw Error(ErrorKind::parse,
                        path + ": bad number on manifest line " + std::to_string(line_no));
        }
        e.kind = f[1];
        e.params = f[3];
        e.image_path = (std::filesystem::path(base) / f[4]).string();
        e.label_path = f[5].empty() ? std::string()
                                    : (std::filesystem::path(base) / f[5]).string();
        entries.push_back(std::move(e));
    }
    if (entries.empty())
        throw Error(ErrorKind::parse, path + ": manifest lists no images");
    return entries;
}

}  // namespace radsynth
