#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glcm.hpp"
#include "image.hpp"
#include "texture.hpp"

namespace radsynth {

// Recipe for a labeled training corpus: n_images square textures, cycled
// through `kinds`, quantized to glcm.g levels and labeled with the reference
// entropy map. Image i derives every random choice from (seed, i), so the
// corpus is reproducible image by image.
struct CorpusSpec {
    std::uint32_t n_images = 12;
    std::int64_t size = 128;
    GlcmParams glcm;
    std::uint64_t seed = 0;
    std::vector<TextureKind> kinds;  // empty = all four kinds
    int threads = 0;
};

struct CorpusItem {
    TextureSpec spec;
    QuantizedImage image;
    FeatureMap labels;
};

std::vector<CorpusItem> gen_corpus(const CorpusSpec& spec);

// On-disk corpus layout under one directory:
//   images/img_NNNN.pgm   quantized texture (PGM, maxval = g - 1)
//   labels/map_NNNN.fmap  reference entropy map
//   manifest.csv          index,kind,seed,params,image_path,label_path
// Paths in the manifest are relative to its directory; read_manifest returns
// them joined with that directory. `params` is informational
// (semicolon-separated key=value pairs of the texture recipe).
std::string params_string(const TextureSpec& spec);
std::vector<std::string> write_corpus(const std::vector<CorpusItem>& items,
                                      const std::string& dir);

struct ManifestEntry {
    std::int64_t index = 0;
    std::string kind;
    std::uint64_t seed = 0;
    std::string params;
    std::string image_path;
    std::string label_path;
};

std::vector<ManifestEntry> read_manifest(const std::string& path);

}  // namespace radsynth
