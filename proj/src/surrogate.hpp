#pragma once

#include <string>
#include <vector>

#include "glcm.hpp"
#include "image.hpp"
#include "net.hpp"

namespace radsynth {

// Model files ("RSYN", version 1, little-endian): a header with the
// quantizer level count, patch size and dropout rate, then the layer list as
// (tag, shape, float32 parameters). Batch-norm layers carry their running
// statistics and a flag saying whether any have been recorded. Save and load
// round-trip bit for bit.
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

// Normalized network inputs for a patch set: level / (g - 1), float32.
std::vector<float> patches_to_inputs(const PatchSet& patches, std::uint32_t g);

// Predict the entropy map of a whole image: one patch per pixel through the
// trained network in inference mode. The image's g must match the model's.
FeatureMap synthesize_map(const Model& m, const QuantizedImage& img, int threads = 0);

}  // namespace radsynth
