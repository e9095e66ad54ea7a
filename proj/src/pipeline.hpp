#pragma once

#include <string>
#include <vector>

#include "corpus.hpp"
#include "train.hpp"

namespace radsynth {

struct TrainOutputs {
    std::vector<std::string> model_paths;  // one per fold
    std::string history_path;
    std::string folds_path;
    std::vector<std::uint32_t> fold_of_image;
};

// Disk-to-disk training: loads every manifest image with its label map,
// extracts patch_size patches labeled at their centers, runs cross-validated
// training, and writes model_foldN.rsyn, history.csv and folds.csv
// (image_index,fold) into out_dir. Images missing their label map fail with
// a pointer at how to generate one.
TrainOutputs train_from_manifest(const std::string& manifest_path, std::uint32_t patch_size,
                                 const TrainConfig& cfg, const std::string& out_dir);

}  // namespace radsynth
