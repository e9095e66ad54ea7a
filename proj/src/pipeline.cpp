#include "pipeline.hpp"

#include <filesystem>
#include <map>

#include "error.hpp"
#include "image_io.hpp"
#include "surrogate.hpp"

namespace radsynth {

TrainOutputs train_from_manifest(const std::string& manifest_path, std::uint32_t patch_size,
                                 const TrainConfig& cfg, const std::string& out_dir) {
    const std::vector<ManifestEntry> entries = read_manifest(manifest_path);

    std::vector<PatchSet> images;
    std::uint32_t g = 0;
    for (const auto& e : entries) {
        if (e.label_path.empty() || !std::filesystem::exists(e.label_path))
            throw Error(ErrorKind::io,
                        "image " + std::to_string(e.index) + " has no label map (" +
                            (e.label_path.empty() ? std::string("none listed") : e.label_path) +
                            "); generate reference maps first (gen writes them, or run map "
                            "on each image)");
        const QuantizedImage img = read_qimage(e.image_path);
        const FeatureMap labels = read_map(e.label_path);
        if (labels.height != img.height || labels.width != img.width)
            throw Error(ErrorKind::invalid_argument,
                        e.label_path + ": label map size does not match " + e.image_path);
        if (g == 0) g = img.g;
        else if (img.g != g)
            throw Error(ErrorKind::invalid_argument,
                        e.image_path + ": corpus images disagree on the level count");
        images.push_back(extract_patches(img, patch_size, &labels.values));
    }

    // stratify the fold deal by texture kind so no fold trains without one
    TrainConfig cfg_strat = cfg;
    if (cfg_strat.strata.empty()) {
        std::map<std::string, std::uint32_t> ids;
        for (const auto& e : entries)
            cfg_strat.strata.push_back(
                ids.emplace(e.kind, static_cast<std::uint32_t>(ids.size())).first->second);
    }

    const TrainResult result = train(images, g, cfg_strat);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::io, out_dir + ": cannot create output directory");

    TrainOutputs out;
    for (std::size_t f = 0; f < result.models.size(); ++f) {
        const std::string path =
            (fs::path(out_dir) / ("model_fold" + std::to_string(f) + ".rsyn")).string();
        save_model(result.models[f], path);
        out.model_paths.push_back(path);
    }
    out.history_path = (fs::path(out_dir) / "history.csv").string();
    write_history_csv(result.history, out.history_path);

    std::string folds = "image_index,fold\n";
    for (std::size_t i = 0; i < result.fold_of_image.size(); ++i)
        folds += std::to_string(entries[i].index) + "," +
                 std::to_string(result.fold_of_image[i]) + "\n";
    out.folds_path = (fs::path(out_dir) / "folds.csv").string();
    atomic_write_file(out.folds_path, folds);
    out.fold_of_image = result.fold_of_image;
    return out;
}

}  // namespace radsynth
