#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "image.hpp"
#include "net.hpp"

namespace radsynth {

struct TrainConfig {
    std::uint32_t minibatch = 2000;
    std::uint32_t epochs = 50;
    std::uint32_t folds = 2;
    double learning_rate = 0.01;   // halved every lr_halve_every epochs
    double momentum = 0.9;
    std::uint32_t lr_halve_every = 10;
    std::uint64_t seed = 0;
    int threads = 0;
    std::array<std::uint32_t, 4> filters{128, 64, 32, 16};
    double dropout_rate = 0.2;
    // optional stratum label per image (e.g. texture kind); when set, the fold
    // deal shuffles within each stratum so every fold trains on every stratum
    std::vector<std::uint32_t> strata;
};

struct EpochStat {
    std::uint32_t epoch = 0;
    std::uint32_t fold = 0;
    double train_rmse = 0.0;
    double learning_rate = 0.0;
    double seconds = 0.0;
};

struct TrainResult {
    std::vector<Model> models;                 // one per fold, trained on the others
    std::vector<std::uint32_t> fold_of_image;  // fold that holds image i out
    std::vector<EpochStat> history;
};

// Cross-validated minibatch SGD with momentum. Images are dealt to folds by
// a seeded shuffle (within strata when cfg.strata is set), so patches from
// one image never straddle a fold split. Every random choice (fold deal,
// weight init, epoch shuffles, dropout) derives from cfg.seed, and gradient
// reductions run in a fixed order, so the result is bit-identical for any
// thread count.
TrainResult train(const std::vector<PatchSet>& images, std::uint32_t g, const TrainConfig& cfg);

// history CSV: epoch,fold,train_rmse,learning_rate,seconds
void write_history_csv(const std::vector<EpochStat>& history, const std::string& path);

}  // namespace radsynth
