#include "train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "image_io.hpp"
#include "rng.hpp"
#include "surrogate.hpp"

namespace radsynth {

namespace {

// sub-stream indices off the training seed
constexpr std::uint64_t kSaltFoldDeal = 0x0F;
constexpr std::uint64_t kSaltInit = 0x100;      // + fold
constexpr std::uint64_t kSaltSchedule = 0x200;  // + fold

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TrainResult train(const std::vector<PatchSet>& images, std::uint32_t g, const TrainConfig& cfg) {
    if (images.empty())
        throw Error(ErrorKind::invalid_argument, "no training images");
    if (cfg.folds < 2)
        throw Error(ErrorKind::invalid_argument, "cross-validation needs at least 2 folds");
    if (images.size() < cfg.folds)
        throw Error(ErrorKind::invalid_argument,
                    "fewer images (" + std::to_string(images.size()) + ") than folds (" +
                        std::to_string(cfg.folds) + ")");
    if (cfg.minibatch == 0 || cfg.epochs == 0)
        throw Error(ErrorKind::invalid_argument, "minibatch size and epoch count must be positive");
    if (cfg.lr_halve_every == 0)
        throw Error(ErrorKind::invalid_argument, "learning-rate halving interval must be positive");
    const std::uint32_t patch_size = images[0].patch_size;
    for (const auto& ps : images) {
        if (ps.patch_size != patch_size)
            throw Error(ErrorKind::invalid_argument, "images disagree on patch size");
        if (ps.count <= 0 || ps.targets.size() != static_cast<std::size_t>(ps.count))
            throw Error(ErrorKind::invalid_argument, "every training image needs one target per patch");
    }

    const std::int64_t n_images = static_cast<std::int64_t>(images.size());
    if (!cfg.strata.empty() && cfg.strata.size() != images.size())
        throw Error(ErrorKind::invalid_argument, "strata must label every image or none");
    TrainResult result;
    result.fold_of_image.resize(static_cast<std::size_t>(n_images));
    {
        // one group per stratum (or a single group), each seeded-shuffled,
        // then dealt round-robin off a running counter so fold sizes stay
        // balanced overall and within every stratum
        std::map<std::uint32_t, std::vector<std::int64_t>> groups;
        for (std::int64_t i = 0; i < n_images; ++i) {
            const std::uint32_t s =
                cfg.strata.empty() ? 0 : cfg.strata[static_cast<std::size_t>(i)];
            groups[s].push_back(i);
        }
        Rng deal(derive_seed(cfg.seed, kSaltFoldDeal));
        std::int64_t at = 0;
        for (auto& [stratum, group] : groups) {
            deal.shuffle(group);
            for (const std::int64_t img : group)
                result.fold_of_image[static_cast<std::size_t>(img)] =
                    static_cast<std::uint32_t>(at++ % cfg.folds);
        }
    }

    const std::int64_t per_patch = static_cast<std::int64_t>(patch_size) * patch_size;

    for (std::uint32_t fold = 0; fold < cfg.folds; ++fold) {
        // assemble the other folds' patches into one flat training set
        std::int64_t n_patches = 0;
        for (std::int64_t i = 0; i < n_images; ++i)
            if (result.fold_of_image[static_cast<std::size_t>(i)] != fold)
                n_patches += images[static_cast<std::size_t>(i)].count;
        if (n_patches == 0)
            throw Error(ErrorKind::invalid_argument, "a fold ended up with no training patches");

        std::vector<float> inputs(static_cast<std::size_t>(n_patches * per_patch));
        std::vector<float> targets(static_cast<std::size_t>(n_patches));
        {
            std::int64_t at = 0;
            for (std::int64_t i = 0; i < n_images; ++i) {
                if (result.fold_of_image[static_cast<std::size_t>(i)] == fold) continue;
                const PatchSet& ps = images[static_cast<std::size_t>(i)];
                const std::vector<float> norm = patches_to_inputs(ps, g);
                std::copy(norm.begin(), norm.end(), inputs.begin() + at * per_patch);
                std::copy(ps.targets.begin(), ps.targets.end(), targets.begin() + at);
                at += ps.count;
            }
        }

        Model model = make_model<float>(g, patch_size, cfg.filters,
                                        derive_seed(cfg.seed, kSaltInit + fold), cfg.dropout_rate);
        ParamGrads<float> grads, vel;
        grads.init_like(model);
        vel.init_like(model);
        ForwardCache<float> cache;
        Rng sched(derive_seed(cfg.seed, kSaltSchedule + fold));

        std::vector<std::int64_t> order(static_cast<std::size_t>(n_patches));
        std::iota(order.begin(), order.end(), 0);
        std::vector<float> batch_targets;
        std::vector<float> dpred;

        for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
            const auto t0 = std::chrono::steady_clock::now();
            const double lr =
                cfg.learning_rate * std::pow(0.5, static_cast<double>(epoch / cfg.lr_halve_every));
            sched.shuffle(order);

            double sq_sum = 0.0;
            for (std::int64_t start = 0; start < n_patches; start += cfg.minibatch) {
                const std::int64_t b =
                    std::min<std::int64_t>(cfg.minibatch, n_patches - start);
                cache.batch = b;
                cache.input.resize(static_cast<std::size_t>(b * per_patch));
                batch_targets.resize(static_cast<std::size_t>(b));
                for (std::int64_t i = 0; i < b; ++i) {
                    const std::int64_t src = order[static_cast<std::size_t>(start + i)];
                    std::copy(inputs.begin() + src * per_patch,
                              inputs.begin() + (src + 1) * per_patch,
                              cache.input.begin() + i * per_patch);
                    batch_targets[static_cast<std::size_t>(i)] =
                        targets[static_cast<std::size_t>(src)];
                }
                cache.mask.resize(static_cast<std::size_t>(b * model.plan.flat));
                make_dropout_mask(sched, model.dropout_rate, cache.mask);

                forward_train(model, cache, cfg.threads);
                const double loss = rmse_loss(cache.preds, batch_targets, &dpred);
                backward(model, cache, dpred, grads, cfg.threads);

                const float flr = static_cast<float>(lr);
                const float fmom = static_cast<float>(cfg.momentum);
                for_each_param_block(model, grads, vel,
                                     [&](std::vector<float>& p, std::vector<float>& gr,
                                         std::vector<float>& v) {
                                         for (std::size_t j = 0; j < p.size(); ++j) {
                                             v[j] = fmom * v[j] - flr * gr[j];
                                             p[j] += v[j];
                                         }
                                     });

                sq_sum += loss * loss * static_cast<double>(b);
            }

            EpochStat stat;
            stat.epoch = epoch;
            stat.fold = fold;
            stat.train_rmse = std::sqrt(sq_sum / static_cast<double>(n_patches));
            stat.learning_rate = lr;
            stat.seconds = elapsed_s(t0);
            result.history.push_back(stat);
        }
        result.models.push_back(std::move(model));
    }
    return result;
}

void write_history_csv(const std::vector<EpochStat>& history, const std::string& path) {
    std::string out = "epoch,fold,train_rmse,learning_rate,seconds\n";
    char line[160];
    for (const auto& h : history) {
        std::snprintf(line, sizeof(line), "%u,%u,%.17g,%.17g,%.6f\n", h.epoch, h.fold,
                      h.train_rmse, h.learning_rate, h.seconds);
        out += line;
    }
    atomic_write_file(path, out);
}

}  // namespace radsynth
