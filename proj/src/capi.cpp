#include "radsynth/radsynth.h"

#include <cstring>
#include <string>

#include "bench.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "glcm.hpp"
#include "image.hpp"
#include "image_io.hpp"
#include "pipeline.hpp"
#include "stats.hpp"
#include "surrogate.hpp"
#include "train.hpp"

using namespace radsynth;

struct rs_image { GrayImage v; };
struct rs_qimage { QuantizedImage v; };
struct rs_map { FeatureMap v; };
struct rs_mask { RoiMask v; };
struct rs_model { Model v; };
struct rs_report {
    std::vector<AgreementRow> rows;
};

namespace {

thread_local std::string g_last_error;

rs_status set_error(rs_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

rs_status from_kind(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return RS_EINVAL;
        case ErrorKind::io: return RS_EIO;
        case ErrorKind::parse: return RS_EPARSE;
        case ErrorKind::domain: return RS_EDOMAIN;
    }
    return RS_EINTERNAL;
}

// Runs fn inside the exception barrier every entry point shares.
template <typename Fn>
rs_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        return set_error(from_kind(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(RS_EINTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(RS_EINTERNAL, e.what());
    }
}

rs_status need(bool ok, const char* what) {
    return ok ? RS_OK : set_error(RS_EINVAL, std::string("null ") + what);
}

GlcmParams to_core(const rs_glcm_params& p) {
    GlcmParams out;
    out.g = p.g;
    out.window = p.window;
    out.offset_dr = p.offset_dr;
    out.offset_dc = p.offset_dc;
    out.symmetric = p.symmetric != 0;
    out.log_base = p.log_base2 ? LogBase::base2 : LogBase::natural;
    return out;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(csv.substr(start));
            break;
        }
        out.push_back(csv.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

PairedSample to_sample(const double* reference, const double* test, size_t n) {
    PairedSample s;
    s.reference.assign(reference, reference + n);
    s.test.assign(test, test + n);
    return s;
}

}  // namespace

extern "C" {

const char* rs_last_error(void) { return g_last_error.c_str(); }

const char* rs_version(void) { return "1.0.0"; }

void rs_glcm_params_init(rs_glcm_params* p) {
    if (!p) return;
    p->g = 64;
    p->window = 5;
    p->offset_dr = 0;
    p->offset_dc = 1;
    p->symmetric = 1;
    p->log_base2 = 0;
}

void rs_train_config_init(rs_train_config* c) {
    if (!c) return;
    c->minibatch = 2000;
    c->epochs = 50;
    c->folds = 2;
    c->lr_halve_every = 10;
    c->learning_rate = 0.01;
    c->momentum = 0.9;
    c->dropout_rate = 0.2;
    c->seed = 0;
    c->threads = 0;
    c->patch_size = 5;
    c->filters[0] = 128;
    c->filters[1] = 64;
    c->filters[2] = 32;
    c->filters[3] = 16;
}

void rs_corpus_params_init(rs_corpus_params* p) {
    if (!p) return;
    p->n_images = 12;
    p->size = 128;
    rs_glcm_params_init(&p->glcm);
    p->seed = 0;
    p->threads = 0;
    p->kinds = nullptr;
}

/* ---- images ---- */

rs_status rs_image_read(const char* path, rs_image** out) {
    if (rs_status s = need(path && out, "argument")) return s;
    return guarded([&] {
        *out = new rs_image{read_image(path)};
        return RS_OK;
    });
}

rs_status rs_image_write(const rs_image* img, const char* path) {
    if (rs_status s = need(img && path, "argument")) return s;
    return guarded([&] {
        write_image(img->v, path);
        return RS_OK;
    });
}

void rs_image_free(rs_image* img) { delete img; }

int64_t rs_image_height(const rs_image* img) { return img ? img->v.height : 0; }
int64_t rs_image_width(const rs_image* img) { return img ? img->v.width : 0; }

rs_status rs_image_pixels(const rs_image* img, double* buf, size_t len) {
    if (rs_status s = need(img && buf, "argument")) return s;
    if (len != img->v.pixels.size())
        return set_error(RS_EINVAL, "buffer length does not match the image");
    std::memcpy(buf, img->v.pixels.data(), len * sizeof(double));
    return RS_OK;
}

rs_status rs_quantize(const rs_image* img, uint32_t g, rs_qimage** out) {
    if (rs_status s = need(img && out, "argument")) return s;
    return guarded([&] {
        *out = new rs_qimage{quantize(img->v, g)};
        return RS_OK;
    });
}

rs_status rs_qimage_create(int64_t height, int64_t width, uint32_t g, const uint16_t* levels,
                           rs_qimage** out) {
    if (rs_status s = need(levels && out, "argument")) return s;
    return guarded([&] {
        QuantizedImage q;
        q.height = height;
        q.width = width;
        q.g = g;
        if (height < 1 || width < 1)
            throw Error(ErrorKind::invalid_argument, "image dimensions must be positive");
        q.levels.assign(levels, levels + height * width);
        validate(q);
        *out = new rs_qimage{std::move(q)};
        return RS_OK;
    });
}

rs_status rs_qimage_read(const char* path, rs_qimage** out) {
    if (rs_status s = need(path && out, "argument")) return s;
    return guarded([&] {
        *out = new rs_qimage{read_qimage(path)};
        return RS_OK;
    });
}

rs_status rs_qimage_write(const rs_qimage* img, const char* path) {
    if (rs_status s = need(img && path, "argument")) return s;
    return guarded([&] {
        write_qimage(img->v, path);
        return RS_OK;
    });
}

void rs_qimage_free(rs_qimage* img) { delete img; }

int64_t rs_qimage_height(const rs_qimage* img) { return img ? img->v.height : 0; }
int64_t rs_qimage_width(const rs_qimage* img) { return img ? img->v.width : 0; }
uint32_t rs_qimage_g(const rs_qimage* img) { return img ? img->v.g : 0; }

rs_status rs_qimage_levels(const rs_qimage* img, uint16_t* buf, size_t len) {
    if (rs_status s = need(img && buf, "argument")) return s;
    if (len != img->v.levels.size())
        return set_error(RS_EINVAL, "buffer length does not match the image");
    std::memcpy(buf, img->v.levels.data(), len * sizeof(uint16_t));
    return RS_OK;
}

/* ---- feature maps ---- */

rs_status rs_entropy_map(const rs_qimage* img, const rs_glcm_params* params,
                         const char* strategy, int32_t threads, rs_map** out) {
    if (rs_status s = need(img && params && strategy && out, "argument")) return s;
    return guarded([&] {
        const GlcmParams p = to_core(*params);
        const std::string strat = strategy;
        FeatureMap map;
        if (strat == "naive") map = entropy_map_naive(img->v, p, threads);
        else if (strat == "incremental") map = entropy_map_incremental(img->v, p, threads);
        else
            throw Error(ErrorKind::invalid_argument,
                        "unknown strategy '" + strat + "' (expected naive or incremental)");
        *out = new rs_map{std::move(map)};
        return RS_OK;
    });
}

rs_status rs_map_read(const char* path, rs_map** out) {
    if (rs_status s = need(path && out, "argument")) return s;
    return guarded([&] {
        *out = new rs_map{read_map(path)};
        return RS_OK;
    });
}

rs_status rs_map_write(const rs_map* map, const char* path) {
    if (rs_status s = need(map && path, "argument")) return s;
    return guarded([&] {
        write_map(map->v, path);
        return RS_OK;
    });
}

void rs_map_free(rs_map* map) { delete map; }

int64_t rs_map_height(const rs_map* map) { return map ? map->v.height : 0; }
int64_t rs_map_width(const rs_map* map) { return map ? map->v.width : 0; }

rs_status rs_map_values(const rs_map* map, double* buf, size_t len) {
    if (rs_status s = need(map && buf, "argument")) return s;
    if (len != map->v.values.size())
        return set_error(RS_EINVAL, "buffer length does not match the map");
    std::memcpy(buf, map->v.values.data(), len * sizeof(double));
    return RS_OK;
}

/* ---- masks ---- */

rs_status rs_mask_read(const char* path, rs_mask** out) {
    if (rs_status s = need(path && out, "argument")) return s;
    return guarded([&] {
        *out = new rs_mask{read_mask(path)};
        return RS_OK;
    });
}

rs_status rs_mask_write(const rs_mask* mask, const char* path) {
    if (rs_status s = need(mask && path, "argument")) return s;
    return guarded([&] {
        write_mask(mask->v, path);
        return RS_OK;
    });
}

rs_status rs_mask_full(int64_t height, int64_t width, rs_mask** out) {
    if (rs_status s = need(out != nullptr, "argument")) return s;
    return guarded([&] {
        if (height < 1 || width < 1)
            throw Error(ErrorKind::invalid_argument, "mask dimensions must be positive");
        RoiMask m;
        m.height = height;
        m.width = width;
        m.flags.assign(static_cast<std::size_t>(height * width), 1);
        *out = new rs_mask{std::move(m)};
        return RS_OK;
    });
}

void rs_mask_free(rs_mask* mask) { delete mask; }

/* ---- model ---- */

rs_status rs_model_load(const char* path, rs_model** out) {
    if (rs_status s = need(path && out, "argument")) return s;
    return guarded([&] {
        *out = new rs_model{load_model(path)};
        return RS_OK;
    });
}

rs_status rs_model_save(const rs_model* model, const char* path) {
    if (rs_status s = need(model && path, "argument")) return s;
    return guarded([&] {
        save_model(model->v, path);
        return RS_OK;
    });
}

void rs_model_free(rs_model* model) { delete model; }

uint32_t rs_model_g(const rs_model* model) { return model ? model->v.g : 0; }
uint32_t rs_model_patch_size(const rs_model* model) { return model ? model->v.patch_size : 0; }

rs_status rs_synthesize_map(const rs_model* model, const rs_qimage* img, int32_t threads,
                            rs_map** out) {
    if (rs_status s = need(model && img && out, "argument")) return s;
    return guarded([&] {
        *out = new rs_map{synthesize_map(model->v, img->v, threads)};
        return RS_OK;
    });
}

rs_status rs_train_corpus(const char* manifest_path, const rs_train_config* config,
                          const char* out_dir) {
    if (rs_status s = need(manifest_path && config && out_dir, "argument")) return s;
    return guarded([&] {
        TrainConfig cfg;
        cfg.minibatch = config->minibatch;
        cfg.epochs = config->epochs;
        cfg.folds = config->folds;
        cfg.lr_halve_every = config->lr_halve_every;
        cfg.learning_rate = config->learning_rate;
        cfg.momentum = config->momentum;
        cfg.dropout_rate = config->dropout_rate;
        cfg.seed = config->seed;
        cfg.threads = config->threads;
        for (int i = 0; i < 4; ++i) cfg.filters[static_cast<std::size_t>(i)] = config->filters[i];
        train_from_manifest(manifest_path, config->patch_size, cfg, out_dir);
        return RS_OK;
    });
}

/* ---- synthetic data ---- */

rs_status rs_corpus_generate(const rs_corpus_params* params, const char* out_dir) {
    if (rs_status s = need(params && out_dir, "argument")) return s;
    return guarded([&] {
        CorpusSpec spec;
        spec.n_images = params->n_images;
        spec.size = params->size;
        spec.glcm = to_core(params->glcm);
        spec.seed = params->seed;
        spec.threads = params->threads;
        if (params->kinds && params->kinds[0] != '\0')
            for (const auto& name : split_list(params->kinds))
                spec.kinds.push_back(kind_from_name(name));
        write_corpus(gen_corpus(spec), out_dir);
        return RS_OK;
    });
}

/* ---- benchmark ---- */

rs_status rs_bench(const int64_t* sizes, size_t n_sizes, const rs_glcm_params* params,
                   const char* strategies, uint64_t seed, int32_t threads,
                   const char* out_csv) {
    if (rs_status s = need(sizes && params && strategies && out_csv, "argument")) return s;
    return guarded([&] {
        const std::vector<std::int64_t> sz(sizes, sizes + n_sizes);
        const auto rows =
            bench_entropy_maps(sz, to_core(*params), split_list(strategies), seed, threads);
        write_bench_csv(rows, out_csv);
        return RS_OK;
    });
}

/* ---- agreement ---- */

rs_status rs_agreement_eval(const rs_map* reference, const rs_map* test,
                            const rs_mask* const* masks, const char* const* labels,
                            size_t n_masks, const char* plot_csv, rs_report** out) {
    if (rs_status s = need(reference && test && masks && labels && out, "argument")) return s;
    return guarded([&] {
        EvalInput input;
        input.reference = &reference->v;
        input.test = &test->v;
        for (size_t i = 0; i < n_masks; ++i) {
            if (!masks[i] || !labels[i])
                throw Error(ErrorKind::invalid_argument, "null mask or label");
            input.masks.emplace_back(labels[i], &masks[i]->v);
        }
        const std::vector<EvalInput> inputs{input};
        auto rows = agreement_report(inputs);
        if (plot_csv) write_plot_csv(inputs, plot_csv);
        *out = new rs_report{std::move(rows)};
        return RS_OK;
    });
}

rs_status rs_agreement_pooled(const rs_map* const* references, const rs_map* const* tests,
                              size_t n_pairs, const char* plot_csv, rs_report** out) {
    if (rs_status s = need(references && tests && out, "argument")) return s;
    return guarded([&] {
        std::vector<RoiMask> full(n_pairs);
        std::vector<EvalInput> inputs;
        for (size_t i = 0; i < n_pairs; ++i) {
            if (!references[i] || !tests[i])
                throw Error(ErrorKind::invalid_argument, "null map in pooled agreement");
            full[i].height = references[i]->v.height;
            full[i].width = references[i]->v.width;
            full[i].flags.assign(references[i]->v.values.size(), 1);
            EvalInput in;
            in.reference = &references[i]->v;
            in.test = &tests[i]->v;
            in.masks.emplace_back("all", &full[i]);
            inputs.push_back(std::move(in));
        }
        auto rows = agreement_report(inputs);
        if (plot_csv) write_plot_csv(inputs, plot_csv);
        *out = new rs_report{std::move(rows)};
        return RS_OK;
    });
}

size_t rs_report_row_count(const rs_report* report) { return report ? report->rows.size() : 0; }

rs_status rs_report_get_row(const rs_report* report, size_t index, rs_report_row* out) {
    if (rs_status s = need(report && out, "argument")) return s;
    if (index >= report->rows.size()) return set_error(RS_EINVAL, "row index out of range");
    const AgreementRow& r = report->rows[index];
    out->label = r.label.c_str();
    out->n = r.n;
    out->pearson_r = r.pearson_r;
    out->pct_mean = r.pct_mean;
    out->pct_std = r.pct_std;
    out->ba_bias = r.ba_bias;
    out->ba_loa_low = r.ba_loa_low;
    out->ba_loa_high = r.ba_loa_high;
    out->excluded = r.excluded;
    return RS_OK;
}

rs_status rs_report_write_csv(const rs_report* report, const char* path) {
    if (rs_status s = need(report && path, "argument")) return s;
    return guarded([&] {
        write_report_csv(report->rows, path);
        return RS_OK;
    });
}

void rs_report_free(rs_report* report) { delete report; }

/* ---- raw paired statistics ---- */

rs_status rs_pearson(const double* reference, const double* test, size_t n, double* out) {
    if (rs_status s = need(reference && test && out, "argument")) return s;
    return guarded([&] {
        *out = pearson(to_sample(reference, test, n));
        return RS_OK;
    });
}

rs_status rs_percentage_difference(const double* reference, const double* test, size_t n,
                                   double* out_mean, double* out_std) {
    if (rs_status s = need(reference && test && out_mean && out_std, "argument")) return s;
    return guarded([&] {
        const PctDiff d = percentage_difference(to_sample(reference, test, n));
        *out_mean = d.mean;
        *out_std = d.stddev;
        return RS_OK;
    });
}

rs_status rs_bland_altman(const double* reference, const double* test, size_t n,
                          double* out_bias, double* out_loa_low, double* out_loa_high) {
    if (rs_status s = need(reference && test && out_bias && out_loa_low && out_loa_high,
                           "argument"))
        return s;
    return guarded([&] {
        const BlandAltman ba = bland_altman(to_sample(reference, test, n));
        *out_bias = ba.bias;
        *out_loa_low = ba.loa_low;
        *out_loa_high = ba.loa_high;
        return RS_OK;
    });
}

}  // extern "C"
