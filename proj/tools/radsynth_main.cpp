// radsynth command-line tool. Everything goes through the C API in
// radsynth/radsynth.h; this file only adds flag parsing, config echo files
// and the repro pipeline glue.
//
// Exit codes: 0 success, 2 usage error, 3 file/data error, 4 numerical
// domain error.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "radsynth/radsynth.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDomain = 4;

int exit_code_for(rs_status st) {
    return st == RS_EDOMAIN ? kExitDomain : kExitData;
}

int fail(rs_status st) {
    std::fprintf(stderr, "error: %s\n", rs_last_error());
    return exit_code_for(st);
}

int usage_fail(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return kExitUsage;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

bool write_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        out << text;
        if (!out) return false;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    return !ec;
}

// Config echo: one key=value line per semantic setting (sorted), then
// comment lines for runtime details. The hash covers only the semantic
// lines, so runs that differ just in thread count or timing hash alike.
class Echo {
public:
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void set(const std::string& key, std::uint64_t value) { kv_[key] = std::to_string(value); }
    void set(const std::string& key, std::int64_t value) { kv_[key] = std::to_string(value); }
    void set(const std::string& key, double value) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        kv_[key] = buf;
    }
    void note(const std::string& line) { notes_.push_back(line); }

    // writes the file and returns the semantic hash
    std::uint64_t write(const std::string& path) const {
        std::string semantic;
        for (const auto& [k, v] : kv_) semantic += k + "=" + v + "\n";
        const std::uint64_t hash = fnv1a64(semantic);
        std::string text = semantic;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "# config_hash=%016" PRIx64 "\n", hash);
        text += buf;
        for (const auto& n : notes_) text += "# " + n + "\n";
        if (!write_file(path, text))
            std::fprintf(stderr, "warning: could not write %s\n", path.c_str());
        return hash;
    }

private:
    std::map<std::string, std::string> kv_;
    std::vector<std::string> notes_;
};

// RADSEED, when set, wins over --seed on every command that takes one.
int apply_radseed(std::uint64_t& seed) {
    const char* env = std::getenv("RADSEED");
    if (!env || !*env) return 0;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0')
        return usage_fail(std::string("RADSEED is not a valid seed: '") + env + "'");
    seed = static_cast<std::uint64_t>(v);
    return 0;
}

struct GlcmFlags {
    std::uint32_t g = 64;
    std::uint32_t window = 5;
    std::int32_t offset_dr = 0;
    std::int32_t offset_dc = 1;
    std::string log_base = "natural";

    void attach(CLI::App* cmd) {
        cmd->add_option("--g", g, "gray levels")->capture_default_str();
        cmd->add_option("--window", window, "window edge length (odd)")->capture_default_str();
        cmd->add_option("--offset-dr", offset_dr, "co-occurrence row offset")
            ->capture_default_str();
        cmd->add_option("--offset-dc", offset_dc, "co-occurrence column offset")
            ->capture_default_str();
        cmd->add_option("--log-base", log_base, "entropy log base: natural or base2")
            ->check(CLI::IsMember({"natural", "base2"}))
            ->capture_default_str();
    }

    rs_glcm_params to_params() const {
        rs_glcm_params p;
        rs_glcm_params_init(&p);
        p.g = g;
        p.window = window;
        p.offset_dr = offset_dr;
        p.offset_dc = offset_dc;
        p.log_base2 = log_base == "base2" ? 1 : 0;
        return p;
    }

    void echo_into(Echo& echo) const {
        echo.set("g", static_cast<std::uint64_t>(g));
        echo.set("window", static_cast<std::uint64_t>(window));
        echo.set("offset_dr", static_cast<std::int64_t>(offset_dr));
        echo.set("offset_dc", static_cast<std::int64_t>(offset_dc));
        echo.set("log_base", log_base);
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Minimal CSV splitter for the pipeline's own manifest/folds files.
std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = line.find(sep, start);
        if (at == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, at - start));
        start = at + 1;
    }
}

bool read_lines(const std::string& path, std::vector<std::string>& lines) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return true;
}

// unique_ptr-style guards for the C handles
template <typename T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    explicit Handle(T* ptr) : p(ptr) {}
    ~Handle() { reset(); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
    Handle& operator=(Handle&& o) noexcept {
        if (this != &o) {
            reset();
            p = o.p;
            o.p = nullptr;
        }
        return *this;
    }
    void reset() {
        if (p) Free(p);
        p = nullptr;
    }
    T** out() {
        reset();
        return &p;
    }
    explicit operator bool() const { return p != nullptr; }
};

using QImage = Handle<rs_qimage, rs_qimage_free>;
using Map = Handle<rs_map, rs_map_free>;
using Mask = Handle<rs_mask, rs_mask_free>;
using ModelHandle = Handle<rs_model, rs_model_free>;
using Report = Handle<rs_report, rs_report_free>;

// ---- gen --------------------------------------------------------------------

struct GenArgs {
    std::string out_dir;
    std::uint32_t n = 12;
    std::int64_t size = 128;
    GlcmFlags glcm;
    std::uint64_t seed = 0;
    std::int32_t threads = 0;
    std::string kinds;
};

int run_gen(const GenArgs& a) {
    GenArgs args = a;
    if (int rc = apply_radseed(args.seed)) return rc;

    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);
    if (ec) return usage_fail(args.out_dir + ": cannot create output directory");

    Echo echo;
    echo.set("command", "gen");
    echo.set("n", static_cast<std::uint64_t>(args.n));
    echo.set("size", args.size);
    echo.set("seed", args.seed);
    echo.set("kinds", args.kinds.empty() ? "all" : args.kinds);
    args.glcm.echo_into(echo);
    echo.note("threads=" + std::to_string(args.threads));
    echo.write((std::filesystem::path(args.out_dir) / "config_echo.txt").string());

    rs_corpus_params p;
    rs_corpus_params_init(&p);
    p.n_images = args.n;
    p.size = args.size;
    p.glcm = args.glcm.to_params();
    p.seed = args.seed;
    p.threads = args.threads;
    p.kinds = args.kinds.empty() ? nullptr : args.kinds.c_str();
    if (rs_status st = rs_corpus_generate(&p, args.out_dir.c_str())) return fail(st);
    std::printf("wrote %u images with labels under %s\n", args.n, args.out_dir.c_str());
    return 0;
}

// ---- map --------------------------------------------------------------------

struct MapArgs {
    std::string image, out;
    std::string strategy = "incremental";
    GlcmFlags glcm;
    std::int32_t threads = 0;
};

int run_map(const MapArgs& args) {
    QImage img;
    if (rs_status st = rs_qimage_read(args.image.c_str(), img.out())) return fail(st);
    if (rs_qimage_g(img.p) != args.glcm.g) {
        std::fprintf(stderr, "error: %s encodes g=%u levels but --g is %u\n", args.image.c_str(),
                     rs_qimage_g(img.p), args.glcm.g);
        return kExitData;
    }

    Echo echo;
    echo.set("command", "map");
    echo.set("image", args.image);
    echo.set("strategy", args.strategy);
    args.glcm.echo_into(echo);
    echo.note("threads=" + std::to_string(args.threads));
    echo.write(args.out + ".config.txt");

    const rs_glcm_params p = args.glcm.to_params();
    const auto t0 = std::chrono::steady_clock::now();
    Map map;
    if (rs_status st = rs_entropy_map(img.p, &p, args.strategy.c_str(), args.threads, map.out()))
        return fail(st);
    const double secs = seconds_since(t0);
    if (rs_status st = rs_map_write(map.p, args.out.c_str())) return fail(st);
    std::printf("%s: %lld x %lld map in %.3f s (%s)\n", args.out.c_str(),
                static_cast<long long>(rs_map_height(map.p)),
                static_cast<long long>(rs_map_width(map.p)), secs, args.strategy.c_str());
    return 0;
}

// ---- bench ------------------------------------------------------------------

struct BenchArgs {
    std::string out;
    std::string sizes = "128,256,512";
    std::string strategies = "naive,incremental";
    GlcmFlags glcm;
    std::uint64_t seed = 0;
    std::int32_t threads = 0;
};

int run_bench(const BenchArgs& a) {
    BenchArgs args = a;
    if (int rc = apply_radseed(args.seed)) return rc;

    std::vector<std::int64_t> sizes;
    for (const auto& tok : split(args.sizes, ',')) {
        try {
            sizes.push_back(std::stoll(tok));
        } catch (const std::exception&) {
            return usage_fail("--sizes expects a comma-separated list of integers");
        }
    }

    Echo echo;
    echo.set("command", "bench");
    echo.set("sizes", args.sizes);
    echo.set("strategies", args.strategies);
    echo.set("seed", args.seed);
    args.glcm.echo_into(echo);
    echo.note("threads=" + std::to_string(args.threads));
    echo.write(args.out + ".config.txt");

    const rs_glcm_params p = args.glcm.to_params();
    if (rs_status st = rs_bench(sizes.data(), sizes.size(), &p, args.strategies.c_str(),
                                args.seed, args.threads, args.out.c_str()))
        return fail(st);
    std::printf("wrote %s\n", args.out.c_str());
    return 0;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
    std::string manifest, out_dir;
    std::uint32_t epochs = 50, folds = 2, minibatch = 2000, halve_every = 10, window = 5;
    double lr = 0.01, momentum = 0.9, dropout = 0.2;
    std::uint64_t seed = 0;
    std::int32_t threads = 0;
};

rs_train_config to_config(const TrainArgs& a) {
    rs_train_config cfg;
    rs_train_config_init(&cfg);
    cfg.minibatch = a.minibatch;
    cfg.epochs = a.epochs;
    cfg.folds = a.folds;
    cfg.lr_halve_every = a.halve_every;
    cfg.learning_rate = a.lr;
    cfg.momentum = a.momentum;
    cfg.dropout_rate = a.dropout;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    cfg.patch_size = a.window;
    return cfg;
}

void echo_train(const TrainArgs& a, Echo& echo) {
    echo.set("epochs", static_cast<std::uint64_t>(a.epochs));
    echo.set("folds", static_cast<std::uint64_t>(a.folds));
    echo.set("minibatch", static_cast<std::uint64_t>(a.minibatch));
    echo.set("halve_every", static_cast<std::uint64_t>(a.halve_every));
    echo.set("window", static_cast<std::uint64_t>(a.window));
    echo.set("learning_rate", a.lr);
    echo.set("momentum", a.momentum);
    echo.set("dropout", a.dropout);
    echo.set("seed", a.seed);
}

int run_train(const TrainArgs& a) {
    TrainArgs args = a;
    if (int rc = apply_radseed(args.seed)) return rc;

    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);
    if (ec) return usage_fail(args.out_dir + ": cannot create output directory");

    Echo echo;
    echo.set("command", "train");
    echo.set("manifest", args.manifest);
    echo_train(args, echo);
    echo.note("threads=" + std::to_string(args.threads));
    echo.write((std::filesystem::path(args.out_dir) / "config_echo.txt").string());

    const rs_train_config cfg = to_config(args);
    const auto t0 = std::chrono::steady_clock::now();
    if (rs_status st = rs_train_corpus(args.manifest.c_str(), &cfg, args.out_dir.c_str()))
        return fail(st);
    std::printf("trained %u folds in %.1f s; models and history under %s\n", args.folds,
                seconds_since(t0), args.out_dir.c_str());
    return 0;
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
    std::string model, image, out;
    std::int32_t threads = 0;
};

int run_synth(const SynthArgs& args) {
    ModelHandle model;
    if (rs_status st = rs_model_load(args.model.c_str(), model.out())) return fail(st);
    QImage img;
    if (rs_status st = rs_qimage_read(args.image.c_str(), img.out())) return fail(st);

    Echo echo;
    echo.set("command", "synth");
    echo.set("model", args.model);
    echo.set("image", args.image);
    echo.note("threads=" + std::to_string(args.threads));
    echo.write(args.out + ".config.txt");

    const auto t0 = std::chrono::steady_clock::now();
    Map map;
    if (rs_status st = rs_synthesize_map(model.p, img.p, args.threads, map.out()))
        return fail(st);
    const double secs = seconds_since(t0);
    if (rs_status st = rs_map_write(map.p, args.out.c_str())) return fail(st);
    std::printf("%s: synthesized %lld x %lld map in %.3f s\n", args.out.c_str(),
                static_cast<long long>(rs_map_height(map.p)),
                static_cast<long long>(rs_map_width(map.p)), secs);
    return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string oracle, test, out_report, out_plot;
    std::vector<std::string> mask_specs;  // label=path
};

int print_report(const rs_report* report) {
    const size_t n = rs_report_row_count(report);
    for (size_t i = 0; i < n; ++i) {
        rs_report_row row;
        if (rs_status st = rs_report_get_row(report, i, &row)) return fail(st);
        std::printf("%s: n=%lld r=%.6f pct=%.4f+-%.4f ba=[%.4f, %.4f, %.4f] excluded=%lld\n",
                    row.label, static_cast<long long>(row.n), row.pearson_r, row.pct_mean,
                    row.pct_std, row.ba_loa_low, row.ba_bias, row.ba_loa_high,
                    static_cast<long long>(row.excluded));
    }
    return 0;
}

int run_eval(const EvalArgs& args) {
    Map oracle, test;
    if (rs_status st = rs_map_read(args.oracle.c_str(), oracle.out())) return fail(st);
    if (rs_status st = rs_map_read(args.test.c_str(), test.out())) return fail(st);

    std::vector<Mask> masks;
    std::vector<std::string> labels;
    for (const auto& spec : args.mask_specs) {
        const std::size_t eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
            return usage_fail("--mask expects label=path, got '" + spec + "'");
        labels.push_back(spec.substr(0, eq));
        Mask m;
        if (rs_status st = rs_mask_read(spec.substr(eq + 1).c_str(), m.out())) return fail(st);
        masks.push_back(std::move(m));
    }
    if (masks.empty()) {
        // no regions given: score the whole map
        labels.push_back("all");
        Mask m;
        if (rs_status st = rs_mask_full(rs_map_height(oracle.p), rs_map_width(oracle.p), m.out()))
            return fail(st);
        masks.push_back(std::move(m));
    }

    Echo echo;
    echo.set("command", "eval");
    echo.set("oracle", args.oracle);
    echo.set("test", args.test);
    std::string mask_list;
    for (const auto& l : labels) mask_list += (mask_list.empty() ? "" : ",") + l;
    echo.set("masks", mask_list);
    echo.write(args.out_report + ".config.txt");

    std::vector<const rs_mask*> mask_ptrs;
    std::vector<const char*> label_ptrs;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        mask_ptrs.push_back(masks[i].p);
        label_ptrs.push_back(labels[i].c_str());
    }
    Report report;
    if (rs_status st = rs_agreement_eval(oracle.p, test.p, mask_ptrs.data(), label_ptrs.data(),
                                         mask_ptrs.size(),
                                         args.out_plot.empty() ? nullptr : args.out_plot.c_str(),
                                         report.out()))
        return fail(st);
    if (rs_status st = rs_report_write_csv(report.p, args.out_report.c_str())) return fail(st);
    return print_report(report.p);
}

// ---- repro ------------------------------------------------------------------

struct ReproArgs {
    std::string out_dir;
    std::uint32_t n = 12;
    std::int64_t size = 128;
    GlcmFlags glcm;
    TrainArgs train;  // manifest/out_dir filled in below
    std::uint64_t seed = 0;
    std::int32_t threads = 0;
};

int run_repro(const ReproArgs& a) {
    ReproArgs args = a;
    if (int rc = apply_radseed(args.seed)) return rc;
    args.train.seed = args.seed;
    args.train.threads = args.threads;
    args.train.window = args.glcm.window;

    namespace fs = std::filesystem;
    const fs::path root(args.out_dir);
    std::error_code ec;
    fs::create_directories(root / "synth", ec);
    if (ec) return usage_fail(args.out_dir + ": cannot create output directory");

    Echo echo;
    echo.set("command", "repro");
    echo.set("n", static_cast<std::uint64_t>(args.n));
    echo.set("size", args.size);
    echo.set("seed", args.seed);
    args.glcm.echo_into(echo);
    echo_train(args.train, echo);
    echo.note("threads=" + std::to_string(args.threads));
    const std::uint64_t config_hash = echo.write((root / "config_echo.txt").string());

    // 1. corpus with reference labels
    std::printf("[1/4] generating %u %lld x %lld images...\n", args.n, static_cast<long long>(args.size),
                static_cast<long long>(args.size));
    rs_corpus_params cp;
    rs_corpus_params_init(&cp);
    cp.n_images = args.n;
    cp.size = args.size;
    cp.glcm = args.glcm.to_params();
    cp.seed = args.seed;
    cp.threads = args.threads;
    const std::string corpus_dir = (root / "corpus").string();
    if (rs_status st = rs_corpus_generate(&cp, corpus_dir.c_str())) return fail(st);

    // 2. cross-validated training
    std::printf("[2/4] training (%u epochs, %u folds)...\n", args.train.epochs, args.train.folds);
    const std::string manifest = (fs::path(corpus_dir) / "manifest.csv").string();
    const std::string train_dir = (root / "train").string();
    const rs_train_config cfg = to_config(args.train);
    const auto t_train = std::chrono::steady_clock::now();
    if (rs_status st = rs_train_corpus(manifest.c_str(), &cfg, train_dir.c_str()))
        return fail(st);
    const double train_secs = seconds_since(t_train);

    // fold assignment and per-image paths come from the pipeline's own files
    std::vector<std::string> fold_lines, manifest_lines;
    if (!read_lines((fs::path(train_dir) / "folds.csv").string(), fold_lines) ||
        !read_lines(manifest, manifest_lines)) {
        std::fprintf(stderr, "error: training outputs are missing\n");
        return kExitData;
    }
    std::vector<std::uint32_t> fold_of;
    for (std::size_t i = 1; i < fold_lines.size(); ++i) {
        const auto f = split(fold_lines[i], ',');
        if (f.size() != 2) continue;
        fold_of.push_back(static_cast<std::uint32_t>(std::stoul(f[1])));
    }
    struct Item {
        std::string image, label;
    };
    std::vector<Item> items;
    for (std::size_t i = 1; i < manifest_lines.size(); ++i) {
        const auto f = split(manifest_lines[i], ',');
        if (f.size() != 6) continue;
        items.push_back({(fs::path(corpus_dir) / f[4]).string(),
                         (fs::path(corpus_dir) / f[5]).string()});
    }
    if (items.size() != fold_of.size() || items.empty()) {
        std::fprintf(stderr, "error: manifest and fold table disagree\n");
        return kExitData;
    }

    // 3. synthesize each image with the model that held it out
    std::printf("[3/4] synthesizing held-out maps...\n");
    std::vector<ModelHandle> models(args.train.folds);
    for (std::uint32_t f = 0; f < args.train.folds; ++f) {
        const std::string path =
            (fs::path(train_dir) / ("model_fold" + std::to_string(f) + ".rsyn")).string();
        if (rs_status st = rs_model_load(path.c_str(), models[f].out())) return fail(st);
    }
    std::vector<Map> oracles(items.size());
    std::vector<Map> synths(items.size());
    double synth_secs_first = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        QImage img;
        if (rs_status st = rs_qimage_read(items[i].image.c_str(), img.out())) return fail(st);
        const auto t0 = std::chrono::steady_clock::now();
        if (rs_status st = rs_synthesize_map(models[fold_of[i]].p, img.p, args.threads,
                                             synths[i].out()))
            return fail(st);
        if (i == 0) synth_secs_first = seconds_since(t0);
        char name[48];
        std::snprintf(name, sizeof(name), "synth/map_%04zu.fmap", i);
        if (rs_status st = rs_map_write(synths[i].p, (root / name).string().c_str()))
            return fail(st);
        if (rs_status st = rs_map_read(items[i].label.c_str(), oracles[i].out())) return fail(st);
    }

    // timing reference: the exact map on the first image
    double naive_secs = 0.0;
    {
        QImage img;
        if (rs_status st = rs_qimage_read(items[0].image.c_str(), img.out())) return fail(st);
        const rs_glcm_params p = args.glcm.to_params();
        const auto t0 = std::chrono::steady_clock::now();
        Map ref;
        if (rs_status st = rs_entropy_map(img.p, &p, "naive", args.threads, ref.out()))
            return fail(st);
        naive_secs = seconds_since(t0);
    }

    // 4. pooled held-out agreement
    std::printf("[4/4] scoring agreement...\n");
    std::vector<const rs_map*> oracle_ptrs, synth_ptrs;
    for (std::size_t i = 0; i < items.size(); ++i) {
        oracle_ptrs.push_back(oracles[i].p);
        synth_ptrs.push_back(synths[i].p);
    }
    Report report;
    if (rs_status st = rs_agreement_pooled(oracle_ptrs.data(), synth_ptrs.data(),
                                           oracle_ptrs.size(), (root / "plot.csv").string().c_str(),
                                           report.out()))
        return fail(st);
    if (rs_status st = rs_report_write_csv(report.p, (root / "report.csv").string().c_str()))
        return fail(st);

    rs_report_row pooled;
    if (rs_status st =
            rs_report_get_row(report.p, rs_report_row_count(report.p) - 1, &pooled))
        return fail(st);

    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016" PRIx64, config_hash);
    std::string summary;
    summary += "images=" + std::to_string(args.n) + "\n";
    summary += "size=" + std::to_string(args.size) + "\n";
    summary += "g=" + std::to_string(args.glcm.g) + "\n";
    summary += "window=" + std::to_string(args.glcm.window) + "\n";
    summary += "seed=" + std::to_string(args.seed) + "\n";
    summary += "epochs=" + std::to_string(args.train.epochs) + "\n";
    summary += "folds=" + std::to_string(args.train.folds) + "\n";
    summary += "minibatch=" + std::to_string(args.train.minibatch) + "\n";
    summary += "pooled_n=" + std::to_string(pooled.n) + "\n";
    summary += "pooled_pearson_r=" + fmt17(pooled.pearson_r) + "\n";
    summary += "pooled_pct_mean=" + fmt17(pooled.pct_mean) + "\n";
    summary += "pooled_pct_std=" + fmt17(pooled.pct_std) + "\n";
    summary += "pooled_ba_bias=" + fmt17(pooled.ba_bias) + "\n";
    summary += "pooled_ba_loa_low=" + fmt17(pooled.ba_loa_low) + "\n";
    summary += "pooled_ba_loa_high=" + fmt17(pooled.ba_loa_high) + "\n";
    summary += "excluded=" + std::to_string(pooled.excluded) + "\n";
    summary += std::string("config_hash=") + hash_buf + "\n";
    if (!write_file((root / "summary.txt").string(), summary)) {
        std::fprintf(stderr, "error: cannot write summary\n");
        return kExitData;
    }

    // timing lives in its own file so summary.txt stays run-to-run identical
    std::string timing;
    timing += "train_seconds=" + fmt17(train_secs) + "\n";
    timing += "naive_map_seconds=" + fmt17(naive_secs) + "\n";
    timing += "synth_map_seconds=" + fmt17(synth_secs_first) + "\n";
    timing += "synth_speedup_vs_naive=" +
              fmt17(synth_secs_first > 0 ? naive_secs / synth_secs_first : 0.0) + "\n";
    write_file((root / "timing.txt").string(), timing);

    std::fputs(summary.c_str(), stdout);
    std::printf("synth_speedup_vs_naive=%.2f (naive %.3f s, synth %.3f s)\n",
                synth_secs_first > 0 ? naive_secs / synth_secs_first : 0.0, naive_secs,
                synth_secs_first);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GLCM entropy maps and their CNN surrogate"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* cmd_gen = app.add_subcommand("gen", "generate a labeled synthetic corpus");
    cmd_gen->add_option("--out", gen.out_dir, "output directory")->required();
    cmd_gen->add_option("--n", gen.n, "number of images")->capture_default_str();
    cmd_gen->add_option("--size", gen.size, "square image edge")->capture_default_str();
    cmd_gen->add_option("--seed", gen.seed, "corpus seed")->capture_default_str();
    cmd_gen->add_option("--threads", gen.threads, "worker threads (0 = all)")
        ->capture_default_str();
    cmd_gen->add_option("--kinds", gen.kinds,
                        "comma-separated texture kinds (smoothed_noise, checker, gradient, "
                        "blob_mixture); default all");
    gen.glcm.attach(cmd_gen);

    MapArgs map_args;
    auto* cmd_map = app.add_subcommand("map", "compute the exact entropy map of an image");
    cmd_map->add_option("--image", map_args.image, "quantized input image (PGM)")->required();
    cmd_map->add_option("--out", map_args.out, "output feature map (FMAP)")->required();
    cmd_map->add_option("--strategy", map_args.strategy, "naive or incremental")
        ->check(CLI::IsMember({"naive", "incremental"}))
        ->capture_default_str();
    cmd_map->add_option("--threads", map_args.threads, "worker threads (0 = all)")
        ->capture_default_str();
    map_args.glcm.attach(cmd_map);

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand("bench", "time the map strategies");
    cmd_bench->add_option("--out", bench.out, "output CSV")->required();
    cmd_bench->add_option("--sizes", bench.sizes, "comma-separated image sizes")
        ->capture_default_str();
    cmd_bench->add_option("--strategies", bench.strategies, "comma-separated strategies")
        ->capture_default_str();
    cmd_bench->add_option("--seed", bench.seed, "noise seed")->capture_default_str();
    cmd_bench->add_option("--threads", bench.threads, "worker threads (0 = all)")
        ->capture_default_str();
    bench.glcm.attach(cmd_bench);

    TrainArgs train;
    auto* cmd_train = app.add_subcommand("train", "train the surrogate on a corpus");
    cmd_train->add_option("--manifest", train.manifest, "corpus manifest.csv")->required();
    cmd_train->add_option("--out", train.out_dir, "output directory")->required();
    cmd_train->add_option("--epochs", train.epochs, "training epochs")->capture_default_str();
    cmd_train->add_option("--folds", train.folds, "cross-validation folds")
        ->capture_default_str();
    cmd_train->add_option("--minibatch", train.minibatch, "minibatch size")
        ->capture_default_str();
    cmd_train->add_option("--lr", train.lr, "initial learning rate")->capture_default_str();
    cmd_train->add_option("--momentum", train.momentum, "SGD momentum")->capture_default_str();
    cmd_train->add_option("--halve-every", train.halve_every, "epochs between rate halvings")
        ->capture_default_str();
    cmd_train->add_option("--dropout", train.dropout, "dropout rate")->capture_default_str();
    cmd_train->add_option("--window", train.window, "patch edge fed to the network")
        ->capture_default_str();
    cmd_train->add_option("--seed", train.seed, "training seed")->capture_default_str();
    cmd_train->add_option("--threads", train.threads, "worker threads (0 = all)")
        ->capture_default_str();

    SynthArgs synth;
    auto* cmd_synth = app.add_subcommand("synth", "synthesize a map with a trained model");
    cmd_synth->add_option("--model", synth.model, "model file (RSYN)")->required();
    cmd_synth->add_option("--image", synth.image, "quantized input image (PGM)")->required();
    cmd_synth->add_option("--out", synth.out, "output feature map (FMAP)")->required();
    cmd_synth->add_option("--threads", synth.threads, "worker threads (0 = all)")
        ->capture_default_str();

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "score a map against its reference");
    cmd_eval->add_option("--oracle", eval.oracle, "reference map (FMAP)")->required();
    cmd_eval->add_option("--test", eval.test, "map under test (FMAP)")->required();
    cmd_eval->add_option("--out-report", eval.out_report, "agreement CSV")->required();
    cmd_eval->add_option("--out-plot", eval.out_plot, "per-pixel pair CSV (optional)");
    cmd_eval->add_option("--mask", eval.mask_specs,
                         "label=path region mask (PBM or 0/1 FMAP); repeatable; default: whole map");

    ReproArgs repro;
    auto* cmd_repro = app.add_subcommand(
        "repro", "end-to-end run: gen, train, synthesize held-out folds, eval");
    cmd_repro->add_option("--out", repro.out_dir, "output directory")->required();
    cmd_repro->add_option("--n", repro.n, "number of images")->capture_default_str();
    cmd_repro->add_option("--size", repro.size, "square image edge")->capture_default_str();
    cmd_repro->add_option("--seed", repro.seed, "pipeline seed")->capture_default_str();
    cmd_repro->add_option("--epochs", repro.train.epochs, "training epochs")
        ->capture_default_str();
    cmd_repro->add_option("--folds", repro.train.folds, "cross-validation folds")
        ->capture_default_str();
    cmd_repro->add_option("--minibatch", repro.train.minibatch, "minibatch size")
        ->capture_default_str();
    cmd_repro->add_option("--threads", repro.threads, "worker threads (0 = all)")
        ->capture_default_str();
    repro.glcm.attach(cmd_repro);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }

    try {
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_map->parsed()) return run_map(map_args);
        if (cmd_bench->parsed()) return run_bench(bench);
        if (cmd_train->parsed()) return run_train(train);
        if (cmd_synth->parsed()) return run_synth(synth);
        if (cmd_eval->parsed()) return run_eval(eval);
        if (cmd_repro->parsed()) return run_repro(repro);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}
