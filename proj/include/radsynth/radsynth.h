/* radsynth — GLCM entropy maps and their CNN surrogate, as a C library.
 *
 * Every object lives behind an opaque handle created and destroyed by the
 * library. Functions that can fail return an rs_status; on anything but
 * RS_OK the out-parameters are untouched and rs_last_error() carries a
 * message (thread-local, valid until the next failing call on the thread).
 */
#ifndef RADSYNTH_H
#define RADSYNTH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rs_status {
    RS_OK = 0,
    RS_EINVAL = 1,   /* bad argument or configuration */
    RS_EIO = 2,      /* filesystem failure */
    RS_EPARSE = 3,   /* malformed file contents */
    RS_EDOMAIN = 4,  /* numerically undefined result */
    RS_EINTERNAL = 5 /* unexpected failure (allocation, internal bug) */
} rs_status;

const char* rs_last_error(void);
const char* rs_version(void);

typedef struct rs_image rs_image;   /* real-valued grayscale image */
typedef struct rs_qimage rs_qimage; /* image quantized to g levels */
typedef struct rs_map rs_map;       /* per-pixel feature map */
typedef struct rs_mask rs_mask;     /* region-of-interest mask */
typedef struct rs_model rs_model;   /* surrogate network */
typedef struct rs_report rs_report; /* agreement statistics table */

/* ---- parameters ---------------------------------------------------------- */

typedef struct rs_glcm_params {
    uint32_t g;        /* gray levels (default 64) */
    uint32_t window;   /* odd window edge (default 5) */
    int32_t offset_dr; /* co-occurrence offset, rows (default 0) */
    int32_t offset_dc; /* co-occurrence offset, cols (default 1) */
    int32_t symmetric; /* nonzero: count mirrored pairs too (default 1) */
    int32_t log_base2; /* nonzero: entropy in bits, else nats (default 0) */
} rs_glcm_params;

void rs_glcm_params_init(rs_glcm_params* p);

typedef struct rs_train_config {
    uint32_t minibatch;      /* default 2000 */
    uint32_t epochs;         /* default 50 */
    uint32_t folds;          /* default 2 */
    uint32_t lr_halve_every; /* epochs between halvings (default 10) */
    double learning_rate;    /* default 0.01 */
    double momentum;         /* default 0.9 */
    double dropout_rate;     /* default 0.2 */
    uint64_t seed;
    int32_t threads;         /* 0 = all hardware threads */
    uint32_t patch_size;     /* window fed to the network (default 5) */
    uint32_t filters[4];     /* default 128, 64, 32, 16 */
} rs_train_config;

void rs_train_config_init(rs_train_config* c);

typedef struct rs_corpus_params {
    uint32_t n_images;   /* default 12 */
    int64_t size;        /* square image edge (default 128) */
    rs_glcm_params glcm; /* levels, window, offset for the labels */
    uint64_t seed;
    int32_t threads;
    const char* kinds;   /* comma-separated texture kinds, NULL = all four */
} rs_corpus_params;

void rs_corpus_params_init(rs_corpus_params* p);

/* ---- images --------------------------------------------------------------- */

rs_status rs_image_read(const char* path, rs_image** out);
rs_status rs_image_write(const rs_image* img, const char* path);
void rs_image_free(rs_image* img);
int64_t rs_image_height(const rs_image* img);
int64_t rs_image_width(const rs_image* img);
/* copies height*width doubles; len must match exactly */
rs_status rs_image_pixels(const rs_image* img, double* buf, size_t len);

rs_status rs_quantize(const rs_image* img, uint32_t g, rs_qimage** out);
rs_status rs_qimage_create(int64_t height, int64_t width, uint32_t g,
                           const uint16_t* levels, rs_qimage** out);
rs_status rs_qimage_read(const char* path, rs_qimage** out);
rs_status rs_qimage_write(const rs_qimage* img, const char* path);
void rs_qimage_free(rs_qimage* img);
int64_t rs_qimage_height(const rs_qimage* img);
int64_t rs_qimage_width(const rs_qimage* img);
uint32_t rs_qimage_g(const rs_qimage* img);
rs_status rs_qimage_levels(const rs_qimage* img, uint16_t* buf, size_t len);

/* ---- feature maps ---------------------------------------------------------- */

/* strategy: "naive" (rebuild every window) or "incremental" (sliding update);
 * both produce the same map to 1e-9 per pixel */
rs_status rs_entropy_map(const rs_qimage* img, const rs_glcm_params* params,
                         const char* strategy, int32_t threads, rs_map** out);
rs_status rs_map_read(const char* path, rs_map** out);
rs_status rs_map_write(const rs_map* map, const char* path);
void rs_map_free(rs_map* map);
int64_t rs_map_height(const rs_map* map);
int64_t rs_map_width(const rs_map* map);
rs_status rs_map_values(const rs_map* map, double* buf, size_t len);

/* ---- masks ----------------------------------------------------------------- */

rs_status rs_mask_read(const char* path, rs_mask** out);
rs_status rs_mask_write(const rs_mask* mask, const char* path);
rs_status rs_mask_full(int64_t height, int64_t width, rs_mask** out);
void rs_mask_free(rs_mask* mask);

/* ---- surrogate model -------------------------------------------------------- */

rs_status rs_model_load(const char* path, rs_model** out);
rs_status rs_model_save(const rs_model* model, const char* path);
void rs_model_free(rs_model* model);
uint32_t rs_model_g(const rs_model* model);
uint32_t rs_model_patch_size(const rs_model* model);

rs_status rs_synthesize_map(const rs_model* model, const rs_qimage* img, int32_t threads,
                            rs_map** out);

/* Cross-validated training from a corpus manifest. Writes one
 * model_foldN.rsyn per fold plus history.csv and folds.csv into out_dir. */
rs_status rs_train_corpus(const char* manifest_path, const rs_train_config* config,
                          const char* out_dir);

/* ---- synthetic data ---------------------------------------------------------- */

/* Generates the corpus under out_dir: images/, labels/ (reference entropy
 * maps) and manifest.csv. */
rs_status rs_corpus_generate(const rs_corpus_params* params, const char* out_dir);

/* ---- benchmark ----------------------------------------------------------------- */

/* strategies is a comma-separated list; writes the timing CSV to out_csv. */
rs_status rs_bench(const int64_t* sizes, size_t n_sizes, const rs_glcm_params* params,
                   const char* strategies, uint64_t seed, int32_t threads,
                   const char* out_csv);

/* ---- agreement statistics -------------------------------------------------------- */

typedef struct rs_report_row {
    const char* label; /* owned by the report */
    int64_t n;
    double pearson_r; /* NaN when a series is constant */
    double pct_mean;  /* NaN when every reference was excluded */
    double pct_std;
    double ba_bias;
    double ba_loa_low;
    double ba_loa_high;
    int64_t excluded; /* near-zero references left out of pct_mean/pct_std */
} rs_report_row;

/* One reference/test map pair scored over labeled masks; rows come out one
 * per label plus a final "pooled" row. plot_csv (optional, may be NULL)
 * receives the per-pixel value pairs. */
rs_status rs_agreement_eval(const rs_map* reference, const rs_map* test,
                            const rs_mask* const* masks, const char* const* labels,
                            size_t n_masks, const char* plot_csv, rs_report** out);

/* Whole-image agreement pooled over several map pairs. */
rs_status rs_agreement_pooled(const rs_map* const* references, const rs_map* const* tests,
                              size_t n_pairs, const char* plot_csv, rs_report** out);

size_t rs_report_row_count(const rs_report* report);
rs_status rs_report_get_row(const rs_report* report, size_t index, rs_report_row* out);
rs_status rs_report_write_csv(const rs_report* report, const char* path);
void rs_report_free(rs_report* report);

/* ---- paired statistics on raw arrays ----------------------------------------------- */

rs_status rs_pearson(const double* reference, const double* test, size_t n, double* out);
rs_status rs_percentage_difference(const double* reference, const double* test, size_t n,
                                   double* out_mean, double* out_std);
rs_status rs_bland_altman(const double* reference, const double* test, size_t n,
                          double* out_bias, double* out_loa_low, double* out_loa_high);

#ifdef __cplusplus
}
#endif

#endif /* RADSYNTH_H */
