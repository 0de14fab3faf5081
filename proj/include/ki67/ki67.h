/*
 * C interface to the Ki-67 proliferation index toolkit.
 *
 * Objects are opaque handles created by ki67_*_create/load functions and
 * released with the matching *_free. Every fallible call returns a
 * ki67_status; on failure ki67_last_error() describes the problem (the
 * message is thread-local and valid until the next failing call on that
 * thread). Strings returned through `char**` out-parameters are owned by the
 * caller and must be released with ki67_string_free.
 */
#ifndef KI67_KI67_H
#define KI67_KI67_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(KI67_BUILDING_LIBRARY)
#    define KI67_API __declspec(dllexport)
#  else
#    define KI67_API __declspec(dllimport)
#  endif
#else
#  define KI67_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ki67_status {
    KI67_OK = 0,
    KI67_ERR_INVALID_ARGUMENT = 1,
    KI67_ERR_IO = 2,
    KI67_ERR_FORMAT = 3,
    KI67_ERR_CONFIG = 4,
    KI67_ERR_PLACEMENT = 5,
    KI67_ERR_INTERNAL = 6
} ki67_status;

typedef struct ki67_image ki67_image;
typedef struct ki67_config ki67_config;
typedef struct ki67_batch ki67_batch;

/* Plain-data view of one analysis report. Pointers stay valid while the
 * owning batch lives. */
typedef struct ki67_report {
    const char* image_id;
    uint64_t stained_count;
    uint64_t unstained_count;
    uint64_t stained_area;
    uint64_t unstained_area;
    double index_by_count;
    double index_by_area;
    const char* formatted_percent;
    int no_cells_detected;
    const char* error; /* NULL on success */
} ki67_report;

KI67_API const char* ki67_version(void);
KI67_API const char* ki67_last_error(void);
KI67_API const char* ki67_status_name(ki67_status status);
KI67_API void ki67_string_free(char* s);

/* Images */
KI67_API ki67_status ki67_image_load(const char* path, ki67_image** out);
KI67_API ki67_status ki67_image_save(const ki67_image* image, const char* path);
KI67_API int ki67_image_width(const ki67_image* image);
KI67_API int ki67_image_height(const ki67_image* image);
KI67_API void ki67_image_free(ki67_image* image);

/* Configuration */
KI67_API ki67_status ki67_config_create_default(ki67_config** out);
KI67_API ki67_status ki67_config_parse(const char* json_text, ki67_config** out);
KI67_API ki67_status ki67_config_load(const char* path, ki67_config** out);
KI67_API ki67_status ki67_config_set_output_dir(ki67_config* config, const char* dir);
KI67_API ki67_status ki67_config_set_emit_overlays(ki67_config* config, int enabled);
KI67_API ki67_status ki67_config_set_connectivity(ki67_config* config, int connectivity);
KI67_API ki67_status ki67_config_set_min_area(ki67_config* config, uint64_t min_area);
/* Negative max_area means unbounded. */
KI67_API ki67_status ki67_config_set_max_area(ki67_config* config, int64_t max_area);
KI67_API ki67_status ki67_config_set_morphology_passes(ki67_config* config, int passes);
KI67_API ki67_status ki67_config_output_dir(const ki67_config* config, char** out);
KI67_API void ki67_config_free(ki67_config* config);

/* Single-image analysis without touching the filesystem. */
KI67_API ki67_status ki67_analyze_image(const ki67_image* image, const ki67_config* config,
                                        const char* image_id, ki67_batch** out);

/* Batch analysis. Per-image failures are recorded in the batch, not returned. */
KI67_API ki67_status ki67_analyze(const ki67_config* config, const char* const* paths, size_t count,
                                  ki67_batch** out);
KI67_API size_t ki67_batch_size(const ki67_batch* batch);
KI67_API size_t ki67_batch_failures(const ki67_batch* batch);
KI67_API ki67_status ki67_batch_get(const ki67_batch* batch, size_t index, ki67_report* out);
KI67_API ki67_status ki67_batch_csv(const ki67_batch* batch, char** out);
KI67_API ki67_status ki67_batch_json(const ki67_batch* batch, char** out);
/* Writes report.csv and report.json into `dir` (created if missing). */
KI67_API ki67_status ki67_batch_write(const ki67_batch* batch, const char* dir);
KI67_API void ki67_batch_free(ki67_batch* batch);

/* Index arithmetic */
KI67_API double ki67_compute_index(uint64_t stained, uint64_t unstained);
/* Writes e.g. "3.9%" into buf (NUL-terminated). */
KI67_API ki67_status ki67_format_percent(double fraction, char* buf, size_t buf_size);
KI67_API ki67_status ki67_pearson_r(const double* xs, const double* ys, size_t count, double* out);

/* Checks the embedded ten-case validation cohort. `passed` is 1 when every
 * index and cohort statistic matches. text/csv may be NULL. */
KI67_API ki67_status ki67_validate(int* passed, double* pearson_r, char** text, char** csv);

/* Generates a synthetic scene from a JSON spec file, writing
 * <out_dir>/<stem>.png and <out_dir>/<stem>.truth.json. The written paths are
 * returned when image_path / truth_path are non-NULL. */
KI67_API ki67_status ki67_synth_file(const char* spec_path, const char* out_dir, char** image_path,
                                     char** truth_path);

#ifdef __cplusplus
}
#endif

#endif /* KI67_KI67_H */
