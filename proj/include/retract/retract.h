/* C interface to the retraction-impact toolkit. Every function returns an
 * rtx_status; on failure rtx_last_error() describes the problem for the
 * calling thread. Handles are opaque and owned by the caller. */
#ifndef RETRACT_RETRACT_H
#define RETRACT_RETRACT_H

#include <stddef.h>
#include <stdint.h>

#if defined(RTX_BUILDING_LIBRARY)
#define RTX_API __attribute__((visibility("default")))
#else
#define RTX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rtx_status {
  RTX_OK = 0,
  RTX_E_INVALID_ARGUMENT = 1,
  RTX_E_IO = 2,
  RTX_E_PARSE = 3,
  RTX_E_DATA = 4,
  RTX_E_DEGENERATE = 5,
  RTX_E_INTERNAL = 6
} rtx_status;

/* Message of the last failed call on this thread ("" after success). */
RTX_API const char* rtx_last_error(void);
RTX_API const char* rtx_status_name(rtx_status status);
RTX_API const char* rtx_version(void);

/* ---- options ---------------------------------------------------------- */

typedef struct rtx_options rtx_options;

RTX_API rtx_status rtx_options_new(rtx_options** out);
RTX_API void rtx_options_free(rtx_options* options);
/* Keys use the CLI flag names without dashes prefix: "input", "format",
 * "horizon-year", "yr-in-pre", "lags", "kind", "dictionary", "annotations",
 * "media-list", "seed", "top-topics", "timestamp", "threads". */
RTX_API rtx_status rtx_options_set(rtx_options* options, const char* key, const char* value);

/* ---- results ---------------------------------------------------------- */

typedef struct rtx_result rtx_result;

RTX_API const char* rtx_result_text(const rtx_result* result);
RTX_API const char* rtx_result_json(const rtx_result* result);
RTX_API size_t rtx_result_file_count(const rtx_result* result);
RTX_API const char* rtx_result_file_name(const rtx_result* result, size_t index);
RTX_API const char* rtx_result_file_data(const rtx_result* result, size_t index, size_t* size);
/* Writes every file plus the JSON document (named json_name) into dir. */
RTX_API rtx_status rtx_result_write(const rtx_result* result, const char* dir,
                                    const char* json_name);
RTX_API void rtx_result_free(rtx_result* result);

/* ---- corpus sessions -------------------------------------------------- */

typedef struct rtx_corpus rtx_corpus;

/* Ingests options' "input" and keeps the options for later verbs. */
RTX_API rtx_status rtx_corpus_open(const rtx_options* options, rtx_corpus** out);
RTX_API void rtx_corpus_free(rtx_corpus* corpus);
RTX_API size_t rtx_corpus_paper_count(const rtx_corpus* corpus);
RTX_API size_t rtx_corpus_retracted_count(const rtx_corpus* corpus);

/* verb: ingest, describe, annotate-stats, cohort, compare, segment, topics,
 * granger or report. */
RTX_API rtx_status rtx_corpus_run(rtx_corpus* corpus, const char* verb, rtx_result** out);

typedef struct rtx_topic_sink rtx_topic_sink;
RTX_API void rtx_topic_sink_add(rtx_topic_sink* sink, const char* topic);

/* External topic annotator: called once per title; adds topics to the sink
 * and returns 0, or nonzero to abort the annotation. */
typedef int (*rtx_annotate_fn)(void* user_data, const char* title, rtx_topic_sink* sink);
RTX_API rtx_status rtx_corpus_set_annotator(rtx_corpus* corpus, rtx_annotate_fn fn,
                                            void* user_data);

/* ---- synthetic corpora ------------------------------------------------ */

/* config_json may be NULL (defaults). When has_seed is nonzero, seed
 * overrides the configured one. Writes the corpus to out_path and its
 * sidecar files next to it; the result carries a short summary. */
RTX_API rtx_status rtx_synth(const char* config_json, int has_seed, uint64_t seed,
                             const char* out_path, rtx_result** out);

/* ---- kernels ---------------------------------------------------------- */

typedef enum rtx_alternative {
  RTX_TWO_SIDED = 0,
  RTX_LESS = 1,
  RTX_GREATER = 2
} rtx_alternative;

typedef enum rtx_mw_method {
  RTX_MW_AUTO = 0,
  RTX_MW_EXACT = 1,
  RTX_MW_NORMAL = 2
} rtx_mw_method;

typedef struct rtx_mw_result {
  double u_statistic;
  double p_value;
  double median_a;
  double median_b;
  size_t n_a;
  size_t n_b;
  int exact; /* 1 when the exact null distribution was used */
} rtx_mw_result;

RTX_API rtx_status rtx_mann_whitney(const double* a, size_t n_a, const double* b, size_t n_b,
                                    rtx_alternative alternative, rtx_mw_method method,
                                    rtx_mw_result* out);

/* counts: subjects x categories, row-major. */
RTX_API rtx_status rtx_fleiss_kappa(const int* counts, size_t subjects, size_t categories,
                                    double* out);

typedef struct rtx_granger_result {
  double f_statistic;
  double p_value;
  int df_numerator;
  int df_denominator;
  int degenerate;
} rtx_granger_result;

/* Does x Granger-cause y at the given lag order. */
RTX_API rtx_status rtx_granger(const double* x, const double* y, size_t length, int lags,
                               rtx_granger_result* out);

RTX_API rtx_status rtx_jaccard(const char* const* a, size_t n_a, const char* const* b,
                               size_t n_b, double* out);

/* Copies the normalized name into buffer (NUL terminated, truncated to
 * capacity); *needed receives the full length without the terminator. */
RTX_API rtx_status rtx_normalize_name(const char* raw, char* buffer, size_t capacity,
                                      size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* RETRACT_RETRACT_H */
