#include "retract/retract.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "retract/annotation.hpp"
#include "retract/cohort.hpp"
#include "retract/pipeline.hpp"
#include "retract/stats.hpp"
#include "retract/synth.hpp"

struct rtx_options {
  retract::PipelineOptions options;
};

struct rtx_result {
  retract::RunResult result;
};

struct rtx_corpus {
  explicit rtx_corpus(retract::Pipeline p) : pipeline(std::move(p)) {}
  retract::Pipeline pipeline;
};

struct rtx_topic_sink {
  retract::TopicSet topics;
};

namespace {

thread_local std::string g_last_error;

rtx_status status_of(retract::ErrorKind kind) {
  switch (kind) {
    case retract::ErrorKind::invalid_argument: return RTX_E_INVALID_ARGUMENT;
    case retract::ErrorKind::io: return RTX_E_IO;
    case retract::ErrorKind::parse: return RTX_E_PARSE;
    case retract::ErrorKind::data: return RTX_E_DATA;
    case retract::ErrorKind::degenerate: return RTX_E_DEGENERATE;
  }
  return RTX_E_INTERNAL;
}

template <class F>
rtx_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return RTX_OK;
  } catch (const retract::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RTX_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RTX_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RTX_E_INTERNAL;
  }
}

rtx_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return RTX_E_INVALID_ARGUMENT;
}

// Thrown from the annotator adapter when the callback asks to stop.
struct CallbackAbort : retract::Error {
  CallbackAbort() : Error(retract::ErrorKind::data, "topics", "annotator callback failed") {}
};

}  // namespace

extern "C" {

const char* rtx_last_error(void) { return g_last_error.c_str(); }

const char* rtx_status_name(rtx_status status) {
  switch (status) {
    case RTX_OK: return "ok";
    case RTX_E_INVALID_ARGUMENT: return "invalid_argument";
    case RTX_E_IO: return "io";
    case RTX_E_PARSE: return "parse";
    case RTX_E_DATA: return "data";
    case RTX_E_DEGENERATE: return "degenerate";
    case RTX_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* rtx_version(void) { return retract::kToolVersion.data(); }

rtx_status rtx_options_new(rtx_options** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new rtx_options(); });
}

void rtx_options_free(rtx_options* options) { delete options; }

rtx_status rtx_options_set(rtx_options* options, const char* key, const char* value) {
  if (!options) return null_argument("options");
  if (!key || !value) return null_argument("key/value");
  return guarded([&] { retract::set_pipeline_option(options->options, key, value); });
}

const char* rtx_result_text(const rtx_result* result) {
  return result ? result->result.text.c_str() : "";
}

const char* rtx_result_json(const rtx_result* result) {
  return result ? result->result.json.c_str() : "";
}

size_t rtx_result_file_count(const rtx_result* result) {
  return result ? result->result.files.size() : 0;
}

const char* rtx_result_file_name(const rtx_result* result, size_t index) {
  if (!result || index >= result->result.files.size()) return nullptr;
  return result->result.files[index].name.c_str();
}

const char* rtx_result_file_data(const rtx_result* result, size_t index, size_t* size) {
  if (!result || index >= result->result.files.size()) return nullptr;
  const auto& f = result->result.files[index];
  if (size) *size = f.content.size();
  return f.content.c_str();
}

rtx_status rtx_result_write(const rtx_result* result, const char* dir, const char* json_name) {
  if (!result) return null_argument("result");
  if (!dir || !json_name) return null_argument("dir/json_name");
  return guarded([&] { retract::write_result(result->result, dir, json_name); });
}

void rtx_result_free(rtx_result* result) { delete result; }

rtx_status rtx_corpus_open(const rtx_options* options, rtx_corpus** out) {
  if (!options) return null_argument("options");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new rtx_corpus(retract::Pipeline::load(options->options)); });
}

void rtx_corpus_free(rtx_corpus* corpus) { delete corpus; }

size_t rtx_corpus_paper_count(const rtx_corpus* corpus) {
  return corpus ? corpus->pipeline.corpus().size() : 0;
}

size_t rtx_corpus_retracted_count(const rtx_corpus* corpus) {
  if (!corpus) return 0;
  const auto& c = corpus->pipeline.corpus();
  size_t n = 0;
  for (retract::Corpus::Index i = 0; i < c.size(); ++i) n += c.is_retracted(i) ? 1 : 0;
  return n;
}

rtx_status rtx_corpus_run(rtx_corpus* corpus, const char* verb, rtx_result** out) {
  if (!corpus) return null_argument("corpus");
  if (!verb) return null_argument("verb");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto r = corpus->pipeline.run(verb);
    *out = new rtx_result{std::move(r)};
  });
}

void rtx_topic_sink_add(rtx_topic_sink* sink, const char* topic) {
  if (sink && topic && *topic) sink->topics.insert(topic);
}

rtx_status rtx_corpus_set_annotator(rtx_corpus* corpus, rtx_annotate_fn fn, void* user_data) {
  if (!corpus) return null_argument("corpus");
  if (!fn) return null_argument("fn");
  return guarded([&] {
    auto adapter = [fn, user_data](std::string_view title) {
      rtx_topic_sink sink;
      std::string t(title);
      if (fn(user_data, t.c_str(), &sink) != 0) throw CallbackAbort();
      return sink.topics;
    };
    corpus->pipeline.set_annotator(std::make_shared<retract::CallbackAnnotator>(adapter));
  });
}

rtx_status rtx_synth(const char* config_json, int has_seed, uint64_t seed, const char* out_path,
                     rtx_result** out) {
  if (!out_path) return null_argument("out_path");
  if (out) *out = nullptr;
  return guarded([&] {
    retract::SynthConfig config = config_json ? retract::parse_synth_config(config_json)
                                              : retract::SynthConfig::defaults();
    if (has_seed) config.seed = seed;
    auto output = retract::generate_corpus(config);
    retract::write_synth_output(output, out_path);
    if (out) {
      retract::RunResult r;
      std::size_t retracted = 0;
      for (const auto& p : output.papers) retracted += p.retraction ? 1 : 0;
      r.text = "papers " + std::to_string(output.papers.size()) + "\nretracted " +
               std::to_string(retracted) + "\ntwins " + std::to_string(output.twins.size()) +
               "\nseed " + std::to_string(config.seed) + "\n";
      r.json = output.ground_truth_json;
      *out = new rtx_result{std::move(r)};
    }
  });
}

rtx_status rtx_mann_whitney(const double* a, size_t n_a, const double* b, size_t n_b,
                            rtx_alternative alternative, rtx_mw_method method,
                            rtx_mw_result* out) {
  if ((!a && n_a) || (!b && n_b)) return null_argument("a/b");
  if (!out) return null_argument("out");
  return guarded([&] {
    using namespace retract::stats;
    Alternative alt = alternative == RTX_LESS      ? Alternative::less
                      : alternative == RTX_GREATER ? Alternative::greater
                                                   : Alternative::two_sided;
    MwMethod m = method == RTX_MW_EXACT    ? MwMethod::exact
                 : method == RTX_MW_NORMAL ? MwMethod::normal
                                           : MwMethod::automatic;
    auto r = mann_whitney_u({a, n_a}, {b, n_b}, alt, m);
    *out = rtx_mw_result{r.u_statistic, r.p_value,   r.median_treatment,
                         r.median_control, r.n_treatment, r.n_control,
                         r.mode == MwMode::exact ? 1 : 0};
  });
}

rtx_status rtx_fleiss_kappa(const int* counts, size_t subjects, size_t categories, double* out) {
  if (!counts && subjects * categories) return null_argument("counts");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::vector<std::vector<int>> m(subjects, std::vector<int>(categories));
    for (size_t i = 0; i < subjects; ++i) {
      for (size_t j = 0; j < categories; ++j) m[i][j] = counts[i * categories + j];
    }
    *out = retract::fleiss_kappa(m);
  });
}

rtx_status rtx_granger(const double* x, const double* y, size_t length, int lags,
                       rtx_granger_result* out) {
  if (!x || !y) return null_argument("x/y");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto r = retract::stats::granger_test({x, length}, {y, length}, lags);
    *out = rtx_granger_result{r.f_statistic, r.p_value, r.df_numerator, r.df_denominator,
                              r.degenerate ? 1 : 0};
  });
}

rtx_status rtx_jaccard(const char* const* a, size_t n_a, const char* const* b, size_t n_b,
                       double* out) {
  if ((!a && n_a) || (!b && n_b)) return null_argument("a/b");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::vector<std::string> va, vb;
    for (size_t i = 0; i < n_a; ++i) {
      if (!a[i]) throw retract::Error(retract::ErrorKind::invalid_argument, "cohort", "null id");
      va.emplace_back(a[i]);
    }
    for (size_t i = 0; i < n_b; ++i) {
      if (!b[i]) throw retract::Error(retract::ErrorKind::invalid_argument, "cohort", "null id");
      vb.emplace_back(b[i]);
    }
    *out = retract::jaccard(va, vb);
  });
}

rtx_status rtx_normalize_name(const char* raw, char* buffer, size_t capacity, size_t* needed) {
  if (!raw) return null_argument("raw");
  return guarded([&] {
    std::string n = retract::normalize_name(raw);
    if (needed) *needed = n.size();
    if (buffer && capacity > 0) {
      size_t k = std::min(capacity - 1, n.size());
      std::memcpy(buffer, n.data(), k);
      buffer[k] = '\0';
    }
  });
}

}  // extern "C"
