#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "retract/cohort.hpp"
#include "retract/comparison.hpp"
#include "retract/corpus.hpp"
#include "retract/topics.hpp"

namespace retract {

struct PipelineOptions {
  std::filesystem::path input;
  InputFormat format = InputFormat::jsonl;
  int horizon_year = 2014;
  bool yr_in_pre = true;
  std::vector<int> lags{1, 2, 3};
  std::optional<TreatmentKind> kind;  // nullopt: every kind
  std::optional<std::filesystem::path> dictionary;
  std::optional<std::filesystem::path> annotations;
  std::optional<std::filesystem::path> media_list;
  std::vector<std::uint64_t> seeds;  // recorded in the manifest only
  std::size_t top_topics = 10;
  bool timestamp = true;
  unsigned threads = 0;
};

/// Applies one "key=value" style option by its flag name (e.g. "horizon-year").
void set_pipeline_option(PipelineOptions& options, std::string_view key, std::string_view value);

struct Artifact {
  std::string name;     // file name inside the output directory
  std::string content;
};

struct RunResult {
  std::string text;   // human-readable tables
  std::string json;   // machine-readable result, manifest embedded
  std::vector<Artifact> files;
};

/// Writes every artifact plus `<verb>.json` into `dir`.
void write_result(const RunResult& result, const std::filesystem::path& dir,
                  std::string_view json_name);

/// Verbs over one ingested corpus. Cohorts are computed once per kind and
/// reused across verbs.
class Pipeline {
 public:
  Pipeline(Corpus corpus, PipelineOptions options);
  static Pipeline load(const PipelineOptions& options);

  const Corpus& corpus() const noexcept { return *corpus_; }
  const PipelineOptions& options() const noexcept { return options_; }

  /// Replaces the dictionary annotator (e.g. with an external service).
  void set_annotator(std::shared_ptr<const Annotator> annotator);

  RunResult ingest();
  RunResult describe();
  RunResult annotate_stats();
  RunResult cohort();
  RunResult compare();
  RunResult segment();
  RunResult topics();
  RunResult granger();
  RunResult report();

  RunResult run(std::string_view verb);

  const Cohort& cohort_for(TreatmentKind kind);

 private:
  std::vector<TreatmentKind> kinds() const;
  const TopicAssignments& assignments();
  std::map<std::string, ReasonCode> resolved_reasons();
  std::string manifest_json() const;

  std::unique_ptr<Corpus> corpus_;  // stable address for the matcher
  PipelineOptions options_;
  std::unique_ptr<CohortMatcher> matcher_;
  std::map<TreatmentKind, Cohort> cohorts_;
  std::shared_ptr<const Annotator> annotator_;
  std::optional<TopicAssignments> assignments_;
};

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view data);

inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace retract
