#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "retract/annotation.hpp"
#include "retract/corpus.hpp"

namespace retract {

struct SynthJournal {
  std::string name;
  std::string esi_category;
};

struct SynthTopic {
  std::string phrase;
  std::string topic;
  double base_rate = 0.0;  // probability a paper carries the topic
};

/// Planted Granger effect: the topic's inclusion probability in year y is
/// base_rate + strength * Ret^k(y - lag).
struct SynthCoupling {
  std::string topic;
  int lag = 1;
  double strength = 0.0;
};

struct SynthConfig {
  std::uint64_t seed = 42;
  int first_year = 1990;
  int last_year = 2014;
  int papers_per_year = 800;
  std::vector<SynthJournal> journals;
  int authors = 4000;
  int team_size = 5;
  int institutions = 2000;
  double refs_per_paper = 25.0;
  double attachment_exponent = 1.0;
  double age_decay_years = 6.0;
  double default_retraction_rate = 0.025;
  std::map<int, double> retraction_schedule;  // year -> injection rate
  std::vector<double> delay_weights;          // P(delay = 0, 1, 2, ...)
  std::map<ReasonCode, double> reason_mix;
  std::map<ReasonCode, double> penalty;       // missing reasons: 1.0
  std::vector<SynthTopic> topics;
  std::optional<SynthCoupling> coupling;
  double twin_fraction = 0.0;          // retracted papers given a planted twin
  double title_marker_fraction = 0.5;  // retracted titles carrying the marker
  int raters = 4;
  int overlap_subjects = 100;
  double rater_noise = 0.1;
  double media_fraction = 0.0;  // misconduct retractions with media coverage
  double media_penalty = 1.0;   // extra factor for media-covered retractions

  /// Defaults for every unset collection (journals, delays, reasons, topics).
  static SynthConfig defaults();
  double retraction_rate(int year) const;
};

SynthConfig parse_synth_config(std::string_view json_text);
std::string synth_config_to_json(const SynthConfig& config);

struct SynthTwin {
  std::string treatment;
  std::string twin;
};

struct SynthOutput {
  std::vector<PaperRecord> papers;          // generation order
  std::vector<AnnotationRecord> annotations;
  std::vector<SynthTwin> twins;
  std::vector<std::string> media_authors;   // normalized names
  std::map<int, std::int64_t> injected_per_year;
  std::string dictionary_tsv;
  std::string ground_truth_json;

  std::string corpus_jsonl() const;
};

/// Deterministic in `config.seed`. Throws on an infeasible configuration.
SynthOutput generate_corpus(const SynthConfig& config);

/// Writes the corpus to `corpus_path` and ground_truth.json, annotations.csv,
/// dictionary.tsv and media_list.txt beside it.
void write_synth_output(const SynthOutput& output, const std::filesystem::path& corpus_path);

}  // namespace retract
