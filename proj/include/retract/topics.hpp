#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "retract/corpus.hpp"
#include "retract/stats.hpp"

namespace retract {

using TopicSet = std::set<std::string>;
using TopicAssignments = std::map<std::string, TopicSet>;  // paper_id -> topics

class Annotator {
 public:
  virtual ~Annotator() = default;
  virtual TopicSet annotate(std::string_view title) const = 0;
};

/// Offline annotator: case-insensitive, longest-match phrase lookup over the
/// title's word sequence. A matched phrase consumes its words.
class DictionaryAnnotator : public Annotator {
 public:
  explicit DictionaryAnnotator(const std::vector<std::pair<std::string, std::string>>& entries);

  /// Reads "phrase<TAB>topic_key" lines. '#' lines and blank lines are skipped.
  static DictionaryAnnotator from_file(const std::filesystem::path& path);
  static DictionaryAnnotator parse(std::string_view text);

  TopicSet annotate(std::string_view title) const override;
  std::size_t size() const noexcept { return phrases_.size(); }

 private:
  std::map<std::vector<std::string>, std::string> phrases_;
  std::size_t longest_ = 0;
};

/// Adapter for an external annotation service supplied as a callable.
class CallbackAnnotator : public Annotator {
 public:
  using Fn = std::function<TopicSet(std::string_view)>;
  explicit CallbackAnnotator(Fn fn) : fn_(std::move(fn)) {}
  TopicSet annotate(std::string_view title) const override { return fn_(title); }

 private:
  Fn fn_;
};

/// Lowercased word tokens used for phrase matching.
std::vector<std::string> title_tokens(std::string_view text);

TopicAssignments annotate_titles(const Corpus& corpus, const Annotator& annotator);

/// Topic set K: every topic assigned to at least one paper.
TopicSet topic_universe(const TopicAssignments& assignments);

struct TopicPoint {
  int year = 0;
  std::int64_t published = 0;   // Pub(y)
  std::int64_t members = 0;     // Pub^k(y)
  std::int64_t retracted = 0;   // Pub^rk(y)
  double pop = 0.0;
  double ret = 0.0;
};

struct TopicSeries {
  std::string topic;
  std::string esi_category;  // mode over member papers, ties by name
  std::vector<TopicPoint> points;  // every year of the corpus range
};

TopicSeries topic_series(const Corpus& corpus, const TopicAssignments& assignments,
                         const std::string& topic);

struct TopicRank {
  std::string topic;
  std::size_t frequency = 0;  // among retracted papers
  std::string esi_category;
};

/// Topics ranked by frequency among retracted papers, ties by name.
std::vector<TopicRank> top_topics(const Corpus& corpus, const TopicAssignments& assignments,
                                  std::size_t limit);

struct GrangerCell {
  std::string topic;
  int lags = 1;
  bool computable = false;
  std::string note;
  stats::GrangerResult result;
  bool significant = false;      // p < 0.05
  bool b_smaller_than_a = false; // max |B_j| < max |A_i|
};

/// Granger test of Ret^k (X) against Pop^k (Y) for each topic and lag.
std::vector<GrangerCell> topic_granger_screen(const Corpus& corpus,
                                              const TopicAssignments& assignments,
                                              const std::vector<std::string>& topics,
                                              const std::vector<int>& lags);

/// Series export: topic,year,pop,ret (header included).
std::string topic_series_csv(const std::vector<TopicSeries>& series);

}  // namespace retract
