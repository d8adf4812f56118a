#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "retract/types.hpp"

namespace retract {

struct RetractionNotice {
  int retraction_year = 0;
  std::optional<ReasonCode> reason;  // nullopt = unknown
  Requester requester = Requester::not_found;
};

struct PaperRecord {
  std::string paper_id;
  std::string title;
  int pub_year = 0;
  std::optional<int> pub_month;
  std::string journal;
  std::string esi_category;
  std::vector<std::string> author_names;
  std::vector<std::string> institution_names;
  std::vector<std::string> references;
  std::optional<RetractionNotice> retraction;
};

struct CorpusOptions {
  int min_year = 1980;
  int max_year = 2014;
};

enum class InputFormat { jsonl, csv };

std::optional<InputFormat> parse_input_format(std::string_view s);

/// Lowercases, trims, collapses internal whitespace and removes punctuation
/// other than hyphens. Idempotent.
std::string normalize_name(std::string_view raw);

/// True when the title carries the "retracted article" marker (any case).
bool has_retraction_marker(std::string_view title);

/// Year printed at the end of a "(Retracted Article. See ..., 2007)" marker.
std::optional<int> marker_retraction_year(std::string_view title);

/// Immutable, fully indexed citation corpus. Papers are stored in paper_id
/// order so every index-based iteration is independent of input order.
class Corpus {
 public:
  using Index = std::uint32_t;

  static Corpus build(std::vector<PaperRecord> records, const CorpusOptions& options = {});

  std::size_t size() const noexcept { return papers_.size(); }
  const PaperRecord& paper(Index i) const { return papers_[i]; }
  std::span<const PaperRecord> papers() const noexcept { return papers_; }
  std::optional<Index> find(std::string_view paper_id) const;
  Index at(std::string_view paper_id) const;

  /// In-corpus citers of paper i, ascending index.
  std::span<const Index> cited_by(Index i) const { return cited_by_[i]; }
  /// Reference targets of paper i that resolve inside the corpus.
  std::span<const Index> resolved_references(Index i) const { return resolved_refs_[i]; }
  std::size_t dangling_reference_count() const noexcept { return dangling_refs_; }

  bool is_retracted(Index i) const { return retracted_[i]; }
  std::optional<int> retraction_year(Index i) const { return retraction_year_[i]; }
  std::optional<ReasonCode> notice_reason(Index i) const;

  /// Normalized author / institution names of paper i, in listed order.
  const std::vector<std::string>& authors(Index i) const { return authors_[i]; }
  const std::vector<std::string>& institutions(Index i) const { return institutions_[i]; }

  const std::map<std::string, std::vector<Index>>& by_author() const { return by_author_; }
  const std::map<std::string, std::vector<Index>>& by_institution() const {
    return by_institution_;
  }
  const std::map<int, std::vector<Index>>& by_year() const { return by_year_; }
  const std::map<std::string, std::vector<Index>>& by_journal() const { return by_journal_; }

  std::span<const Index> papers_of_author(std::string_view name) const;
  std::span<const Index> papers_of_institution(std::string_view name) const;

  int first_year() const;
  int last_year() const;
  const CorpusOptions& options() const noexcept { return options_; }

 private:
  CorpusOptions options_;
  std::vector<PaperRecord> papers_;
  std::unordered_map<std::string, Index> id_index_;
  std::vector<std::vector<Index>> cited_by_;
  std::vector<std::vector<Index>> resolved_refs_;
  std::size_t dangling_refs_ = 0;
  std::vector<bool> retracted_;
  std::vector<std::optional<int>> retraction_year_;
  std::vector<std::vector<std::string>> authors_;
  std::vector<std::vector<std::string>> institutions_;
  std::map<std::string, std::vector<Index>> by_author_;
  std::map<std::string, std::vector<Index>> by_institution_;
  std::map<int, std::vector<Index>> by_year_;
  std::map<std::string, std::vector<Index>> by_journal_;
};

std::vector<PaperRecord> read_records(const std::filesystem::path& path, InputFormat format);
std::vector<PaperRecord> parse_jsonl(std::string_view text);
std::vector<PaperRecord> parse_csv_records(std::string_view text);
std::string to_jsonl_line(const PaperRecord& record);

Corpus ingest_corpus(const std::filesystem::path& path, InputFormat format,
                     const CorpusOptions& options = {});

// ---------------------------------------------------------------------------
// Descriptive statistics

/// paper_ids of retracted papers (title marker or explicit notice), sorted.
std::vector<std::string> detect_retractions(const Corpus& corpus);

struct YearRate {
  int year = 0;
  std::int64_t retracted = 0;
  std::int64_t total = 0;
  double rate = 0.0;
};

/// Retracted / published per publication year; years with no papers omitted.
std::vector<YearRate> annual_retraction_rate(const Corpus& corpus);

struct PaperDelay {
  std::string paper_id;
  int delay = 0;
};

struct DelayByYear {
  int retraction_year = 0;
  std::size_t count = 0;
  double median = 0.0;
};

struct DelayReport {
  std::vector<PaperDelay> per_paper;
  std::vector<DelayByYear> by_retraction_year;
  std::optional<double> overall_median;
};

DelayReport retraction_delay(const Corpus& corpus);

struct CategoryRate {
  std::string category;
  std::int64_t retracted = 0;
  std::int64_t total = 0;
  double rate = 0.0;
};

/// Sorted by rate descending, ties by category name.
std::vector<CategoryRate> esi_retraction_rates(const Corpus& corpus);

enum class PaperSubset { retracted, all };

struct HistogramBin {
  std::int64_t lo = 0;  // inclusive
  std::int64_t hi = 0;  // inclusive
  std::int64_t count = 0;
};

struct CitationDistribution {
  std::vector<std::int64_t> counts;   // per paper, subset order
  std::vector<HistogramBin> histogram; // [0,0], [1,1], [2,3], [4,7], ...
  std::optional<double> median;       // nullopt for an empty subset
};

CitationDistribution citation_distribution(const Corpus& corpus, PaperSubset subset);

/// Median of a sample; nullopt when empty.
std::optional<double> median_of(std::vector<double> values);

}  // namespace retract
