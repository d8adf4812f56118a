#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retract/corpus.hpp"
#include "retract/types.hpp"

namespace retract {

struct AnnotationRecord {
  std::string paper_id;
  std::string rater_id;
  ReasonCode reason = ReasonCode::not_found;
  Requester requester = Requester::not_found;
};

enum class CategoryAxis { reason, requester };

/// Reads "paper_id,rater_id,reason,requester" with a header row. Duplicate
/// (paper_id, rater_id) pairs are rejected.
std::vector<AnnotationRecord> parse_annotations_csv(std::string_view text);
std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path);
std::string annotations_to_csv(std::span<const AnnotationRecord> records);

/// Fleiss' kappa from a subject x category count matrix. Every row must sum
/// to the same rater count n >= 2.
double fleiss_kappa(const std::vector<std::vector<int>>& counts);

/// Fleiss' kappa over annotation records along one category axis. Throws a
/// data error naming subjects whose rater count differs from the rest, and a
/// degenerate error when all ratings fall in a single category.
double fleiss_kappa(std::span<const AnnotationRecord> records, CategoryAxis axis);

struct AgreementSummary {
  int raters = 0;                  // constant rater count of the overlap set
  std::size_t subjects_used = 0;
  std::size_t subjects_excluded = 0;  // subjects with any other rater count
  std::optional<double> kappa_reason;
  std::optional<double> kappa_requester;
};

/// Kappa on both axes over the largest-rater-count overlap set. Subjects
/// with fewer raters are excluded and counted; degenerate axes are nullopt.
AgreementSummary agreement_summary(std::span<const AnnotationRecord> records);

enum class Resolution { majority, first_rater };

/// One reason per paper. Majority ties resolve to not_found.
std::map<std::string, ReasonCode> resolve_reasons(std::span<const AnnotationRecord> records,
                                                  Resolution resolution);

struct ReasonShare {
  ReasonCode reason = ReasonCode::not_found;
  std::size_t count = 0;
  double proportion = 0.0;
};

/// Proportion of papers per resolved reason, in ReasonCode order.
std::vector<ReasonShare> reason_distribution(std::span<const AnnotationRecord> records,
                                             Resolution resolution);

struct TrendPoint {
  int year = 0;
  std::int64_t count = 0;      // retracted in `year` with this reason
  std::int64_t published = 0;  // papers published in `year`
  double rate = 0.0;
};

struct ReasonTrendSeries {
  std::optional<ReasonCode> reason;  // nullopt: all resolved reasons
  std::vector<TrendPoint> points;
};

struct ReasonTrend {
  std::vector<ReasonTrendSeries> top;  // top three reasons by frequency
  ReasonTrendSeries all_reasons;
};

/// Yearly count(reason, retraction_year = y) / count(published in y) for the
/// three most frequent resolved reasons, from `from_year` onwards.
ReasonTrend reason_trend(const Corpus& corpus, const std::map<std::string, ReasonCode>& resolved,
                         int from_year = 2000);

}  // namespace retract
