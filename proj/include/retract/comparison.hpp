#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "retract/cohort.hpp"
#include "retract/stats.hpp"

namespace retract {

enum class Metric { post_impact, change_ratio };

std::string_view to_string(Metric m);

struct Comparison {
  Metric metric = Metric::post_impact;
  std::size_t pairs_used = 0;
  std::size_t pairs_excluded = 0;  // undefined ratio for treatment or a control
  stats::MWResult test;
};

/// Treatment metric against the per-pair mean of its two controls.
/// Throws when fewer than two pairs are usable.
Comparison compare_cohorts(std::span<const CohortPair> pairs, Metric metric,
                           stats::Alternative alternative = stats::Alternative::two_sided);

/// "" / "*" (p < 0.05) / "**" (p < 0.01).
std::string significance_stars(double p);

/// "0.50 < 1.12**": medians at two decimals, relation of the printed
/// values, stars from the p-value.
std::string format_comparison(double median_treatment, double median_control, double p);

struct SegmentInput {
  const CohortPair* pair = nullptr;
  std::optional<ReasonCode> reason;
  bool media_covered = false;
};

struct SegmentRow {
  std::string segment;
  std::size_t n = 0;
  std::optional<double> median;  // nullopt: empty segment
};

inline constexpr const char* kSegmentNames[] = {
    "overall", "media_misconduct", "falsification", "plagiarism", "violation", "error",
};

/// Median treatment change ratio per segment, in kSegmentNames order. Pairs
/// with an undefined treatment ratio are skipped.
std::vector<SegmentRow> segment_change_ratio(std::span<const SegmentInput> inputs);

/// Attaches reasons and media flags to pairs. The reason is that of the
/// pair's source paper (resolved annotation when present, else the notice);
/// media coverage means the source paper's first author is listed and the
/// reason is misconduct.
std::vector<SegmentInput> segment_inputs(const Corpus& corpus, std::span<const CohortPair> pairs,
                                         const std::map<std::string, ReasonCode>& resolved,
                                         const std::set<std::string>& media_authors);

}  // namespace retract
