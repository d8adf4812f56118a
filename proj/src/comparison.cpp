#include "retract/comparison.hpp"

#include <cmath>
#include <cstdio>

namespace retract {

std::string_view to_string(Metric m) {
  return m == Metric::post_impact ? "post_impact" : "change_ratio";
}

Comparison compare_cohorts(std::span<const CohortPair> pairs, Metric metric,
                           stats::Alternative alternative) {
  Comparison c;
  c.metric = metric;
  std::vector<double> treated, control;
  for (const auto& p : pairs) {
    if (metric == Metric::post_impact) {
      treated.push_back(static_cast<double>(p.treatment_split.post_impact));
      control.push_back(0.5 * static_cast<double>(p.controls[0].split.post_impact +
                                                  p.controls[1].split.post_impact));
      continue;
    }
    const auto& t = p.treatment_split.change_ratio;
    const auto& c0 = p.controls[0].split.change_ratio;
    const auto& c1 = p.controls[1].split.change_ratio;
    if (!t || !c0 || !c1) {
      ++c.pairs_excluded;
      continue;
    }
    treated.push_back(*t);
    control.push_back(0.5 * (*c0 + *c1));
  }
  c.pairs_used = treated.size();
  if (c.pairs_used < 2) {
    throw Error(ErrorKind::data, "stats",
                "comparison needs at least 2 usable pairs, found " + std::to_string(c.pairs_used));
  }
  c.test = stats::mann_whitney_u(treated, control, alternative);
  return c;
}

std::string significance_stars(double p) {
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::string format_comparison(double median_treatment, double median_control, double p) {
  char a[32], b[32];
  std::snprintf(a, sizeof a, "%.2f", median_treatment);
  std::snprintf(b, sizeof b, "%.2f", median_control);
  const double ra = std::round(median_treatment * 100.0);
  const double rb = std::round(median_control * 100.0);
  const char* rel = ra < rb ? "<" : (ra > rb ? ">" : "=");
  return std::string(a) + " " + rel + " " + b + significance_stars(p);
}

std::vector<SegmentRow> segment_change_ratio(std::span<const SegmentInput> inputs) {
  std::vector<std::vector<double>> buckets(std::size(kSegmentNames));
  for (const auto& in : inputs) {
    const auto& ratio = in.pair->treatment_split.change_ratio;
    if (!ratio) continue;
    buckets[0].push_back(*ratio);
    if (!in.reason) continue;
    if (in.media_covered && is_misconduct(*in.reason)) buckets[1].push_back(*ratio);
    switch (*in.reason) {
      case ReasonCode::falsification_fabrication: buckets[2].push_back(*ratio); break;
      case ReasonCode::plagiarism: buckets[3].push_back(*ratio); break;
      case ReasonCode::violation_of_rules: buckets[4].push_back(*ratio); break;
      case ReasonCode::error: buckets[5].push_back(*ratio); break;
      default: break;
    }
  }
  std::vector<SegmentRow> rows;
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    SegmentRow row{kSegmentNames[i], buckets[i].size(), std::nullopt};
    if (!buckets[i].empty()) row.median = stats::median(buckets[i]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SegmentInput> segment_inputs(const Corpus& corpus, std::span<const CohortPair> pairs,
                                         const std::map<std::string, ReasonCode>& resolved,
                                         const std::set<std::string>& media_authors) {
  std::vector<SegmentInput> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    SegmentInput in;
    in.pair = &p;
    if (auto it = resolved.find(p.source_paper); it != resolved.end()) {
      in.reason = it->second;
    } else if (auto idx = corpus.find(p.source_paper)) {
      in.reason = corpus.notice_reason(*idx);
    }
    if (auto idx = corpus.find(p.source_paper); idx && !corpus.authors(*idx).empty()) {
      in.media_covered = in.reason && is_misconduct(*in.reason) &&
                         media_authors.contains(corpus.authors(*idx).front());
    }
    out.push_back(in);
  }
  return out;
}

}  // namespace retract
