#include "retract/annotation.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "retract/csv.hpp"

namespace retract {

namespace {

constexpr std::string_view kModule = "annotation";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, kModule, msg);
}

std::size_t category_index(const AnnotationRecord& r, CategoryAxis axis) {
  return axis == CategoryAxis::reason ? static_cast<std::size_t>(r.reason)
                                      : static_cast<std::size_t>(r.requester);
}

std::size_t category_count(CategoryAxis axis) {
  return axis == CategoryAxis::reason ? std::size(kAllReasons) : std::size(kAllRequesters);
}

// paper_id -> indices into records, in first-appearance order of the papers.
std::vector<std::pair<std::string, std::vector<std::size_t>>> group_by_paper(
    std::span<const AnnotationRecord> records) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = slot.emplace(records[i].paper_id, groups.size());
    if (inserted) groups.push_back({records[i].paper_id, {}});
    groups[it->second].second.push_back(i);
  }
  return groups;
}

void check_unique_raters(std::span<const AnnotationRecord> records) {
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (const auto& r : records) {
    if (!seen.emplace(r.paper_id, r.rater_id).second) {
      fail(ErrorKind::data,
           "duplicate annotation for paper " + r.paper_id + " by rater " + r.rater_id);
    }
  }
}

}  // namespace

std::vector<AnnotationRecord> parse_annotations_csv(std::string_view text) {
  auto rows = csv::parse(text);
  std::vector<AnnotationRecord> out;
  if (rows.empty()) return out;
  const auto& header = rows.front().fields;
  const char* const columns[] = {"paper_id", "rater_id", "reason", "requester"};
  int col[4] = {-1, -1, -1, -1};
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == columns[k]) col[k] = static_cast<int>(h);
    }
    if (col[k] < 0) fail(ErrorKind::parse, std::string("header lacks column ") + columns[k]);
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    auto where = "line " + std::to_string(rows[i].line) + ": ";
    if (f.size() != header.size()) fail(ErrorKind::parse, where + "wrong field count");
    AnnotationRecord r;
    r.paper_id = f[static_cast<std::size_t>(col[0])];
    r.rater_id = f[static_cast<std::size_t>(col[1])];
    auto reason = parse_reason(f[static_cast<std::size_t>(col[2])]);
    auto requester = parse_requester(f[static_cast<std::size_t>(col[3])]);
    if (r.paper_id.empty() || r.rater_id.empty()) {
      fail(ErrorKind::parse, where + "empty paper_id or rater_id");
    }
    if (!reason) fail(ErrorKind::parse, where + "unknown reason \"" + f[col[2]] + "\"");
    if (!requester) fail(ErrorKind::parse, where + "unknown requester \"" + f[col[3]] + "\"");
    r.reason = *reason;
    r.requester = *requester;
    out.push_back(std::move(r));
  }
  check_unique_raters(out);
  return out;
}

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_annotations_csv(ss.str());
}

std::string annotations_to_csv(std::span<const AnnotationRecord> records) {
  std::string out = "paper_id,rater_id,reason,requester\n";
  for (const auto& r : records) {
    out += csv::join({r.paper_id, r.rater_id, std::string(to_string(r.reason)),
                      std::string(to_string(r.requester))});
    out.push_back('\n');
  }
  return out;
}

double fleiss_kappa(const std::vector<std::vector<int>>& counts) {
  if (counts.empty()) fail(ErrorKind::invalid_argument, "kappa needs at least one subject");
  const std::size_t k = counts.front().size();
  long n = 0;
  for (int c : counts.front()) n += c;
  if (n < 2) fail(ErrorKind::invalid_argument, "kappa needs at least two raters per subject");

  std::vector<double> column(k, 0.0);
  double sum_agreement = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != k) fail(ErrorKind::invalid_argument, "ragged count matrix");
    long row_total = 0, sq = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[i][j] < 0) fail(ErrorKind::invalid_argument, "negative count");
      row_total += counts[i][j];
      sq += static_cast<long>(counts[i][j]) * counts[i][j];
      column[j] += counts[i][j];
    }
    if (row_total != n) {
      fail(ErrorKind::data, "subject " + std::to_string(i) + " has " +
                                std::to_string(row_total) + " ratings, expected " +
                                std::to_string(n));
    }
    sum_agreement += static_cast<double>(sq - n) / static_cast<double>(n * (n - 1));
  }
  const double total = static_cast<double>(counts.size()) * static_cast<double>(n);
  double expected = 0.0;
  for (double c : column) expected += (c / total) * (c / total);
  double observed = sum_agreement / static_cast<double>(counts.size());
  if (expected >= 1.0) {
    fail(ErrorKind::degenerate, "all ratings fall in one category; kappa undefined");
  }
  return (observed - expected) / (1.0 - expected);
}

double fleiss_kappa(std::span<const AnnotationRecord> records, CategoryAxis axis) {
  check_unique_raters(records);
  auto groups = group_by_paper(records);
  if (groups.empty()) fail(ErrorKind::invalid_argument, "no annotation records");

  std::map<std::size_t, std::size_t> size_freq;
  for (const auto& g : groups) ++size_freq[g.second.size()];
  if (size_freq.size() > 1) {
    std::size_t modal = std::max_element(size_freq.begin(), size_freq.end(),
                                         [](const auto& a, const auto& b) {
                                           return a.second < b.second;
                                         })->first;
    std::string offenders;
    for (const auto& g : groups) {
      if (g.second.size() == modal) continue;
      if (!offenders.empty()) offenders += ", ";
      offenders += g.first + " (" + std::to_string(g.second.size()) + ")";
    }
    fail(ErrorKind::data, "unequal rater counts; expected " + std::to_string(modal) +
                              " per subject, offending subjects: " + offenders);
  }

  std::vector<std::vector<int>> counts;
  counts.reserve(groups.size());
  for (const auto& g : groups) {
    std::vector<int> row(category_count(axis), 0);
    for (auto idx : g.second) ++row[category_index(records[idx], axis)];
    counts.push_back(std::move(row));
  }
  return fleiss_kappa(counts);
}

AgreementSummary agreement_summary(std::span<const AnnotationRecord> records) {
  AgreementSummary s;
  auto groups = group_by_paper(records);
  std::size_t raters = 0;
  for (const auto& g : groups) raters = std::max(raters, g.second.size());
  s.raters = static_cast<int>(raters);
  if (raters < 2) {
    s.subjects_excluded = groups.size();
    return s;
  }
  std::vector<AnnotationRecord> overlap;
  for (const auto& g : groups) {
    if (g.second.size() != raters) {
      ++s.subjects_excluded;
      continue;
    }
    ++s.subjects_used;
    for (auto idx : g.second) overlap.push_back(records[idx]);
  }
  for (CategoryAxis axis : {CategoryAxis::reason, CategoryAxis::requester}) {
    std::optional<double> k;
    try {
      k = fleiss_kappa(overlap, axis);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate) throw;
    }
    (axis == CategoryAxis::reason ? s.kappa_reason : s.kappa_requester) = k;
  }
  return s;
}

std::map<std::string, ReasonCode> resolve_reasons(std::span<const AnnotationRecord> records,
                                                  Resolution resolution) {
  std::map<std::string, ReasonCode> out;
  for (const auto& [paper, idxs] : group_by_paper(records)) {
    if (resolution == Resolution::first_rater) {
      out[paper] = records[idxs.front()].reason;
      continue;
    }
    std::size_t votes[std::size(kAllReasons)] = {};
    for (auto i : idxs) ++votes[static_cast<std::size_t>(records[i].reason)];
    std::size_t best = 0, best_votes = 0, holders = 0;
    for (std::size_t r = 0; r < std::size(kAllReasons); ++r) {
      if (votes[r] > best_votes) {
        best = r;
        best_votes = votes[r];
        holders = 1;
      } else if (votes[r] == best_votes && best_votes > 0) {
        ++holders;
      }
    }
    out[paper] = holders == 1 ? kAllReasons[best] : ReasonCode::not_found;
  }
  return out;
}

std::vector<ReasonShare> reason_distribution(std::span<const AnnotationRecord> records,
                                             Resolution resolution) {
  auto resolved = resolve_reasons(records, resolution);
  std::vector<ReasonShare> out;
  for (ReasonCode r : kAllReasons) out.push_back({r, 0, 0.0});
  for (const auto& [paper, reason] : resolved) ++out[static_cast<std::size_t>(reason)].count;
  const double n = static_cast<double>(resolved.size());
  if (n > 0) {
    for (auto& s : out) s.proportion = static_cast<double>(s.count) / n;
  }
  return out;
}

ReasonTrend reason_trend(const Corpus& corpus, const std::map<std::string, ReasonCode>& resolved,
                         int from_year) {
  // count[reason][retraction_year]
  std::map<ReasonCode, std::map<int, std::int64_t>> counts;
  std::map<int, std::int64_t> all;
  std::map<ReasonCode, std::size_t> freq;
  for (const auto& [paper_id, reason] : resolved) {
    auto idx = corpus.find(paper_id);
    if (!idx || !corpus.is_retracted(*idx)) continue;
    ++freq[reason];
    auto yr = corpus.retraction_year(*idx);
    if (!yr) continue;
    ++counts[reason][*yr];
    ++all[*yr];
  }

  std::vector<std::pair<ReasonCode, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > 3) ranked.resize(3);

  auto build = [&](std::optional<ReasonCode> reason, const std::map<int, std::int64_t>& c) {
    ReasonTrendSeries s;
    s.reason = reason;
    for (const auto& [year, members] : corpus.by_year()) {
      if (year < from_year) continue;
      TrendPoint p;
      p.year = year;
      p.published = static_cast<std::int64_t>(members.size());
      if (auto it = c.find(year); it != c.end()) p.count = it->second;
      p.rate = static_cast<double>(p.count) / static_cast<double>(p.published);
      s.points.push_back(p);
    }
    return s;
  };

  ReasonTrend trend;
  static const std::map<int, std::int64_t> kEmpty;
  for (const auto& [reason, n] : ranked) {
    auto it = counts.find(reason);
    trend.top.push_back(build(reason, it == counts.end() ? kEmpty : it->second));
  }
  trend.all_reasons = build(std::nullopt, all);
  return trend;
}

}  // namespace retract
