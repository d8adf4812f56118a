#include "retract/impact.hpp"

#include <algorithm>
#include <numeric>

#include "retract/csv.hpp"

namespace retract {

namespace {

constexpr std::string_view kModule = "impact";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, kModule, msg);
}

std::string describe(const EntityKey& e) {
  return std::string(to_string(e.kind)) + " \"" + e.key + "\"";
}

}  // namespace

std::int64_t ImpactCurve::total() const {
  return std::accumulate(values.begin(), values.end(), std::int64_t{0});
}

std::vector<Corpus::Index> entity_papers(const Corpus& corpus, const EntityKey& entity) {
  switch (entity.kind) {
    case EntityKind::paper:
      if (auto i = corpus.find(entity.key)) return {*i};
      return {};
    case EntityKind::author: {
      auto s = corpus.papers_of_author(entity.key);
      return {s.begin(), s.end()};
    }
    case EntityKind::institution: {
      auto s = corpus.papers_of_institution(entity.key);
      return {s.begin(), s.end()};
    }
  }
  return {};
}

bool entity_is_retracted(const Corpus& corpus, const EntityKey& entity) {
  for (auto i : entity_papers(corpus, entity)) {
    if (corpus.is_retracted(i)) return true;
  }
  return false;
}

ImpactCurve impact_curve(const Corpus& corpus, const EntityKey& entity,
                         const ImpactOptions& options) {
  auto papers = entity_papers(corpus, entity);
  if (papers.empty()) fail(ErrorKind::data, "unknown entity " + describe(entity));

  ImpactCurve curve;
  curve.entity = entity;
  curve.yn = options.horizon_year;

  if (entity.kind == EntityKind::paper) {
    curve.y0 = corpus.paper(papers.front()).pub_year;
  } else {
    std::optional<int> first;
    for (auto p : papers) {
      for (auto citer : corpus.cited_by(p)) {
        int y = corpus.paper(citer).pub_year;
        if (!first || y < *first) first = y;
      }
    }
    if (!first) fail(ErrorKind::data, describe(entity) + " has no impact history");
    curve.y0 = *first;
  }
  if (curve.y0 > curve.yn) {
    fail(ErrorKind::data, describe(entity) + " starts in " + std::to_string(curve.y0) +
                              ", after horizon " + std::to_string(curve.yn));
  }

  curve.values.assign(static_cast<std::size_t>(curve.yn - curve.y0 + 1), 0);
  for (auto p : papers) {
    for (auto citer : corpus.cited_by(p)) {
      int y = corpus.paper(citer).pub_year;
      if (y < curve.y0 || y > curve.yn) continue;
      ++curve.values[static_cast<std::size_t>(y - curve.y0)];
    }
  }
  return curve;
}

int entity_retraction_year(const Corpus& corpus, const EntityKey& entity) {
  auto papers = entity_papers(corpus, entity);
  if (papers.empty()) fail(ErrorKind::data, "unknown entity " + describe(entity));
  std::optional<int> year;
  bool retracted = false;
  for (auto p : papers) {
    if (!corpus.is_retracted(p)) continue;
    retracted = true;
    if (auto y = corpus.retraction_year(p); y && (!year || *y < *year)) year = y;
  }
  if (!retracted) fail(ErrorKind::data, describe(entity) + " is not retracted");
  if (!year) fail(ErrorKind::data, describe(entity) + " has no known retraction year");
  return *year;
}

SplitImpact split_impact(const ImpactCurve& curve, int yr, bool yr_in_pre) {
  if (yr < curve.y0 || yr > curve.yn) {
    fail(ErrorKind::invalid_argument, "retraction year " + std::to_string(yr) +
                                          " outside curve window [" + std::to_string(curve.y0) +
                                          ", " + std::to_string(curve.yn) + "]");
  }
  SplitImpact s;
  s.yr = yr;
  const int last_pre = yr_in_pre ? yr : yr - 1;
  for (int y = curve.y0; y <= curve.yn; ++y) {
    (y <= last_pre ? s.pre_impact : s.post_impact) += curve.at(y);
  }
  if (s.pre_impact > 0) {
    s.change_ratio = static_cast<double>(s.post_impact) / static_cast<double>(s.pre_impact);
  }
  return s;
}

std::string curve_csv_row(const ImpactCurve& curve) {
  std::string values;
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (i) values.push_back(';');
    values += std::to_string(curve.values[i]);
  }
  return csv::join({std::string(to_string(curve.entity.kind)), curve.entity.key,
                    std::to_string(curve.y0), std::to_string(curve.yn), values});
}

}  // namespace retract
