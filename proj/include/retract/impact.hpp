#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "retract/corpus.hpp"
#include "retract/types.hpp"

namespace retract {

struct ImpactOptions {
  int horizon_year = 2014;
  // When true the retraction year itself belongs to the pre-retraction window.
  bool retraction_year_in_pre = true;
};

/// Yearly citation counts C(y) for y0 <= y <= yn.
struct ImpactCurve {
  EntityKey entity;
  int y0 = 0;
  int yn = 0;
  std::vector<std::int64_t> values;

  std::int64_t at(int year) const { return values.at(static_cast<std::size_t>(year - y0)); }
  std::int64_t total() const;
};

struct SplitImpact {
  int yr = 0;
  std::int64_t pre_impact = 0;
  std::int64_t post_impact = 0;
  std::optional<double> change_ratio;  // nullopt when pre_impact == 0
};

/// A citation in year y means the citing paper was published in y. Paper
/// curves start at the publication year; author and institution curves start
/// at the first year any of their papers is cited.
ImpactCurve impact_curve(const Corpus& corpus, const EntityKey& entity,
                         const ImpactOptions& options = {});

/// Paper: its retraction year. Author / institution: earliest retraction year
/// over their retracted papers.
int entity_retraction_year(const Corpus& corpus, const EntityKey& entity);

SplitImpact split_impact(const ImpactCurve& curve, int yr, bool yr_in_pre = true);

/// Papers attributed to an entity (one element for a paper key).
std::vector<Corpus::Index> entity_papers(const Corpus& corpus, const EntityKey& entity);

/// Retracted entity test: paper retracted, or author/institution attached to
/// at least one retracted paper.
bool entity_is_retracted(const Corpus& corpus, const EntityKey& entity);

/// Curve export row: entity_kind,key,y0,yn,values with ';' between years.
std::string curve_csv_row(const ImpactCurve& curve);

}  // namespace retract
