#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "retract/corpus.hpp"
#include "retract/impact.hpp"

namespace retract {

enum class TreatmentKind { P_t, A_t, I_t, P_citing, P_coref, A_coaut };

inline constexpr TreatmentKind kAllTreatmentKinds[] = {
    TreatmentKind::P_t,      TreatmentKind::A_t,     TreatmentKind::I_t,
    TreatmentKind::P_citing, TreatmentKind::P_coref, TreatmentKind::A_coaut,
};

std::string_view to_string(TreatmentKind k);
std::optional<TreatmentKind> parse_treatment_kind(std::string_view s);
EntityKind entity_kind_of(TreatmentKind k);

struct Treatment {
  EntityKey entity;
  int yr = 0;
  // Retracted paper that placed the entity in the treatment group.
  std::string source_paper;
};

/// Treatment group for one entity kind, sorted by entity key. Duplicate
/// entities keep the earliest retraction year.
std::vector<Treatment> select_treatments(const Corpus& corpus, TreatmentKind kind);

/// |A n B| / |A u B| over distinct ids; 0 when both are empty.
double jaccard(std::span<const std::string> a, std::span<const std::string> b);

/// L2 distance of two curves over y0 <= y <= yr (yr - 1 when the boundary is
/// flipped). Both curves must start in the same year.
double pre_dis(const ImpactCurve& treat, const ImpactCurve& cand, int yr, bool yr_in_pre = true);

struct ControlMatch {
  EntityKey entity;
  double pre_dis = 0.0;
  std::int64_t pre_impact_gap = 0;  // |pre(control) - pre(treatment)|
  SplitImpact split;
};

struct CohortPair {
  TreatmentKind kind = TreatmentKind::P_t;
  EntityKey treatment;
  int yr = 0;
  std::string source_paper;
  SplitImpact treatment_split;
  std::array<ControlMatch, 2> controls;  // e^o1, e^o2
};

enum class ExclusionReason { no_impact_history, retraction_outside_window, insufficient_controls };

std::string_view to_string(ExclusionReason r);

struct Exclusion {
  TreatmentKind kind = TreatmentKind::P_t;
  EntityKey treatment;
  int yr = 0;
  ExclusionReason reason = ExclusionReason::insufficient_controls;
  std::size_t candidates = 0;
};

struct Cohort {
  TreatmentKind kind = TreatmentKind::P_t;
  std::vector<CohortPair> pairs;
  std::vector<Exclusion> exclusions;
};

/// Number of candidates kept after the PreDis ranking step.
inline constexpr std::size_t kPreDisShortlist = 10;

/// Control selection over one corpus. Construction precomputes the union of
/// all six treatment groups and the author/institution curves; afterwards
/// the matcher is read-only and safe to share between threads.
class CohortMatcher {
 public:
  CohortMatcher(const Corpus& corpus, const ImpactOptions& options = {});

  const Corpus& corpus() const noexcept { return corpus_; }
  const ImpactOptions& options() const noexcept { return options_; }
  const std::vector<Treatment>& treatments(TreatmentKind kind) const;
  bool in_any_treatment_group(const EntityKey& e) const { return treated_.contains(e); }

  /// Curve of an entity, or nullopt when it has none within the horizon.
  std::optional<ImpactCurve> curve(const EntityKey& e) const;

  /// Dominant ESI category of an author or institution (mode, ties by name).
  std::string dominant_esi(const EntityKey& e) const;

  /// Step 1: eligible control candidates for a treatment, in key order.
  std::vector<EntityKey> candidates(const EntityKey& treatment) const;

  std::variant<CohortPair, Exclusion> match(const Treatment& t, TreatmentKind kind) const;

  /// Matches every treatment of `kind`; `threads` == 0 picks hardware
  /// concurrency. Output order follows the treatment order.
  Cohort build(TreatmentKind kind, unsigned threads = 0) const;

 private:
  struct Profile {
    std::optional<ImpactCurve> curve;
    std::string esi;
    bool retracted = false;
  };

  const Profile* profile(const EntityKey& e) const;

  const Corpus& corpus_;
  ImpactOptions options_;
  std::map<TreatmentKind, std::vector<Treatment>> treatments_;
  std::set<EntityKey> treated_;
  std::map<EntityKey, Profile> profiles_;  // authors and institutions
  // (kind, esi, y0) -> entity keys
  std::map<std::tuple<EntityKind, std::string, int>, std::vector<std::string>> person_strata_;
  // (journal, year, month or 0) -> papers
  std::map<std::tuple<std::string, int, int>, std::vector<Corpus::Index>> paper_strata_;
};

/// Convenience wrapper: builds a matcher and matches one treatment.
std::optional<CohortPair> match_controls(const Corpus& corpus, const Treatment& treatment,
                                         TreatmentKind kind, const ImpactOptions& options = {},
                                         Exclusion* exclusion = nullptr);

/// Cohort export: kind,treatment_key,yr,control1_key,control2_key,predis1,
/// predis2,exclusion_reason (header included).
std::string cohort_csv(const Cohort& cohort);

}  // namespace retract
