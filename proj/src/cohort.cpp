#include "retract/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "retract/csv.hpp"

namespace retract {

namespace {

constexpr std::string_view kModule = "cohort";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, kModule, msg);
}

// Publication date ordering key; a missing month sorts after known months.
std::tuple<int, int, std::string_view> date_key(const PaperRecord& p) {
  return {p.pub_year, p.pub_month.value_or(13), p.paper_id};
}

void add_treatment(std::map<std::string, Treatment>& out, EntityKey e, int yr,
                   const std::string& source) {
  auto it = out.find(e.key);
  if (it == out.end()) {
    std::string key = e.key;
    out.emplace(std::move(key), Treatment{std::move(e), yr, source});
  } else if (yr < it->second.yr) {
    it->second.yr = yr;
    it->second.source_paper = source;
  }
}

// Earliest retracted paper (by retraction year, then id) of an entity.
std::pair<int, std::string> first_retraction(const Corpus& corpus,
                                             std::span<const Corpus::Index> papers) {
  std::optional<std::pair<int, std::string>> best;
  for (auto p : papers) {
    if (!corpus.is_retracted(p)) continue;
    auto y = corpus.retraction_year(p);
    if (!y) continue;
    std::pair<int, std::string> cand{*y, corpus.paper(p).paper_id};
    if (!best || cand < *best) best = std::move(cand);
  }
  return *best;
}

bool author_is_retracted(const Corpus& corpus, const std::string& name) {
  for (auto p : corpus.papers_of_author(name)) {
    if (corpus.is_retracted(p)) return true;
  }
  return false;
}

std::vector<Treatment> flatten(std::map<std::string, Treatment>& m) {
  std::vector<Treatment> out;
  out.reserve(m.size());
  for (auto& [k, t] : m) out.push_back(std::move(t));
  return out;
}

std::vector<Treatment> select_p_coref(const Corpus& corpus) {
  // reference id -> papers listing it (dangling references included)
  std::unordered_map<std::string_view, std::vector<Corpus::Index>> listing;
  for (Corpus::Index i = 0; i < corpus.size(); ++i) {
    for (const auto& ref : corpus.paper(i).references) listing[ref].push_back(i);
  }
  std::map<std::string, Treatment> out;
  for (Corpus::Index r = 0; r < corpus.size(); ++r) {
    if (!corpus.is_retracted(r) || !corpus.retraction_year(r)) continue;
    const auto& refs = corpus.paper(r).references;
    std::unordered_map<Corpus::Index, std::size_t> shared;
    for (const auto& ref : refs) {
      for (auto other : listing[ref]) {
        if (other != r && !corpus.is_retracted(other)) ++shared[other];
      }
    }
    std::optional<Corpus::Index> best;
    double best_j = 0.0;
    for (const auto& [other, common] : shared) {
      std::size_t uni = refs.size() + corpus.paper(other).references.size() - common;
      double j = static_cast<double>(common) / static_cast<double>(uni);
      if (j > best_j || (j == best_j && best && other < *best)) {
        best = other;
        best_j = j;
      }
    }
    if (best) {
      add_treatment(out, paper_key(corpus.paper(*best).paper_id), *corpus.retraction_year(r),
                    corpus.paper(r).paper_id);
    }
  }
  return flatten(out);
}

std::vector<Treatment> select_a_coaut(const Corpus& corpus) {
  std::map<std::string, Treatment> out;
  std::set<std::string> seen_first_authors;
  for (Corpus::Index r = 0; r < corpus.size(); ++r) {
    if (!corpus.is_retracted(r) || !corpus.retraction_year(r)) continue;
    if (corpus.authors(r).empty()) continue;
    const std::string& lead = corpus.authors(r).front();
    if (!seen_first_authors.insert(lead).second) continue;

    auto papers = corpus.papers_of_author(lead);
    // co-author -> (joint non-retracted papers, joint citations)
    std::map<std::string, std::pair<std::size_t, std::size_t>> joint;
    for (auto p : papers) {
      if (corpus.is_retracted(p)) continue;
      for (const auto& other : corpus.authors(p)) {
        if (other == lead) continue;
        auto& j = joint[other];
        j.first += 1;
        j.second += corpus.cited_by(p).size();
      }
    }
    const std::string* best = nullptr;
    std::pair<std::size_t, std::size_t> best_score{0, 0};
    for (const auto& [name, score] : joint) {  // name order: first max wins ties
      if (author_is_retracted(corpus, name)) continue;
      if (!best || score > best_score) {
        best = &name;
        best_score = score;
      }
    }
    if (!best) continue;
    auto [yr, source] = first_retraction(corpus, papers);
    add_treatment(out, author_key(*best), yr, source);
  }
  return flatten(out);
}

struct Ranked {
  const std::string* key;
  double pre_dis;
  std::int64_t gap;
  std::size_t slot;
};

}  // namespace

std::string_view to_string(TreatmentKind k) {
  switch (k) {
    case TreatmentKind::P_t: return "P_t";
    case TreatmentKind::A_t: return "A_t";
    case TreatmentKind::I_t: return "I_t";
    case TreatmentKind::P_citing: return "P_citing";
    case TreatmentKind::P_coref: return "P_coref";
    case TreatmentKind::A_coaut: return "A_coaut";
  }
  return "P_t";
}

std::optional<TreatmentKind> parse_treatment_kind(std::string_view s) {
  for (auto k : kAllTreatmentKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

EntityKind entity_kind_of(TreatmentKind k) {
  switch (k) {
    case TreatmentKind::A_t:
    case TreatmentKind::A_coaut: return EntityKind::author;
    case TreatmentKind::I_t: return EntityKind::institution;
    default: return EntityKind::paper;
  }
}

std::string_view to_string(ExclusionReason r) {
  switch (r) {
    case ExclusionReason::no_impact_history: return "no_impact_history";
    case ExclusionReason::retraction_outside_window: return "retraction_outside_window";
    case ExclusionReason::insufficient_controls: return "insufficient_controls";
  }
  return "insufficient_controls";
}

std::vector<Treatment> select_treatments(const Corpus& corpus, TreatmentKind kind) {
  std::map<std::string, Treatment> out;
  switch (kind) {
    case TreatmentKind::P_t:
      for (Corpus::Index r = 0; r < corpus.size(); ++r) {
        if (!corpus.is_retracted(r) || !corpus.retraction_year(r)) continue;
        add_treatment(out, paper_key(corpus.paper(r).paper_id), *corpus.retraction_year(r),
                      corpus.paper(r).paper_id);
      }
      break;
    case TreatmentKind::A_t:
    case TreatmentKind::I_t:
      for (Corpus::Index r = 0; r < corpus.size(); ++r) {
        if (!corpus.is_retracted(r) || !corpus.retraction_year(r)) continue;
        if (kind == TreatmentKind::A_t) {
          if (corpus.authors(r).empty()) continue;
          const auto& name = corpus.authors(r).front();
          auto [yr, source] = first_retraction(corpus, corpus.papers_of_author(name));
          add_treatment(out, author_key(name), yr, source);
        } else {
          if (corpus.institutions(r).empty()) continue;
          const auto& name = corpus.institutions(r).front();
          auto [yr, source] = first_retraction(corpus, corpus.papers_of_institution(name));
          add_treatment(out, institution_key(name), yr, source);
        }
      }
      break;
    case TreatmentKind::P_citing:
      for (Corpus::Index r = 0; r < corpus.size(); ++r) {
        if (!corpus.is_retracted(r) || !corpus.retraction_year(r)) continue;
        std::optional<Corpus::Index> earliest;
        for (auto c : corpus.cited_by(r)) {
          if (corpus.is_retracted(c)) continue;
          if (!earliest || date_key(corpus.paper(c)) < date_key(corpus.paper(*earliest))) {
            earliest = c;
          }
        }
        if (earliest) {
          add_treatment(out, paper_key(corpus.paper(*earliest).paper_id),
                        *corpus.retraction_year(r), corpus.paper(r).paper_id);
        }
      }
      break;
    case TreatmentKind::P_coref: return select_p_coref(corpus);
    case TreatmentKind::A_coaut: return select_a_coaut(corpus);
  }
  return flatten(out);
}

double jaccard(std::span<const std::string> a, std::span<const std::string> b) {
  std::set<std::string_view> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (auto s : sa) common += sb.count(s);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

double pre_dis(const ImpactCurve& treat, const ImpactCurve& cand, int yr, bool yr_in_pre) {
  if (treat.y0 != cand.y0) {
    fail(ErrorKind::invalid_argument, "curves start in different years (" +
                                          std::to_string(treat.y0) + " vs " +
                                          std::to_string(cand.y0) + ")");
  }
  if (yr < treat.y0 || yr > std::min(treat.yn, cand.yn)) {
    fail(ErrorKind::invalid_argument,
         "retraction year " + std::to_string(yr) + " outside the curve window");
  }
  const int last = yr_in_pre ? yr : yr - 1;
  double sum = 0.0;
  for (int y = treat.y0; y <= last; ++y) {
    double d = static_cast<double>(treat.at(y) - cand.at(y));
    sum += d * d;
  }
  return std::sqrt(sum);
}

// ---------------------------------------------------------------------------

CohortMatcher::CohortMatcher(const Corpus& corpus, const ImpactOptions& options)
    : corpus_(corpus), options_(options) {
  for (auto kind : kAllTreatmentKinds) {
    auto& group = treatments_[kind] = select_treatments(corpus, kind);
    for (const auto& t : group) treated_.insert(t.entity);
  }

  auto add_profiles = [&](EntityKind kind, const std::map<std::string, std::vector<Corpus::Index>>&
                                               index) {
    for (const auto& [name, papers] : index) {
      EntityKey key{kind, name};
      Profile prof;
      std::map<std::string, int> esi_freq;
      for (auto p : papers) {
        ++esi_freq[corpus.paper(p).esi_category];
        prof.retracted = prof.retracted || corpus.is_retracted(p);
      }
      int best = -1;
      for (const auto& [esi, n] : esi_freq) {  // alphabetical: first max wins
        if (n > best) {
          best = n;
          prof.esi = esi;
        }
      }
      try {
        prof.curve = impact_curve(corpus, key, options_);
      } catch (const Error&) {
        prof.curve.reset();
      }
      if (prof.curve && !prof.retracted && !treated_.contains(key)) {
        person_strata_[{kind, prof.esi, prof.curve->y0}].push_back(name);
      }
      profiles_.emplace(std::move(key), std::move(prof));
    }
  };
  add_profiles(EntityKind::author, corpus.by_author());
  add_profiles(EntityKind::institution, corpus.by_institution());

  for (Corpus::Index i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus.paper(i);
    if (corpus.is_retracted(i) || treated_.contains(paper_key(p.paper_id))) continue;
    if (p.pub_year > options_.horizon_year) continue;
    paper_strata_[{p.journal, p.pub_year, p.pub_month.value_or(0)}].push_back(i);
  }
}

const std::vector<Treatment>& CohortMatcher::treatments(TreatmentKind kind) const {
  return treatments_.at(kind);
}

const CohortMatcher::Profile* CohortMatcher::profile(const EntityKey& e) const {
  auto it = profiles_.find(e);
  return it == profiles_.end() ? nullptr : &it->second;
}

std::optional<ImpactCurve> CohortMatcher::curve(const EntityKey& e) const {
  if (e.kind != EntityKind::paper) {
    const Profile* p = profile(e);
    if (!p) return std::nullopt;
    return p->curve;
  }
  auto idx = corpus_.find(e.key);
  if (!idx || corpus_.paper(*idx).pub_year > options_.horizon_year) return std::nullopt;
  return impact_curve(corpus_, e, options_);
}

std::string CohortMatcher::dominant_esi(const EntityKey& e) const {
  if (e.kind == EntityKind::paper) return corpus_.paper(corpus_.at(e.key)).esi_category;
  const Profile* p = profile(e);
  if (!p) fail(ErrorKind::data, "unknown entity " + e.key);
  return p->esi;
}

std::vector<EntityKey> CohortMatcher::candidates(const EntityKey& treatment) const {
  std::vector<EntityKey> out;
  if (treatment.kind == EntityKind::paper) {
    const auto& p = corpus_.paper(corpus_.at(treatment.key));
    auto collect = [&](int month) {
      auto it = paper_strata_.find({p.journal, p.pub_year, month});
      if (it == paper_strata_.end()) return;
      for (auto i : it->second) {
        if (corpus_.paper(i).paper_id != treatment.key) out.push_back(paper_key(corpus_.paper(i).paper_id));
      }
    };
    if (p.pub_month) {
      collect(*p.pub_month);
    } else {
      for (int m = 0; m <= 12; ++m) collect(m);
      std::sort(out.begin(), out.end());
    }
    return out;
  }
  const Profile* prof = profile(treatment);
  if (!prof || !prof->curve) return out;
  auto it = person_strata_.find({treatment.kind, prof->esi, prof->curve->y0});
  if (it == person_strata_.end()) return out;
  for (const auto& name : it->second) {
    if (name != treatment.key) out.push_back({treatment.kind, name});
  }
  return out;
}

std::variant<CohortPair, Exclusion> CohortMatcher::match(const Treatment& t,
                                                         TreatmentKind kind) const {
  Exclusion ex{kind, t.entity, t.yr, ExclusionReason::no_impact_history, 0};
  auto tcurve = curve(t.entity);
  if (!tcurve) return ex;
  if (t.yr < tcurve->y0 || t.yr > tcurve->yn) {
    ex.reason = ExclusionReason::retraction_outside_window;
    return ex;
  }
  const bool in_pre = options_.retraction_year_in_pre;
  SplitImpact tsplit = split_impact(*tcurve, t.yr, in_pre);

  auto keys = candidates(t.entity);
  ex.candidates = keys.size();
  std::vector<ImpactCurve> curves;
  std::vector<Ranked> ranked;
  curves.reserve(keys.size());
  for (const auto& k : keys) {
    auto c = curve(k);
    if (!c || c->y0 != tcurve->y0) continue;
    SplitImpact s = split_impact(*c, t.yr, in_pre);
    ranked.push_back({&k.key, pre_dis(*tcurve, *c, t.yr, in_pre),
                      std::llabs(s.pre_impact - tsplit.pre_impact), curves.size()});
    curves.push_back(std::move(*c));
  }
  if (ranked.size() < 2) {
    ex.reason = ExclusionReason::insufficient_controls;
    return ex;
  }

  // Step 2: shortlist by PreDis, ties by pre-impact gap then key.
  auto by_distance = [](const Ranked& a, const Ranked& b) {
    return std::tie(a.pre_dis, a.gap, *a.key) < std::tie(b.pre_dis, b.gap, *b.key);
  };
  std::size_t keep = std::min(kPreDisShortlist, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), by_distance);
  ranked.resize(keep);
  // Step 3: the two closest pre-retraction totals, ties by PreDis then key.
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    return std::tie(a.gap, a.pre_dis, *a.key) < std::tie(b.gap, b.pre_dis, *b.key);
  });

  CohortPair pair;
  pair.kind = kind;
  pair.treatment = t.entity;
  pair.yr = t.yr;
  pair.source_paper = t.source_paper;
  pair.treatment_split = tsplit;
  for (std::size_t i = 0; i < 2; ++i) {
    const ImpactCurve& c = curves[ranked[i].slot];
    pair.controls[i] = {c.entity, ranked[i].pre_dis, ranked[i].gap,
                        split_impact(c, t.yr, in_pre)};
  }
  return pair;
}

Cohort CohortMatcher::build(TreatmentKind kind, unsigned threads) const {
  const auto& group = treatments(kind);
  std::vector<std::optional<std::variant<CohortPair, Exclusion>>> results(group.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, group.size())));

  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < group.size(); i += step) results[i] = match(group[i], kind);
  };
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
  }

  Cohort cohort;
  cohort.kind = kind;
  for (auto& r : results) {
    if (auto* p = std::get_if<CohortPair>(&*r)) {
      cohort.pairs.push_back(std::move(*p));
    } else {
      cohort.exclusions.push_back(std::get<Exclusion>(*r));
    }
  }
  return cohort;
}

std::optional<CohortPair> match_controls(const Corpus& corpus, const Treatment& treatment,
                                         TreatmentKind kind, const ImpactOptions& options,
                                         Exclusion* exclusion) {
  CohortMatcher matcher(corpus, options);
  auto r = matcher.match(treatment, kind);
  if (auto* p = std::get_if<CohortPair>(&r)) return std::move(*p);
  if (exclusion) *exclusion = std::get<Exclusion>(r);
  return std::nullopt;
}

std::string cohort_csv(const Cohort& cohort) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  std::string out =
      "kind,treatment_key,yr,control1_key,control2_key,predis1,predis2,exclusion_reason\n";
  for (const auto& p : cohort.pairs) {
    out += csv::join({std::string(to_string(p.kind)), p.treatment.key, std::to_string(p.yr),
                      p.controls[0].entity.key, p.controls[1].entity.key,
                      fmt(p.controls[0].pre_dis), fmt(p.controls[1].pre_dis), ""});
    out.push_back('\n');
  }
  for (const auto& e : cohort.exclusions) {
    out += csv::join({std::string(to_string(e.kind)), e.treatment.key, std::to_string(e.yr), "",
                      "", "", "", std::string(to_string(e.reason))});
    out.push_back('\n');
  }
  return out;
}

}  // namespace retract
