#include "retract/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <random>
#include <set>

#include "retract/topics.hpp"

namespace retract {

namespace {

using nlohmann::json;

constexpr std::string_view kModule = "synth";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, kModule, msg);
}

// Distributions are written out here rather than taken from <random> so the
// output does not depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do v = engine_(); while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  bool bernoulli(double p) { return uniform() < p; }

  int poisson(double mean) {
    const double limit = std::exp(-mean);
    double prod = uniform();
    int k = 0;
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    for (std::size_t i = weights.size(); i-- > 0;) {
      if (weights[i] > 0) return i;
    }
    return 0;
  }

 private:
  std::mt19937_64 engine_;
};

constexpr const char* kSurnames[] = {
    "Anderson", "Baker",  "Chen",    "Dubois",  "Eriksson", "Fischer", "Garcia",  "Hansen",
    "Ito",      "Jensen", "Kim",     "Larsen",  "Moreau",   "Nakamura", "Olsen",  "Petrov",
    "Quinn",    "Rossi",  "Schmidt", "Tanaka",  "Ueda",     "Varga",   "Wang",    "Xu",
    "Yamamoto", "Zhang",  "Novak",   "Silva",   "Kowalski", "Murphy",  "Okafor",  "Haddad",
    "Ivanova",  "Lindqvist", "Mendez", "Nguyen", "Park",    "Romano",  "Sato",    "Weber",
};
constexpr const char* kGiven[] = {
    "Anna", "Ben",  "Carla", "David", "Elena", "Felix", "Grace", "Hugo",  "Irene", "Jonas",
    "Kate", "Liam", "Maria", "Nils",  "Olga",  "Paul",  "Rosa",  "Simon", "Tara",  "Victor",
    "Wei",  "Yuki", "Zoe",   "Omar",  "Leila",
};
constexpr const char* kInitials[] = {"A", "B", "C", "D", "E", "F", "G", "H", "J", "K",
                                     "L", "M", "N", "P", "R", "S", "T", "V", "W", "Y"};
constexpr const char* kPlaces[] = {
    "Northfield", "Eastbrook", "Westmoor", "Southgate", "Riverton", "Lakeside", "Hillcrest",
    "Stonebridge", "Fairhaven", "Oakridge", "Maplewood", "Ashford", "Brightwater", "Clearview",
    "Deepdale", "Elmstead", "Foxley", "Glenmore", "Harborview", "Ironwood",
};
constexpr const char* kInstitutionKinds[] = {"University of", "Institute of Science",
                                             "Medical Center", "Polytechnic"};

constexpr const char* kTitlePrefixes[] = {"Effects of", "Analysis of", "Role of",
                                          "Evidence for", "Mechanisms of"};
constexpr const char* kTitleSuffixes[] = {"in model systems", "revisited", "a cohort study",
                                          "in vivo", "under controlled conditions"};
constexpr const char* kEmptyTopics = "observed outcomes";
constexpr const char* kConnector = "and";

std::string author_name(std::size_t i) {
  const std::size_t ns = std::size(kSurnames), ng = std::size(kGiven), ni = std::size(kInitials);
  std::string name = kSurnames[i % ns];
  name += ", ";
  name += kGiven[(i / ns) % ng];
  std::size_t rest = i / (ns * ng);
  if (rest > 0) {
    name += ' ';
    name += kInitials[(rest - 1) % ni];
    if (rest > ni) name += std::to_string((rest - 1) / ni);
  }
  return name;
}

std::string institution_name(std::size_t i) {
  const std::size_t np = std::size(kPlaces), nk = std::size(kInstitutionKinds);
  std::string kind = kInstitutionKinds[(i / np) % nk];
  std::string place = kPlaces[i % np];
  std::string name = kind == std::string("University of") ? kind + " " + place
                                                           : place + " " + kind;
  if (std::size_t round = i / (np * nk); round > 0) name += " " + std::to_string(round + 1);
  return name;
}

std::set<std::string> reserved_title_words() {
  std::set<std::string> words;
  auto add = [&](std::string_view s) {
    for (auto& t : title_tokens(s)) words.insert(t);
  };
  for (auto* s : kTitlePrefixes) add(s);
  for (auto* s : kTitleSuffixes) add(s);
  add(kEmptyTopics);
  add(kConnector);
  add("Retracted article. See vol. pg.");
  return words;
}

void check_rate(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::invalid_argument, what + " must be in [0,1]");
}

void validate(const SynthConfig& c) {
  CorpusOptions window;
  if (c.first_year > c.last_year) fail(ErrorKind::invalid_argument, "first_year > last_year");
  if (c.first_year < window.min_year || c.last_year > window.max_year) {
    fail(ErrorKind::invalid_argument, "years must lie in [" + std::to_string(window.min_year) +
                                          ", " + std::to_string(window.max_year) + "]");
  }
  if (c.papers_per_year < 1) fail(ErrorKind::invalid_argument, "papers_per_year must be >= 1");
  if (c.refs_per_paper < 0) fail(ErrorKind::invalid_argument, "refs_per_paper must be >= 0");
  if (c.refs_per_paper >= static_cast<double>(c.papers_per_year)) {
    fail(ErrorKind::invalid_argument,
         "infeasible config: refs_per_paper >= papers available in the first year");
  }
  if (c.refs_per_paper > 200) fail(ErrorKind::invalid_argument, "refs_per_paper must be <= 200");
  if (c.authors < 1 || c.team_size < 1 || c.authors < c.team_size) {
    fail(ErrorKind::invalid_argument, "authors must be >= team_size >= 1");
  }
  if (c.institutions < 1) fail(ErrorKind::invalid_argument, "institutions must be >= 1");
  if (c.journals.empty()) fail(ErrorKind::invalid_argument, "at least one journal is required");
  for (const auto& j : c.journals) {
    if (normalize_name(j.name).empty()) fail(ErrorKind::invalid_argument, "empty journal name");
    if (!is_esi_category(j.esi_category)) {
      fail(ErrorKind::invalid_argument, "unknown ESI category \"" + j.esi_category + "\"");
    }
  }
  if (!(c.age_decay_years > 0)) fail(ErrorKind::invalid_argument, "age_decay_years must be > 0");
  if (!std::isfinite(c.attachment_exponent)) {
    fail(ErrorKind::invalid_argument, "attachment_exponent must be finite");
  }
  check_rate(c.default_retraction_rate, "default_retraction_rate");
  for (const auto& [y, r] : c.retraction_schedule) {
    check_rate(r, "retraction_schedule[" + std::to_string(y) + "]");
  }
  double delay_total = 0;
  for (double w : c.delay_weights) {
    if (!(w >= 0)) fail(ErrorKind::invalid_argument, "delay weights must be >= 0");
    delay_total += w;
  }
  if (!(delay_total > 0)) fail(ErrorKind::invalid_argument, "delay weights sum to zero");
  double mix_total = 0;
  for (const auto& [r, w] : c.reason_mix) {
    if (!(w >= 0)) fail(ErrorKind::invalid_argument, "reason_mix weights must be >= 0");
    mix_total += w;
  }
  if (!(mix_total > 0)) fail(ErrorKind::invalid_argument, "reason_mix sums to zero");
  for (const auto& [r, f] : c.penalty) check_rate(f, "penalty[" + std::string(to_string(r)) + "]");
  check_rate(c.media_penalty, "media_penalty");
  check_rate(c.media_fraction, "media_fraction");
  check_rate(c.twin_fraction, "twin_fraction");
  check_rate(c.title_marker_fraction, "title_marker_fraction");
  check_rate(c.rater_noise, "rater_noise");
  if (c.raters < 1) fail(ErrorKind::invalid_argument, "raters must be >= 1");
  if (c.overlap_subjects < 0) fail(ErrorKind::invalid_argument, "overlap_subjects must be >= 0");

  const auto reserved = reserved_title_words();
  std::set<std::string> phrases;
  for (const auto& t : c.topics) {
    check_rate(t.base_rate, "base rate of \"" + t.phrase + "\"");
    auto tokens = title_tokens(t.phrase);
    if (tokens.empty() || t.topic.empty()) {
      fail(ErrorKind::invalid_argument, "topic entries need a phrase and a topic key");
    }
    for (const auto& w : tokens) {
      if (reserved.contains(w) || std::all_of(w.begin(), w.end(), [](char ch) {
            return std::isdigit(static_cast<unsigned char>(ch));
          })) {
        fail(ErrorKind::invalid_argument,
             "topic phrase \"" + t.phrase + "\" uses reserved title word \"" + w + "\"");
      }
    }
    std::string joined;
    for (const auto& w : tokens) joined += w + " ";
    if (!phrases.insert(joined).second) {
      fail(ErrorKind::invalid_argument, "duplicate topic phrase \"" + t.phrase + "\"");
    }
  }
  if (c.coupling) {
    const bool known = std::any_of(c.topics.begin(), c.topics.end(),
                                   [&](const SynthTopic& t) { return t.topic == c.coupling->topic; });
    if (!known) fail(ErrorKind::invalid_argument, "coupling topic is not a configured topic");
    if (c.coupling->lag < 1) fail(ErrorKind::invalid_argument, "coupling lag must be >= 1");
    if (!std::isfinite(c.coupling->strength)) {
      fail(ErrorKind::invalid_argument, "coupling strength must be finite");
    }
  }
}

struct PaperState {
  int year = 0;
  int month = 0;
  int month_index = 0;
  std::size_t journal = 0;
  std::vector<std::size_t> authors;
  std::set<std::string> topics;
  std::vector<std::size_t> refs;
  bool retracted = false;
  int retraction_year = 0;
  ReasonCode reason = ReasonCode::not_found;
  Requester requester = Requester::not_found;
  bool marker = false;
  bool media = false;
  double factor = 1.0;
  std::ptrdiff_t twin = -1;   // index of the planted twin
  bool is_twin = false;
  std::int64_t indegree = 0;
};

std::string paper_id(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "P%07zu", i + 1);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  c.journals = {
      {"Journal of Molecular Biology Letters", "molecular biology & genetics"},
      {"Cellular Immunology Reports", "immunology"},
      {"Clinical Medicine Review", "clinical medicine"},
      {"Applied Materials Journal", "materials science"},
  };
  c.default_retraction_rate = 0.03125;
  for (int y = 2010; y <= 2014; ++y) c.retraction_schedule[y] = 0.0;
  c.delay_weights = {0.15, 0.3, 0.2, 0.12, 0.08, 0.06, 0.04, 0.03, 0.02};
  c.reason_mix = {
      {ReasonCode::falsification_fabrication, 0.3}, {ReasonCode::plagiarism, 0.25},
      {ReasonCode::violation_of_rules, 0.15},       {ReasonCode::error, 0.2},
      {ReasonCode::other, 0.05},                    {ReasonCode::not_found, 0.05},
  };
  c.penalty = {
      {ReasonCode::falsification_fabrication, 0.3}, {ReasonCode::plagiarism, 0.6},
      {ReasonCode::violation_of_rules, 0.7},        {ReasonCode::error, 0.8},
      {ReasonCode::other, 0.9},                     {ReasonCode::not_found, 0.9},
  };
  c.media_fraction = 0.2;
  c.media_penalty = 0.6;
  c.topics = {
      {"gene expression", "gene_expression", 0.10},
      {"gene", "gene", 0.04},
      {"stem cell", "stem_cell", 0.08},
      {"apoptosis", "apoptosis", 0.08},
      {"breast cancer", "breast_cancer", 0.06},
      {"oxidative stress", "oxidative_stress", 0.05},
      {"graphene", "graphene", 0.04},
      {"carbon nanotubes", "carbon_nanotubes", 0.04},
      {"insulin resistance", "insulin_resistance", 0.03},
      {"tumor suppressor", "tumor_suppressor", 0.03},
      {"inflammation", "inflammation", 0.06},
      {"T-cell receptor", "t_cell_receptor", 0.03},
  };
  return c;
}

double SynthConfig::retraction_rate(int year) const {
  auto it = retraction_schedule.find(year);
  return it == retraction_schedule.end() ? default_retraction_rate : it->second;
}

// ---------------------------------------------------------------------------
// Config JSON

namespace {

json reason_map_json(const std::map<ReasonCode, double>& m) {
  json j = json::object();
  for (const auto& [r, v] : m) j[std::string(to_string(r))] = v;
  return j;
}

std::map<ReasonCode, double> reason_map_from(const json& j, const std::string& key) {
  if (!j.is_object()) fail(ErrorKind::parse, key + " must be an object");
  std::map<ReasonCode, double> out;
  for (const auto& [k, v] : j.items()) {
    auto r = parse_reason(k);
    if (!r) fail(ErrorKind::parse, key + ": unknown reason \"" + k + "\"");
    if (!v.is_number()) fail(ErrorKind::parse, key + "." + k + " must be a number");
    out[*r] = v.get<double>();
  }
  return out;
}

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::parse, "config field \"" + key + "\" has the wrong type");
  }
}

}  // namespace

SynthConfig parse_synth_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::parse, "config must be a JSON object");
  SynthConfig c = SynthConfig::defaults();
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
    else if (key == "first_year") c.first_year = get_as<int>(v, key);
    else if (key == "last_year") c.last_year = get_as<int>(v, key);
    else if (key == "papers_per_year") c.papers_per_year = get_as<int>(v, key);
    else if (key == "authors") c.authors = get_as<int>(v, key);
    else if (key == "team_size") c.team_size = get_as<int>(v, key);
    else if (key == "institutions") c.institutions = get_as<int>(v, key);
    else if (key == "refs_per_paper") c.refs_per_paper = get_as<double>(v, key);
    else if (key == "attachment_exponent") c.attachment_exponent = get_as<double>(v, key);
    else if (key == "age_decay_years") c.age_decay_years = get_as<double>(v, key);
    else if (key == "default_retraction_rate") c.default_retraction_rate = get_as<double>(v, key);
    else if (key == "twin_fraction") c.twin_fraction = get_as<double>(v, key);
    else if (key == "title_marker_fraction") c.title_marker_fraction = get_as<double>(v, key);
    else if (key == "raters") c.raters = get_as<int>(v, key);
    else if (key == "overlap_subjects") c.overlap_subjects = get_as<int>(v, key);
    else if (key == "rater_noise") c.rater_noise = get_as<double>(v, key);
    else if (key == "media_fraction") c.media_fraction = get_as<double>(v, key);
    else if (key == "media_penalty") c.media_penalty = get_as<double>(v, key);
    else if (key == "delay_weights") c.delay_weights = get_as<std::vector<double>>(v, key);
    else if (key == "reason_mix") c.reason_mix = reason_map_from(v, key);
    else if (key == "penalty") {
      // A bare number applies one factor to every reason.
      if (v.is_number()) {
        c.penalty.clear();
        for (auto r : kAllReasons) c.penalty[r] = v.get<double>();
      } else {
        c.penalty = reason_map_from(v, key);
      }
    } else if (key == "retraction_schedule") {
      if (!v.is_object()) fail(ErrorKind::parse, "retraction_schedule must be an object");
      c.retraction_schedule.clear();
      for (const auto& [y, r] : v.items()) {
        int year = 0;
        try {
          std::size_t used = 0;
          year = std::stoi(y, &used);
          if (used != y.size()) throw std::invalid_argument(y);
        } catch (const std::exception&) {
          fail(ErrorKind::parse, "retraction_schedule key \"" + y + "\" is not a year");
        }
        c.retraction_schedule[year] = get_as<double>(r, key);
      }
    } else if (key == "journals") {
      if (!v.is_array()) fail(ErrorKind::parse, "journals must be an array");
      c.journals.clear();
      for (const auto& e : v) {
        if (!e.is_object() || !e.contains("name") || !e.contains("esi_category")) {
          fail(ErrorKind::parse, "journal entries need name and esi_category");
        }
        c.journals.push_back({get_as<std::string>(e["name"], "journals.name"),
                              get_as<std::string>(e["esi_category"], "journals.esi_category")});
      }
    } else if (key == "topics") {
      if (!v.is_array()) fail(ErrorKind::parse, "topics must be an array");
      c.topics.clear();
      for (const auto& e : v) {
        if (!e.is_object() || !e.contains("phrase") || !e.contains("topic") ||
            !e.contains("base_rate")) {
          fail(ErrorKind::parse, "topic entries need phrase, topic and base_rate");
        }
        c.topics.push_back({get_as<std::string>(e["phrase"], "topics.phrase"),
                            get_as<std::string>(e["topic"], "topics.topic"),
                            get_as<double>(e["base_rate"], "topics.base_rate")});
      }
    } else if (key == "coupling") {
      if (v.is_null()) {
        c.coupling.reset();
      } else {
        if (!v.is_object() || !v.contains("topic") || !v.contains("lag") ||
            !v.contains("strength")) {
          fail(ErrorKind::parse, "coupling needs topic, lag and strength");
        }
        c.coupling = SynthCoupling{get_as<std::string>(v["topic"], "coupling.topic"),
                                   get_as<int>(v["lag"], "coupling.lag"),
                                   get_as<double>(v["strength"], "coupling.strength")};
      }
    } else {
      fail(ErrorKind::parse, "unknown config field \"" + key + "\"");
    }
  }
  validate(c);
  return c;
}

std::string synth_config_to_json(const SynthConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["first_year"] = c.first_year;
  j["last_year"] = c.last_year;
  j["papers_per_year"] = c.papers_per_year;
  j["authors"] = c.authors;
  j["team_size"] = c.team_size;
  j["institutions"] = c.institutions;
  j["refs_per_paper"] = c.refs_per_paper;
  j["attachment_exponent"] = c.attachment_exponent;
  j["age_decay_years"] = c.age_decay_years;
  j["default_retraction_rate"] = c.default_retraction_rate;
  json sched = json::object();
  for (const auto& [y, r] : c.retraction_schedule) sched[std::to_string(y)] = r;
  j["retraction_schedule"] = sched;
  j["delay_weights"] = c.delay_weights;
  j["reason_mix"] = reason_map_json(c.reason_mix);
  j["penalty"] = reason_map_json(c.penalty);
  json journals = json::array();
  for (const auto& jr : c.journals) {
    journals.push_back({{"name", jr.name}, {"esi_category", jr.esi_category}});
  }
  j["journals"] = journals;
  json topics = json::array();
  for (const auto& t : c.topics) {
    topics.push_back({{"phrase", t.phrase}, {"topic", t.topic}, {"base_rate", t.base_rate}});
  }
  j["topics"] = topics;
  if (c.coupling) {
    j["coupling"] = {{"topic", c.coupling->topic},
                     {"lag", c.coupling->lag},
                     {"strength", c.coupling->strength}};
  } else {
    j["coupling"] = nullptr;
  }
  j["twin_fraction"] = c.twin_fraction;
  j["title_marker_fraction"] = c.title_marker_fraction;
  j["raters"] = c.raters;
  j["overlap_subjects"] = c.overlap_subjects;
  j["rater_noise"] = c.rater_noise;
  j["media_fraction"] = c.media_fraction;
  j["media_penalty"] = c.media_penalty;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Generation

namespace {

class Generator {
 public:
  explicit Generator(const SynthConfig& c) : c_(c), rng_(c.seed) {
    const std::size_t months = static_cast<std::size_t>(c.last_year - c.first_year + 1) * 12;
    decay_.resize(months + 1);
    for (std::size_t a = 0; a < decay_.size(); ++a) {
      decay_[a] = std::exp(-static_cast<double>(a) / (12.0 * c.age_decay_years));
    }
    teams_ = static_cast<std::size_t>(c.authors / c.team_size);
    home_journal_.resize(teams_);
    for (auto& j : home_journal_) j = rng_.below(c.journals.size());
    home_institution_.resize(static_cast<std::size_t>(c.authors));
    for (auto& i : home_institution_) i = rng_.below(static_cast<std::size_t>(c.institutions));
    // Team members are contiguous indices; a shuffled name table keeps their
    // names unrelated.
    name_of_.resize(static_cast<std::size_t>(c.authors));
    for (std::size_t a = 0; a < name_of_.size(); ++a) name_of_[a] = a;
    for (std::size_t a = name_of_.size(); a > 1; --a) std::swap(name_of_[a - 1], name_of_[rng_.below(a)]);
    for (const auto& [r, w] : c.reason_mix) {
      reasons_.push_back(r);
      reason_weights_.push_back(w);
    }
  }

  SynthOutput run();

 private:
  void create_year(int year);
  void select_retractions(int year, std::size_t begin, std::size_t end);
  void plant_twins(std::size_t begin, std::size_t end);
  void cite_month(int year, int month);
  std::string title_of(const PaperState& p, std::size_t index);
  double coupled_rate(const SynthTopic& t, int year) const;

  const SynthConfig& c_;
  Rng rng_;
  std::vector<double> decay_;
  std::size_t teams_ = 0;
  std::vector<std::size_t> home_journal_;
  std::vector<std::size_t> home_institution_;
  std::vector<std::size_t> name_of_;
  std::vector<ReasonCode> reasons_;
  std::vector<double> reason_weights_;

  std::vector<PaperState> papers_;
  std::map<int, std::int64_t> injected_;
  std::map<int, std::int64_t> published_;
  std::map<int, std::map<std::string, std::int64_t>> topic_retracted_by_year_;
  std::set<std::size_t> media_authors_;
  std::set<std::size_t> misconduct_first_authors_;
};

double Generator::coupled_rate(const SynthTopic& t, int year) const {
  if (!c_.coupling || c_.coupling->topic != t.topic) return t.base_rate;
  const int src = year - c_.coupling->lag;
  double ret = 0.0;
  if (auto pub = published_.find(src); pub != published_.end() && pub->second > 0) {
    auto yr = topic_retracted_by_year_.find(src);
    if (yr != topic_retracted_by_year_.end()) {
      if (auto it = yr->second.find(t.topic); it != yr->second.end()) {
        ret = static_cast<double>(it->second) / static_cast<double>(pub->second);
      }
    }
  }
  return std::clamp(t.base_rate + c_.coupling->strength * ret, 0.0, 1.0);
}

void Generator::create_year(int year) {
  const std::size_t begin = papers_.size();
  const int per_year = c_.papers_per_year;
  std::vector<double> rates;
  for (const auto& t : c_.topics) rates.push_back(coupled_rate(t, year));

  for (int month = 1; month <= 12; ++month) {
    const int in_month = per_year / 12 + (month - 1 < per_year % 12 ? 1 : 0);
    for (int k = 0; k < in_month; ++k) {
      PaperState p;
      p.year = year;
      p.month = month;
      p.month_index = (year - c_.first_year) * 12 + (month - 1);
      const std::size_t team = rng_.below(teams_);
      p.journal = rng_.bernoulli(0.7) ? home_journal_[team] : rng_.below(c_.journals.size());
      const std::size_t base = team * static_cast<std::size_t>(c_.team_size);
      const std::size_t size = static_cast<std::size_t>(c_.team_size);
      std::size_t n_authors = std::min<std::size_t>(1 + static_cast<std::size_t>(rng_.poisson(1.5)), size);
      p.authors.push_back(base + rng_.below(size));
      while (p.authors.size() < n_authors) {
        std::size_t a = base + rng_.below(size);
        if (std::find(p.authors.begin(), p.authors.end(), a) == p.authors.end()) {
          p.authors.push_back(a);
        }
      }
      if (rng_.bernoulli(0.1)) {
        std::size_t a = rng_.below(static_cast<std::size_t>(c_.authors));
        if (std::find(p.authors.begin(), p.authors.end(), a) == p.authors.end()) {
          p.authors.push_back(a);
        }
      }
      for (std::size_t t = 0; t < c_.topics.size(); ++t) {
        if (rng_.bernoulli(rates[t])) p.topics.insert(c_.topics[t].topic);
      }
      papers_.push_back(std::move(p));
    }
  }
  published_[year] = per_year;
  select_retractions(year, begin, papers_.size());
  plant_twins(begin, papers_.size());
}

void Generator::select_retractions(int year, std::size_t begin, std::size_t end) {
  const std::size_t n = end - begin;
  const auto count = static_cast<std::size_t>(std::llround(c_.retraction_rate(year) * static_cast<double>(n)));
  injected_[year] = static_cast<std::int64_t>(count);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = begin + i;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng_.below(n - i);
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(chosen.begin(), chosen.end());

  for (std::size_t idx : chosen) {
    PaperState& p = papers_[idx];
    p.retracted = true;
    const int delay = static_cast<int>(rng_.categorical(c_.delay_weights));
    p.retraction_year = std::min(year + delay, c_.last_year);
    p.reason = reasons_[rng_.categorical(reason_weights_)];
    const double req = rng_.uniform();
    p.requester = req < 0.6 ? Requester::editor : (req < 0.9 ? Requester::author : Requester::not_found);
    p.marker = rng_.bernoulli(c_.title_marker_fraction);
    const bool media_draw = rng_.bernoulli(c_.media_fraction);
    if (is_misconduct(p.reason)) {
      const std::size_t first = p.authors.front();
      if (media_authors_.contains(first)) {
        p.media = true;
      } else if (media_draw && !misconduct_first_authors_.contains(first)) {
        media_authors_.insert(first);
        p.media = true;
      }
      misconduct_first_authors_.insert(first);
    }
    auto pen = c_.penalty.find(p.reason);
    p.factor = (pen == c_.penalty.end() ? 1.0 : pen->second) * (p.media ? c_.media_penalty : 1.0);
    for (const auto& t : p.topics) ++topic_retracted_by_year_[year][t];
  }
}

void Generator::plant_twins(std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    if (!papers_[i].retracted || !rng_.bernoulli(c_.twin_fraction)) continue;
    PaperState t;
    t.year = papers_[i].year;
    t.month = papers_[i].month;
    t.month_index = papers_[i].month_index;
    t.journal = papers_[i].journal;
    t.is_twin = true;
    papers_[i].twin = static_cast<std::ptrdiff_t>(papers_.size());
    papers_.push_back(std::move(t));
  }
}

void Generator::cite_month(int year, int month) {
  const int now = (year - c_.first_year) * 12 + (month - 1);
  std::vector<std::size_t> pool;
  std::vector<double> cumulative;
  double total = 0.0;
  std::vector<std::size_t> citing;
  for (std::size_t i = 0; i < papers_.size(); ++i) {
    const auto& p = papers_[i];
    if (p.month_index == now) {
      if (!p.is_twin) citing.push_back(i);
      continue;
    }
    if (p.month_index > now || p.is_twin) continue;
    const double degree = static_cast<double>(p.indegree + 1);
    const double attach = c_.attachment_exponent == 1.0 ? degree
                                                        : std::pow(degree, c_.attachment_exponent);
    total += attach * decay_[static_cast<std::size_t>(now - p.month_index)];
    pool.push_back(i);
    cumulative.push_back(total);
  }

  std::vector<std::int64_t> gained(papers_.size(), 0);
  for (std::size_t i : citing) {
    if (pool.empty()) break;
    const std::size_t want =
        std::min(static_cast<std::size_t>(rng_.poisson(c_.refs_per_paper)), pool.size());
    std::vector<std::size_t> picked;
    std::size_t attempts = 0;
    while (picked.size() < want && attempts < 64 * want + 64) {
      ++attempts;
      const double u = rng_.uniform() * total;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      if (it == cumulative.end()) --it;
      const std::size_t target = pool[static_cast<std::size_t>(it - cumulative.begin())];
      if (std::find(picked.begin(), picked.end(), target) != picked.end()) continue;
      picked.push_back(target);
    }
    auto& refs = papers_[i].refs;
    for (std::size_t target : picked) {
      const auto& tp = papers_[target];
      if (tp.twin >= 0) {
        refs.push_back(static_cast<std::size_t>(tp.twin));
        ++gained[static_cast<std::size_t>(tp.twin)];
      }
      if (tp.retracted && year > tp.retraction_year && !rng_.bernoulli(tp.factor)) continue;
      refs.push_back(target);
      ++gained[target];
    }
  }
  for (std::size_t i = 0; i < gained.size(); ++i) papers_[i].indegree += gained[i];
}

std::string Generator::title_of(const PaperState& p, std::size_t index) {
  std::string title;
  if (p.is_twin) {
    title = "Replication of ";
    title += kEmptyTopics;
  } else {
    title = kTitlePrefixes[index % std::size(kTitlePrefixes)];
    title += ' ';
    if (p.topics.empty()) {
      title += kEmptyTopics;
    } else {
      bool first = true;
      for (const auto& t : c_.topics) {
        if (!p.topics.contains(t.topic)) continue;
        // One phrase per topic: the first configured phrase of that topic.
        bool seen = false;
        for (const auto& u : c_.topics) {
          if (&u == &t) break;
          if (u.topic == t.topic) seen = true;
        }
        if (seen) continue;
        if (!first) title += std::string(" ") + kConnector + " ";
        title += t.phrase;
        first = false;
      }
    }
    title += ' ';
    title += kTitleSuffixes[(index / std::size(kTitlePrefixes)) % std::size(kTitleSuffixes)];
  }
  if (p.retracted && p.marker) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " (Retracted article. See vol. %d, pg. %zu, %d)",
                  p.retraction_year - 1900, 100 + index % 900, p.retraction_year);
    title += buf;
  }
  return title;
}

SynthOutput Generator::run() {
  for (int year = c_.first_year; year <= c_.last_year; ++year) {
    create_year(year);
    for (int month = 1; month <= 12; ++month) cite_month(year, month);
  }

  SynthOutput out;
  out.injected_per_year = injected_;
  std::vector<std::string> author_names(static_cast<std::size_t>(c_.authors));
  for (std::size_t a = 0; a < author_names.size(); ++a) author_names[a] = author_name(name_of_[a]);

  std::map<std::string, std::map<int, std::pair<std::int64_t, std::int64_t>>> topic_counts;
  std::map<int, std::int64_t> papers_per_year;
  json retractions = json::array();
  out.papers.reserve(papers_.size());
  for (std::size_t i = 0; i < papers_.size(); ++i) {
    const auto& p = papers_[i];
    PaperRecord r;
    r.paper_id = paper_id(i);
    r.title = title_of(p, i);
    r.pub_year = p.year;
    r.pub_month = p.month;
    r.journal = c_.journals[p.journal].name;
    r.esi_category = c_.journals[p.journal].esi_category;
    for (std::size_t a : p.authors) r.author_names.push_back(author_names[a]);
    for (std::size_t a : p.authors) {
      std::string inst = institution_name(home_institution_[a]);
      if (std::find(r.institution_names.begin(), r.institution_names.end(), inst) ==
          r.institution_names.end()) {
        r.institution_names.push_back(std::move(inst));
      }
    }
    std::vector<std::size_t> refs = p.refs;
    std::sort(refs.begin(), refs.end());
    for (std::size_t ref : refs) r.references.push_back(paper_id(ref));
    if (p.retracted) {
      r.retraction = RetractionNotice{p.retraction_year, p.reason, p.requester};
      retractions.push_back({{"paper_id", r.paper_id},
                             {"pub_year", p.year},
                             {"retraction_year", p.retraction_year},
                             {"reason", std::string(to_string(p.reason))},
                             {"media", p.media},
                             {"factor", p.factor},
                             {"title_marker", p.marker}});
    }
    ++papers_per_year[p.year];
    for (const auto& t : p.topics) {
      auto& cell = topic_counts[t][p.year];
      ++cell.first;
      if (p.retracted) ++cell.second;
    }
    if (p.twin >= 0) {
      out.twins.push_back({r.paper_id, paper_id(static_cast<std::size_t>(p.twin))});
    }
    out.papers.push_back(std::move(r));
  }

  for (std::size_t a : media_authors_) out.media_authors.push_back(normalize_name(author_names[a]));
  std::sort(out.media_authors.begin(), out.media_authors.end());

  // Annotations: a shuffled overlap set rated by every rater, the rest by one.
  std::vector<std::size_t> retracted;
  for (std::size_t i = 0; i < papers_.size(); ++i) {
    if (papers_[i].retracted) retracted.push_back(i);
  }
  std::vector<std::size_t> shuffled = retracted;
  for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng_.below(i)]);
  const std::size_t overlap = std::min(shuffled.size(), static_cast<std::size_t>(c_.overlap_subjects));
  std::set<std::size_t> overlap_set(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(overlap));
  for (std::size_t i : retracted) {
    const int raters = overlap_set.contains(i) ? c_.raters : 1;
    for (int k = 1; k <= raters; ++k) {
      AnnotationRecord a;
      a.paper_id = paper_id(i);
      a.rater_id = "r" + std::to_string(k);
      a.reason = rng_.bernoulli(c_.rater_noise) ? kAllReasons[rng_.below(std::size(kAllReasons))]
                                                : papers_[i].reason;
      a.requester = rng_.bernoulli(c_.rater_noise)
                        ? kAllRequesters[rng_.below(std::size(kAllRequesters))]
                        : papers_[i].requester;
      out.annotations.push_back(std::move(a));
    }
  }

  for (const auto& t : c_.topics) out.dictionary_tsv += t.phrase + "\t" + t.topic + "\n";

  json truth;
  truth["config"] = json::parse(synth_config_to_json(c_));
  truth["papers"] = out.papers.size();
  truth["retracted"] = retracted.size();
  json injected = json::object(), expected = json::object(), per_year = json::object();
  for (const auto& [y, n] : injected_) {
    injected[std::to_string(y)] = n;
    expected[std::to_string(y)] = c_.retraction_rate(y) * c_.papers_per_year;
  }
  for (const auto& [y, n] : papers_per_year) per_year[std::to_string(y)] = n;
  truth["injected_per_year"] = injected;
  truth["scheduled_per_year"] = expected;
  truth["published_per_year"] = per_year;
  truth["penalties"] = reason_map_json(c_.penalty);
  truth["media_penalty"] = c_.media_penalty;
  truth["media_authors"] = out.media_authors;
  json twins = json::array();
  for (const auto& tw : out.twins) twins.push_back({{"treatment", tw.treatment}, {"twin", tw.twin}});
  truth["twins"] = twins;
  json topics = json::object();
  for (const auto& [topic, years] : topic_counts) {
    json entry;
    std::int64_t members = 0, ret = 0;
    json by_year = json::object();
    for (const auto& [y, cell] : years) {
      members += cell.first;
      ret += cell.second;
      by_year[std::to_string(y)] = {{"members", cell.first}, {"retracted", cell.second}};
    }
    entry["members"] = members;
    entry["retracted"] = ret;
    entry["per_year"] = by_year;
    topics[topic] = entry;
  }
  truth["topics"] = topics;
  truth["coupling"] = truth["config"]["coupling"];
  truth["retractions"] = retractions;
  out.ground_truth_json = truth.dump(2) + "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::io, "cannot write " + path.string());
  f << text;
  if (!f) fail(ErrorKind::io, "write failed for " + path.string());
}

}  // namespace

std::string SynthOutput::corpus_jsonl() const {
  std::string out;
  for (const auto& p : papers) {
    out += to_jsonl_line(p);
    out.push_back('\n');
  }
  return out;
}

SynthOutput generate_corpus(const SynthConfig& config) {
  validate(config);
  Generator g(config);
  return g.run();
}

void write_synth_output(const SynthOutput& output, const std::filesystem::path& corpus_path) {
  auto dir = corpus_path.parent_path();
  if (!dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  }
  write_text(corpus_path, output.corpus_jsonl());
  write_text(dir / "ground_truth.json", output.ground_truth_json);
  write_text(dir / "annotations.csv", annotations_to_csv(output.annotations));
  write_text(dir / "dictionary.tsv", output.dictionary_tsv);
  std::string media;
  for (const auto& a : output.media_authors) media += a + "\n";
  write_text(dir / "media_list.txt", media);
}

}  // namespace retract
