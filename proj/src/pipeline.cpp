#include "retract/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "retract/annotation.hpp"
#include "retract/csv.hpp"
#include "retract/impact.hpp"

namespace retract {

namespace {

using nlohmann::json;

constexpr std::string_view kModule = "cli";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, kModule, msg);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorKind::invalid_argument, "--" + std::string(key) + " expects true or false, got \"" +
                                        std::string(v) + "\"");
}

long long parse_int(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    long long n = std::stoll(std::string(v), &used);
    if (used == v.size()) return n;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::invalid_argument,
       "--" + std::string(key) + " expects an integer, got \"" + std::string(v) + "\"");
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string full(double v) { return fmt("%.17g", v); }

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::set<std::string> read_media_list(const std::filesystem::path& path) {
  std::set<std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (auto n = normalize_name(line); !n.empty()) out.insert(std::move(n));
  }
  return out;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json mw_json(const stats::MWResult& r) {
  return {{"u_statistic", r.u_statistic},
          {"p_value", r.p_value},
          {"median_treatment", r.median_treatment},
          {"median_control", r.median_control},
          {"n_treatment", r.n_treatment},
          {"n_control", r.n_control},
          {"mode", r.mode == stats::MwMode::exact ? "exact" : "normal_approx"}};
}

}  // namespace

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void set_pipeline_option(PipelineOptions& o, std::string_view key, std::string_view value) {
  if (key == "input") {
    o.input = std::string(value);
  } else if (key == "format") {
    auto f = parse_input_format(value);
    if (!f) fail(ErrorKind::invalid_argument, "--format must be jsonl or csv");
    o.format = *f;
  } else if (key == "horizon-year") {
    o.horizon_year = static_cast<int>(parse_int(key, value));
  } else if (key == "yr-in-pre") {
    o.yr_in_pre = parse_bool(key, value);
  } else if (key == "lags") {
    o.lags.clear();
    for (const auto& part : csv::split(value, ',')) {
      long long n = parse_int(key, part);
      if (n < 1) fail(ErrorKind::invalid_argument, "--lags values must be >= 1");
      o.lags.push_back(static_cast<int>(n));
    }
    if (o.lags.empty()) fail(ErrorKind::invalid_argument, "--lags needs at least one value");
  } else if (key == "kind") {
    if (value == "all") {
      o.kind.reset();
    } else {
      auto k = parse_treatment_kind(value);
      if (!k) fail(ErrorKind::invalid_argument, "unknown treatment kind \"" + std::string(value) + "\"");
      o.kind = *k;
    }
  } else if (key == "dictionary") {
    o.dictionary = std::string(value);
  } else if (key == "annotations") {
    o.annotations = std::string(value);
  } else if (key == "media-list") {
    o.media_list = std::string(value);
  } else if (key == "seed") {
    long long s = parse_int(key, value);
    if (s < 0) fail(ErrorKind::invalid_argument, "--seed must be >= 0");
    o.seeds.push_back(static_cast<std::uint64_t>(s));
  } else if (key == "top-topics") {
    long long n = parse_int(key, value);
    if (n < 1) fail(ErrorKind::invalid_argument, "--top-topics must be >= 1");
    o.top_topics = static_cast<std::size_t>(n);
  } else if (key == "timestamp") {
    o.timestamp = parse_bool(key, value);
  } else if (key == "threads") {
    long long n = parse_int(key, value);
    if (n < 0) fail(ErrorKind::invalid_argument, "--threads must be >= 0");
    o.threads = static_cast<unsigned>(n);
  } else {
    fail(ErrorKind::invalid_argument, "unknown option \"" + std::string(key) + "\"");
  }
}

void write_result(const RunResult& result, const std::filesystem::path& dir,
                  std::string_view json_name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::io, "cannot write " + (dir / name).string());
    f << content;
    if (!f) fail(ErrorKind::io, "write failed for " + (dir / name).string());
  };
  for (const auto& a : result.files) write(a.name, a.content);
  write(std::string(json_name), result.json);
}

// ---------------------------------------------------------------------------

Pipeline::Pipeline(Corpus corpus, PipelineOptions options)
    : corpus_(std::make_unique<Corpus>(std::move(corpus))), options_(std::move(options)) {
  if (options_.dictionary) {
    annotator_ = std::make_shared<DictionaryAnnotator>(
        DictionaryAnnotator::from_file(*options_.dictionary));
  }
}

Pipeline Pipeline::load(const PipelineOptions& options) {
  if (options.input.empty()) fail(ErrorKind::invalid_argument, "no input corpus given");
  return Pipeline(ingest_corpus(options.input, options.format), options);
}

void Pipeline::set_annotator(std::shared_ptr<const Annotator> annotator) {
  annotator_ = std::move(annotator);
  assignments_.reset();
}

std::vector<TreatmentKind> Pipeline::kinds() const {
  if (options_.kind) return {*options_.kind};
  return {std::begin(kAllTreatmentKinds), std::end(kAllTreatmentKinds)};
}

const Cohort& Pipeline::cohort_for(TreatmentKind kind) {
  if (auto it = cohorts_.find(kind); it != cohorts_.end()) return it->second;
  if (!matcher_) {
    matcher_ = std::make_unique<CohortMatcher>(
        *corpus_, ImpactOptions{options_.horizon_year, options_.yr_in_pre});
  }
  return cohorts_.emplace(kind, matcher_->build(kind, options_.threads)).first->second;
}

const TopicAssignments& Pipeline::assignments() {
  if (!annotator_) {
    fail(ErrorKind::invalid_argument, "topic analysis needs --dictionary (or an annotator)");
  }
  if (!assignments_) assignments_ = annotate_titles(*corpus_, *annotator_);
  return *assignments_;
}

std::map<std::string, ReasonCode> Pipeline::resolved_reasons() {
  if (!options_.annotations) return {};
  auto records = read_annotations(*options_.annotations);
  return resolve_reasons(records, Resolution::majority);
}

std::string Pipeline::manifest_json() const {
  json m;
  m["tool"] = "rtx";
  m["version"] = kToolVersion;
  m["modules"] = {{"corpus", "1.0.0"}, {"annotation", "1.0.0"}, {"impact", "1.0.0"},
                  {"cohort", "1.0.0"}, {"stats", "1.0.0"},      {"topics", "1.0.0"},
                  {"synth", "1.0.0"},  {"cli", "1.0.0"}};
  json inputs = json::array();
  auto add_input = [&](const char* role, const std::filesystem::path& p) {
    std::string hash;
    std::error_code ec;
    if (std::filesystem::is_regular_file(p, ec)) hash = fnv1a_hex(read_file(p));
    inputs.push_back({{"role", role}, {"path", p.string()}, {"fnv1a64", hash}});
  };
  if (!options_.input.empty()) add_input("corpus", options_.input);
  if (options_.dictionary) add_input("dictionary", *options_.dictionary);
  if (options_.annotations) add_input("annotations", *options_.annotations);
  if (options_.media_list) add_input("media_list", *options_.media_list);
  m["inputs"] = inputs;

  json cfg;
  cfg["format"] = options_.format == InputFormat::jsonl ? "jsonl" : "csv";
  cfg["horizon_year"] = options_.horizon_year;
  cfg["yr_in_pre"] = options_.yr_in_pre;
  cfg["lags"] = options_.lags;
  cfg["kind"] = options_.kind ? json(std::string(to_string(*options_.kind))) : json("all");
  cfg["top_topics"] = options_.top_topics;
  m["config"] = cfg;
  m["config_hash"] = fnv1a_hex(cfg.dump());
  m["seeds"] = options_.seeds;
  m["timestamp"] = options_.timestamp ? json(utc_timestamp()) : json(nullptr);
  return m.dump();
}

namespace {

std::string finish_json(const std::string& manifest, const std::string& verb, json body) {
  json out;
  out["verb"] = verb;
  out["manifest"] = json::parse(manifest);
  out["result"] = std::move(body);
  return out.dump(2) + "\n";
}

}  // namespace

RunResult Pipeline::ingest() {
  RunResult r;
  std::size_t retracted = 0, refs = 0;
  for (Corpus::Index i = 0; i < corpus_->size(); ++i) {
    if (corpus_->is_retracted(i)) ++retracted;
    refs += corpus_->resolved_references(i).size();
  }
  json body = {{"papers", corpus_->size()},
               {"retracted", retracted},
               {"resolved_references", refs},
               {"dangling_references", corpus_->dangling_reference_count()},
               {"first_year", corpus_->size() ? corpus_->first_year() : 0},
               {"last_year", corpus_->size() ? corpus_->last_year() : 0},
               {"authors", corpus_->by_author().size()},
               {"institutions", corpus_->by_institution().size()}};
  r.text = "papers " + std::to_string(corpus_->size()) + "\nretracted " +
           std::to_string(retracted) + "\nresolved references " + std::to_string(refs) +
           "\ndangling references " + std::to_string(corpus_->dangling_reference_count()) + "\n";
  r.json = finish_json(manifest_json(), "ingest", body);
  return r;
}

RunResult Pipeline::describe() {
  RunResult r;
  json body;

  std::string rate_csv = "year,retracted,total,rate\n";
  json rates = json::array();
  r.text += "Annual retraction rate (by publication year)\nyear  retracted  total  rate\n";
  for (const auto& y : annual_retraction_rate(*corpus_)) {
    rate_csv += csv::join({std::to_string(y.year), std::to_string(y.retracted),
                           std::to_string(y.total), full(y.rate)}) + "\n";
    rates.push_back({{"year", y.year}, {"retracted", y.retracted}, {"total", y.total},
                     {"rate", y.rate}});
    r.text += pad(std::to_string(y.year), 6) + pad(std::to_string(y.retracted), 11) +
              pad(std::to_string(y.total), 7) + fmt("%.6f", y.rate) + "\n";
  }
  body["annual_retraction_rate"] = rates;
  r.files.push_back({"annual_rate.csv", rate_csv});

  auto delay = retraction_delay(*corpus_);
  std::string delay_csv = "retraction_year,count,median_delay\n";
  std::string per_paper = "paper_id,delay\n";
  json by_year = json::array();
  for (const auto& d : delay.by_retraction_year) {
    delay_csv += csv::join({std::to_string(d.retraction_year), std::to_string(d.count),
                            full(d.median)}) + "\n";
    by_year.push_back({{"retraction_year", d.retraction_year}, {"count", d.count},
                       {"median", d.median}});
  }
  for (const auto& p : delay.per_paper) {
    per_paper += csv::join({p.paper_id, std::to_string(p.delay)}) + "\n";
  }
  body["retraction_delay"] = {{"by_retraction_year", by_year},
                              {"overall_median", optional_number(delay.overall_median)},
                              {"papers", delay.per_paper.size()}};
  r.files.push_back({"delay_by_year.csv", delay_csv});
  r.files.push_back({"delay_per_paper.csv", per_paper});
  r.text += "\nRetraction delay: median " +
            (delay.overall_median ? fmt("%.2f", *delay.overall_median) : std::string("-")) +
            " years over " + std::to_string(delay.per_paper.size()) + " papers\n";

  std::string dist_csv = "subset,lo,hi,count\n";
  json dist = json::object();
  for (auto subset : {PaperSubset::retracted, PaperSubset::all}) {
    const char* name = subset == PaperSubset::retracted ? "retracted" : "all";
    auto d = citation_distribution(*corpus_, subset);
    json bins = json::array();
    for (const auto& b : d.histogram) {
      dist_csv += csv::join({name, std::to_string(b.lo), std::to_string(b.hi),
                             std::to_string(b.count)}) + "\n";
      bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    }
    dist[name] = {{"papers", d.counts.size()}, {"median", optional_number(d.median)},
                  {"histogram", bins}};
    r.text += std::string("Median citations (") + name + "): " +
              (d.median ? fmt("%.2f", *d.median) : std::string("-")) + "\n";
  }
  body["citation_distribution"] = dist;
  r.files.push_back({"citation_distribution.csv", dist_csv});

  std::string esi_csv = "esi_category,retracted,total,rate\n";
  json esi = json::array();
  r.text += "\nESI retraction rates (x 1e-4)\n";
  for (const auto& c : esi_retraction_rates(*corpus_)) {
    esi_csv += csv::join({c.category, std::to_string(c.retracted), std::to_string(c.total),
                          full(c.rate)}) + "\n";
    esi.push_back({{"esi_category", c.category}, {"retracted", c.retracted},
                   {"total", c.total}, {"rate", c.rate}});
    r.text += pad(c.category, 32) + fmt("%.2f", c.rate * 1e4) + "\n";
  }
  body["esi_retraction_rates"] = esi;
  r.files.push_back({"esi_rates.csv", esi_csv});

  r.json = finish_json(manifest_json(), "describe", body);
  return r;
}

RunResult Pipeline::annotate_stats() {
  if (!options_.annotations) fail(ErrorKind::invalid_argument, "annotate-stats needs --annotations");
  auto records = read_annotations(*options_.annotations);
  RunResult r;
  json body;

  auto summary = agreement_summary(records);
  body["agreement"] = {{"raters", summary.raters},
                       {"subjects_used", summary.subjects_used},
                       {"subjects_excluded", summary.subjects_excluded},
                       {"kappa_reason", optional_number(summary.kappa_reason)},
                       {"kappa_requester", optional_number(summary.kappa_requester)}};
  auto show = [](const std::optional<double>& k) {
    return k ? fmt("%.4f", *k) : std::string("undefined");
  };
  r.text = "Fleiss kappa over " + std::to_string(summary.subjects_used) + " subjects x " +
           std::to_string(summary.raters) + " raters (" +
           std::to_string(summary.subjects_excluded) + " excluded)\n  reason     " +
           show(summary.kappa_reason) + "\n  requester  " + show(summary.kappa_requester) + "\n";

  std::string dist_csv = "reason,count,proportion\n";
  json dist = json::array();
  r.text += "\nReason distribution\n";
  for (const auto& s : reason_distribution(records, Resolution::majority)) {
    dist_csv += csv::join({std::string(to_string(s.reason)), std::to_string(s.count),
                           full(s.proportion)}) + "\n";
    dist.push_back({{"reason", to_string(s.reason)}, {"count", s.count},
                    {"proportion", s.proportion}});
    r.text += "  " + pad(std::string(to_string(s.reason)), 28) + pad(std::to_string(s.count), 7) +
              fmt("%.3f", s.proportion) + "\n";
  }
  body["reason_distribution"] = dist;
  r.files.push_back({"reason_distribution.csv", dist_csv});

  auto resolved = resolve_reasons(records, Resolution::majority);
  auto trend = reason_trend(*corpus_, resolved);
  std::string trend_csv = "reason,year,count,published,rate\n";
  json series = json::array();
  auto emit = [&](const ReasonTrendSeries& s) {
    std::string name = s.reason ? std::string(to_string(*s.reason)) : "all";
    json pts = json::array();
    for (const auto& p : s.points) {
      trend_csv += csv::join({name, std::to_string(p.year), std::to_string(p.count),
                              std::to_string(p.published), full(p.rate)}) + "\n";
      pts.push_back({{"year", p.year}, {"count", p.count}, {"published", p.published},
                     {"rate", p.rate}});
    }
    series.push_back({{"reason", name}, {"points", pts}});
  };
  for (const auto& s : trend.top) emit(s);
  emit(trend.all_reasons);
  body["reason_trend"] = series;
  r.files.push_back({"reason_trend.csv", trend_csv});

  r.json = finish_json(manifest_json(), "annotate-stats", body);
  return r;
}

RunResult Pipeline::cohort() {
  RunResult r;
  json body = json::array();
  r.text = "kind      treatments  pairs  no_history  outside_window  insufficient\n";
  for (auto kind : kinds()) {
    const Cohort& c = cohort_for(kind);
    std::map<ExclusionReason, std::size_t> why;
    for (const auto& e : c.exclusions) ++why[e.reason];
    const std::size_t treatments = c.pairs.size() + c.exclusions.size();
    r.text += pad(std::string(to_string(kind)), 10) + pad(std::to_string(treatments), 12) +
              pad(std::to_string(c.pairs.size()), 7) +
              pad(std::to_string(why[ExclusionReason::no_impact_history]), 12) +
              pad(std::to_string(why[ExclusionReason::retraction_outside_window]), 16) +
              std::to_string(why[ExclusionReason::insufficient_controls]) + "\n";
    body.push_back({{"kind", to_string(kind)},
                    {"treatments", treatments},
                    {"pairs", c.pairs.size()},
                    {"excluded_no_impact_history", why[ExclusionReason::no_impact_history]},
                    {"excluded_retraction_outside_window",
                     why[ExclusionReason::retraction_outside_window]},
                    {"excluded_insufficient_controls", why[ExclusionReason::insufficient_controls]}});
    r.files.push_back({"cohort_" + std::string(to_string(kind)) + ".csv", cohort_csv(c)});
  }
  r.json = finish_json(manifest_json(), "cohort", {{"cohorts", body}});
  return r;
}

RunResult Pipeline::compare() {
  RunResult r;
  json rows = json::array();
  std::string csv_out =
      "kind,metric,pairs_used,pairs_excluded,median_treatment,median_control,u_statistic,p_value,"
      "mode,row\n";
  r.text = "kind      pairs  post-retraction impact       p          impact change ratio          p\n";
  const bool single = options_.kind.has_value();
  for (auto kind : kinds()) {
    const Cohort& c = cohort_for(kind);
    std::string line = pad(std::string(to_string(kind)), 10) + pad(std::to_string(c.pairs.size()), 7);
    for (auto metric : {Metric::post_impact, Metric::change_ratio}) {
      json row = {{"kind", to_string(kind)}, {"metric", to_string(metric)}};
      try {
        Comparison cmp = compare_cohorts(c.pairs, metric);
        const auto& t = cmp.test;
        std::string shaped = format_comparison(t.median_treatment, t.median_control, t.p_value);
        line += pad(shaped, 29) + pad(fmt("%.3g", t.p_value), 11);
        row["pairs_used"] = cmp.pairs_used;
        row["pairs_excluded"] = cmp.pairs_excluded;
        row["test"] = mw_json(t);
        row["row"] = shaped;
        csv_out += csv::join({std::string(to_string(kind)), std::string(to_string(metric)),
                              std::to_string(cmp.pairs_used), std::to_string(cmp.pairs_excluded),
                              full(t.median_treatment), full(t.median_control),
                              full(t.u_statistic), full(t.p_value),
                              t.mode == stats::MwMode::exact ? "exact" : "normal_approx",
                              shaped}) + "\n";
      } catch (const Error& e) {
        if (single) throw;
        line += pad("n/a", 29) + pad("-", 11);
        row["error"] = e.what();
        csv_out += csv::join({std::string(to_string(kind)), std::string(to_string(metric)),
                              "", "", "", "", "", "", "", "n/a"}) + "\n";
      }
      rows.push_back(row);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    r.text += line + "\n";
  }
  r.text += "* p < 0.05, ** p < 0.01 (two-sided Mann-Whitney U; control = mean of two matches)\n";
  r.files.push_back({"comparison.csv", csv_out});
  r.json = finish_json(manifest_json(), "compare", {{"comparisons", rows}});
  return r;
}

RunResult Pipeline::segment() {
  RunResult r;
  std::vector<TreatmentKind> ks =
      options_.kind ? std::vector<TreatmentKind>{*options_.kind}
                    : std::vector<TreatmentKind>{TreatmentKind::P_t, TreatmentKind::A_t};
  auto resolved = resolved_reasons();
  std::set<std::string> media;
  if (options_.media_list) media = read_media_list(*options_.media_list);

  std::string csv_out = "kind,segment,n,median_change_ratio\n";
  json out = json::array();
  r.text = pad("kind", 10);
  for (const char* s : kSegmentNames) r.text += pad(s, 18);
  r.text += "\n";
  for (auto kind : ks) {
    const Cohort& c = cohort_for(kind);
    auto inputs = segment_inputs(*corpus_, c.pairs, resolved, media);
    auto rows = segment_change_ratio(inputs);
    std::string line = pad(std::string(to_string(kind)), 10);
    json segs = json::array();
    for (const auto& row : rows) {
      csv_out += csv::join({std::string(to_string(kind)), row.segment, std::to_string(row.n),
                            row.median ? full(*row.median) : std::string("NA")}) + "\n";
      segs.push_back({{"segment", row.segment}, {"n", row.n},
                      {"median", optional_number(row.median)}});
      line += pad((row.median ? fmt("%.2f", *row.median) : std::string("NA")) + " (n=" +
                      std::to_string(row.n) + ")", 18);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    r.text += line + "\n";
    out.push_back({{"kind", to_string(kind)}, {"segments", segs}});
  }
  r.text += std::string("reasons from ") +
            (options_.annotations ? "annotations (majority vote)" : "retraction notices") + "\n";
  r.files.push_back({"segments.csv", csv_out});
  r.json = finish_json(manifest_json(), "segment", {{"segmentation", out}});
  return r;
}

RunResult Pipeline::topics() {
  const auto& a = assignments();
  RunResult r;
  auto ranked = top_topics(*corpus_, a, options_.top_topics);
  std::string top_csv = "rank,topic,frequency,esi_category\n";
  json top = json::array();
  r.text = "rank  topic                          retracted  esi_category\n";
  std::vector<TopicSeries> series;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& t = ranked[i];
    top_csv += csv::join({std::to_string(i + 1), t.topic, std::to_string(t.frequency),
                          t.esi_category}) + "\n";
    top.push_back({{"rank", i + 1}, {"topic", t.topic}, {"frequency", t.frequency},
                   {"esi_category", t.esi_category}});
    r.text += pad(std::to_string(i + 1), 6) + pad(t.topic, 31) + pad(std::to_string(t.frequency), 11) +
              t.esi_category + "\n";
    series.push_back(topic_series(*corpus_, a, t.topic));
  }
  json js = json::array();
  for (const auto& s : series) {
    json pts = json::array();
    for (const auto& p : s.points) {
      pts.push_back({{"year", p.year}, {"published", p.published}, {"members", p.members},
                     {"retracted", p.retracted}, {"pop", p.pop}, {"ret", p.ret}});
    }
    js.push_back({{"topic", s.topic}, {"esi_category", s.esi_category}, {"points", pts}});
  }
  r.files.push_back({"top_topics.csv", top_csv});
  r.files.push_back({"topic_series.csv", topic_series_csv(series)});
  r.json = finish_json(manifest_json(), "topics",
                       {{"topic_count", topic_universe(a).size()}, {"top_topics", top},
                        {"series", js}});
  return r;
}

RunResult Pipeline::granger() {
  const auto& a = assignments();
  RunResult r;
  std::vector<std::string> names;
  for (const auto& t : top_topics(*corpus_, a, options_.top_topics)) names.push_back(t.topic);
  auto cells = topic_granger_screen(*corpus_, a, names, options_.lags);

  std::string cells_csv =
      "topic,lags,computable,f_statistic,p_value,df_numerator,df_denominator,significant,"
      "b_smaller_than_a,note\n";
  std::string coef_csv = "topic,lags,term,value\n";
  json js = json::array();
  std::map<std::string, std::map<int, const GrangerCell*>> grid;
  for (const auto& c : cells) {
    grid[c.topic][c.lags] = &c;
    const auto& g = c.result;
    cells_csv += csv::join({c.topic, std::to_string(c.lags), c.computable ? "true" : "false",
                            c.computable ? full(g.f_statistic) : "",
                            c.computable ? full(g.p_value) : "",
                            c.computable ? std::to_string(g.df_numerator) : "",
                            c.computable ? std::to_string(g.df_denominator) : "",
                            c.significant ? "true" : "false",
                            c.b_smaller_than_a ? "true" : "false", c.note}) + "\n";
    json cell = {{"topic", c.topic}, {"lags", c.lags}, {"computable", c.computable},
                 {"significant", c.significant}, {"note", c.note}};
    if (c.computable) {
      cell["f_statistic"] = g.f_statistic;
      cell["p_value"] = g.p_value;
      cell["df_numerator"] = g.df_numerator;
      cell["df_denominator"] = g.df_denominator;
      cell["degenerate"] = g.degenerate;
      cell["b_smaller_than_a"] = c.b_smaller_than_a;
    }
    if (c.significant) {
      cell["a"] = g.a;
      cell["b"] = g.b;
      cell["intercept"] = g.intercept;
      cell["residual_variance"] = g.residual_variance;
      for (std::size_t i = 0; i < g.a.size(); ++i) {
        coef_csv += csv::join({c.topic, std::to_string(c.lags), "A" + std::to_string(i + 1),
                               full(g.a[i])}) + "\n";
      }
      for (std::size_t j = 0; j < g.b.size(); ++j) {
        coef_csv += csv::join({c.topic, std::to_string(c.lags), "B" + std::to_string(j + 1),
                               full(g.b[j])}) + "\n";
      }
      coef_csv += csv::join({c.topic, std::to_string(c.lags), "C", full(g.intercept)}) + "\n";
    }
    js.push_back(cell);
  }

  r.text = "Granger test, X = topical retraction rate, Y = topical popularity (p-values)\n";
  r.text += pad("topic", 31);
  for (int n : options_.lags) r.text += pad("n=" + std::to_string(n), 12);
  r.text += "\n";
  for (const auto& name : names) {
    std::string line = pad(name, 31);
    for (int n : options_.lags) {
      const GrangerCell* c = grid[name][n];
      std::string v = !c || !c->computable ? std::string("NC")
                                           : fmt("%.3f", c->result.p_value) +
                                                 significance_stars(c->result.p_value);
      line += pad(v, 12);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    r.text += line + "\n";
  }
  bool any = false;
  for (const auto& c : cells) {
    if (!c.significant) continue;
    if (!any) r.text += "\nCoefficients of significant cells\n";
    any = true;
    std::string line = "  " + c.topic + " n=" + std::to_string(c.lags) + ":";
    for (std::size_t i = 0; i < c.result.a.size(); ++i) {
      line += " A" + std::to_string(i + 1) + "=" + fmt("%.4f", c.result.a[i]);
    }
    for (std::size_t j = 0; j < c.result.b.size(); ++j) {
      line += " B" + std::to_string(j + 1) + "=" + fmt("%.4f", c.result.b[j]);
    }
    line += std::string(c.b_smaller_than_a ? "  (|B| < |A|)" : "  (|B| >= |A|)");
    r.text += line + "\n";
  }
  r.files.push_back({"granger.csv", cells_csv});
  r.files.push_back({"granger_coefficients.csv", coef_csv});
  r.json = finish_json(manifest_json(), "granger", {{"cells", js}});
  return r;
}

RunResult Pipeline::report() {
  RunResult out;
  json body;
  auto absorb = [&](const char* section, RunResult part) {
    json parsed = json::parse(part.json);
    body[section] = parsed["result"];
    out.text += std::string("== ") + section + " ==\n" + part.text + "\n";
    for (auto& f : part.files) out.files.push_back(std::move(f));
  };
  absorb("ingest", ingest());
  absorb("describe", describe());
  if (options_.annotations) absorb("annotate_stats", annotate_stats());
  absorb("cohort", cohort());
  absorb("compare", compare());
  absorb("segment", segment());
  if (annotator_) {
    absorb("topics", topics());
    absorb("granger", granger());
  }
  json doc;
  doc["verb"] = "report";
  doc["manifest"] = json::parse(manifest_json());
  doc["result"] = body;
  out.json = doc.dump(2) + "\n";
  out.files.push_back({"report.txt", out.text});
  std::sort(out.files.begin(), out.files.end(),
            [](const Artifact& a, const Artifact& b) { return a.name < b.name; });
  return out;
}

RunResult Pipeline::run(std::string_view verb) {
  if (verb == "ingest") return ingest();
  if (verb == "describe") return describe();
  if (verb == "annotate-stats") return annotate_stats();
  if (verb == "cohort") return cohort();
  if (verb == "compare") return compare();
  if (verb == "segment") return segment();
  if (verb == "topics") return topics();
  if (verb == "granger") return granger();
  if (verb == "report") return report();
  fail(ErrorKind::invalid_argument, "unknown verb \"" + std::string(verb) + "\"");
}

}  // namespace retract
