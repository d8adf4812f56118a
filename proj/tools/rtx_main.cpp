// rtx: command-line front end. Talks to the library only through retract.h.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "retract/retract.h"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

int exit_code(rtx_status s) {
  return s == RTX_E_INVALID_ARGUMENT ? kExitUsage : kExitData;
}

int report_failure(rtx_status s) {
  std::cerr << "rtx: error: " << rtx_last_error() << "\n";
  return exit_code(s);
}

struct Flags {
  std::string input;
  std::string format = "jsonl";
  std::string out_dir;
  std::optional<long long> seed;
  std::string kind;
  std::string lags;
  std::string yr_in_pre;
  std::string media_list;
  std::string dictionary;
  std::string annotations;
  std::optional<int> horizon_year;
  std::optional<int> top_topics;
  std::optional<unsigned> threads;
  bool no_timestamp = false;
  // synth
  std::string config;
  std::string out;
};

using OptionsPtr = std::unique_ptr<rtx_options, decltype(&rtx_options_free)>;
using CorpusPtr = std::unique_ptr<rtx_corpus, decltype(&rtx_corpus_free)>;
using ResultPtr = std::unique_ptr<rtx_result, decltype(&rtx_result_free)>;

rtx_status build_options(const Flags& f, rtx_options** out) {
  rtx_status s = rtx_options_new(out);
  if (s != RTX_OK) return s;
  auto set = [&](const char* key, const std::string& value) {
    if (s == RTX_OK) s = rtx_options_set(*out, key, value.c_str());
  };
  set("input", f.input);
  set("format", f.format);
  if (f.seed) set("seed", std::to_string(*f.seed));
  if (!f.kind.empty()) set("kind", f.kind);
  if (!f.lags.empty()) set("lags", f.lags);
  if (!f.yr_in_pre.empty()) set("yr-in-pre", f.yr_in_pre);
  if (!f.media_list.empty()) set("media-list", f.media_list);
  if (!f.dictionary.empty()) set("dictionary", f.dictionary);
  if (!f.annotations.empty()) set("annotations", f.annotations);
  if (f.horizon_year) set("horizon-year", std::to_string(*f.horizon_year));
  if (f.top_topics) set("top-topics", std::to_string(*f.top_topics));
  if (f.threads) set("threads", std::to_string(*f.threads));
  if (f.no_timestamp) set("timestamp", "false");
  return s;
}

int run_verb(const std::string& verb, const Flags& f) {
  if (f.input.empty()) {
    std::cerr << "rtx " << verb << ": an input corpus is required (--input or positional)\n";
    return kExitUsage;
  }
  rtx_options* raw_options = nullptr;
  rtx_status s = build_options(f, &raw_options);
  OptionsPtr options(raw_options, rtx_options_free);
  if (s != RTX_OK) return report_failure(s);

  rtx_corpus* raw_corpus = nullptr;
  s = rtx_corpus_open(options.get(), &raw_corpus);
  CorpusPtr corpus(raw_corpus, rtx_corpus_free);
  if (s != RTX_OK) return report_failure(s);

  rtx_result* raw_result = nullptr;
  s = rtx_corpus_run(corpus.get(), verb.c_str(), &raw_result);
  ResultPtr result(raw_result, rtx_result_free);
  if (s != RTX_OK) return report_failure(s);

  std::cout << rtx_result_text(result.get());
  if (!f.out_dir.empty()) {
    std::string json_name = verb + ".json";
    s = rtx_result_write(result.get(), f.out_dir.c_str(), json_name.c_str());
    if (s != RTX_OK) return report_failure(s);
  }
  return 0;
}

int run_synth(const Flags& f) {
  std::string config_text;
  if (!f.config.empty()) {
    std::ifstream in(f.config, std::ios::binary);
    if (!in) {
      std::cerr << "rtx: error: cli: cannot open config " << f.config << "\n";
      return kExitData;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    config_text = ss.str();
  }
  if (f.seed && *f.seed < 0) {
    std::cerr << "rtx synth: --seed must be >= 0\n";
    return kExitUsage;
  }
  rtx_result* raw = nullptr;
  rtx_status s = rtx_synth(f.config.empty() ? nullptr : config_text.c_str(), f.seed ? 1 : 0,
                           f.seed ? static_cast<uint64_t>(*f.seed) : 0, f.out.c_str(), &raw);
  ResultPtr result(raw, rtx_result_free);
  if (s != RTX_OK) return report_failure(s);
  std::cout << rtx_result_text(result.get());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retraction impact analysis over citation corpora"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rtx_version()));
  Flags f;

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input,input", f.input, "Corpus file (JSONL or CSV)");
    sub->add_option("--format", f.format, "Input format")->check(CLI::IsMember({"jsonl", "csv"}));
    sub->add_option("--out-dir", f.out_dir, "Write CSV/JSON artifacts to this directory");
    sub->add_option("--seed", f.seed, "Seed recorded in the run manifest");
    sub->add_flag("--no-timestamp", f.no_timestamp, "Omit the manifest timestamp");
    sub->add_option("--threads", f.threads, "Worker threads (0 = hardware concurrency)");
  };
  auto add_impact = [&](CLI::App* sub) {
    sub->add_option("--horizon-year", f.horizon_year, "Last year of impact curves");
    sub->add_option("--yr-in-pre", f.yr_in_pre,
                    "Count the retraction year in the pre window (true/false)");
    sub->add_option("--kind", f.kind, "Treatment kind (P_t, A_t, I_t, P_citing, P_coref, "
                                      "A_coaut or all)");
  };
  auto add_segment = [&](CLI::App* sub) {
    sub->add_option("--media-list", f.media_list, "Media-covered author names, one per line");
    sub->add_option("--annotations", f.annotations, "Reason annotations CSV");
  };
  auto add_topics = [&](CLI::App* sub) {
    sub->add_option("--dictionary", f.dictionary, "Topic dictionary (phrase<TAB>topic)");
    sub->add_option("--top-topics", f.top_topics, "Number of top retracted topics");
  };

  auto* ingest = app.add_subcommand("ingest", "Validate and summarize a corpus");
  add_input(ingest);
  auto* describe = app.add_subcommand("describe", "Retraction rate, delay, citation and ESI tables");
  add_input(describe);
  auto* annotate = app.add_subcommand("annotate-stats", "Rater agreement and reason trends");
  add_input(annotate);
  annotate->add_option("--annotations", f.annotations, "Reason annotations CSV")->required();
  auto* cohort = app.add_subcommand("cohort", "Build treatment/control cohorts");
  add_input(cohort);
  add_impact(cohort);
  auto* compare = app.add_subcommand("compare", "Mann-Whitney comparison of cohorts");
  add_input(compare);
  add_impact(compare);
  auto* segment = app.add_subcommand("segment", "Change ratio by retraction reason");
  add_input(segment);
  add_impact(segment);
  add_segment(segment);
  auto* topics = app.add_subcommand("topics", "Topic popularity and retraction series");
  add_input(topics);
  add_topics(topics);
  topics->get_option("--dictionary")->required();
  auto* granger = app.add_subcommand("granger", "Granger screen of retraction vs popularity");
  add_input(granger);
  add_topics(granger);
  granger->get_option("--dictionary")->required();
  granger->add_option("--lags", f.lags, "Comma-separated lag orders (default 1,2,3)");
  auto* report = app.add_subcommand("report", "Run every analysis into one directory");
  add_input(report);
  add_impact(report);
  add_segment(report);
  add_topics(report);
  report->add_option("--lags", f.lags, "Comma-separated lag orders (default 1,2,3)");
  report->get_option("--out-dir")->required();
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth->add_option("--seed", f.seed, "Random seed (overrides the config)");
  synth->add_option("--config", f.config, "JSON generator config");
  synth->add_option("--out,out", f.out, "Corpus output path (JSONL)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen == synth) return run_synth(f);
  return run_verb(chosen->get_name(), f);
}
