#include <doctest.h>

#include <json.hpp>

#include "helpers.hpp"
#include "retract/pipeline.hpp"
#include "retract/synth.hpp"

using namespace retract;
using nlohmann::json;

namespace {

// One generated corpus shared by the suite, written once per process.
struct Generated {
  testing::TempDir dir{"pipeline"};
  std::filesystem::path corpus = dir / "c.jsonl";

  Generated() {
    auto cfg = SynthConfig::defaults();
    cfg.seed = 17;
    cfg.first_year = 2000;
    cfg.papers_per_year = 250;
    cfg.refs_per_paper = 10;
    cfg.twin_fraction = 0.5;
    write_synth_output(generate_corpus(cfg), corpus);
  }

  PipelineOptions options() const {
    PipelineOptions o;
    o.input = corpus;
    o.dictionary = dir / "dictionary.tsv";
    o.annotations = dir / "annotations.csv";
    o.media_list = dir / "media_list.txt";
    o.timestamp = false;
    o.threads = 1;
    return o;
  }
};

const Generated& generated() {
  static const Generated g;
  return g;
}

ErrorKind option_error(std::string_view key, std::string_view value) {
  PipelineOptions o;
  try {
    set_pipeline_option(o, key, value);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error for " << key << "=" << value);
  return ErrorKind::io;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("options by flag name") {
  PipelineOptions o;
  set_pipeline_option(o, "horizon-year", "2012");
  set_pipeline_option(o, "yr-in-pre", "false");
  set_pipeline_option(o, "lags", "1,4");
  set_pipeline_option(o, "kind", "A_t");
  set_pipeline_option(o, "format", "csv");
  set_pipeline_option(o, "seed", "9");
  set_pipeline_option(o, "top-topics", "3");
  set_pipeline_option(o, "timestamp", "false");
  CHECK(o.horizon_year == 2012);
  CHECK_FALSE(o.yr_in_pre);
  CHECK(o.lags == std::vector<int>{1, 4});
  CHECK(o.kind == TreatmentKind::A_t);
  CHECK(o.format == InputFormat::csv);
  CHECK(o.seeds == std::vector<std::uint64_t>{9});
  CHECK(o.top_topics == 3);
  CHECK_FALSE(o.timestamp);
  set_pipeline_option(o, "kind", "all");
  CHECK_FALSE(o.kind.has_value());
}

TEST_CASE("option errors") {
  CHECK(option_error("no-such", "1") == ErrorKind::invalid_argument);
  CHECK(option_error("horizon-year", "soon") == ErrorKind::invalid_argument);
  CHECK(option_error("lags", "0") == ErrorKind::invalid_argument);
  CHECK(option_error("lags", "") == ErrorKind::invalid_argument);
  CHECK(option_error("kind", "P_x") == ErrorKind::invalid_argument);
  CHECK(option_error("format", "xml") == ErrorKind::invalid_argument);
  CHECK(option_error("seed", "-1") == ErrorKind::invalid_argument);
  CHECK(option_error("yr-in-pre", "maybe") == ErrorKind::invalid_argument);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("every verb yields a manifest") {
  auto p = Pipeline::load(generated().options());
  for (const char* verb : {"ingest", "describe", "annotate-stats", "cohort", "compare", "segment",
                           "topics", "granger"}) {
    CAPTURE(verb);
    auto r = p.run(verb);
    CHECK_FALSE(r.text.empty());
    auto doc = json::parse(r.json);
    CHECK(doc["manifest"]["tool"] == "rtx");
    CHECK(doc["manifest"]["version"] == std::string(kToolVersion));
    CHECK(doc["manifest"]["timestamp"].is_null());
    CHECK(doc["manifest"]["modules"].size() == 8);
    CHECK(doc["result"].is_object());
    const auto& inputs = doc["manifest"]["inputs"];
    REQUIRE(inputs.size() == 4);
    CHECK(inputs[0]["fnv1a64"] == fnv1a_hex(testing::slurp(generated().corpus)));
  }
  CHECK_THROWS_AS(p.run("dance"), Error);
}

TEST_CASE("ingest counts agree with the corpus") {
  auto p = Pipeline::load(generated().options());
  auto doc = json::parse(p.ingest().json);
  CHECK(doc["result"]["papers"] == p.corpus().size());
  CHECK(doc["result"]["retracted"] == detect_retractions(p.corpus()).size());
  CHECK(doc["result"]["dangling_references"] == 0);
}

TEST_CASE("compare rows use the cached cohorts") {
  auto p = Pipeline::load(generated().options());
  auto doc = json::parse(p.compare().json);
  const auto& rows = doc["result"]["comparisons"];
  CHECK(rows.size() == 2 * std::size(kAllTreatmentKinds));
  const auto& pt = p.cohort_for(TreatmentKind::P_t);
  for (const auto& row : rows) {
    if (row["kind"] != "P_t" || row.contains("error")) continue;
    auto metric = row["metric"] == "post_impact" ? Metric::post_impact : Metric::change_ratio;
    auto direct = compare_cohorts(pt.pairs, metric);
    CHECK(row["test"]["p_value"].get<double>() == direct.test.p_value);
    CHECK(row["pairs_used"] == direct.pairs_used);
  }
}

TEST_CASE("single kind propagates errors instead of n/a rows") {
  auto o = generated().options();
  o.kind = TreatmentKind::P_t;
  auto p = Pipeline::load(o);
  auto doc = json::parse(p.compare().json);
  CHECK(doc["result"]["comparisons"].size() == 2);
  CHECK(doc["manifest"]["config"]["kind"] == "P_t");
}

TEST_CASE("segments are reported in fixed order") {
  auto p = Pipeline::load(generated().options());
  auto doc = json::parse(p.segment().json);
  const auto& seg = doc["result"]["segmentation"];
  REQUIRE(seg.size() == 2);
  for (const auto& k : seg) {
    REQUIRE(k["segments"].size() == std::size(kSegmentNames));
    for (std::size_t i = 0; i < std::size(kSegmentNames); ++i) {
      CHECK(k["segments"][i]["segment"] == kSegmentNames[i]);
    }
  }
}

TEST_CASE("report is deterministic without a timestamp") {
  auto a = Pipeline::load(generated().options()).report();
  auto b = Pipeline::load(generated().options()).report();
  CHECK(a.json == b.json);
  CHECK(a.text == b.text);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].name == b.files[i].name);
    CHECK(a.files[i].content == b.files[i].content);
    if (i) CHECK(a.files[i - 1].name < a.files[i].name);
  }
  auto doc = json::parse(a.json);
  for (const char* section : {"ingest", "describe", "annotate_stats", "cohort", "compare",
                              "segment", "topics", "granger"}) {
    CHECK(doc["result"].contains(section));
  }
}

TEST_CASE("timestamps appear only when requested") {
  auto o = generated().options();
  o.timestamp = true;
  auto doc = json::parse(Pipeline::load(o).ingest().json);
  CHECK(doc["manifest"]["timestamp"].is_string());
}

TEST_CASE("write_result") {
  testing::TempDir d("write_result");
  RunResult r;
  r.json = "{}\n";
  r.files = {{"a.csv", "x\n"}, {"b.txt", "y"}};
  write_result(r, d / "nested" / "out", "run.json");
  CHECK(testing::slurp(d / "nested" / "out" / "a.csv") == "x\n");
  CHECK(testing::slurp(d / "nested" / "out" / "b.txt") == "y");
  CHECK(testing::slurp(d / "nested" / "out" / "run.json") == "{}\n");
  testing::spit(d / "file", "");
  CHECK_THROWS_AS(write_result(r, d / "file" / "sub", "run.json"), Error);
}

TEST_CASE("missing input is an io error") {
  PipelineOptions o;
  o.input = "/nonexistent/corpus.jsonl";
  try {
    Pipeline::load(o);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}

}  // TEST_SUITE
