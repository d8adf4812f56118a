// Exercises the shared library through retract.h only.
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "retract/retract.h"

namespace {

struct Options {
  rtx_options* raw = nullptr;
  Options() { REQUIRE(rtx_options_new(&raw) == RTX_OK); }
  ~Options() { rtx_options_free(raw); }
  rtx_status set(const char* k, const std::string& v) { return rtx_options_set(raw, k, v.c_str()); }
};

struct Session {
  rtx_corpus* raw = nullptr;
  ~Session() { rtx_corpus_free(raw); }
};

struct Result {
  rtx_result* raw = nullptr;
  ~Result() { rtx_result_free(raw); }
};

const std::filesystem::path& synth_corpus() {
  static testing::TempDir dir("capi");
  static const std::filesystem::path path = [] {
    auto p = dir / "c.jsonl";
    Result r;
    const char* cfg = R"({"first_year": 2002, "papers_per_year": 200, "refs_per_paper": 8})";
    REQUIRE(rtx_synth(cfg, 1, 5, p.string().c_str(), &r.raw) == RTX_OK);
    return p;
  }();
  return path;
}

int tag_everything(void* calls, const char*, rtx_topic_sink* sink) {
  ++*static_cast<int*>(calls);
  rtx_topic_sink_add(sink, "everything");
  rtx_topic_sink_add(sink, "");
  return 0;
}

int refuse_third(void* calls, const char*, rtx_topic_sink*) {
  return ++*static_cast<int*>(calls) >= 3 ? 1 : 0;
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("status names and version") {
  CHECK(std::string(rtx_status_name(RTX_OK)) == "ok");
  CHECK(std::string(rtx_status_name(RTX_E_PARSE)) == "parse");
  CHECK(std::string(rtx_version()) == "1.0.0");
}

TEST_CASE("null arguments are rejected") {
  CHECK(rtx_options_new(nullptr) == RTX_E_INVALID_ARGUMENT);
  CHECK(std::string(rtx_last_error()).find("out") != std::string::npos);
  CHECK(rtx_corpus_open(nullptr, nullptr) == RTX_E_INVALID_ARGUMENT);
  CHECK(rtx_corpus_run(nullptr, "ingest", nullptr) == RTX_E_INVALID_ARGUMENT);
  CHECK(rtx_mann_whitney(nullptr, 1, nullptr, 1, RTX_TWO_SIDED, RTX_MW_AUTO, nullptr) ==
        RTX_E_INVALID_ARGUMENT);
  CHECK(rtx_synth(nullptr, 0, 0, nullptr, nullptr) == RTX_E_INVALID_ARGUMENT);
  rtx_options_free(nullptr);
  rtx_corpus_free(nullptr);
  rtx_result_free(nullptr);
  CHECK(rtx_corpus_paper_count(nullptr) == 0);
}

TEST_CASE("last error clears after success") {
  Options o;
  CHECK(o.set("horizon-year", "never") == RTX_E_INVALID_ARGUMENT);
  CHECK(std::strlen(rtx_last_error()) > 0);
  CHECK(o.set("horizon-year", "2012") == RTX_OK);
  CHECK(std::string(rtx_last_error()).empty());
}

TEST_CASE("errors map to status codes") {
  Options o;
  CHECK(o.set("input", "/nonexistent/x.jsonl") == RTX_OK);
  Session s;
  CHECK(rtx_corpus_open(o.raw, &s.raw) == RTX_E_IO);
  CHECK(s.raw == nullptr);

  testing::TempDir d("capi_parse");
  testing::spit(d / "bad.jsonl", "{\"paper_id\": \"A\", \"pub_year\": 2001}\n{not json\n");
  CHECK(o.set("input", (d / "bad.jsonl").string()) == RTX_OK);
  CHECK(rtx_corpus_open(o.raw, &s.raw) == RTX_E_PARSE);
  CHECK(std::string(rtx_last_error()).find("line 1") != std::string::npos);

  Result r;
  CHECK(rtx_synth("{\"papers_per_year\": -3}", 0, 0, (d / "s.jsonl").string().c_str(), &r.raw) ==
        RTX_E_INVALID_ARGUMENT);
  CHECK(rtx_synth("{\"bogus\": 1}", 0, 0, (d / "s.jsonl").string().c_str(), &r.raw) ==
        RTX_E_PARSE);

  double x[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double y[] = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  rtx_granger_result g;
  CHECK(rtx_granger(y, x, 10, 1, &g) == RTX_OK);
  CHECK(g.degenerate == 1);
  CHECK(rtx_granger(x, y, 3, 2, &g) == RTX_E_INVALID_ARGUMENT);
}

TEST_CASE("corpus session runs verbs") {
  Options o;
  REQUIRE(o.set("input", synth_corpus().string()) == RTX_OK);
  REQUIRE(o.set("timestamp", "false") == RTX_OK);
  REQUIRE(o.set("kind", "P_t") == RTX_OK);
  Session s;
  REQUIRE(rtx_corpus_open(o.raw, &s.raw) == RTX_OK);
  CHECK(rtx_corpus_paper_count(s.raw) > 2000);
  CHECK(rtx_corpus_retracted_count(s.raw) > 0);

  Result r;
  REQUIRE(rtx_corpus_run(s.raw, "cohort", &r.raw) == RTX_OK);
  auto doc = nlohmann::json::parse(rtx_result_json(r.raw));
  CHECK(doc["verb"] == "cohort");
  REQUIRE(rtx_result_file_count(r.raw) == 1);
  CHECK(std::string(rtx_result_file_name(r.raw, 0)) == "cohort_P_t.csv");
  size_t size = 0;
  const char* data = rtx_result_file_data(r.raw, 0, &size);
  CHECK(size == std::strlen(data));
  CHECK(rtx_result_file_name(r.raw, 1) == nullptr);

  testing::TempDir out("capi_out");
  REQUIRE(rtx_result_write(r.raw, out.path().string().c_str(), "cohort.json") == RTX_OK);
  CHECK(testing::slurp(out / "cohort_P_t.csv") == std::string(data, size));
  CHECK(testing::slurp(out / "cohort.json") == rtx_result_json(r.raw));

  Result bad;
  CHECK(rtx_corpus_run(s.raw, "juggle", &bad.raw) == RTX_E_INVALID_ARGUMENT);
}

TEST_CASE("annotator callback") {
  Options o;
  REQUIRE(o.set("input", synth_corpus().string()) == RTX_OK);
  Session s;
  REQUIRE(rtx_corpus_open(o.raw, &s.raw) == RTX_OK);
  int calls = 0;
  REQUIRE(rtx_corpus_set_annotator(s.raw, tag_everything, &calls) == RTX_OK);
  Result r;
  REQUIRE(rtx_corpus_run(s.raw, "topics", &r.raw) == RTX_OK);
  CHECK(static_cast<size_t>(calls) == rtx_corpus_paper_count(s.raw));
  CHECK(std::string(rtx_result_json(r.raw)).find("everything") != std::string::npos);

  Session s2;
  REQUIRE(rtx_corpus_open(o.raw, &s2.raw) == RTX_OK);
  int refused = 0;
  REQUIRE(rtx_corpus_set_annotator(s2.raw, refuse_third, &refused) == RTX_OK);
  Result r2;
  CHECK(rtx_corpus_run(s2.raw, "topics", &r2.raw) == RTX_E_DATA);
  CHECK(refused == 3);
  CHECK(r2.raw == nullptr);
  CHECK(rtx_corpus_set_annotator(s2.raw, nullptr, nullptr) == RTX_E_INVALID_ARGUMENT);
}

TEST_CASE("Mann-Whitney wrapper matches enumeration") {
  std::vector<double> a{1.5, 3.0, 7.25, 2.0}, b{4.0, 5.5, 6.0, 8.0, 0.5};
  auto ex = oracle::mann_whitney_enumerate(a, b);
  rtx_mw_result r;
  REQUIRE(rtx_mann_whitney(a.data(), a.size(), b.data(), b.size(), RTX_TWO_SIDED, RTX_MW_AUTO,
                           &r) == RTX_OK);
  CHECK(r.exact == 1);
  CHECK(r.u_statistic == ex.u);
  CHECK(std::abs(r.p_value - ex.p_two_sided) < 1e-12);
  CHECK(r.n_a == 4);
  CHECK(r.n_b == 5);
  CHECK(r.median_a == 2.5);
  CHECK(r.median_b == 5.5);
  REQUIRE(rtx_mann_whitney(a.data(), a.size(), b.data(), b.size(), RTX_LESS, RTX_MW_EXACT, &r) ==
          RTX_OK);
  CHECK(std::abs(r.p_value - ex.p_less) < 1e-12);
  REQUIRE(rtx_mann_whitney(a.data(), a.size(), b.data(), b.size(), RTX_GREATER, RTX_MW_NORMAL,
                           &r) == RTX_OK);
  CHECK(r.exact == 0);
  CHECK(rtx_mann_whitney(a.data(), 0, b.data(), b.size(), RTX_TWO_SIDED, RTX_MW_AUTO, &r) ==
        RTX_E_INVALID_ARGUMENT);
}

TEST_CASE("Fleiss wrapper") {
  const int table[] = {2, 1, 0, 0, 3, 0, 1, 1, 1, 3, 0, 0};
  double k = 0;
  REQUIRE(rtx_fleiss_kappa(table, 4, 3, &k) == RTX_OK);
  CHECK(std::abs(k - oracle::fleiss_by_pairs({{2, 1, 0}, {0, 3, 0}, {1, 1, 1}, {3, 0, 0}})) <
        1e-12);
  const int uneven[] = {2, 1, 0, 1};
  CHECK(rtx_fleiss_kappa(uneven, 2, 2, &k) == RTX_E_DATA);
  CHECK(std::string(rtx_last_error()).find("subject 1") != std::string::npos);
}

TEST_CASE("Jaccard wrapper") {
  const char* a[] = {"x", "y", "z"};
  const char* b[] = {"y", "z", "w", "y"};
  double j = 0;
  REQUIRE(rtx_jaccard(a, 3, b, 4, &j) == RTX_OK);
  CHECK(j == 0.5);
  REQUIRE(rtx_jaccard(a, 0, b, 0, &j) == RTX_OK);
  CHECK(j == 0.0);
}

TEST_CASE("normalize name into a caller buffer") {
  char buf[6];
  size_t needed = 0;
  REQUIRE(rtx_normalize_name("  Smith,  J.A. ", buf, sizeof buf, &needed) == RTX_OK);
  CHECK(needed == 8);
  CHECK(std::string(buf) == "smith");
  char big[32];
  REQUIRE(rtx_normalize_name("  Smith,  J.A. ", big, sizeof big, nullptr) == RTX_OK);
  CHECK(std::string(big) == "smith ja");
  REQUIRE(rtx_normalize_name("X", nullptr, 0, &needed) == RTX_OK);
  CHECK(needed == 1);
}

TEST_CASE("synth through the C API is deterministic") {
  testing::TempDir d("capi_synth");
  const char* cfg = R"({"first_year": 2008, "papers_per_year": 100, "refs_per_paper": 5})";
  Result a, b;
  REQUIRE(rtx_synth(cfg, 1, 77, (d / "a.jsonl").string().c_str(), &a.raw) == RTX_OK);
  REQUIRE(rtx_synth(cfg, 1, 77, (d / "b.jsonl").string().c_str(), &b.raw) == RTX_OK);
  CHECK(testing::slurp(d / "a.jsonl") == testing::slurp(d / "b.jsonl"));
  CHECK(std::string(rtx_result_text(a.raw)).find("seed 77") != std::string::npos);
  CHECK(std::string(rtx_result_json(a.raw)) == rtx_result_json(b.raw));
  REQUIRE(rtx_synth(cfg, 0, 0, (d / "c.jsonl").string().c_str(), nullptr) == RTX_OK);
  CHECK(std::filesystem::exists(d / "ground_truth.json"));
}

}  // TEST_SUITE
