// Runs the rtx binary as a subprocess and checks exit codes and outputs.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <map>
#include <string>

#include "helpers.hpp"

namespace {

struct Run {
  int code;
  std::string out;
};

Run rtx(const std::string& args) {
  std::string cmd = std::string(RTX_CLI) + " " + args + " 2>&1";
  Run r{-1, {}};
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::map<std::string, std::string> directory_contents(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    files[e.path().filename().string()] = testing::slurp(e.path());
  }
  return files;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and help") {
  auto v = rtx("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("1.0.0") != std::string::npos);
  CHECK(rtx("--help").code == 0);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(rtx("").code == 2);
  CHECK(rtx("frobnicate").code == 2);
  CHECK(rtx("describe").code == 2);
  CHECK(rtx("synth --seed 3").code == 2);
  CHECK(rtx("topics corpus.jsonl").code == 2);
  CHECK(rtx("report corpus.jsonl").code == 2);
  CHECK(rtx("describe x.jsonl --format xml").code == 2);
  CHECK(rtx("compare x.jsonl --horizon-year later").code == 2);
}

TEST_CASE("data errors exit with 1") {
  testing::TempDir d("cli_err");
  auto r = rtx("describe " + q(d / "missing.jsonl"));
  CHECK(r.code == 1);
  CHECK(r.out.find("rtx: error:") != std::string::npos);
  testing::spit(d / "bad.jsonl", "{oops\n");
  CHECK(rtx("ingest " + q(d / "bad.jsonl")).code == 1);
  testing::spit(d / "cfg.json", "{\"no_such_key\": 1}");
  CHECK(rtx("synth --config " + q(d / "cfg.json") + " --out " + q(d / "c.jsonl")).code == 1);
}

TEST_CASE("invalid option values map to 2 through the library") {
  testing::TempDir d("cli_kind");
  CHECK(rtx("synth --seed 1 --out " + q(d / "c.jsonl")).code == 0);
  CHECK(rtx("compare " + q(d / "c.jsonl") + " --kind X_t").code == 2);
  CHECK(rtx("granger " + q(d / "c.jsonl") + " --dictionary " + q(d / "dictionary.tsv") +
            " --lags 0").code == 2);
}

TEST_CASE("synth, ingest and report are reproducible") {
  testing::TempDir d("cli_repro");
  const auto corpus = d / "c.jsonl";
  std::string first_corpus;
  for (const char* run : {"a", "b"}) {
    auto s = rtx("synth --seed 11 --out " + q(corpus));
    REQUIRE(s.code == 0);
    CHECK(s.out.find("seed 11") != std::string::npos);
    if (first_corpus.empty()) first_corpus = testing::slurp(corpus);
    CHECK(testing::slurp(corpus) == first_corpus);
    REQUIRE(rtx("ingest " + q(corpus)).code == 0);
    auto r = rtx("report " + q(corpus) + " --out-dir " + q(d / run) + " --no-timestamp" +
                 " --dictionary " + q(d / "dictionary.tsv") + " --annotations " +
                 q(d / "annotations.csv") + " --media-list " + q(d / "media_list.txt"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("== compare ==") != std::string::npos);
  }
  auto a = directory_contents(d / "a");
  auto b = directory_contents(d / "b");
  CHECK(a.count("report.json") == 1);
  CHECK(a.count("comparison.csv") == 1);
  CHECK(a == b);
}

}  // TEST_SUITE
