#include <doctest.h>

#include "helpers.hpp"
#include "retract/synth.hpp"
#include "retract/topics.hpp"

using namespace retract;
using testing::paper;
using testing::retracted;

namespace {

DictionaryAnnotator dict() {
  return DictionaryAnnotator::parse(
      "# phrase\ttopic\n"
      "gene expression\tgene_expression\n"
      "gene\tgene\n"
      "apoptosis\tapoptosis\n"
      "tumor\ttumor\n"
      "\n"
      "T-cell receptor\tt_cell_receptor\n");
}

PaperRecord titled(std::string id, int year, std::string title) {
  auto p = paper(std::move(id), year);
  p.title = std::move(title);
  return p;
}

}  // namespace

TEST_SUITE("topics") {

TEST_CASE("dictionary annotator") {
  auto d = dict();
  CHECK(d.size() == 5);
  CHECK(d.annotate("Apoptosis in tumor cells") == TopicSet{"apoptosis", "tumor"});
  CHECK(d.annotate("Nothing relevant here").empty());
  CHECK(d.annotate("Regulation of GENE EXPRESSION") == TopicSet{"gene_expression"});
  CHECK(d.annotate("Gene expression and gene dosage") == TopicSet{"gene", "gene_expression"});
  CHECK(d.annotate("The T-cell receptor repertoire") == TopicSet{"t_cell_receptor"});
  CHECK(d.annotate("Genes and generators").empty());
  CHECK(d.annotate("gene, expression").size() == 1);
}

TEST_CASE("dictionary parse errors") {
  CHECK_THROWS_AS(DictionaryAnnotator::parse("no tab here\n"), Error);
  CHECK_THROWS_AS(DictionaryAnnotator::from_file("/nonexistent/dict.tsv"), Error);
}

TEST_CASE("title tokens") {
  CHECK(title_tokens("Gene-Expression, in (T-cell) Receptors!") ==
        std::vector<std::string>{"gene-expression", "in", "t-cell", "receptors"});
}

TEST_CASE("callback annotator") {
  CallbackAnnotator cb([](std::string_view t) {
    return t.size() > 10 ? TopicSet{"long"} : TopicSet{};
  });
  auto c = Corpus::build({titled("A", 2001, "A rather long title"), titled("B", 2001, "Short")});
  auto a = annotate_titles(c, cb);
  CHECK(a.at("A") == TopicSet{"long"});
  CHECK(a.at("B").empty());
  CHECK(topic_universe(a) == TopicSet{"long"});
}

TEST_CASE("topic series: 3 of 10 papers in a year, 1 retracted") {
  std::vector<PaperRecord> recs;
  for (int i = 0; i < 10; ++i) {
    recs.push_back(titled("P" + std::to_string(i), 2001, i < 3 ? "Apoptosis study" : "Other"));
  }
  recs[0] = retracted(recs[0], 2003);
  for (int i = 0; i < 4; ++i) recs.push_back(titled("Q" + std::to_string(i), 2003, "Other"));
  auto c = Corpus::build(recs);
  auto a = annotate_titles(c, dict());
  auto s = topic_series(c, a, "apoptosis");
  REQUIRE(s.points.size() == 3);  // 2001..2003, 2002 empty
  CHECK(s.points[0].year == 2001);
  CHECK(s.points[0].published == 10);
  CHECK(s.points[0].members == 3);
  CHECK(s.points[0].retracted == 1);
  CHECK(s.points[0].pop == doctest::Approx(0.3));
  CHECK(s.points[0].ret == doctest::Approx(0.1));
  CHECK(s.points[1].published == 0);
  CHECK(s.points[1].pop == 0.0);
  CHECK(s.points[2].pop == 0.0);
  CHECK(s.esi_category == "chemistry");
  CHECK_THROWS_AS(topic_series(c, a, "tumor"), Error);
}

TEST_CASE("topic on every paper has Pop 1; unretracted topic has Ret 0") {
  auto c = Corpus::build({titled("A", 2001, "Tumor one"), titled("B", 2002, "Tumor two"),
                          retracted(titled("C", 2002, "Tumor gene"), 2004)});
  auto a = annotate_titles(c, dict());
  for (const auto& p : topic_series(c, a, "tumor").points) CHECK(p.pop == 1.0);
  for (const auto& p : topic_series(c, a, "gene").points) {
    CHECK(p.ret <= p.pop);
  }
  auto g = topic_series(c, a, "gene");
  CHECK(g.points[1].ret == doctest::Approx(0.5));
}

TEST_CASE("top topics rank by retracted frequency, ties by name") {
  std::vector<PaperRecord> recs;
  int n = 0;
  auto add = [&](const std::string& title, int count) {
    for (int i = 0; i < count; ++i) {
      recs.push_back(retracted(titled("R" + std::to_string(n++), 2001, title), 2002));
    }
  };
  add("Tumor", 5);
  add("Gene", 3);
  add("Apoptosis", 3);
  for (int i = 0; i < 9; ++i) recs.push_back(titled("N" + std::to_string(i), 2001, "Gene"));
  auto c = Corpus::build(recs);
  auto a = annotate_titles(c, dict());
  auto top = top_topics(c, a, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].topic == "tumor");
  CHECK(top[0].frequency == 5);
  CHECK(top[1].topic == "apoptosis");
  CHECK(top_topics(Corpus::build({titled("X", 2001, "Gene")}), a, 5).empty());
}

TEST_CASE("series invariants on a generated corpus") {
  auto cfg = SynthConfig::defaults();
  cfg.papers_per_year = 200;
  cfg.first_year = 2000;
  cfg.refs_per_paper = 8;
  cfg.seed = 3;
  auto out = generate_corpus(cfg);
  auto c = Corpus::build(out.papers);
  auto a = annotate_titles(c, DictionaryAnnotator::parse(out.dictionary_tsv));
  auto rates = annual_retraction_rate(c);
  for (const auto& k : topic_universe(a)) {
    auto s = topic_series(c, a, k);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto& p = s.points[i];
      CHECK(p.pop >= 0.0);
      CHECK(p.pop <= 1.0);
      CHECK(p.ret <= p.pop);
      CHECK(p.ret <= rates[i].rate + 1e-15);
    }
  }
}

TEST_CASE("constant retraction series is never significant") {
  std::vector<PaperRecord> recs;
  for (int y = 1990; y <= 2014; ++y) {
    for (int i = 0; i < 4 + (y * 7) % 5; ++i) {
      recs.push_back(titled("P" + std::to_string(y) + "_" + std::to_string(i), y,
                            i % 2 ? "Tumor" : "Other"));
    }
  }
  auto c = Corpus::build(recs);
  auto a = annotate_titles(c, dict());
  auto cells = topic_granger_screen(c, a, {"tumor"}, {1, 2, 3});
  REQUIRE(cells.size() == 3);
  for (const auto& cell : cells) {
    CHECK(cell.computable);
    CHECK_FALSE(cell.significant);
  }
}

TEST_CASE("short series are marked not computable") {
  std::vector<PaperRecord> recs;
  for (int y = 2010; y <= 2014; ++y) {
    for (int i = 0; i <= y % 3; ++i) {
      recs.push_back(titled("P" + std::to_string(y) + std::to_string(i), y, i ? "Other" : "Tumor"));
    }
  }
  auto c = Corpus::build(recs);
  auto a = annotate_titles(c, dict());
  auto cells = topic_granger_screen(c, a, {"tumor"}, {1, 2});
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].computable);
  CHECK_FALSE(cells[1].computable);
  CHECK_FALSE(cells[1].note.empty());
}

TEST_CASE("planted coupling is significant at the planted lag") {
  auto cfg = SynthConfig::defaults();
  // Year-to-year variation in the retraction rate gives the regressor signal.
  const double rates[] = {0.01, 0.06, 0.02, 0.08, 0.01, 0.05, 0.09, 0.02, 0.04, 0.1, 0.01, 0.07,
                          0.03, 0.09, 0.02, 0.06, 0.01, 0.08, 0.03, 0.1,  0.02, 0.07, 0.01, 0.05,
                          0.04};
  for (int y = 1990; y <= 2014; ++y) cfg.retraction_schedule[y] = rates[y - 1990];
  cfg.coupling = SynthCoupling{"apoptosis", 2, 4.0};
  int significant = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    cfg.seed = seed;
    auto out = generate_corpus(cfg);
    auto c = Corpus::build(out.papers);
    auto a = annotate_titles(c, DictionaryAnnotator::parse(out.dictionary_tsv));
    auto cells = topic_granger_screen(c, a, {"apoptosis"}, {2});
    REQUIRE(cells.size() == 1);
    significant += cells[0].significant ? 1 : 0;
  }
  CHECK(significant == 3);
}

TEST_CASE("series CSV") {
  TopicSeries s{"tumor", "chemistry", {{2001, 10, 3, 1, 0.3, 0.1}}};
  CHECK(topic_series_csv({s}) == "topic,year,pop,ret\ntumor,2001,0.3,0.1\n");
}

}  // TEST_SUITE
