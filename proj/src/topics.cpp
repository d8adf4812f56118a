#include "retract/topics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "retract/csv.hpp"

namespace retract {

namespace {

constexpr std::string_view kModule = "topics";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, kModule, msg);
}

bool word_char(unsigned char c) { return c >= 0x80 || std::isalnum(c) || c == '-'; }

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fixed(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::vector<std::string> title_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (word_char(c)) {
      cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

DictionaryAnnotator::DictionaryAnnotator(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  for (const auto& [phrase, topic] : entries) {
    auto tokens = title_tokens(phrase);
    if (tokens.empty() || topic.empty()) continue;
    longest_ = std::max(longest_, tokens.size());
    phrases_[std::move(tokens)] = topic;
  }
}

DictionaryAnnotator DictionaryAnnotator::parse(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      fail(ErrorKind::parse, "dictionary line " + std::to_string(line_no) +
                                 ": expected phrase<TAB>topic_key");
    }
    entries.emplace_back(trim(line.substr(0, tab)), trim(line.substr(tab + 1)));
  }
  return DictionaryAnnotator(entries);
}

DictionaryAnnotator DictionaryAnnotator::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open dictionary " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

TopicSet DictionaryAnnotator::annotate(std::string_view title) const {
  TopicSet out;
  auto tokens = title_tokens(title);
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(longest_, tokens.size() - i); len > 0; --len) {
      std::vector<std::string> key(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(i + len));
      if (auto it = phrases_.find(key); it != phrases_.end()) {
        out.insert(it->second);
        matched = len;
        break;
      }
    }
    i += matched ? matched : 1;
  }
  return out;
}

TopicAssignments annotate_titles(const Corpus& corpus, const Annotator& annotator) {
  TopicAssignments out;
  for (const auto& p : corpus.papers()) out[p.paper_id] = annotator.annotate(p.title);
  return out;
}

TopicSet topic_universe(const TopicAssignments& assignments) {
  TopicSet k;
  for (const auto& [id, topics] : assignments) k.insert(topics.begin(), topics.end());
  return k;
}

TopicSeries topic_series(const Corpus& corpus, const TopicAssignments& assignments,
                         const std::string& topic) {
  std::map<int, TopicPoint> points;
  std::map<std::string, std::size_t> esi;
  bool known = false;
  for (int y = corpus.first_year(); y <= corpus.last_year(); ++y) points[y].year = y;
  for (Corpus::Index i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus.paper(i);
    auto& pt = points[p.pub_year];
    ++pt.published;
    auto it = assignments.find(p.paper_id);
    if (it == assignments.end() || !it->second.contains(topic)) continue;
    known = true;
    ++pt.members;
    if (corpus.is_retracted(i)) ++pt.retracted;
    ++esi[p.esi_category];
  }
  if (!known) fail(ErrorKind::data, "topic \"" + topic + "\" is not in the topic set");

  TopicSeries s;
  s.topic = topic;
  std::size_t best = 0;
  for (const auto& [cat, n] : esi) {
    if (n > best) {
      best = n;
      s.esi_category = cat;
    }
  }
  for (auto& [year, pt] : points) {
    if (pt.published > 0) {
      pt.pop = static_cast<double>(pt.members) / static_cast<double>(pt.published);
      pt.ret = static_cast<double>(pt.retracted) / static_cast<double>(pt.published);
    }
    s.points.push_back(pt);
  }
  return s;
}

std::vector<TopicRank> top_topics(const Corpus& corpus, const TopicAssignments& assignments,
                                  std::size_t limit) {
  std::map<std::string, std::size_t> freq;
  std::map<std::string, std::map<std::string, std::size_t>> esi;
  for (Corpus::Index i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus.paper(i);
    auto it = assignments.find(p.paper_id);
    if (it == assignments.end()) continue;
    for (const auto& t : it->second) {
      ++esi[t][p.esi_category];
      if (corpus.is_retracted(i)) ++freq[t];
    }
  }
  std::vector<TopicRank> ranked;
  for (const auto& [topic, n] : freq) {
    TopicRank r{topic, n, {}};
    std::size_t best = 0;
    for (const auto& [cat, c] : esi[topic]) {
      if (c > best) {
        best = c;
        r.esi_category = cat;
      }
    }
    ranked.push_back(std::move(r));
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const TopicRank& a, const TopicRank& b) {
    return a.frequency > b.frequency;
  });
  if (ranked.size() > limit) ranked.resize(limit);
  return ranked;
}

std::vector<GrangerCell> topic_granger_screen(const Corpus& corpus,
                                              const TopicAssignments& assignments,
                                              const std::vector<std::string>& topics,
                                              const std::vector<int>& lags) {
  std::vector<GrangerCell> cells;
  for (const auto& topic : topics) {
    TopicSeries s = topic_series(corpus, assignments, topic);
    std::vector<double> x, y;
    for (const auto& pt : s.points) {
      x.push_back(pt.ret);
      y.push_back(pt.pop);
    }
    for (int n : lags) {
      GrangerCell cell;
      cell.topic = topic;
      cell.lags = n;
      if (n < 1 || x.size() < stats::granger_min_length(n)) {
        cell.note = "series too short";
        cells.push_back(std::move(cell));
        continue;
      }
      try {
        cell.result = stats::granger_test(x, y, n);
        cell.computable = true;
      } catch (const Error& e) {
        cell.note = e.what();
      }
      if (cell.computable) {
        cell.significant = !cell.result.degenerate && cell.result.p_value < 0.05;
        double max_a = 0.0, max_b = 0.0;
        for (double v : cell.result.a) max_a = std::max(max_a, std::fabs(v));
        for (double v : cell.result.b) max_b = std::max(max_b, std::fabs(v));
        cell.b_smaller_than_a = max_b < max_a;
        if (cell.result.degenerate) cell.note = "retraction series carries no information";
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::string topic_series_csv(const std::vector<TopicSeries>& series) {
  std::string out = "topic,year,pop,ret\n";
  for (const auto& s : series) {
    for (const auto& pt : s.points) {
      out += csv::join({s.topic, std::to_string(pt.year), fixed(pt.pop), fixed(pt.ret)});
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace retract
