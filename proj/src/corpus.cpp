#include "retract/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "retract/csv.hpp"

namespace retract {

namespace {

using nlohmann::json;

constexpr std::string_view kModule = "corpus";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, kModule, msg);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Record-level invariants. Returns an empty string when the record is valid.
std::string check_record(const PaperRecord& r, const CorpusOptions& options) {
  if (r.paper_id.empty()) return "empty paper_id";
  if (r.pub_year < options.min_year || r.pub_year > options.max_year) {
    return "paper " + r.paper_id + ": pub_year " + std::to_string(r.pub_year) +
           " outside corpus window " + std::to_string(options.min_year) + "-" +
           std::to_string(options.max_year);
  }
  if (r.pub_month && (*r.pub_month < 1 || *r.pub_month > 12)) {
    return "paper " + r.paper_id + ": pub_month " + std::to_string(*r.pub_month) +
           " outside 1-12";
  }
  if (!is_esi_category(r.esi_category)) {
    return "paper " + r.paper_id + ": unknown esi_category \"" + r.esi_category + "\"";
  }
  std::set<std::string_view> seen;
  for (const auto& ref : r.references) {
    if (ref == r.paper_id) return "self-citation edge in paper " + r.paper_id;
    if (!seen.insert(ref).second) {
      return "paper " + r.paper_id + ": duplicate reference " + ref;
    }
  }
  if (r.retraction && r.retraction->retraction_year < r.pub_year) {
    return "paper " + r.paper_id + ": retraction_year " +
           std::to_string(r.retraction->retraction_year) + " precedes pub_year " +
           std::to_string(r.pub_year);
  }
  return {};
}

std::vector<std::string> string_array(const json& j, const char* field) {
  std::vector<std::string> out;
  if (!j.contains(field) || j.at(field).is_null()) return out;
  const json& arr = j.at(field);
  if (!arr.is_array()) throw std::invalid_argument(std::string(field) + " must be an array");
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_string()) {
      throw std::invalid_argument(std::string(field) + " must contain strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string required_string(const json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_string()) {
    throw std::invalid_argument(std::string("missing or non-string field ") + field);
  }
  return j.at(field).get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  if (!j.at(field).is_string()) {
    throw std::invalid_argument(std::string("non-string field ") + field);
  }
  return j.at(field).get<std::string>();
}

int required_int(const json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_number_integer()) {
    throw std::invalid_argument(std::string("missing or non-integer field ") + field);
  }
  return j.at(field).get<int>();
}

RetractionNotice parse_notice(int year, std::optional<std::string> reason,
                              std::optional<std::string> requester) {
  RetractionNotice n;
  n.retraction_year = year;
  if (reason && *reason != "unknown" && !reason->empty()) {
    n.reason = parse_reason(*reason);
    if (!n.reason) throw std::invalid_argument("unknown reason \"" + *reason + "\"");
  }
  if (requester && !requester->empty()) {
    auto rq = parse_requester(*requester);
    if (!rq) throw std::invalid_argument("unknown requester \"" + *requester + "\"");
    n.requester = *rq;
  }
  return n;
}

PaperRecord record_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  PaperRecord r;
  r.paper_id = required_string(j, "paper_id");
  r.title = required_string(j, "title");
  r.pub_year = required_int(j, "pub_year");
  if (j.contains("pub_month") && !j.at("pub_month").is_null()) {
    r.pub_month = required_int(j, "pub_month");
  }
  r.journal = normalize_name(optional_string(j, "journal").value_or(""));
  r.esi_category = optional_string(j, "esi_category").value_or("");
  r.author_names = string_array(j, "author_names");
  r.institution_names = string_array(j, "institution_names");
  r.references = string_array(j, "references");
  if (j.contains("retraction") && !j.at("retraction").is_null()) {
    const json& n = j.at("retraction");
    if (!n.is_object()) throw std::invalid_argument("retraction must be an object");
    r.retraction = parse_notice(required_int(n, "retraction_year"),
                                optional_string(n, "reason"),
                                optional_string(n, "requester"));
  }
  return r;
}

int parse_int_field(const std::string& s, const char* field) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("non-integer ") + field + " \"" + s + "\"");
  }
  if (pos != s.size()) {
    throw std::invalid_argument(std::string("non-integer ") + field + " \"" + s + "\"");
  }
  return v;
}

const char* const kCsvColumns[] = {
    "paper_id",   "title",        "pub_year",  "pub_month",         "journal",
    "esi_category", "author_names", "institution_names", "references",
    "retraction_year", "reason",   "requester",
};

}  // namespace

std::optional<InputFormat> parse_input_format(std::string_view s) {
  if (s == "jsonl") return InputFormat::jsonl;
  if (s == "csv") return InputFormat::csv;
  return std::nullopt;
}

std::string normalize_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (c < 0x80 && std::ispunct(c) && c != '-') continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
  }
  return out;
}

bool has_retraction_marker(std::string_view title) {
  return lower(title).find("retracted article") != std::string::npos;
}

std::optional<int> marker_retraction_year(std::string_view title) {
  std::string t = lower(title);
  std::size_t pos = t.find("retracted article");
  if (pos == std::string::npos) return std::nullopt;
  std::optional<int> year;
  for (std::size_t i = pos; i + 4 <= t.size(); ++i) {
    bool four = std::isdigit(static_cast<unsigned char>(t[i])) &&
                std::isdigit(static_cast<unsigned char>(t[i + 1])) &&
                std::isdigit(static_cast<unsigned char>(t[i + 2])) &&
                std::isdigit(static_cast<unsigned char>(t[i + 3]));
    bool bounded = (i == 0 || !std::isdigit(static_cast<unsigned char>(t[i - 1]))) &&
                   (i + 4 == t.size() || !std::isdigit(static_cast<unsigned char>(t[i + 4])));
    if (four && bounded) {
      int y = std::stoi(t.substr(i, 4));
      if (y >= 1900 && y <= 2099) year = y;
    }
  }
  return year;
}

// ---------------------------------------------------------------------------

Corpus Corpus::build(std::vector<PaperRecord> records, const CorpusOptions& options) {
  Corpus c;
  c.options_ = options;
  for (auto& r : records) r.journal = normalize_name(r.journal);
  std::sort(records.begin(), records.end(),
            [](const PaperRecord& a, const PaperRecord& b) { return a.paper_id < b.paper_id; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].paper_id == records[i - 1].paper_id) {
      fail(ErrorKind::data, "duplicate paper_id " + records[i].paper_id);
    }
  }
  for (const auto& r : records) {
    if (auto problem = check_record(r, options); !problem.empty()) {
      fail(ErrorKind::data, problem);
    }
  }

  c.papers_ = std::move(records);
  const std::size_t n = c.papers_.size();
  c.id_index_.reserve(n);
  for (Index i = 0; i < n; ++i) c.id_index_.emplace(c.papers_[i].paper_id, i);

  c.cited_by_.assign(n, {});
  c.resolved_refs_.assign(n, {});
  c.retracted_.assign(n, false);
  c.retraction_year_.assign(n, std::nullopt);
  c.authors_.assign(n, {});
  c.institutions_.assign(n, {});

  for (Index i = 0; i < n; ++i) {
    const PaperRecord& p = c.papers_[i];
    for (const auto& ref : p.references) {
      auto it = c.id_index_.find(ref);
      if (it == c.id_index_.end()) {
        ++c.dangling_refs_;
        continue;
      }
      c.resolved_refs_[i].push_back(it->second);
      c.cited_by_[it->second].push_back(i);
    }

    if (p.retraction) {
      c.retracted_[i] = true;
      c.retraction_year_[i] = p.retraction->retraction_year;
    } else if (has_retraction_marker(p.title)) {
      c.retracted_[i] = true;
      if (auto y = marker_retraction_year(p.title); y && *y >= p.pub_year) {
        c.retraction_year_[i] = y;
      }
    }

    for (const auto& raw : p.author_names) {
      std::string name = normalize_name(raw);
      if (name.empty()) continue;
      if (std::find(c.authors_[i].begin(), c.authors_[i].end(), name) != c.authors_[i].end()) {
        continue;
      }
      c.by_author_[name].push_back(i);
      c.authors_[i].push_back(std::move(name));
    }
    for (const auto& raw : p.institution_names) {
      std::string name = normalize_name(raw);
      if (name.empty()) continue;
      auto& list = c.institutions_[i];
      if (std::find(list.begin(), list.end(), name) != list.end()) continue;
      c.by_institution_[name].push_back(i);
      list.push_back(std::move(name));
    }
    c.by_year_[p.pub_year].push_back(i);
    c.by_journal_[p.journal].push_back(i);
  }
  // cited_by is filled in ascending citer order already (outer loop order).
  return c;
}

std::optional<Corpus::Index> Corpus::find(std::string_view paper_id) const {
  auto it = id_index_.find(std::string(paper_id));
  if (it == id_index_.end()) return std::nullopt;
  return it->second;
}

Corpus::Index Corpus::at(std::string_view paper_id) const {
  auto i = find(paper_id);
  if (!i) fail(ErrorKind::data, "unknown paper_id " + std::string(paper_id));
  return *i;
}

std::optional<ReasonCode> Corpus::notice_reason(Index i) const {
  const auto& n = papers_[i].retraction;
  if (!n) return std::nullopt;
  return n->reason;
}

std::span<const Corpus::Index> Corpus::papers_of_author(std::string_view name) const {
  auto it = by_author_.find(std::string(name));
  if (it == by_author_.end()) return {};
  return it->second;
}

std::span<const Corpus::Index> Corpus::papers_of_institution(std::string_view name) const {
  auto it = by_institution_.find(std::string(name));
  if (it == by_institution_.end()) return {};
  return it->second;
}

int Corpus::first_year() const {
  return by_year_.empty() ? options_.min_year : by_year_.begin()->first;
}

int Corpus::last_year() const {
  return by_year_.empty() ? options_.max_year : by_year_.rbegin()->first;
}

// ---------------------------------------------------------------------------
// Readers and writers

namespace {

std::vector<PaperRecord> parse_jsonl_impl(std::string_view text, const CorpusOptions* options) {
  std::vector<PaperRecord> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    PaperRecord r;
    try {
      r = record_from_json(json::parse(line));
    } catch (const json::exception& e) {
      fail(ErrorKind::parse, "malformed record on line " + std::to_string(line_no) + ": " +
                                 e.what());
    } catch (const std::invalid_argument& e) {
      fail(ErrorKind::parse, "malformed record on line " + std::to_string(line_no) + ": " +
                                 e.what());
    }
    if (options) {
      if (auto problem = check_record(r, *options); !problem.empty()) {
        fail(ErrorKind::data, "line " + std::to_string(line_no) + ": " + problem);
      }
    }
    out.push_back(std::move(r));
    if (end == text.size()) break;
  }
  return out;
}

std::vector<PaperRecord> parse_csv_impl(std::string_view text, const CorpusOptions* options) {
  auto rows = csv::parse(text);
  std::vector<PaperRecord> out;
  if (rows.empty()) return out;
  const auto& header = rows.front().fields;
  std::vector<int> col(std::size(kCsvColumns), -1);
  for (std::size_t k = 0; k < std::size(kCsvColumns); ++k) {
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == kCsvColumns[k]) col[k] = static_cast<int>(h);
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (col[k] < 0) {
      fail(ErrorKind::parse, std::string("csv header lacks column ") + kCsvColumns[k]);
    }
  }
  for (std::size_t ri = 1; ri < rows.size(); ++ri) {
    const auto& row = rows[ri];
    auto get = [&](std::size_t k) -> std::string {
      int c = col[k];
      if (c < 0 || static_cast<std::size_t>(c) >= row.fields.size()) return {};
      return row.fields[static_cast<std::size_t>(c)];
    };
    PaperRecord r;
    try {
      if (row.fields.size() != header.size()) {
        throw std::invalid_argument("expected " + std::to_string(header.size()) +
                                    " fields, found " + std::to_string(row.fields.size()));
      }
      r.paper_id = get(0);
      if (r.paper_id.empty()) throw std::invalid_argument("empty paper_id");
      r.title = get(1);
      r.pub_year = parse_int_field(get(2), "pub_year");
      if (auto m = get(3); !m.empty()) r.pub_month = parse_int_field(m, "pub_month");
      r.journal = normalize_name(get(4));
      r.esi_category = get(5);
      r.author_names = csv::split(get(6), ';');
      r.institution_names = csv::split(get(7), ';');
      r.references = csv::split(get(8), ';');
      if (auto ry = get(9); !ry.empty()) {
        std::string reason = get(10), requester = get(11);
        r.retraction = parse_notice(parse_int_field(ry, "retraction_year"),
                                    reason.empty() ? std::nullopt : std::optional(reason),
                                    requester.empty() ? std::nullopt : std::optional(requester));
      }
    } catch (const std::invalid_argument& e) {
      fail(ErrorKind::parse,
           "malformed record on line " + std::to_string(row.line) + ": " + e.what());
    }
    if (options) {
      if (auto problem = check_record(r, *options); !problem.empty()) {
        fail(ErrorKind::data, "line " + std::to_string(row.line) + ": " + problem);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<PaperRecord> parse_jsonl(std::string_view text) {
  return parse_jsonl_impl(text, nullptr);
}

std::vector<PaperRecord> parse_csv_records(std::string_view text) {
  return parse_csv_impl(text, nullptr);
}

std::vector<PaperRecord> read_records(const std::filesystem::path& path, InputFormat format) {
  std::string text = read_file(path);
  return format == InputFormat::jsonl ? parse_jsonl(text) : parse_csv_records(text);
}

Corpus ingest_corpus(const std::filesystem::path& path, InputFormat format,
                     const CorpusOptions& options) {
  std::string text = read_file(path);
  auto records = format == InputFormat::jsonl ? parse_jsonl_impl(text, &options)
                                              : parse_csv_impl(text, &options);
  return Corpus::build(std::move(records), options);
}

std::string to_jsonl_line(const PaperRecord& r) {
  json j = json::object();
  j["paper_id"] = r.paper_id;
  j["title"] = r.title;
  j["pub_year"] = r.pub_year;
  j["pub_month"] = r.pub_month ? json(*r.pub_month) : json(nullptr);
  j["journal"] = r.journal;
  j["esi_category"] = r.esi_category;
  j["author_names"] = r.author_names;
  j["institution_names"] = r.institution_names;
  j["references"] = r.references;
  if (r.retraction) {
    j["retraction"] = {
        {"retraction_year", r.retraction->retraction_year},
        {"reason", r.retraction->reason ? std::string(to_string(*r.retraction->reason))
                                        : std::string("unknown")},
        {"requester", std::string(to_string(r.retraction->requester))},
    };
  } else {
    j["retraction"] = nullptr;
  }
  return j.dump();
}

// ---------------------------------------------------------------------------
// Descriptive statistics

std::optional<double> median_of(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<std::string> detect_retractions(const Corpus& corpus) {
  std::vector<std::string> ids;
  for (Corpus::Index i = 0; i < corpus.size(); ++i) {
    if (corpus.is_retracted(i)) ids.push_back(corpus.paper(i).paper_id);
  }
  return ids;
}

std::vector<YearRate> annual_retraction_rate(const Corpus& corpus) {
  std::vector<YearRate> out;
  for (const auto& [year, members] : corpus.by_year()) {
    YearRate r;
    r.year = year;
    r.total = static_cast<std::int64_t>(members.size());
    for (auto i : members) r.retracted += corpus.is_retracted(i) ? 1 : 0;
    r.rate = static_cast<double>(r.retracted) / static_cast<double>(r.total);
    out.push_back(r);
  }
  return out;
}

DelayReport retraction_delay(const Corpus& corpus) {
  DelayReport report;
  std::map<int, std::vector<double>> by_year;
  std::vector<double> all;
  for (Corpus::Index i = 0; i < corpus.size(); ++i) {
    auto yr = corpus.retraction_year(i);
    if (!corpus.is_retracted(i) || !yr) continue;
    int delay = *yr - corpus.paper(i).pub_year;
    report.per_paper.push_back({corpus.paper(i).paper_id, delay});
    by_year[*yr].push_back(delay);
    all.push_back(delay);
  }
  for (auto& [year, delays] : by_year) {
    report.by_retraction_year.push_back({year, delays.size(), *median_of(delays)});
  }
  report.overall_median = median_of(std::move(all));
  return report;
}

std::vector<CategoryRate> esi_retraction_rates(const Corpus& corpus) {
  std::map<std::string, CategoryRate> table;
  for (Corpus::Index i = 0; i < corpus.size(); ++i) {
    auto& row = table[corpus.paper(i).esi_category];
    row.total += 1;
    row.retracted += corpus.is_retracted(i) ? 1 : 0;
  }
  std::vector<CategoryRate> out;
  for (auto& [name, row] : table) {
    row.category = name;
    row.rate = static_cast<double>(row.retracted) / static_cast<double>(row.total);
    out.push_back(row);
  }
  std::stable_sort(out.begin(), out.end(), [](const CategoryRate& a, const CategoryRate& b) {
    // Exact comparison of retracted/total via cross-multiplication.
    auto lhs = a.retracted * b.total, rhs = b.retracted * a.total;
    if (lhs != rhs) return lhs > rhs;
    return a.category < b.category;
  });
  return out;
}

CitationDistribution citation_distribution(const Corpus& corpus, PaperSubset subset) {
  CitationDistribution d;
  for (Corpus::Index i = 0; i < corpus.size(); ++i) {
    if (subset == PaperSubset::retracted && !corpus.is_retracted(i)) continue;
    d.counts.push_back(static_cast<std::int64_t>(corpus.cited_by(i).size()));
  }
  if (d.counts.empty()) return d;
  std::int64_t max = *std::max_element(d.counts.begin(), d.counts.end());
  d.histogram.push_back({0, 0, 0});
  for (std::int64_t lo = 1; lo <= max; lo *= 2) d.histogram.push_back({lo, 2 * lo - 1, 0});
  for (auto c : d.counts) {
    std::size_t bin = 0;
    if (c > 0) {
      bin = 1;
      while (d.histogram[bin].hi < c) ++bin;
    }
    d.histogram[bin].count += 1;
  }
  std::vector<double> values(d.counts.begin(), d.counts.end());
  d.median = median_of(std::move(values));
  return d;
}

}  // namespace retract
