#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "retract/corpus.hpp"

namespace testing {

inline retract::PaperRecord paper(std::string id, int year, std::vector<std::string> refs = {},
                                  std::vector<std::string> authors = {},
                                  std::vector<std::string> institutions = {}) {
  retract::PaperRecord p;
  p.paper_id = std::move(id);
  p.title = "Paper " + p.paper_id;
  p.pub_year = year;
  p.journal = "Journal A";
  p.esi_category = "chemistry";
  p.references = std::move(refs);
  p.author_names = std::move(authors);
  p.institution_names = std::move(institutions);
  return p;
}

inline retract::PaperRecord retracted(retract::PaperRecord p, int retraction_year,
                                      retract::ReasonCode reason = retract::ReasonCode::plagiarism) {
  p.retraction = retract::RetractionNotice{retraction_year, reason, retract::Requester::editor};
  return p;
}

inline std::string data_path(const std::string& name) {
  return std::string(RTX_TEST_DATA) + "/" + name;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("rtx_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
