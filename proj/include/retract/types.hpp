#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace retract {

enum class ErrorKind {
  invalid_argument,
  io,
  parse,
  data,
  degenerate,
};

// All library failures are reported as retract::Error. The module name is
// prefixed to the message so CLI output can attribute failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string_view module, const std::string& what)
      : std::runtime_error(std::string(module) + ": " + what),
        kind_(kind),
        module_(module) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

enum class ReasonCode {
  plagiarism,
  falsification_fabrication,
  violation_of_rules,
  error,
  other,
  not_found,
};

inline constexpr ReasonCode kAllReasons[] = {
    ReasonCode::plagiarism, ReasonCode::falsification_fabrication,
    ReasonCode::violation_of_rules, ReasonCode::error,
    ReasonCode::other, ReasonCode::not_found,
};

constexpr bool is_misconduct(ReasonCode r) {
  return r == ReasonCode::plagiarism ||
         r == ReasonCode::falsification_fabrication ||
         r == ReasonCode::violation_of_rules;
}

enum class Requester { editor, author, not_found };

inline constexpr Requester kAllRequesters[] = {
    Requester::editor, Requester::author, Requester::not_found};

std::string_view to_string(ReasonCode r);
std::string_view to_string(Requester r);
std::optional<ReasonCode> parse_reason(std::string_view s);
std::optional<Requester> parse_requester(std::string_view s);

enum class EntityKind { paper, author, institution };

std::string_view to_string(EntityKind k);

struct EntityKey {
  EntityKind kind = EntityKind::paper;
  std::string key;

  friend auto operator<=>(const EntityKey&, const EntityKey&) = default;
  friend bool operator==(const EntityKey&, const EntityKey&) = default;
};

inline EntityKey paper_key(std::string id) { return {EntityKind::paper, std::move(id)}; }
inline EntityKey author_key(std::string name) { return {EntityKind::author, std::move(name)}; }
inline EntityKey institution_key(std::string name) {
  return {EntityKind::institution, std::move(name)};
}

// The 22 ESI subject categories.
inline constexpr std::string_view kEsiCategories[] = {
    "agricultural sciences",
    "biology & biochemistry",
    "chemistry",
    "clinical medicine",
    "computer science",
    "economics & business",
    "engineering",
    "environment/ecology",
    "geosciences",
    "immunology",
    "materials science",
    "mathematics",
    "microbiology",
    "molecular biology & genetics",
    "multidisciplinary",
    "neuroscience & behavior",
    "pharmacology & toxicology",
    "physics",
    "plant & animal science",
    "psychiatry/psychology",
    "social sciences, general",
    "space science",
};

bool is_esi_category(std::string_view s);

}  // namespace retract
