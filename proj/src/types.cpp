#include "retract/types.hpp"

#include <algorithm>

namespace retract {

std::string_view to_string(ReasonCode r) {
  switch (r) {
    case ReasonCode::plagiarism: return "plagiarism";
    case ReasonCode::falsification_fabrication: return "falsification_fabrication";
    case ReasonCode::violation_of_rules: return "violation_of_rules";
    case ReasonCode::error: return "error";
    case ReasonCode::other: return "other";
    case ReasonCode::not_found: return "not_found";
  }
  return "not_found";
}

std::string_view to_string(Requester r) {
  switch (r) {
    case Requester::editor: return "editor";
    case Requester::author: return "author";
    case Requester::not_found: return "not_found";
  }
  return "not_found";
}

std::string_view to_string(EntityKind k) {
  switch (k) {
    case EntityKind::paper: return "paper";
    case EntityKind::author: return "author";
    case EntityKind::institution: return "institution";
  }
  return "paper";
}

std::optional<ReasonCode> parse_reason(std::string_view s) {
  for (ReasonCode r : kAllReasons) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::optional<Requester> parse_requester(std::string_view s) {
  for (Requester r : kAllRequesters) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

bool is_esi_category(std::string_view s) {
  return std::find(std::begin(kEsiCategories), std::end(kEsiCategories), s) !=
         std::end(kEsiCategories);
}

}  // namespace retract
