#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlgqe/data_model.hpp"

namespace nlgqe {

enum class DelexLevel { kFull, kNamesOnly, kNone };

struct DelexRule {
  std::string attribute;               // canonical identifier
  DelexLevel level = DelexLevel::kNone;
  std::vector<std::string> exceptions;  // literal values never replaced
};

// Character range of one placeholder in the delexicalised text. Absent when
// the slot value never occurred in the text.
struct TextSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Substitution {
  std::string attribute;
  std::string original;     // exact text slice that was replaced
  std::string placeholder;  // e.g. "X-name"
  std::optional<TextSpan> span;
};

struct DelexResult {
  MeaningRepresentation mr;
  TextOutput text;
  std::vector<Substitution> substitutions;
};

// The stock rule table for the restaurant/hotel domain: venue-identifying
// values (names, addresses, phones, postcodes, prices, counts) are fully
// replaced, areas are replaced unless generic ("city centre", "riverside"),
// categorical attributes are left alone.
std::vector<DelexRule> default_rules();

// Resolves an attribute (raw corpus spelling or canonical form) to its rule.
// Attributes without a rule default to level none.
const DelexRule* find_rule(const std::vector<DelexRule>& rules,
                           const std::string& attribute);

// Plain-text rule file: one `attribute<TAB>level<TAB>exceptions` line per
// attribute; level is full | names_only | none (or "-"); exceptions are
// comma-separated ("-" for an explicitly empty set).
std::vector<DelexRule> load_rules(const std::string& path);

std::string placeholder_for(const std::string& attribute);

DelexResult delexicalize(const MeaningRepresentation& mr, const TextOutput& text,
                         const std::vector<DelexRule>& rules);

// Replays the recorded substitutions backwards, reconstructing the original
// raw text exactly.
std::string relexicalize(const std::string& delexed_text,
                         const std::vector<Substitution>& substitutions);

}  // namespace nlgqe
