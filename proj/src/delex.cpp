#include "nlgqe/delex.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "nlgqe/error.hpp"

namespace nlgqe {

namespace {

std::string lower_ascii(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) out += static_cast<char>(std::tolower(c));
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Corpus spellings resolved to the canonical rule identifiers.
const std::unordered_map<std::string, std::string>& alias_map() {
  static const std::unordered_map<std::string, std::string> kAliases = {
      {"venue_name", "name"},
      {"nearby_venue_monument_name", "near"},
      {"nearby_venue", "near"},
      {"monument_name", "near"},
      {"venue_type", "type"},
      {"eat_type", "type"},
      {"eattype", "type"},
      {"venue_count", "count"},
      {"family_friendly", "kids_friendly"},
      {"familyfriendly", "kids_friendly"},
      {"children_friendly", "kids_friendly"},
      {"kids_allowed", "kids_friendly"},
      {"cuisine", "food"},
      {"food_cuisine", "food"},
      {"customerrating", "customer_rating"},
      {"rating", "customer_rating"},
      {"pricerange", "price_range"},
      {"phone_number", "phone"},
      {"good_for_meal", "meal_type"},
      {"goodformeal", "meal_type"},
  };
  return kAliases;
}

bool is_word_byte(unsigned char c) {
  return c >= 0x80 || std::isalnum(c) != 0;
}

DelexLevel parse_level(const std::string& s) {
  if (s == "full") return DelexLevel::kFull;
  if (s == "names_only") return DelexLevel::kNamesOnly;
  if (s == "none" || s == "-") return DelexLevel::kNone;
  throw DataError("unknown delexicalisation level: " + s);
}

}  // namespace

std::vector<DelexRule> default_rules() {
  std::vector<DelexRule> rules;
  auto full = [&](const char* a) {
    rules.push_back({a, DelexLevel::kFull, {}});
  };
  auto none = [&](const char* a) {
    rules.push_back({a, DelexLevel::kNone, {}});
  };
  full("address");
  rules.push_back({"area", DelexLevel::kNamesOnly, {"city centre", "riverside"}});
  none("customer_rating");
  none("food");
  none("kids_friendly");
  none("meal_type");
  full("near");
  full("phone");
  full("postcode");
  full("price");
  none("price_range");
  full("count");
  full("name");
  none("type");
  return rules;
}

const DelexRule* find_rule(const std::vector<DelexRule>& rules,
                           const std::string& attribute) {
  const std::string norm = normalize_attribute(attribute);
  auto lookup = [&](const std::string& key) -> const DelexRule* {
    for (const DelexRule& r : rules) {
      if (r.attribute == key) return &r;
    }
    return nullptr;
  };
  if (const DelexRule* r = lookup(norm)) return r;
  auto it = alias_map().find(norm);
  if (it != alias_map().end()) return lookup(it->second);
  return nullptr;
}

std::vector<DelexRule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rule file: " + path);
  std::vector<DelexRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected attribute<TAB>level[<TAB>exceptions]");
    }
    DelexRule rule;
    rule.attribute = normalize_attribute(fields[0]);
    rule.level = parse_level(fields[1]);
    if (rule.level == DelexLevel::kNamesOnly) {
      if (fields.size() < 3) {
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": names_only needs an exceptions field (\"-\" for none)");
      }
      if (fields[2] != "-") {
        std::stringstream ss(fields[2]);
        std::string item;
        while (std::getline(ss, item, ',')) {
          item = trim(item);
          if (!item.empty()) rule.exceptions.push_back(item);
        }
      }
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::string placeholder_for(const std::string& attribute) {
  return "X-" + normalize_attribute(attribute);
}

DelexResult delexicalize(const MeaningRepresentation& mr, const TextOutput& text,
                         const std::vector<DelexRule>& rules) {
  struct Candidate {
    std::size_t slot_index;
    std::string value;
    std::string placeholder;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < mr.slots.size(); ++i) {
    const Slot& slot = mr.slots[i];
    if (slot.value.empty()) continue;
    const DelexRule* rule = find_rule(rules, slot.attribute);
    if (rule == nullptr || rule->level == DelexLevel::kNone) continue;
    const std::string placeholder = placeholder_for(slot.attribute);
    if (slot.value == placeholder) continue;  // already delexicalised
    if (rule->level == DelexLevel::kNamesOnly) {
      const std::string v = lower_ascii(trim(slot.value));
      bool excluded = false;
      for (const auto& e : rule->exceptions) {
        if (lower_ascii(e) == v) {
          excluded = true;
          break;
        }
      }
      if (excluded) continue;
    }
    candidates.push_back({i, slot.value, placeholder});
  }

  // Longest value first so e.g. "The Cricketers Arms" wins over "The
  // Cricketers" where both occur.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.value.size() > b.value.size();
                   });

  const std::string lowered = lower_ascii(text.raw);
  struct Match {
    std::size_t begin, end;
    std::size_t candidate;
  };
  std::vector<Match> matches;
  auto overlaps = [&](std::size_t b, std::size_t e) {
    for (const Match& m : matches) {
      if (b < m.end && m.begin < e) return true;
    }
    return false;
  };
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    const std::string needle = lower_ascii(candidates[ci].value);
    if (needle.empty()) continue;
    std::size_t pos = 0;
    while ((pos = lowered.find(needle, pos)) != std::string::npos) {
      const std::size_t end = pos + needle.size();
      const bool left_ok =
          pos == 0 || !is_word_byte(static_cast<unsigned char>(lowered[pos - 1]));
      const bool right_ok =
          end == lowered.size() ||
          !is_word_byte(static_cast<unsigned char>(lowered[end]));
      if (left_ok && right_ok && !overlaps(pos, end)) {
        matches.push_back({pos, end, ci});
        pos = end;
      } else {
        ++pos;
      }
    }
  }
  std::sort(matches.begin(), matches.end(),
            [](const Match& a, const Match& b) { return a.begin < b.begin; });

  DelexResult result;
  result.mr = mr;
  for (const Candidate& c : candidates) {
    result.mr.slots[c.slot_index].value = c.placeholder;
  }

  std::string out;
  out.reserve(text.raw.size());
  std::size_t cursor = 0;
  std::vector<bool> candidate_used(candidates.size(), false);
  for (const Match& m : matches) {
    out.append(text.raw, cursor, m.begin - cursor);
    const Candidate& c = candidates[m.candidate];
    Substitution sub;
    sub.attribute = normalize_attribute(mr.slots[c.slot_index].attribute);
    sub.original = text.raw.substr(m.begin, m.end - m.begin);
    sub.placeholder = c.placeholder;
    sub.span = TextSpan{out.size(), out.size() + c.placeholder.size()};
    out += c.placeholder;
    cursor = m.end;
    candidate_used[m.candidate] = true;
    result.substitutions.push_back(std::move(sub));
  }
  out.append(text.raw, cursor, std::string::npos);

  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    if (candidate_used[ci]) continue;
    const Candidate& c = candidates[ci];
    Substitution sub;
    sub.attribute = normalize_attribute(mr.slots[c.slot_index].attribute);
    sub.original = c.value;
    sub.placeholder = c.placeholder;
    result.substitutions.push_back(std::move(sub));
  }

  result.text = make_text(out);
  return result;
}

std::string relexicalize(const std::string& delexed_text,
                         const std::vector<Substitution>& substitutions) {
  std::string out = delexed_text;
  for (auto it = substitutions.rbegin(); it != substitutions.rend(); ++it) {
    if (!it->span) continue;
    const TextSpan& sp = *it->span;
    if (sp.end > out.size() ||
        out.compare(sp.begin, sp.end - sp.begin, it->placeholder) != 0) {
      throw DataError("relexicalize: span does not hold placeholder " +
                      it->placeholder);
    }
    out.replace(sp.begin, sp.end - sp.begin, it->original);
  }
  return out;
}

}  // namespace nlgqe
