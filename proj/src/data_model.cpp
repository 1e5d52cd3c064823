#include "nlgqe/data_model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "nlgqe/error.hpp"
#include "nlgqe/rng.hpp"

namespace nlgqe {

namespace {

bool is_ascii_alnum(unsigned char c) { return std::isalnum(c) != 0; }

// Multibyte UTF-8 continuation/lead bytes count as word characters, so
// accented names ("café") stay whole.
bool is_word_char(unsigned char c) { return c >= 0x80 || is_ascii_alnum(c); }

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

char lower_ascii(unsigned char c) {
  return static_cast<char>(std::tolower(c));
}

}  // namespace

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::kQuality: return "quality";
    case Criterion::kNaturalness: return "naturalness";
    case Criterion::kInformativeness: return "informativeness";
  }
  return "quality";
}

Criterion criterion_from_name(const std::string& name) {
  if (name == "quality") return Criterion::kQuality;
  if (name == "naturalness") return Criterion::kNaturalness;
  if (name == "informativeness") return Criterion::kInformativeness;
  throw DataError("unknown criterion: " + name);
}

std::vector<std::string> tokenize(const std::string& raw) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  const std::size_t n = raw.size();
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char c = raw[i];
    if (is_space(c)) {
      flush();
      continue;
    }
    if (is_word_char(c)) {
      cur += (c < 0x80) ? lower_ascii(c) : static_cast<char>(c);
      continue;
    }
    const bool next_word = i + 1 < n && is_word_char(raw[i + 1]);
    if (c == '\'' && next_word) {
      // Clitic: the apostrophe starts a new token and absorbs the following
      // word characters ("it's" -> it 's).
      flush();
      cur += '\'';
      continue;
    }
    if (c == '-' && next_word && !cur.empty() &&
        is_word_char(cur.back())) {
      // Word-internal hyphen; keeps placeholders like x-name atomic.
      cur += '-';
      continue;
    }
    flush();
    out.emplace_back(1, static_cast<char>(c));
  }
  flush();
  return out;
}

TextOutput make_text(const std::string& raw) {
  return TextOutput{raw, tokenize(raw)};
}

QEInstance QEInstance::rating_instance(MeaningRepresentation mr, TextOutput text,
                                       double rating, bool synthetic,
                                       std::string source_tag) {
  if (mr.intent.empty()) throw DataError("rating instance: empty MR intent");
  if (rating < 1.0 || rating > 6.0) {
    throw DataError("rating " + std::to_string(rating) +
                    " outside the 1-6 scale");
  }
  QEInstance inst;
  inst.mr_ = std::move(mr);
  inst.text_a_ = std::move(text);
  inst.rating_ = rating;
  inst.is_ranking_ = false;
  inst.is_synthetic_ = synthetic;
  inst.source_tag_ = std::move(source_tag);
  return inst;
}

QEInstance QEInstance::ranking_instance(MeaningRepresentation mr,
                                        TextOutput better, TextOutput worse,
                                        bool synthetic,
                                        std::string source_tag) {
  if (mr.intent.empty()) throw DataError("ranking instance: empty MR intent");
  QEInstance inst;
  inst.mr_ = std::move(mr);
  inst.text_a_ = std::move(better);
  inst.text_b_ = std::move(worse);
  inst.is_ranking_ = true;
  inst.is_synthetic_ = synthetic;
  inst.source_tag_ = std::move(source_tag);
  return inst;
}

std::string normalize_attribute(const std::string& attribute) {
  std::string out;
  out.reserve(attribute.size());
  for (unsigned char c : attribute) {
    if (c == ' ' || c == '/' || c == '-') {
      if (!out.empty() && out.back() != '_') out += '_';
    } else {
      out += lower_ascii(c);
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::vector<std::string> linearize_mr(const MeaningRepresentation& mr) {
  std::vector<std::string> out;
  if (mr.intent.empty()) throw DataError("linearize_mr: empty intent");
  std::string intent;
  for (unsigned char c : mr.intent) intent += lower_ascii(c);
  out.push_back(intent);
  for (const Slot& s : mr.slots) {
    if (s.attribute.empty()) throw DataError("linearize_mr: empty attribute");
    out.push_back(kSlotToken);
    out.push_back(normalize_attribute(s.attribute));
    for (auto& t : tokenize(s.value)) out.push_back(std::move(t));
  }
  return out;
}

std::string format_mr(const MeaningRepresentation& mr) {
  std::string out = mr.intent;
  out += '(';
  bool first = true;
  for (const Slot& s : mr.slots) {
    if (!first) out += ',';
    first = false;
    out += s.attribute;
    if (!s.value.empty()) {
      out += "='";
      for (char c : s.value) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
      }
      out += '\'';
    }
  }
  out += ')';
  return out;
}

MeaningRepresentation parse_mr(const std::string& text) {
  auto fail = [&](const std::string& why) -> MeaningRepresentation {
    throw DataError("cannot parse MR '" + text + "': " + why);
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  auto skip_ws = [&] {
    while (i < n && is_space(text[i])) ++i;
  };

  skip_ws();
  std::size_t start = i;
  while (i < n && text[i] != '(' && !is_space(text[i])) ++i;
  std::string intent = text.substr(start, i - start);
  if (intent.empty()) return fail("missing intent");
  skip_ws();
  MeaningRepresentation mr;
  mr.intent = intent;
  if (i == n) return mr;  // bare intent without parentheses
  if (text[i] != '(') return fail("expected '('");
  ++i;

  skip_ws();
  if (i < n && text[i] == ')') return mr;  // intent-only MR like request()

  while (i < n) {
    skip_ws();
    start = i;
    while (i < n && text[i] != '=' && text[i] != ',' && text[i] != ')') ++i;
    std::string attr = text.substr(start, i - start);
    while (!attr.empty() && is_space(attr.back())) attr.pop_back();
    if (attr.empty()) return fail("empty attribute name");

    Slot slot;
    slot.attribute = attr;
    if (i < n && text[i] == '=') {
      ++i;
      skip_ws();
      std::string value;
      if (i < n && (text[i] == '\'' || text[i] == '"')) {
        const char quote = text[i++];
        while (i < n && text[i] != quote) {
          if (text[i] == '\\' && i + 1 < n) ++i;
          value += text[i++];
        }
        if (i == n) return fail("unterminated quoted value");
        ++i;  // closing quote
      } else {
        start = i;
        while (i < n && text[i] != ',' && text[i] != ')') ++i;
        value = text.substr(start, i - start);
        while (!value.empty() && is_space(value.back())) value.pop_back();
      }
      slot.value = value;
    }
    mr.slots.push_back(std::move(slot));

    skip_ws();
    if (i == n) return fail("unterminated slot list");
    if (text[i] == ')') return mr;
    if (text[i] != ',') return fail("expected ',' or ')'");
    ++i;
  }
  return fail("unterminated slot list");
}

Vocabulary::Vocabulary() {
  add(kPadToken);
  add(kUnkToken);
  add(kSlotToken);
}

void Vocabulary::add(const std::string& token) {
  if (index_.count(token)) return;
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? unk_id() : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= static_cast<int>(tokens_.size())) {
    throw DataError("vocabulary index " + std::to_string(id) +
                    " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(const std::string& token) const {
  return index_.count(token) != 0;
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    h = fnv1a(t, h);
    h = fnv1a("\n", 1, h);
  }
  return h;
}

Vocabulary build_vocabulary(const std::vector<Dataset>& datasets,
                            std::size_t min_count) {
  if (min_count < 1) throw DataError("build_vocabulary: min_count must be >= 1");
  std::map<std::string, std::size_t> counts;
  auto count_tokens = [&](const std::vector<std::string>& toks) {
    for (const auto& t : toks) {
      if (t == kPadToken || t == kUnkToken || t == kSlotToken) continue;
      ++counts[t];
    }
  };
  for (const Dataset& ds : datasets) {
    for (const QEInstance& inst : ds.instances) {
      count_tokens(linearize_mr(inst.mr()));
      count_tokens(inst.text_a().tokens);
      if (inst.text_b()) count_tokens(inst.text_b()->tokens);
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  kept.reserve(counts.size());
  for (auto& [tok, cnt] : counts) {
    if (cnt >= min_count) kept.emplace_back(tok, cnt);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  for (auto& [tok, cnt] : kept) vocab.add(tok);
  return vocab;
}

}  // namespace nlgqe
