#include "nlgqe/synth.hpp"

#include <algorithm>
#include <unordered_set>

#include "nlgqe/error.hpp"

namespace nlgqe {
namespace {

bool word_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool reserved_token(const std::string& token) {
  return token == kPadToken || token == kUnkToken || token == kSlotToken;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

TextOutput text_from_tokens(std::vector<std::string> tokens) {
  TextOutput t;
  t.raw = join(tokens);
  t.tokens = std::move(tokens);
  return t;
}

// Uniform over content tokens; articles and punctuation only when nothing
// else is left.
std::size_t pick_target(const std::vector<std::string>& tokens, Rng& rng) {
  std::vector<std::size_t> preferred;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_article_token(tokens[i]) && !is_punctuation_token(tokens[i])) {
      preferred.push_back(i);
    }
  }
  if (preferred.empty()) return rng.uniform_index(tokens.size());
  return preferred[rng.uniform_index(preferred.size())];
}

void check_source(const SyntheticSource& source) {
  if (source.clean_text.tokens.empty()) {
    throw DataError("synthetic source has an empty text");
  }
  if (source.base_score < 1.0 || source.base_score > 6.0) {
    throw DataError("synthetic source base score outside [1,6]");
  }
}

std::size_t token_distance(const std::vector<std::string>& a,
                           const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::string> apply_edits(const std::vector<std::string>& tokens,
                                     std::size_t n_errors, Rng& rng,
                                     const CorruptionDictionary& dict) {
  std::vector<std::string> out = tokens;
  for (std::size_t e = 0; e < n_errors; ++e) {
    std::size_t op = rng.uniform_index(5);
    if (op == 0 && out.size() == 1) op = 1 + rng.uniform_index(4);
    if ((op == 3 || op == 4) && dict.pool.empty()) {
      throw DataError("corruption dictionary is empty");
    }
    switch (op) {
      case 0: {  // delete word
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(pick_target(out, rng)));
        break;
      }
      case 1: {  // duplicate word in place
        std::size_t t = pick_target(out, rng);
        std::string w = out[t];
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(t) + 1, std::move(w));
        break;
      }
      case 2: {  // duplicate word at random position
        std::string w = out[pick_target(out, rng)];
        std::size_t p = rng.uniform_index(out.size() + 1);
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(p), std::move(w));
        break;
      }
      case 3: {  // replace word with dictionary word
        out[pick_target(out, rng)] = dict.pool[rng.uniform_index(dict.pool.size())];
        break;
      }
      default: {  // insert dictionary word at random position
        std::string w = dict.pool[rng.uniform_index(dict.pool.size())];
        std::size_t p = rng.uniform_index(out.size() + 1);
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(p), std::move(w));
        break;
      }
    }
  }
  return out;
}

}  // namespace

bool is_punctuation_token(const std::string& token) {
  for (unsigned char c : token) {
    if (word_char(c)) return false;
  }
  return true;
}

bool is_article_token(const std::string& token) {
  return token == "a" || token == "an" || token == "the";
}

bool is_placeholder_token(const std::string& token) {
  return token.size() > 2 && token[0] == 'x' && token[1] == '-';
}

CorruptionDictionary build_corruption_dictionary(
    const std::vector<std::vector<std::string>>& texts) {
  bool any_nonempty = false;
  CorruptionDictionary dict;
  std::unordered_set<std::string> seen;
  for (const auto& text : texts) {
    if (!text.empty()) any_nonempty = true;
    for (const auto& token : text) {
      if (is_punctuation_token(token) || is_placeholder_token(token) ||
          reserved_token(token)) {
        continue;
      }
      if (seen.insert(token).second) dict.pool.push_back(token);
    }
  }
  if (!any_nonempty) {
    throw DataError("corruption dictionary needs at least one nonempty text");
  }
  return dict;
}

CorruptionDictionary build_corruption_dictionary(const Dataset& dataset) {
  std::vector<std::vector<std::string>> texts;
  for (const auto& inst : dataset.instances) {
    texts.push_back(inst.text_a().tokens);
    if (inst.text_b()) texts.push_back(inst.text_b()->tokens);
  }
  return build_corruption_dictionary(texts);
}

std::vector<std::string> corrupt(const std::vector<std::string>& tokens,
                                 const CorruptionSpec& spec,
                                 const CorruptionDictionary& dict) {
  if (tokens.empty()) throw DataError("cannot corrupt an empty text");
  if (spec.n_errors == 0) return tokens;
  // Independently drawn edits can collide: a delete next to an earlier
  // insert nets a single substitution, a replace can hit a duplicated copy,
  // and so on. Whole sequences that fall short of n_errors in edit distance
  // are redrawn a bounded number of times, keeping the output ≤ n_errors
  // away and almost always exactly n_errors away.
  constexpr std::size_t kAttempts = 16;
  std::vector<std::string> best;
  std::size_t best_distance = 0;
  for (std::size_t attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng(derive_seed(spec.seed, "attempt", attempt));
    std::vector<std::string> out = apply_edits(tokens, spec.n_errors, rng, dict);
    const std::size_t d = token_distance(tokens, out);
    if (d == spec.n_errors) return out;
    if (d > best_distance || best.empty()) {
      best_distance = d;
      best = std::move(out);
    }
  }
  return best;
}

std::string provenance_tag(SyntheticProvenance p) {
  switch (p) {
    case SyntheticProvenance::kSystemOutputTrain:
      return "synth";
    case SyntheticProvenance::kHumanReferenceTrain:
      return "synth-trainref";
    case SyntheticProvenance::kHumanReferenceTest:
      return "synth-testref";
  }
  return "synth";
}

std::vector<QEInstance> synth_ratings(const SyntheticSource& source,
                                      const CorruptionDictionary& dict,
                                      std::size_t max_errors,
                                      std::uint64_t seed) {
  check_source(source);
  std::vector<QEInstance> out;
  const std::string tag_base = provenance_tag(source.provenance) + ":rating:";
  for (std::size_t k = 1; k <= max_errors; ++k) {
    CorruptionSpec spec{k, derive_seed(seed, "rating", k)};
    auto corrupted = corrupt(source.clean_text.tokens, spec, dict);
    double target = source.base_score - static_cast<double>(k) -
                    (source.base_score == 6.0 ? 1.0 : 0.0);
    target = std::clamp(target, 1.0, 6.0);
    out.push_back(QEInstance::rating_instance(
        source.mr, text_from_tokens(std::move(corrupted)), target, true,
        tag_base + std::to_string(k)));
  }
  return out;
}

std::vector<QEInstance> synth_pairs(const SyntheticSource& source,
                                    const CorruptionDictionary& dict,
                                    std::size_t max_errors,
                                    std::size_t n_random_pairs,
                                    std::uint64_t seed) {
  check_source(source);
  std::vector<std::vector<std::string>> variants(max_errors + 1);
  variants[0] = source.clean_text.tokens;
  for (std::size_t k = 1; k <= max_errors; ++k) {
    CorruptionSpec spec{k, derive_seed(seed, "variant", k)};
    variants[k] = corrupt(source.clean_text.tokens, spec, dict);
  }

  std::vector<std::pair<std::size_t, std::size_t>> levels;
  for (std::size_t k = 1; k <= max_errors; ++k) levels.emplace_back(0, k);

  std::vector<std::pair<std::size_t, std::size_t>> rest;
  for (std::size_t i = 1; i <= max_errors; ++i) {
    for (std::size_t j = i + 1; j <= max_errors; ++j) rest.emplace_back(i, j);
  }
  Rng rng(derive_seed(seed, "pairs"));
  rng.shuffle(rest);
  rest.resize(std::min(n_random_pairs, rest.size()));
  std::sort(rest.begin(), rest.end());
  levels.insert(levels.end(), rest.begin(), rest.end());

  std::vector<QEInstance> out;
  const std::string tag_base = provenance_tag(source.provenance) + ":pair:";
  for (auto [i, j] : levels) {
    TextOutput better = i == 0 ? source.clean_text : text_from_tokens(variants[i]);
    out.push_back(QEInstance::ranking_instance(
        source.mr, std::move(better), text_from_tokens(variants[j]), true,
        tag_base + std::to_string(i) + "-" + std::to_string(j)));
  }
  return out;
}

Dataset synthesize(const std::vector<SyntheticSource>& sources,
                   const SynthOptions& options, Criterion criterion) {
  if (sources.empty()) throw DataError("no synthetic sources");
  std::vector<std::vector<std::string>> texts;
  texts.reserve(sources.size());
  for (const auto& s : sources) texts.push_back(s.clean_text.tokens);
  CorruptionDictionary dict = build_corruption_dictionary(texts);

  Dataset out;
  out.criterion = criterion;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    std::uint64_t source_seed = derive_seed(options.seed, "source", i);
    if (options.make_ratings) {
      auto ratings = synth_ratings(sources[i], dict, options.max_errors,
                                   derive_seed(source_seed, "ratings"));
      std::move(ratings.begin(), ratings.end(),
                std::back_inserter(out.instances));
    }
    if (options.make_pairs) {
      auto pairs =
          synth_pairs(sources[i], dict, options.max_errors,
                      options.n_random_pairs, derive_seed(source_seed, "pairs"));
      std::move(pairs.begin(), pairs.end(), std::back_inserter(out.instances));
    }
  }
  return out;
}

std::vector<SyntheticSource> sources_from_outputs(const Dataset& dataset) {
  std::vector<SyntheticSource> out;
  std::unordered_set<std::string> seen;
  auto add = [&](const MeaningRepresentation& mr, const TextOutput& text,
                 double base) {
    if (!seen.insert(format_mr(mr) + "\n" + text.raw).second) return;
    out.push_back({mr, text, base, SyntheticProvenance::kSystemOutputTrain});
  };
  for (const auto& inst : dataset.instances) {
    if (inst.is_synthetic()) continue;
    if (inst.is_ranking()) {
      add(inst.mr(), inst.text_a(), 6.0);
      add(inst.mr(), *inst.text_b(), 6.0);
    } else {
      add(inst.mr(), inst.text_a(), *inst.rating());
    }
  }
  return out;
}

std::vector<SyntheticSource> sources_from_references(
    const std::vector<std::pair<MeaningRepresentation, TextOutput>>& refs,
    SyntheticProvenance provenance) {
  std::vector<SyntheticSource> out;
  std::unordered_set<std::string> seen;
  for (const auto& [mr, text] : refs) {
    if (!seen.insert(format_mr(mr) + "\n" + text.raw).second) continue;
    out.push_back({mr, text, 6.0, provenance});
  }
  return out;
}

}  // namespace nlgqe
