#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlgqe/data_model.hpp"
#include "nlgqe/rng.hpp"

namespace nlgqe {

// Replacement pool for corruption edits, learned from training texts.
// Punctuation and placeholder tokens never enter the pool.
struct CorruptionDictionary {
  std::vector<std::string> pool;
};

bool is_punctuation_token(const std::string& token);
bool is_article_token(const std::string& token);
bool is_placeholder_token(const std::string& token);

CorruptionDictionary build_corruption_dictionary(
    const std::vector<std::vector<std::string>>& texts);
CorruptionDictionary build_corruption_dictionary(const Dataset& dataset);

struct CorruptionSpec {
  std::size_t n_errors = 0;
  std::uint64_t seed = 0;
};

// Applies exactly n_errors edits, each drawn uniformly from: delete a word,
// duplicate a word in place, duplicate a word at a random position, replace
// a word with a random dictionary word, insert a random dictionary word at a
// random position. Content words are preferred as edit targets over articles
// and punctuation; the text never loses its last token. Edit sequences
// whose edits collide and fall short of n_errors in token edit distance are
// redrawn a bounded number of times.
std::vector<std::string> corrupt(const std::vector<std::string>& tokens,
                                 const CorruptionSpec& spec,
                                 const CorruptionDictionary& dict);

enum class SyntheticProvenance {
  kSystemOutputTrain,
  kHumanReferenceTrain,
  kHumanReferenceTest,
};

std::string provenance_tag(SyntheticProvenance p);

struct SyntheticSource {
  MeaningRepresentation mr;
  TextOutput clean_text;
  double base_score = 6.0;  // top of scale for human references
  SyntheticProvenance provenance = SyntheticProvenance::kSystemOutputTrain;
};

// Rating instances for error levels 1..max_errors; the target drops by one
// per error, by two for the first error off a perfect 6, and never below 1.
std::vector<QEInstance> synth_ratings(const SyntheticSource& source,
                                      const CorruptionDictionary& dict,
                                      std::size_t max_errors,
                                      std::uint64_t seed);

// Ranking pairs over corrupted variants at levels 0..max_errors: every
// (0, k) pair plus n_random_pairs drawn without replacement from the
// remaining level combinations. The lower-error variant is always text_a.
std::vector<QEInstance> synth_pairs(const SyntheticSource& source,
                                    const CorruptionDictionary& dict,
                                    std::size_t max_errors,
                                    std::size_t n_random_pairs,
                                    std::uint64_t seed);

struct SynthOptions {
  bool make_ratings = true;
  bool make_pairs = true;
  std::size_t max_errors = 4;
  std::size_t n_random_pairs = 5;
  std::uint64_t seed = 1;
};

// Runs the configured generators over all sources with per-source derived
// seeds; the dictionary is learned from the sources' clean texts.
Dataset synthesize(const std::vector<SyntheticSource>& sources,
                   const SynthOptions& options, Criterion criterion);

// Sources from a dataset's own texts, deduplicated per (MR, text). Rating
// instances carry their human rating as base score; ranking texts get
// top-of-scale, which only matters if ratings are generated from them.
std::vector<SyntheticSource> sources_from_outputs(const Dataset& dataset);

// Sources from human reference texts (base score 6).
std::vector<SyntheticSource> sources_from_references(
    const std::vector<std::pair<MeaningRepresentation, TextOutput>>& refs,
    SyntheticProvenance provenance);

}  // namespace nlgqe
