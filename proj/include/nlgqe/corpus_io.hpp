#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nlgqe/data_model.hpp"
#include "nlgqe/delex.hpp"

namespace nlgqe {

struct SplitSpec {
  // train : dev : test proportions.
  std::array<double, 3> ratios{8.0, 1.0, 1.0};
  std::uint64_t seed = 1;
};

struct LoadOptions {
  bool apply_delex = true;
  std::vector<DelexRule> rules = default_rules();
};

// Ratings TSV: header `mr<TAB>system<TAB>text<TAB>rating`, one record per
// line, ratings on the 1-6 scale.
Dataset load_ratings(const std::string& path, Criterion criterion,
                     const LoadOptions& options = {});

// Rankings TSV: header `mr<TAB>system_1<TAB>text_1<TAB>rank_1<TAB>...` with
// up to five (system, text, rank) triples; rank 1 is best, ties allowed.
// Every strictly ordered output pair becomes one pairwise instance with the
// better-ranked output as text_a; tied pairs are dropped.
Dataset load_rankings(const std::string& path, Criterion criterion,
                      const LoadOptions& options = {});

// Canonical one-instance-per-line JSON form with keys mr, text_a, text_b,
// rating, is_ranking, is_synthetic, source_tag.
void write_jsonl(const Dataset& dataset, const std::string& path);
Dataset read_jsonl(const std::string& path,
                   Criterion criterion = Criterion::kQuality);

std::string instance_to_json(const QEInstance& inst);
QEInstance instance_from_json(const std::string& line);

// Canonical MR string used as the split/fold identity.
std::string mr_key(const QEInstance& inst);

struct Split {
  Dataset train, dev, test;
};

// Shuffles distinct MRs by seed and partitions them by the given ratios;
// every instance follows its MR, so the three sections are MR-disjoint.
Split split_by_mr(const Dataset& dataset, const SplitSpec& spec);

// k MR-disjoint folds whose test blocks partition the MR set. Fold i uses
// block i as test, block (i+1) mod k as dev, and the rest as train.
std::vector<Split> cv_folds(const Dataset& dataset, std::size_t k,
                            std::uint64_t seed);

}  // namespace nlgqe
