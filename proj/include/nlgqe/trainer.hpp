#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlgqe/data_model.hpp"
#include "nlgqe/delex.hpp"
#include "nlgqe/evaluator.hpp"
#include "nlgqe/qe_model.hpp"
#include "nlgqe/train_config.hpp"

namespace nlgqe {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_metric = 0.0;
  double seconds = 0.0;
  std::size_t n_instances = 0;  // instances trained on this epoch
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t selected_epoch = 0;  // 1-based; maximises dev metric, ties earliest
  std::string selection_metric;    // resolved: "pearson" or "accuracy"
};

struct TrainResult {
  QEModel model;  // parameters restored from the selected epoch
  TrainHistory history;
};

// Resolves kAuto by dev composition: pearson when rating instances dominate,
// accuracy otherwise.
SelectionMetric resolve_selection_metric(SelectionMetric configured,
                                         const Dataset& dev_set);

// Full training protocol: seeded per-epoch shuffle, mixed batches, batch-mean
// Adam steps, synthetic instances dropped after config.synthetic_epochs,
// per-epoch dev evaluation, best-epoch parameters returned. The vocabulary is
// built from the training set alone.
TrainResult train(const Dataset& train_set, const Dataset& dev_set,
                  const TrainConfig& config,
                  const std::vector<DelexRule>& rules = default_rules());

// Metric report for a model on a non-synthetic dataset: rating metrics over
// the rating instances, accuracy and mean ranking loss over the pairs.
MetricReport evaluate_dataset(QEModel& model, const Dataset& dataset);

// Per-pair correctness indicators (ties incorrect), for bootstrap comparison.
std::vector<int> ranking_outcomes(QEModel& model, const Dataset& dataset);

struct MultiSeedResult {
  std::vector<std::uint64_t> seeds;
  std::vector<MetricReport> per_seed;
  // Mean of every shared metric plus "<name>_std" (population deviation).
  MetricReport averaged;
};

MultiSeedResult multi_seed_run(const Dataset& train_set, const Dataset& dev_set,
                               const Dataset& test_set,
                               const TrainConfig& config,
                               const std::vector<std::uint64_t>& seeds,
                               const std::vector<DelexRule>& rules = default_rules());

}  // namespace nlgqe
