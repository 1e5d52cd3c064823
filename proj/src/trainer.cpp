#include "nlgqe/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "nlgqe/adam.hpp"
#include "nlgqe/error.hpp"
#include "nlgqe/rng.hpp"

namespace nlgqe {
namespace {

void reject_synthetic(const Dataset& dataset, const std::string& what) {
  for (const auto& inst : dataset.instances) {
    if (inst.is_synthetic()) {
      throw DataError(what + " must not contain synthetic instances");
    }
  }
}

double dev_metric_value(QEModel& model, const Dataset& dev_set,
                        SelectionMetric metric) {
  if (metric == SelectionMetric::kPearson) {
    std::vector<double> preds, golds;
    for (const auto& inst : dev_set.instances) {
      if (inst.is_ranking()) continue;
      preds.push_back(model.predict_rating(inst.mr(), inst.text_a()));
      golds.push_back(*inst.rating());
    }
    try {
      return pearson(preds, golds);
    } catch (const UndefinedCorrelationError&) {
      return -2.0;  // below any attainable correlation
    }
  }
  std::vector<PairOutcome> outcomes;
  for (const auto& inst : dev_set.instances) {
    if (!inst.is_ranking()) continue;
    RankResult r = model.rank_pair(inst.mr(), inst.text_a(), *inst.text_b());
    outcomes.push_back({r.decision == PairDecision::kABetter, r.margin});
  }
  if (outcomes.empty()) throw DataError("no ranking instances to select on");
  return ranking_accuracy(outcomes);
}

}  // namespace

SelectionMetric resolve_selection_metric(SelectionMetric configured,
                                         const Dataset& dev_set) {
  if (configured != SelectionMetric::kAuto) return configured;
  std::size_t ratings = 0, rankings = 0;
  for (const auto& inst : dev_set.instances) {
    (inst.is_ranking() ? rankings : ratings) += 1;
  }
  return rankings > ratings ? SelectionMetric::kAccuracy
                            : SelectionMetric::kPearson;
}

TrainResult train(const Dataset& train_set, const Dataset& dev_set,
                  const TrainConfig& config,
                  const std::vector<DelexRule>& rules) {
  config.validate();
  if (train_set.instances.empty()) throw DataError("empty training set");
  if (dev_set.instances.empty()) throw DataError("empty dev set");
  reject_synthetic(dev_set, "dev set");

  const SelectionMetric metric =
      resolve_selection_metric(config.selection_metric, dev_set);

  Vocabulary vocab = build_vocabulary({train_set}, config.vocab_min_count);
  QEModel model(std::move(vocab), config, rules);
  model.init_parameters(config.seed);
  std::vector<Parameter*> params = model.parameters();
  AdamState adam(params);

  std::vector<std::size_t> all_ids(train_set.instances.size());
  std::vector<std::size_t> real_ids;
  for (std::size_t i = 0; i < train_set.instances.size(); ++i) {
    all_ids[i] = i;
    if (!train_set.instances[i].is_synthetic()) real_ids.push_back(i);
  }

  TrainHistory history;
  history.selection_metric = selection_metric_name(metric);
  double best_metric = 0.0;
  std::vector<Tensor> best_params;
  Tape tape;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<std::size_t> order =
        epoch <= config.synthetic_epochs ? all_ids : real_ids;
    if (order.empty()) {
      throw DataError("no training instances left after synthetic removal");
    }
    Rng shuffle_rng(derive_seed(config.seed, "shuffle", epoch));
    shuffle_rng.shuffle(order);
    Rng dropout_rng(derive_seed(config.seed, "dropout", epoch));
    QEModel::ForwardOptions opts{true, &dropout_rng};

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(start + config.batch_size, order.size());
      const double batch_n = static_cast<double>(end - start);
      for (std::size_t i = start; i < end; ++i) {
        tape.reset();
        Var loss = model.instance_loss(tape, train_set.instances[order[i]], opts);
        loss_sum += tape.val(loss).v[0];
        tape.backward(loss, 1.0 / batch_n);
      }
      adam.step(params, config.learning_rate);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.n_instances = order.size();
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.dev_metric = dev_metric_value(model, dev_set, metric);
    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - started)
                      .count();
    history.epochs.push_back(rec);

    if (history.selected_epoch == 0 || rec.dev_metric > best_metric) {
      best_metric = rec.dev_metric;
      history.selected_epoch = epoch;
      best_params = model.snapshot_parameters();
    }
  }

  model.restore_parameters(best_params);
  model.meta().epoch = history.selected_epoch;
  model.meta().dev_metric = best_metric;
  model.meta().seed = config.seed;
  model.meta().selection_metric = history.selection_metric;
  return {std::move(model), std::move(history)};
}

MetricReport evaluate_dataset(QEModel& model, const Dataset& dataset) {
  if (dataset.instances.empty()) throw DataError("empty evaluation set");
  reject_synthetic(dataset, "evaluation set");
  std::vector<double> preds, golds;
  std::vector<PairOutcome> outcomes;
  for (const auto& inst : dataset.instances) {
    if (inst.is_ranking()) {
      RankResult r = model.rank_pair(inst.mr(), inst.text_a(), *inst.text_b());
      outcomes.push_back({r.decision == PairDecision::kABetter, r.margin});
    } else {
      preds.push_back(model.predict_rating(inst.mr(), inst.text_a()));
      golds.push_back(*inst.rating());
    }
  }
  if (!preds.empty() && outcomes.empty()) return rating_report(preds, golds);
  if (preds.empty() && !outcomes.empty()) return ranking_report(outcomes);
  MetricReport report = rating_report(preds, golds);
  MetricReport ranking = ranking_report(outcomes);
  report.task = "mixed";
  report.n = dataset.instances.size();
  report.values.insert(ranking.values.begin(), ranking.values.end());
  return report;
}

std::vector<int> ranking_outcomes(QEModel& model, const Dataset& dataset) {
  reject_synthetic(dataset, "evaluation set");
  std::vector<int> outcomes;
  for (const auto& inst : dataset.instances) {
    if (!inst.is_ranking()) continue;
    RankResult r = model.rank_pair(inst.mr(), inst.text_a(), *inst.text_b());
    outcomes.push_back(r.decision == PairDecision::kABetter ? 1 : 0);
  }
  return outcomes;
}

MultiSeedResult multi_seed_run(const Dataset& train_set, const Dataset& dev_set,
                               const Dataset& test_set,
                               const TrainConfig& config,
                               const std::vector<std::uint64_t>& seeds,
                               const std::vector<DelexRule>& rules) {
  if (seeds.empty()) throw DataError("no seeds given");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw DataError("seeds must be distinct");
  }
  MultiSeedResult result;
  result.seeds = seeds;
  for (std::uint64_t seed : seeds) {
    TrainConfig cfg = config;
    cfg.seed = seed;
    TrainResult run = train(train_set, dev_set, cfg, rules);
    result.per_seed.push_back(evaluate_dataset(run.model, test_set));
  }

  MetricReport& avg = result.averaged;
  avg.task = result.per_seed.front().task;
  avg.n = result.per_seed.front().n;
  const double k = static_cast<double>(result.per_seed.size());
  for (const auto& [name, first_value] : result.per_seed.front().values) {
    bool shared = true;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& report : result.per_seed) {
      auto it = report.values.find(name);
      if (it == report.values.end()) {
        shared = false;
        break;
      }
      sum += it->second;
      sum_sq += it->second * it->second;
    }
    if (!shared) continue;
    const double mean = sum / k;
    avg.values[name] = mean;
    avg.values[name + "_std"] = std::sqrt(std::max(0.0, sum_sq / k - mean * mean));
  }
  return result;
}

}  // namespace nlgqe
