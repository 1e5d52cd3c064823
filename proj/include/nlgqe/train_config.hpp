#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace nlgqe {

enum class SelectionMetric { kAuto, kPearson, kAccuracy };

std::string selection_metric_name(SelectionMetric m);
SelectionMetric selection_metric_from_name(const std::string& name);

// Every training hyperparameter, file- and flag-overridable.
struct TrainConfig {
  std::size_t width = 50;          // embedding and GRU cell width
  double dropout_keep = 0.8;       // keep rate for embedding dropout
  std::size_t batch_size = 50;
  double learning_rate = 0.0001;
  std::size_t dense_layers = 1;
  std::size_t max_epochs = 100;
  std::size_t synthetic_epochs = 50;  // synthetic data dropped afterwards
  SelectionMetric selection_metric = SelectionMetric::kAuto;
  std::uint64_t seed = 1;
  bool clamp_predictions = false;
  bool tanh_dense = true;  // identity activation when false
  std::size_t vocab_min_count = 1;

  void validate() const;

  std::map<std::string, std::string> to_map() const;
  static TrainConfig from_map(const std::map<std::string, std::string>& kv);

  // Plain-text `key = value` file; '#' starts a comment, unknown keys are
  // errors.
  static TrainConfig load(const std::string& path);
  void save(const std::string& path) const;

  // Applies one key/value override (same keys as the config file).
  void set(const std::string& key, const std::string& value);
};

}  // namespace nlgqe
