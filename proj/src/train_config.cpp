#include "nlgqe/train_config.hpp"

#include <fstream>
#include <sstream>

#include "nlgqe/error.hpp"

namespace nlgqe {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::size_t parse_size(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw DataError("config: bad value '" + v + "' for " + key);
  }
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw DataError("config: bad value '" + v + "' for " + key);
  }
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw DataError("config: bad value '" + v + "' for " + key);
}

}  // namespace

std::string selection_metric_name(SelectionMetric m) {
  switch (m) {
    case SelectionMetric::kAuto: return "auto";
    case SelectionMetric::kPearson: return "pearson";
    case SelectionMetric::kAccuracy: return "accuracy";
  }
  return "auto";
}

SelectionMetric selection_metric_from_name(const std::string& name) {
  if (name == "auto") return SelectionMetric::kAuto;
  if (name == "pearson") return SelectionMetric::kPearson;
  if (name == "accuracy") return SelectionMetric::kAccuracy;
  throw DataError("config: unknown selection metric '" + name + "'");
}

void TrainConfig::validate() const {
  if (width == 0) throw DataError("config: width must be positive");
  if (dropout_keep <= 0.0 || dropout_keep > 1.0) {
    throw DataError("config: dropout_keep must be in (0, 1]");
  }
  if (batch_size == 0) throw DataError("config: batch_size must be positive");
  if (learning_rate <= 0.0) {
    throw DataError("config: learning_rate must be positive");
  }
  if (dense_layers == 0) {
    throw DataError("config: dense_layers must be positive");
  }
  if (max_epochs == 0) throw DataError("config: max_epochs must be positive");
  if (synthetic_epochs > max_epochs) {
    throw DataError("config: synthetic_epochs must not exceed max_epochs");
  }
  if (vocab_min_count == 0) {
    throw DataError("config: vocab_min_count must be positive");
  }
}

std::map<std::string, std::string> TrainConfig::to_map() const {
  std::map<std::string, std::string> kv;
  kv["width"] = std::to_string(width);
  {
    std::ostringstream os;
    os << dropout_keep;
    kv["dropout_keep"] = os.str();
  }
  kv["batch_size"] = std::to_string(batch_size);
  {
    std::ostringstream os;
    os << learning_rate;
    kv["learning_rate"] = os.str();
  }
  kv["dense_layers"] = std::to_string(dense_layers);
  kv["max_epochs"] = std::to_string(max_epochs);
  kv["synthetic_epochs"] = std::to_string(synthetic_epochs);
  kv["selection_metric"] = selection_metric_name(selection_metric);
  kv["seed"] = std::to_string(seed);
  kv["clamp_predictions"] = clamp_predictions ? "true" : "false";
  kv["activation"] = tanh_dense ? "tanh" : "identity";
  kv["vocab_min_count"] = std::to_string(vocab_min_count);
  return kv;
}

void TrainConfig::set(const std::string& key, const std::string& value) {
  if (key == "width") {
    width = parse_size(value, key);
  } else if (key == "dropout_keep") {
    dropout_keep = parse_double(value, key);
  } else if (key == "batch_size") {
    batch_size = parse_size(value, key);
  } else if (key == "learning_rate") {
    learning_rate = parse_double(value, key);
  } else if (key == "dense_layers") {
    dense_layers = parse_size(value, key);
  } else if (key == "max_epochs") {
    max_epochs = parse_size(value, key);
  } else if (key == "synthetic_epochs") {
    synthetic_epochs = parse_size(value, key);
  } else if (key == "selection_metric") {
    selection_metric = selection_metric_from_name(value);
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(parse_size(value, key));
  } else if (key == "clamp_predictions") {
    clamp_predictions = parse_bool(value, key);
  } else if (key == "activation") {
    if (value == "tanh") {
      tanh_dense = true;
    } else if (value == "identity") {
      tanh_dense = false;
    } else {
      throw DataError("config: unknown activation '" + value + "'");
    }
  } else if (key == "vocab_min_count") {
    vocab_min_count = parse_size(value, key);
  } else {
    throw DataError("config: unknown key '" + key + "'");
  }
}

TrainConfig TrainConfig::from_map(const std::map<std::string, std::string>& kv) {
  TrainConfig c;
  for (const auto& [key, value] : kv) c.set(key, value);
  c.validate();
  return c;
}

TrainConfig TrainConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  TrainConfig c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected key = value");
    }
    try {
      c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

void TrainConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write config file: " + path);
  for (const auto& [key, value] : to_map()) {
    out << key << " = " << value << '\n';
  }
}

}  // namespace nlgqe
