#include "nlgqe/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "nlgqe/error.hpp"
#include "nlgqe/rng.hpp"

namespace nlgqe {

namespace {

using nlohmann::json;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string location(const std::string& path, std::size_t lineno) {
  return path + ":" + std::to_string(lineno);
}

double parse_real(const std::string& s, const std::string& where,
                  const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": cannot parse " + what + " '" + s + "'");
  }
}

long parse_rank(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    if (v <= 0) throw DataError(where + ": rank must be positive, got " + s);
    return v;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception&) {
    throw DataError(where + ": cannot parse rank '" + s + "'");
  }
}

struct DelexPair {
  MeaningRepresentation mr;
  TextOutput text;
};

DelexPair prepare(const std::string& mr_text, const std::string& raw_text,
                  const LoadOptions& options, const std::string& where) {
  MeaningRepresentation mr;
  try {
    mr = parse_mr(mr_text);
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  }
  TextOutput text = make_text(raw_text);
  if (!options.apply_delex) return {std::move(mr), std::move(text)};
  DelexResult d = delexicalize(mr, text, options.rules);
  return {std::move(d.mr), std::move(d.text)};
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

Dataset load_ratings(const std::string& path, Criterion criterion,
                     const LoadOptions& options) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw DataError(path + ": missing header line");
  Dataset out;
  out.criterion = criterion;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = location(path, i + 1);
    const auto fields = split_tabs(lines[i]);
    if (fields.size() != 4) {
      throw DataError(where + ": expected 4 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    const double rating = parse_real(fields[3], where, "rating");
    if (rating < 1.0 || rating > 6.0) {
      throw DataError(where + ": rating " + fields[3] +
                      " outside the 1-6 scale");
    }
    DelexPair p = prepare(fields[0], fields[2], options, where);
    out.instances.push_back(QEInstance::rating_instance(
        std::move(p.mr), std::move(p.text), rating, false,
        "ratings:" + fields[1]));
  }
  return out;
}

Dataset load_rankings(const std::string& path, Criterion criterion,
                      const LoadOptions& options) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw DataError(path + ": missing header line");
  Dataset out;
  out.criterion = criterion;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = location(path, i + 1);
    const auto fields = split_tabs(lines[i]);
    if (fields.size() < 7 || (fields.size() - 1) % 3 != 0) {
      throw DataError(where +
                      ": expected mr plus 2-5 (system, text, rank) triples");
    }
    const std::size_t n_outputs = (fields.size() - 1) / 3;
    if (n_outputs > 5) {
      throw DataError(where + ": more than 5 outputs in one record");
    }
    struct Output {
      std::string system;
      std::string text;
      long rank;
    };
    std::vector<Output> outputs;
    for (std::size_t k = 0; k < n_outputs; ++k) {
      outputs.push_back({fields[1 + 3 * k], fields[2 + 3 * k],
                         parse_rank(fields[3 + 3 * k], where)});
    }
    for (std::size_t a = 0; a < outputs.size(); ++a) {
      for (std::size_t b = a + 1; b < outputs.size(); ++b) {
        if (outputs[a].rank == outputs[b].rank) continue;  // tie, dropped
        const Output& better =
            outputs[a].rank < outputs[b].rank ? outputs[a] : outputs[b];
        const Output& worse =
            outputs[a].rank < outputs[b].rank ? outputs[b] : outputs[a];
        DelexPair pb = prepare(fields[0], better.text, options, where);
        DelexPair pw = prepare(fields[0], worse.text, options, where);
        out.instances.push_back(QEInstance::ranking_instance(
            std::move(pb.mr), std::move(pb.text), std::move(pw.text), false,
            "rankings:" + better.system + ">" + worse.system));
      }
    }
  }
  return out;
}

std::string instance_to_json(const QEInstance& inst) {
  json j;
  j["mr"] = format_mr(inst.mr());
  j["text_a"] = inst.text_a().raw;
  j["text_b"] = inst.text_b() ? json(inst.text_b()->raw) : json(nullptr);
  j["rating"] = inst.rating() ? json(*inst.rating()) : json(nullptr);
  j["is_ranking"] = inst.is_ranking();
  j["is_synthetic"] = inst.is_synthetic();
  j["source_tag"] = inst.source_tag();
  return j.dump();
}

QEInstance instance_from_json(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad JSONL line: ") + e.what());
  }
  try {
    const MeaningRepresentation mr = parse_mr(j.at("mr").get<std::string>());
    const bool is_ranking = j.at("is_ranking").get<bool>();
    const bool is_synthetic = j.value("is_synthetic", false);
    const std::string tag = j.value("source_tag", std::string{});
    TextOutput text_a = make_text(j.at("text_a").get<std::string>());
    if (is_ranking) {
      if (j.at("text_b").is_null() || !j.at("rating").is_null()) {
        throw DataError("ranking instance needs text_b and no rating");
      }
      return QEInstance::ranking_instance(
          mr, std::move(text_a), make_text(j.at("text_b").get<std::string>()),
          is_synthetic, tag);
    }
    if (!j.at("text_b").is_null() || j.at("rating").is_null()) {
      throw DataError("rating instance needs a rating and no text_b");
    }
    return QEInstance::rating_instance(mr, std::move(text_a),
                                       j.at("rating").get<double>(),
                                       is_synthetic, tag);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad JSONL line: ") + e.what());
  }
}

void write_jsonl(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (const QEInstance& inst : dataset.instances) {
    out << instance_to_json(inst) << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

Dataset read_jsonl(const std::string& path, Criterion criterion) {
  const auto lines = read_lines(path);
  Dataset out;
  out.criterion = criterion;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      out.instances.push_back(instance_from_json(lines[i]));
    } catch (const DataError& e) {
      throw DataError(location(path, i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::string mr_key(const QEInstance& inst) { return format_mr(inst.mr()); }

namespace {

// Distinct MR keys in first-appearance order.
std::vector<std::string> distinct_mrs(const Dataset& dataset) {
  std::vector<std::string> keys;
  std::unordered_map<std::string, bool> seen;
  for (const QEInstance& inst : dataset.instances) {
    std::string key = mr_key(inst);
    if (!seen.emplace(key, true).second) continue;
    keys.push_back(std::move(key));
  }
  return keys;
}

Dataset collect(const Dataset& dataset,
                const std::unordered_map<std::string, int>& assignment,
                int section) {
  Dataset out;
  out.criterion = dataset.criterion;
  for (const QEInstance& inst : dataset.instances) {
    if (assignment.at(mr_key(inst)) == section) out.instances.push_back(inst);
  }
  return out;
}

}  // namespace

Split split_by_mr(const Dataset& dataset, const SplitSpec& spec) {
  if (dataset.instances.empty()) throw DataError("split_by_mr: empty dataset");
  for (double r : spec.ratios) {
    if (r < 0) throw DataError("split_by_mr: negative ratio");
  }
  const double total = spec.ratios[0] + spec.ratios[1] + spec.ratios[2];
  if (total <= 0) throw DataError("split_by_mr: ratios sum to zero");

  std::vector<std::string> keys = distinct_mrs(dataset);
  if (keys.size() < 3) {
    throw DataError("split_by_mr: need at least 3 distinct MRs, have " +
                    std::to_string(keys.size()));
  }
  Rng rng(derive_seed(spec.seed, "split"));
  rng.shuffle(keys);

  // Largest-remainder apportionment of MR counts to the three sections.
  const std::size_t n = keys.size();
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (int s = 0; s < 3; ++s) {
    const double exact = static_cast<double>(n) * spec.ratios[s] / total;
    counts[s] = static_cast<std::size_t>(exact);
    frac[s] = exact - static_cast<double>(counts[s]);
    assigned += counts[s];
  }
  while (assigned < n) {
    int best = 0;
    for (int s = 1; s < 3; ++s) {
      if (frac[s] > frac[best]) best = s;
    }
    ++counts[best];
    frac[best] = -1;
    ++assigned;
  }
  // No section may end up empty while MRs remain.
  for (int s = 0; s < 3; ++s) {
    if (counts[s] > 0) continue;
    int donor = 0;
    for (int d = 1; d < 3; ++d) {
      if (counts[d] > counts[donor]) donor = d;
    }
    if (counts[donor] <= 1) throw DataError("split_by_mr: too few MRs");
    --counts[donor];
    ++counts[s];
  }

  std::unordered_map<std::string, int> assignment;
  std::size_t cursor = 0;
  for (int s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < counts[s]; ++i) {
      assignment.emplace(keys[cursor++], s);
    }
  }
  return Split{collect(dataset, assignment, 0), collect(dataset, assignment, 1),
               collect(dataset, assignment, 2)};
}

std::vector<Split> cv_folds(const Dataset& dataset, std::size_t k,
                            std::uint64_t seed) {
  if (k < 3) throw DataError("cv_folds: k must be >= 3");
  if (dataset.instances.empty()) throw DataError("cv_folds: empty dataset");
  std::vector<std::string> keys = distinct_mrs(dataset);
  if (keys.size() < k) {
    throw DataError("cv_folds: need at least " + std::to_string(k) +
                    " distinct MRs, have " + std::to_string(keys.size()));
  }
  Rng rng(derive_seed(seed, "cv"));
  rng.shuffle(keys);

  // Block b gets floor(n/k) MRs, the first n%k blocks one extra.
  const std::size_t n = keys.size();
  std::unordered_map<std::string, std::size_t> block_of;
  std::size_t cursor = 0;
  std::vector<std::size_t> block_sizes(k, n / k);
  for (std::size_t b = 0; b < n % k; ++b) ++block_sizes[b];
  for (std::size_t b = 0; b < k; ++b) {
    for (std::size_t i = 0; i < block_sizes[b]; ++i) {
      block_of.emplace(keys[cursor++], b);
    }
  }

  std::vector<Split> folds;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t dev_block = (i + 1) % k;
    Split fold;
    fold.train.criterion = dataset.criterion;
    fold.dev.criterion = dataset.criterion;
    fold.test.criterion = dataset.criterion;
    for (const QEInstance& inst : dataset.instances) {
      const std::size_t b = block_of.at(mr_key(inst));
      if (b == i) {
        fold.test.instances.push_back(inst);
      } else if (b == dev_block) {
        fold.dev.instances.push_back(inst);
      } else {
        fold.train.instances.push_back(inst);
      }
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

}  // namespace nlgqe
