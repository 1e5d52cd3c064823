#include "nlgqe/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlgqe/corpus_io.hpp"
#include "nlgqe/delex.hpp"
#include "nlgqe/error.hpp"
#include "nlgqe/evaluator.hpp"
#include "nlgqe/qe_model.hpp"
#include "nlgqe/rng.hpp"
#include "nlgqe/synth.hpp"
#include "nlgqe/trainer.hpp"

namespace nlgqe {
namespace {

constexpr const char* kToolVersion = "nlgqe 1.0.0";
constexpr const char* kConfigEnvVar = "NLGQE_CONFIG";

// Bad flag combinations detected after CLI11 parsing; maps to exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a(ss.str()));
}

// Reproducibility record written next to every primary output file.
struct Manifest {
  std::string subcommand;
  std::vector<std::string> argv;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> config;

  void write(const std::string& path) const {
    nlohmann::json j;
    j["tool"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["argv"] = argv;
    j["seed"] = seed;
    j["inputs"] = nlohmann::json::object();
    for (const auto& p : inputs) j["inputs"][p] = file_digest(p);
    j["outputs"] = outputs;
    if (!config.empty()) j["config"] = config;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << "\n";
  }
};

nlohmann::json report_json(const MetricReport& report) {
  nlohmann::json j;
  j["task"] = report.task;
  j["n"] = report.n;
  for (const auto& [name, value] : report.values) j[name] = value;
  return j;
}

void emit_json(const nlohmann::json& j, const std::string& out_path) {
  std::cout << j.dump(2) << "\n";
  if (out_path.empty()) return;
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write " + out_path);
  out << j.dump(2) << "\n";
}

TrainConfig resolve_config(const std::string& flag_path) {
  if (!flag_path.empty()) return TrainConfig::load(flag_path);
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') {
    return TrainConfig::load(env);
  }
  return {};
}

void apply_overrides(TrainConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--set expects key=value, got '" + kv + "'");
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      seeds.push_back(std::stoull(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad seed '" + item + "' in --seeds");
    }
  }
  if (seeds.empty()) throw UsageError("--seeds needs at least one value");
  return seeds;
}

QEInstance delex_instance(const QEInstance& inst,
                          const std::vector<DelexRule>& rules) {
  DelexResult a = delexicalize(inst.mr(), inst.text_a(), rules);
  if (inst.is_ranking()) {
    DelexResult b = delexicalize(inst.mr(), *inst.text_b(), rules);
    return QEInstance::ranking_instance(a.mr, a.text, b.text,
                                        inst.is_synthetic(), inst.source_tag());
  }
  return QEInstance::rating_instance(a.mr, a.text, *inst.rating(),
                                     inst.is_synthetic(), inst.source_tag());
}

// Checkpoints carry their own delex rules; inputs scored through a model are
// normalised with them first (a no-op for already-delexicalised data).
Dataset delex_dataset(const Dataset& dataset,
                      const std::vector<DelexRule>& rules) {
  Dataset out;
  out.criterion = dataset.criterion;
  out.instances.reserve(dataset.instances.size());
  for (const auto& inst : dataset.instances) {
    out.instances.push_back(delex_instance(inst, rules));
  }
  return out;
}

std::vector<std::pair<MeaningRepresentation, TextOutput>> read_refs(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("mr\t", 0) != 0) {
    throw DataError(path + ": expected header starting with mr<TAB>");
  }
  std::vector<std::pair<MeaningRepresentation, TextOutput>> refs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected mr<TAB>text");
    }
    refs.emplace_back(parse_mr(line.substr(0, tab)),
                      make_text(line.substr(tab + 1)));
  }
  return refs;
}

std::vector<double> gold_ratings(const Dataset& dataset,
                                 const std::string& path) {
  std::vector<double> golds;
  for (const auto& inst : dataset.instances) {
    if (inst.is_ranking()) {
      throw DataError(path + ": rating gold file contains ranking instances");
    }
    golds.push_back(*inst.rating());
  }
  if (golds.empty()) throw DataError(path + ": no rating instances");
  return golds;
}

void check_prediction_ids(const std::vector<std::string>& ids_a,
                          const std::vector<std::string>& ids_b) {
  if (ids_a.size() != ids_b.size()) {
    throw DataError("prediction files differ in length");
  }
  for (std::size_t i = 0; i < ids_a.size(); ++i) {
    if (ids_a[i] != ids_b[i]) {
      throw DataError("prediction files disagree on instance id at line " +
                      std::to_string(i + 1));
    }
  }
}

struct IngestArgs {
  std::string format, input, out, criterion = "quality", rules_path;
  bool no_delex = false;
};

void do_ingest(const IngestArgs& a, Manifest manifest) {
  Criterion crit = criterion_from_name(a.criterion);
  LoadOptions options;
  options.apply_delex = !a.no_delex;
  if (!a.rules_path.empty()) options.rules = load_rules(a.rules_path);
  Dataset dataset = a.format == "nem" ? load_ratings(a.input, crit, options)
                                      : load_rankings(a.input, crit, options);
  write_jsonl(dataset, a.out);
  manifest.inputs = {a.input};
  if (!a.rules_path.empty()) manifest.inputs.push_back(a.rules_path);
  manifest.outputs = {a.out};
  manifest.write(a.out + ".manifest.json");
  std::cerr << "ingested " << dataset.instances.size() << " instances from "
            << a.input << "\n";
}

struct SplitArgs {
  std::string input, out_prefix, ratios = "8:1:1";
  std::uint64_t seed = 1;
  std::size_t cv = 0;
};

std::array<double, 3> parse_ratios(const std::string& text) {
  std::array<double, 3> ratios{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ':')) {
    if (i >= 3) throw UsageError("--ratios expects a:b:c");
    try {
      ratios[i++] = std::stod(item);
    } catch (const std::exception&) {
      throw UsageError("bad ratio '" + item + "'");
    }
  }
  if (i != 3) throw UsageError("--ratios expects a:b:c");
  return ratios;
}

void write_split(const Split& split, const std::string& prefix,
                 std::vector<std::string>& outputs) {
  write_jsonl(split.train, prefix + ".train.jsonl");
  write_jsonl(split.dev, prefix + ".dev.jsonl");
  write_jsonl(split.test, prefix + ".test.jsonl");
  for (const char* part : {".train.jsonl", ".dev.jsonl", ".test.jsonl"}) {
    outputs.push_back(prefix + part);
  }
}

void do_split(const SplitArgs& a, Manifest manifest) {
  Dataset dataset = read_jsonl(a.input);
  manifest.inputs = {a.input};
  if (a.cv > 0) {
    std::vector<Split> folds = cv_folds(dataset, a.cv, a.seed);
    for (std::size_t i = 0; i < folds.size(); ++i) {
      write_split(folds[i], a.out_prefix + ".fold" + std::to_string(i),
                  manifest.outputs);
    }
  } else {
    SplitSpec spec{parse_ratios(a.ratios), a.seed};
    write_split(split_by_mr(dataset, spec), a.out_prefix, manifest.outputs);
  }
  manifest.write(a.out_prefix + ".manifest.json");
  std::cerr << "split " << dataset.instances.size() << " instances\n";
}

struct SynthArgs {
  std::string input, out, refs_path, rules_path;
  std::string mode = "auto", sources = "outputs";
  std::size_t max_errors = 4, random_pairs = 5;
  std::uint64_t seed = 1;
  bool include_input = false;
  bool no_delex = false;
};

void do_synth(const SynthArgs& a, Manifest manifest) {
  Dataset dataset = read_jsonl(a.input);
  manifest.inputs = {a.input};

  std::vector<SyntheticSource> sources;
  if (a.sources == "outputs") {
    sources = sources_from_outputs(dataset);
  } else {
    if (a.refs_path.empty()) {
      throw UsageError("--sources " + a.sources + " requires --refs");
    }
    manifest.inputs.push_back(a.refs_path);
    auto refs = read_refs(a.refs_path);
    if (!a.no_delex) {
      std::vector<DelexRule> rules = a.rules_path.empty()
                                         ? default_rules()
                                         : load_rules(a.rules_path);
      if (!a.rules_path.empty()) manifest.inputs.push_back(a.rules_path);
      for (auto& [mr, text] : refs) {
        DelexResult r = delexicalize(mr, text, rules);
        mr = r.mr;
        text = r.text;
      }
    }
    sources = sources_from_references(
        refs, a.sources == "train-refs"
                  ? SyntheticProvenance::kHumanReferenceTrain
                  : SyntheticProvenance::kHumanReferenceTest);
  }

  SynthOptions options;
  options.max_errors = a.max_errors;
  options.n_random_pairs = a.random_pairs;
  options.seed = a.seed;
  if (a.mode == "auto") {
    bool any_rating = false;
    for (const auto& inst : dataset.instances) {
      if (!inst.is_ranking()) any_rating = true;
    }
    options.make_ratings = any_rating;
  } else {
    options.make_ratings = a.mode == "ratings" || a.mode == "both";
    options.make_pairs = a.mode == "pairs" || a.mode == "both";
  }

  Dataset synth = synthesize(sources, options, dataset.criterion);
  if (a.include_input) {
    Dataset combined;
    combined.criterion = dataset.criterion;
    combined.instances = dataset.instances;
    combined.instances.insert(combined.instances.end(),
                              synth.instances.begin(), synth.instances.end());
    write_jsonl(combined, a.out);
  } else {
    write_jsonl(synth, a.out);
  }
  manifest.outputs = {a.out};
  manifest.write(a.out + ".manifest.json");
  std::cerr << "synthesised " << synth.instances.size() << " instances from "
            << sources.size() << " sources\n";
}

struct TrainArgs {
  std::string train_path, dev_path, out, config_path, rules_path;
  std::vector<std::string> sets;
  std::uint64_t seed = 1;
  bool seed_given = false;
};

void do_train(const TrainArgs& a, Manifest manifest) {
  TrainConfig cfg = resolve_config(a.config_path);
  apply_overrides(cfg, a.sets);
  if (a.seed_given) cfg.seed = a.seed;
  std::vector<DelexRule> rules =
      a.rules_path.empty() ? default_rules() : load_rules(a.rules_path);

  Dataset train_set = read_jsonl(a.train_path);
  Dataset dev_set = read_jsonl(a.dev_path);
  TrainResult result = train(train_set, dev_set, cfg, rules);
  result.model.save(a.out);

  nlohmann::json hist;
  hist["selection_metric"] = result.history.selection_metric;
  hist["selected_epoch"] = result.history.selected_epoch;
  hist["epochs"] = nlohmann::json::array();
  for (const auto& e : result.history.epochs) {
    hist["epochs"].push_back({{"epoch", e.epoch},
                              {"train_loss", e.train_loss},
                              {"dev_metric", e.dev_metric},
                              {"seconds", e.seconds},
                              {"n_instances", e.n_instances}});
  }
  std::ofstream hout(a.out + ".history.json");
  if (!hout) throw DataError("cannot write " + a.out + ".history.json");
  hout << hist.dump(2) << "\n";

  manifest.seed = cfg.seed;
  manifest.config = cfg.to_map();
  manifest.inputs = {a.train_path, a.dev_path};
  if (!a.config_path.empty()) manifest.inputs.push_back(a.config_path);
  if (!a.rules_path.empty()) manifest.inputs.push_back(a.rules_path);
  manifest.outputs = {a.out, a.out + ".history.json"};
  manifest.write(a.out + ".manifest.json");
  std::cerr << "selected epoch " << result.history.selected_epoch << " ("
            << result.history.selection_metric << " "
            << result.model.meta().dev_metric << ")\n";
}

struct PredictArgs {
  std::string model_path, input, out;
};

void do_predict(const PredictArgs& a, Manifest manifest) {
  QEModel model = QEModel::load(a.model_path);
  Dataset dataset = delex_dataset(read_jsonl(a.input), model.rules());
  std::vector<RatingPrediction> preds;
  preds.reserve(dataset.instances.size());
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    const auto& inst = dataset.instances[i];
    preds.push_back(
        {std::to_string(i), model.predict_rating(inst.mr(), inst.text_a())});
  }
  write_rating_predictions(a.out, preds);
  manifest.inputs = {a.model_path, a.input};
  manifest.outputs = {a.out};
  manifest.write(a.out + ".manifest.json");
  std::cerr << "predicted " << preds.size() << " ratings\n";
}

struct RankArgs {
  std::string model_path, input, out;
  bool pair = false;
  bool nbest = false;
};

void do_rank_pairs(QEModel& model, const std::string& input,
                   const std::string& out) {
  Dataset dataset = delex_dataset(read_jsonl(input), model.rules());
  std::vector<RankingPrediction> preds;
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    const auto& inst = dataset.instances[i];
    if (!inst.is_ranking()) {
      throw DataError(input + ": rank --pair expects ranking instances");
    }
    RankResult r = model.rank_pair(inst.mr(), inst.text_a(), *inst.text_b());
    const char* decision = r.decision == PairDecision::kABetter  ? "a"
                           : r.decision == PairDecision::kBBetter ? "b"
                                                                  : "tie";
    preds.push_back({std::to_string(i), decision, r.margin});
  }
  write_ranking_predictions(out, preds);
  std::cerr << "ranked " << preds.size() << " pairs\n";
}

void do_rank_nbest(QEModel& model, const std::string& input,
                   const std::string& out) {
  std::ifstream in(input);
  if (!in) throw DataError("cannot read " + input);
  std::string line;
  if (!std::getline(in, line) || line.rfind("mr\t", 0) != 0) {
    throw DataError(input + ": expected header starting with mr<TAB>");
  }
  std::ofstream os(out);
  if (!os) throw DataError("cannot write " + out);
  std::size_t line_no = 1, groups = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos
                                              ? std::string::npos
                                              : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 3) {
      throw DataError(input + ":" + std::to_string(line_no) +
                      ": need an MR and at least two texts");
    }
    MeaningRepresentation mr = parse_mr(fields[0]);
    std::vector<TextOutput> texts;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      DelexResult r = delexicalize(mr, make_text(fields[i]), model.rules());
      if (i == 1) mr = r.mr;
      texts.push_back(r.text);
    }
    std::vector<std::size_t> order = model.rank_n(mr, texts);
    os << groups;
    for (std::size_t i = 0; i < order.size(); ++i) {
      os << (i == 0 ? '\t' : ',') << order[i] + 1;
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", model.score(mr, texts[i]));
      os << (i == 0 ? '\t' : ',') << buf;
    }
    os << '\n';
    ++groups;
  }
  std::cerr << "ranked " << groups << " groups\n";
}

void do_rank(const RankArgs& a, Manifest manifest) {
  if (a.pair == a.nbest) {
    throw UsageError("rank needs exactly one of --pair / --nbest");
  }
  QEModel model = QEModel::load(a.model_path);
  if (a.pair) {
    do_rank_pairs(model, a.input, a.out);
  } else {
    do_rank_nbest(model, a.input, a.out);
  }
  manifest.inputs = {a.model_path, a.input};
  manifest.outputs = {a.out};
  manifest.write(a.out + ".manifest.json");
}

struct EvalArgs {
  std::string model_path, input, pred_path, gold_path, task, out;
};

void do_eval(const EvalArgs& a, Manifest manifest) {
  MetricReport report;
  if (!a.model_path.empty()) {
    if (a.input.empty()) throw UsageError("eval --model requires --input");
    QEModel model = QEModel::load(a.model_path);
    Dataset dataset = delex_dataset(read_jsonl(a.input), model.rules());
    report = evaluate_dataset(model, dataset);
    manifest.inputs = {a.model_path, a.input};
  } else {
    if (a.pred_path.empty() || a.gold_path.empty() || a.task.empty()) {
      throw UsageError("eval needs either --model/--input or --pred/--gold/--task");
    }
    Dataset gold = read_jsonl(a.gold_path);
    if (a.task == "rating") {
      std::vector<double> golds = gold_ratings(gold, a.gold_path);
      auto preds = read_rating_predictions(a.pred_path);
      if (preds.size() != golds.size()) {
        throw DataError("prediction/gold instance counts differ");
      }
      std::vector<double> values;
      for (const auto& p : preds) values.push_back(p.value);
      report = rating_report(values, golds);
    } else {
      std::size_t pairs = 0;
      for (const auto& inst : gold.instances) {
        if (!inst.is_ranking()) {
          throw DataError(a.gold_path +
                          ": ranking gold file contains rating instances");
        }
        ++pairs;
      }
      auto preds = read_ranking_predictions(a.pred_path);
      if (preds.size() != pairs) {
        throw DataError("prediction/gold instance counts differ");
      }
      std::vector<PairOutcome> outcomes;
      for (const auto& p : preds) {
        outcomes.push_back({p.decision == "a", p.margin});
      }
      report = ranking_report(outcomes);
    }
    manifest.inputs = {a.pred_path, a.gold_path};
  }
  emit_json(report_json(report), a.out);
  if (!a.out.empty()) {
    manifest.outputs = {a.out};
    manifest.write(a.out + ".manifest.json");
  }
}

struct CompareArgs {
  std::string test = "williams";
  std::string pred_a, pred_b, gold_path, out;
  std::size_t resamples = 1000;
  std::uint64_t seed = 1;
};

void do_compare(const CompareArgs& a, Manifest manifest) {
  nlohmann::json j;
  if (a.test == "williams") {
    if (a.gold_path.empty()) throw UsageError("compare --test williams requires --gold");
    Dataset gold = read_jsonl(a.gold_path);
    std::vector<double> golds = gold_ratings(gold, a.gold_path);
    auto pa = read_rating_predictions(a.pred_a);
    auto pb = read_rating_predictions(a.pred_b);
    std::vector<std::string> ids_a, ids_b;
    std::vector<double> va, vb;
    for (const auto& p : pa) {
      ids_a.push_back(p.id);
      va.push_back(p.value);
    }
    for (const auto& p : pb) {
      ids_b.push_back(p.id);
      vb.push_back(p.value);
    }
    check_prediction_ids(ids_a, ids_b);
    if (va.size() != golds.size()) {
      throw DataError("prediction/gold instance counts differ");
    }
    const double r12 = pearson(va, golds);
    const double r13 = pearson(vb, golds);
    const double r23 = pearson(va, vb);
    WilliamsResult w = williams_test(r12, r13, r23, golds.size());
    j["test"] = "williams";
    j["t"] = w.t;
    j["p"] = w.p;
    j["r12"] = r12;
    j["r13"] = r13;
    j["r23"] = r23;
    j["n"] = golds.size();
    manifest.inputs = {a.pred_a, a.pred_b, a.gold_path};
  } else {
    auto pa = read_ranking_predictions(a.pred_a);
    auto pb = read_ranking_predictions(a.pred_b);
    std::vector<std::string> ids_a, ids_b;
    std::vector<int> oa, ob;
    for (const auto& p : pa) {
      ids_a.push_back(p.id);
      oa.push_back(p.decision == "a" ? 1 : 0);
    }
    for (const auto& p : pb) {
      ids_b.push_back(p.id);
      ob.push_back(p.decision == "a" ? 1 : 0);
    }
    check_prediction_ids(ids_a, ids_b);
    const double p_value =
        bootstrap_compare(oa, ob, a.resamples, derive_seed(a.seed, "bootstrap"));
    double acc_a = 0.0, acc_b = 0.0;
    for (std::size_t i = 0; i < oa.size(); ++i) {
      acc_a += oa[i];
      acc_b += ob[i];
    }
    j["test"] = "bootstrap";
    j["p"] = p_value;
    j["n"] = oa.size();
    j["n_resamples"] = a.resamples;
    j["accuracy_a"] = acc_a / static_cast<double>(oa.size());
    j["accuracy_b"] = acc_b / static_cast<double>(oa.size());
    manifest.inputs = {a.pred_a, a.pred_b};
  }
  emit_json(j, a.out);
  if (!a.out.empty()) {
    manifest.outputs = {a.out};
    manifest.write(a.out + ".manifest.json");
  }
}

struct MultiSeedArgs {
  std::string train_path, dev_path, test_path, out, config_path, rules_path;
  std::vector<std::string> sets;
  std::string seeds = "1,2,3,4,5";
};

void do_multiseed(const MultiSeedArgs& a, Manifest manifest) {
  TrainConfig cfg = resolve_config(a.config_path);
  apply_overrides(cfg, a.sets);
  std::vector<std::uint64_t> seeds = parse_seed_list(a.seeds);
  std::vector<DelexRule> rules =
      a.rules_path.empty() ? default_rules() : load_rules(a.rules_path);

  Dataset train_set = read_jsonl(a.train_path);
  Dataset dev_set = read_jsonl(a.dev_path);
  Dataset test_set = read_jsonl(a.test_path);
  MultiSeedResult result =
      multi_seed_run(train_set, dev_set, test_set, cfg, seeds, rules);

  nlohmann::json j;
  j["seeds"] = result.seeds;
  j["per_seed"] = nlohmann::json::array();
  for (const auto& report : result.per_seed) {
    j["per_seed"].push_back(report_json(report));
  }
  j["averaged"] = report_json(result.averaged);
  emit_json(j, a.out);

  manifest.config = cfg.to_map();
  manifest.inputs = {a.train_path, a.dev_path, a.test_path};
  if (!a.config_path.empty()) manifest.inputs.push_back(a.config_path);
  if (!a.rules_path.empty()) manifest.inputs.push_back(a.rules_path);
  if (!a.out.empty()) {
    manifest.outputs = {a.out};
    manifest.write(a.out + ".manifest.json");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Referenceless quality estimation for generated text"};
  app.name("nlgqe");
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Manifest manifest;
  manifest.argv = args;

  IngestArgs ingest;
  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "Convert a corpus TSV to canonical JSONL");
  ingest_cmd->add_option("--format", ingest.format, "Corpus format")
      ->required()
      ->check(CLI::IsMember({"nem", "e2e"}));
  ingest_cmd->add_option("--input", ingest.input, "Corpus TSV")->required();
  ingest_cmd->add_option("--out", ingest.out, "Output JSONL")->required();
  ingest_cmd->add_option("--criterion", ingest.criterion, "Judged criterion")
      ->check(CLI::IsMember({"quality", "naturalness", "informativeness"}));
  ingest_cmd->add_option("--rules", ingest.rules_path, "Delexicalisation rules");
  ingest_cmd->add_flag("--no-delex", ingest.no_delex, "Skip delexicalisation");
  ingest_cmd->callback([&] {
    manifest.subcommand = "ingest";
    do_ingest(ingest, manifest);
  });

  SplitArgs split;
  CLI::App* split_cmd =
      app.add_subcommand("split", "MR-disjoint train/dev/test split");
  split_cmd->add_option("--input", split.input, "Canonical JSONL")->required();
  split_cmd->add_option("--out-prefix", split.out_prefix, "Output prefix")
      ->required();
  split_cmd->add_option("--ratios", split.ratios, "train:dev:test proportions");
  split_cmd->add_option("--seed", split.seed, "Shuffle seed");
  split_cmd->add_option("--cv", split.cv, "Cross-validation folds instead");
  split_cmd->callback([&] {
    manifest.subcommand = "split";
    manifest.seed = split.seed;
    do_split(split, manifest);
  });

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate corrupted training instances");
  synth_cmd->add_option("--input", synth.input, "Canonical JSONL")->required();
  synth_cmd->add_option("--out", synth.out, "Output JSONL")->required();
  synth_cmd->add_option("--mode", synth.mode, "What to generate")
      ->check(CLI::IsMember({"auto", "ratings", "pairs", "both"}));
  synth_cmd
      ->add_option("--sources", synth.sources, "Where clean texts come from")
      ->check(CLI::IsMember({"outputs", "train-refs", "test-refs"}));
  synth_cmd->add_option("--refs", synth.refs_path,
                        "References TSV (mr<TAB>text) for *-refs sources");
  synth_cmd->add_option("--max-errors", synth.max_errors, "Error levels");
  synth_cmd->add_option("--random-pairs", synth.random_pairs,
                        "Random level pairs per source");
  synth_cmd->add_option("--seed", synth.seed, "Corruption seed");
  synth_cmd->add_flag("--include-input", synth.include_input,
                      "Prepend the input instances to the output");
  synth_cmd->add_option("--rules", synth.rules_path, "Delexicalisation rules");
  synth_cmd->add_flag("--no-delex", synth.no_delex,
                      "Skip delexicalisation of references");
  synth_cmd->callback([&] {
    manifest.subcommand = "synth";
    manifest.seed = synth.seed;
    do_synth(synth, manifest);
  });

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a scoring model");
  train_cmd->add_option("--train", train_args.train_path, "Training JSONL")
      ->required();
  train_cmd->add_option("--dev", train_args.dev_path, "Validation JSONL")
      ->required();
  train_cmd->add_option("--out", train_args.out, "Checkpoint path")->required();
  train_cmd->add_option("--config", train_args.config_path,
                        "key = value config file (default $NLGQE_CONFIG)");
  train_cmd->add_option("--set", train_args.sets,
                        "Config override key=value (repeatable)");
  train_cmd->add_option("--seed", train_args.seed, "Training seed");
  train_cmd->add_option("--rules", train_args.rules_path,
                        "Delexicalisation rules stored in the checkpoint");
  train_cmd->callback([&] {
    manifest.subcommand = "train";
    train_args.seed_given = train_cmd->count("--seed") > 0;
    manifest.seed = train_args.seed;
    do_train(train_args, manifest);
  });

  PredictArgs predict;
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "Score instances as ratings");
  predict_cmd->add_option("--model", predict.model_path, "Checkpoint")
      ->required();
  predict_cmd->add_option("--input", predict.input, "Canonical JSONL")
      ->required();
  predict_cmd->add_option("--out", predict.out, "Predictions TSV")->required();
  predict_cmd->callback([&] {
    manifest.subcommand = "predict";
    do_predict(predict, manifest);
  });

  RankArgs rank;
  CLI::App* rank_cmd = app.add_subcommand("rank", "Rank competing outputs");
  rank_cmd->add_option("--model", rank.model_path, "Checkpoint")->required();
  rank_cmd->add_option("--input", rank.input, "Pairs JSONL or n-best TSV")
      ->required();
  rank_cmd->add_option("--out", rank.out, "Decisions TSV")->required();
  rank_cmd->add_flag("--pair", rank.pair, "Decide ranking pairs from JSONL");
  rank_cmd->add_flag("--nbest", rank.nbest,
                     "Order mr<TAB>text_1<TAB>... groups best-first");
  rank_cmd->callback([&] {
    manifest.subcommand = "rank";
    do_rank(rank, manifest);
  });

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Metric report as JSON");
  eval_cmd->add_option("--model", eval.model_path, "Checkpoint to evaluate");
  eval_cmd->add_option("--input", eval.input, "Canonical JSONL (with --model)");
  eval_cmd->add_option("--pred", eval.pred_path, "Predictions TSV");
  eval_cmd->add_option("--gold", eval.gold_path, "Gold JSONL");
  eval_cmd->add_option("--task", eval.task, "Prediction task")
      ->check(CLI::IsMember({"rating", "ranking"}));
  eval_cmd->add_option("--out", eval.out, "Also write the report here");
  eval_cmd->callback([&] {
    manifest.subcommand = "eval";
    do_eval(eval, manifest);
  });

  CompareArgs compare;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Significance test between two systems");
  compare_cmd->add_option("--test", compare.test, "Test kind")
      ->check(CLI::IsMember({"williams", "bootstrap"}));
  compare_cmd->add_option("--pred-a", compare.pred_a, "System A predictions")
      ->required();
  compare_cmd->add_option("--pred-b", compare.pred_b, "System B predictions")
      ->required();
  compare_cmd->add_option("--gold", compare.gold_path, "Gold JSONL (williams)");
  compare_cmd->add_option("--resamples", compare.resamples,
                          "Bootstrap resamples");
  compare_cmd->add_option("--seed", compare.seed, "Bootstrap seed");
  compare_cmd->add_option("--out", compare.out, "Also write the result here");
  compare_cmd->callback([&] {
    manifest.subcommand = "compare";
    manifest.seed = compare.seed;
    do_compare(compare, manifest);
  });

  MultiSeedArgs multiseed;
  CLI::App* multiseed_cmd =
      app.add_subcommand("multiseed", "Train over several seeds and average");
  multiseed_cmd->add_option("--train", multiseed.train_path, "Training JSONL")
      ->required();
  multiseed_cmd->add_option("--dev", multiseed.dev_path, "Validation JSONL")
      ->required();
  multiseed_cmd->add_option("--test", multiseed.test_path, "Test JSONL")
      ->required();
  multiseed_cmd->add_option("--out", multiseed.out, "Report JSON path");
  multiseed_cmd->add_option("--config", multiseed.config_path,
                            "key = value config file (default $NLGQE_CONFIG)");
  multiseed_cmd->add_option("--set", multiseed.sets,
                            "Config override key=value (repeatable)");
  multiseed_cmd->add_option("--seeds", multiseed.seeds,
                            "Comma-separated seed list");
  multiseed_cmd->callback([&] {
    manifest.subcommand = "multiseed";
    do_multiseed(multiseed, manifest);
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace nlgqe
