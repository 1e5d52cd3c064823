#include "nlgqe/qe_model.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "nlgqe/error.hpp"

namespace nlgqe {

namespace {

using nlohmann::json;

constexpr const char* kMagic = "NLGQE-CKPT";
constexpr int kFormatVersion = 1;

std::string level_name(DelexLevel level) {
  switch (level) {
    case DelexLevel::kFull: return "full";
    case DelexLevel::kNamesOnly: return "names_only";
    case DelexLevel::kNone: return "none";
  }
  return "none";
}

DelexLevel level_from_name(const std::string& name) {
  if (name == "full") return DelexLevel::kFull;
  if (name == "names_only") return DelexLevel::kNamesOnly;
  if (name == "none") return DelexLevel::kNone;
  throw CheckpointCorruptError("checkpoint: unknown delex level " + name);
}

}  // namespace

QEModel::QEModel(Vocabulary vocab, TrainConfig config,
                 std::vector<DelexRule> rules)
    : vocab_(std::move(vocab)),
      config_(std::move(config)),
      rules_(std::move(rules)) {
  config_.validate();
  const std::size_t w = config_.width;
  embedding_ = Parameter("embedding", Tensor({vocab_.size(), w}));
  mr_fwd_ = GRUParams("mr_fwd", w, w);
  mr_bwd_ = GRUParams("mr_bwd", w, w);
  txt_fwd_ = GRUParams("txt_fwd", w, w);
  txt_bwd_ = GRUParams("txt_bwd", w, w);
  for (std::size_t l = 0; l < config_.dense_layers; ++l) {
    const std::size_t in = l == 0 ? 4 * w : w;
    dense_w_.emplace_back("dense" + std::to_string(l) + ".w",
                          Tensor({w, in}));
    dense_b_.emplace_back("dense" + std::to_string(l) + ".b", Tensor({w}));
  }
  out_w_ = Parameter("out.w", Tensor({std::size_t{1}, w}));
  out_b_ = Parameter("out.b", Tensor({std::size_t{1}}));
}

void QEModel::init_parameters(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "init"));
  init_uniform(embedding_, rng, 0.1);
  init_gru(mr_fwd_, rng);
  init_gru(mr_bwd_, rng);
  init_gru(txt_fwd_, rng);
  init_gru(txt_bwd_, rng);
  for (std::size_t l = 0; l < dense_w_.size(); ++l) {
    init_glorot(dense_w_[l], rng);
    dense_b_[l].value.fill(0.0);
  }
  init_glorot(out_w_, rng);
  out_b_.value.fill(0.0);
  meta_.seed = seed;
}

std::vector<Parameter*> QEModel::parameters() {
  std::vector<Parameter*> out;
  out.push_back(&embedding_);
  for (GRUParams* g : {&mr_fwd_, &mr_bwd_, &txt_fwd_, &txt_bwd_}) {
    for (Parameter* p : g->parameters()) out.push_back(p);
  }
  for (std::size_t l = 0; l < dense_w_.size(); ++l) {
    out.push_back(&dense_w_[l]);
    out.push_back(&dense_b_[l]);
  }
  out.push_back(&out_w_);
  out.push_back(&out_b_);
  return out;
}

std::vector<Tensor> QEModel::snapshot_parameters() const {
  std::vector<Tensor> out;
  auto& self = const_cast<QEModel&>(*this);
  for (Parameter* p : self.parameters()) out.push_back(p->value);
  return out;
}

void QEModel::restore_parameters(const std::vector<Tensor>& snapshot) {
  auto params = parameters();
  if (snapshot.size() != params.size()) {
    throw DataError("restore_parameters: snapshot size mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->value.same_shape(snapshot[i])) {
      throw DataError("restore_parameters: shape mismatch for " +
                      params[i]->name);
    }
    params[i]->value = snapshot[i];
  }
}

std::vector<int> QEModel::encode_tokens(
    const std::vector<std::string>& tokens) const {
  std::vector<int> ids = vocab_.encode(tokens);
  if (ids.empty()) ids.push_back(vocab_.pad_id());  // corrupted-away texts
  return ids;
}

Var QEModel::mr_encoding(Tape& tape, const MeaningRepresentation& mr,
                         const ForwardOptions& opts) {
  const std::vector<int> ids = encode_tokens(linearize_mr(mr));
  Var emb = tape.embed_rows(tape.param(embedding_), ids);
  if (opts.train_mode && config_.dropout_keep < 1.0) {
    if (opts.rng == nullptr) throw DataError("train-mode forward needs an rng");
    emb = tape.mask_mul(
        emb, dropout_mask(tape.val(emb).dims, config_.dropout_keep, *opts.rng));
  }
  return bidir_encode(tape, emb, mr_fwd_, mr_bwd_);
}

Var QEModel::score_branch(Tape& tape, Var mr_enc, const TextOutput& text,
                          const ForwardOptions& opts) {
  const std::vector<int> ids = encode_tokens(text.tokens);
  Var emb = tape.embed_rows(tape.param(embedding_), ids);
  if (opts.train_mode && config_.dropout_keep < 1.0) {
    if (opts.rng == nullptr) throw DataError("train-mode forward needs an rng");
    emb = tape.mask_mul(
        emb, dropout_mask(tape.val(emb).dims, config_.dropout_keep, *opts.rng));
  }
  Var txt_enc = bidir_encode(tape, emb, txt_fwd_, txt_bwd_);
  Var h = tape.concat(mr_enc, txt_enc);
  const Activation act =
      config_.tanh_dense ? Activation::kTanh : Activation::kIdentity;
  for (std::size_t l = 0; l < dense_w_.size(); ++l) {
    h = dense(tape, h, dense_w_[l], dense_b_[l], act);
  }
  return dense(tape, h, out_w_, out_b_, Activation::kIdentity);
}

Var QEModel::score_on_tape(Tape& tape, const MeaningRepresentation& mr,
                           const TextOutput& text, const ForwardOptions& opts) {
  return score_branch(tape, mr_encoding(tape, mr, opts), text, opts);
}

double QEModel::score(const MeaningRepresentation& mr, const TextOutput& text) {
  Tape tape;
  return tape.val(score_on_tape(tape, mr, text, {})).v[0];
}

double QEModel::predict_rating(const MeaningRepresentation& mr,
                               const TextOutput& text) {
  const double s = score(mr, text);
  if (!config_.clamp_predictions) return s;
  return std::min(6.0, std::max(1.0, s));
}

ScorePair QEModel::score_pair(const MeaningRepresentation& mr,
                              const TextOutput& a, const TextOutput& b) {
  Tape tape;
  ForwardOptions opts;
  Var mr_enc = mr_encoding(tape, mr, opts);
  const double sa = tape.val(score_branch(tape, mr_enc, a, opts)).v[0];
  const double sb = tape.val(score_branch(tape, mr_enc, b, opts)).v[0];
  ScorePair out;
  out.score_a = sa;
  out.score_b = sb;
  out.margin = sa - sb;
  return out;
}

RankResult QEModel::rank_pair(const MeaningRepresentation& mr,
                              const TextOutput& a, const TextOutput& b) {
  const ScorePair s = score_pair(mr, a, b);
  RankResult r;
  r.margin = *s.margin;
  if (r.margin > 0.0) {
    r.decision = PairDecision::kABetter;
  } else if (r.margin < 0.0) {
    r.decision = PairDecision::kBBetter;
  } else {
    r.decision = PairDecision::kTie;
  }
  return r;
}

std::vector<std::size_t> QEModel::rank_n(const MeaningRepresentation& mr,
                                         const std::vector<TextOutput>& texts) {
  if (texts.empty()) throw DataError("rank_n: no texts to rank");
  Tape tape;
  ForwardOptions opts;
  Var mr_enc = mr_encoding(tape, mr, opts);
  std::vector<double> scores;
  scores.reserve(texts.size());
  for (const TextOutput& t : texts) {
    scores.push_back(tape.val(score_branch(tape, mr_enc, t, opts)).v[0]);
  }
  std::vector<std::size_t> order(texts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

Var QEModel::instance_loss(Tape& tape, const QEInstance& instance,
                           const ForwardOptions& opts) {
  Var mr_enc = mr_encoding(tape, instance.mr(), opts);
  Var score_a = score_branch(tape, mr_enc, instance.text_a(), opts);
  if (!instance.is_ranking()) {
    Var target = tape.constant_scalar(*instance.rating());
    return tape.square(tape.sub(score_a, target));
  }
  Var score_b = score_branch(tape, mr_enc, *instance.text_b(), opts);
  return tape.hinge_from_margin(tape.sub(score_a, score_b));
}

void QEModel::save(const std::string& path) const {
  json header;
  header["config"] = config_.to_map();
  header["vocab"] = vocab_.tokens();
  json rules = json::array();
  for (const DelexRule& r : rules_) {
    rules.push_back({{"attribute", r.attribute},
                     {"level", level_name(r.level)},
                     {"exceptions", r.exceptions}});
  }
  header["delex_rules"] = rules;
  header["meta"] = {{"epoch", meta_.epoch},
                    {"dev_metric", meta_.dev_metric},
                    {"seed", meta_.seed},
                    {"selection_metric", meta_.selection_metric}};
  {
    std::ostringstream os;
    os << std::hex << vocab_.hash();
    header["vocab_hash"] = os.str();
  }
  json params = json::array();
  auto& self = const_cast<QEModel&>(*this);
  for (Parameter* p : self.parameters()) {
    params.push_back({{"name", p->name}, {"shape", p->value.dims}});
  }
  header["params"] = params;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << header.dump() << '\n';
  // Parameter payloads follow in declared order, 64-bit little-endian reals.
  for (Parameter* p : self.parameters()) {
    out.write(reinterpret_cast<const char*>(p->value.v.data()),
              static_cast<std::streamsize>(p->value.numel() * sizeof(double)));
  }
  if (!out) throw DataError("checkpoint write failed: " + path);
}

QEModel QEModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);

  std::string magic_line;
  if (!std::getline(in, magic_line)) {
    throw CheckpointCorruptError("checkpoint: empty file " + path);
  }
  std::istringstream ms(magic_line);
  std::string magic;
  int version = -1;
  ms >> magic >> version;
  if (magic != kMagic) {
    throw CheckpointCorruptError("checkpoint: bad magic in " + path);
  }
  if (version != kFormatVersion) {
    throw CheckpointVersionError("checkpoint: format version " +
                                 std::to_string(version) + " unsupported (" +
                                 "expected " +
                                 std::to_string(kFormatVersion) + ")");
  }

  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw CheckpointCorruptError("checkpoint: missing header in " + path);
  }
  json header;
  try {
    header = json::parse(header_line);
  } catch (const json::exception& e) {
    throw CheckpointCorruptError(std::string("checkpoint: bad header: ") +
                                 e.what());
  }

  try {
    TrainConfig config = TrainConfig::from_map(
        header.at("config").get<std::map<std::string, std::string>>());
    Vocabulary vocab;
    for (const auto& tok : header.at("vocab").get<std::vector<std::string>>()) {
      vocab.add(tok);
    }
    {
      std::ostringstream os;
      os << std::hex << vocab.hash();
      if (header.at("vocab_hash").get<std::string>() != os.str()) {
        throw VocabularyMismatchError(
            "checkpoint: vocabulary hash mismatch in " + path);
      }
    }
    std::vector<DelexRule> rules;
    for (const auto& r : header.at("delex_rules")) {
      rules.push_back({r.at("attribute").get<std::string>(),
                       level_from_name(r.at("level").get<std::string>()),
                       r.at("exceptions").get<std::vector<std::string>>()});
    }

    QEModel model(std::move(vocab), std::move(config), std::move(rules));
    const auto& meta = header.at("meta");
    model.meta_.epoch = meta.at("epoch").get<std::size_t>();
    model.meta_.dev_metric = meta.at("dev_metric").get<double>();
    model.meta_.seed = meta.at("seed").get<std::uint64_t>();
    model.meta_.selection_metric =
        meta.at("selection_metric").get<std::string>();

    auto params = model.parameters();
    const auto& listed = header.at("params");
    if (listed.size() != params.size()) {
      throw CheckpointCorruptError("checkpoint: parameter list mismatch");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto shape =
          listed[i].at("shape").get<std::vector<std::size_t>>();
      if (shape != params[i]->value.dims) {
        throw CheckpointCorruptError("checkpoint: shape mismatch for " +
                                     params[i]->name);
      }
      in.read(
          reinterpret_cast<char*>(params[i]->value.v.data()),
          static_cast<std::streamsize>(params[i]->value.numel() *
                                       sizeof(double)));
      if (static_cast<std::size_t>(in.gcount()) !=
          params[i]->value.numel() * sizeof(double)) {
        throw CheckpointCorruptError("checkpoint: truncated payload for " +
                                     params[i]->name);
      }
    }
    char extra;
    if (in.read(&extra, 1)) {
      throw CheckpointCorruptError("checkpoint: trailing bytes in " + path);
    }
    return model;
  } catch (const json::exception& e) {
    throw CheckpointCorruptError(std::string("checkpoint: bad header: ") +
                                 e.what());
  }
}

}  // namespace nlgqe
