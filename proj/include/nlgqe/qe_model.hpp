#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlgqe/adam.hpp"
#include "nlgqe/data_model.hpp"
#include "nlgqe/delex.hpp"
#include "nlgqe/layers.hpp"
#include "nlgqe/tape.hpp"
#include "nlgqe/train_config.hpp"

namespace nlgqe {

struct ScorePair {
  double score_a = 0.0;
  std::optional<double> score_b;
  std::optional<double> margin;  // score_a - score_b
};

enum class PairDecision { kABetter, kBBetter, kTie };

struct RankResult {
  PairDecision decision = PairDecision::kTie;
  double margin = 0.0;
};

struct CheckpointMeta {
  std::size_t epoch = 0;
  double dev_metric = 0.0;
  std::uint64_t seed = 0;
  std::string selection_metric = "auto";
};

// Dual-encoder scoring network. One bidirectional GRU encodes the MR, one
// the output text; the concatenated encodings pass through dense layers and
// a final linear unit. Ranking scores a second text through the very same
// parameters, so the "second branch" shares every weight structurally.
class QEModel {
 public:
  QEModel(Vocabulary vocab, TrainConfig config,
          std::vector<DelexRule> rules = default_rules());

  void init_parameters(std::uint64_t seed);

  const Vocabulary& vocab() const { return vocab_; }
  const TrainConfig& config() const { return config_; }
  const std::vector<DelexRule>& rules() const { return rules_; }
  CheckpointMeta& meta() { return meta_; }
  const CheckpointMeta& meta() const { return meta_; }

  // All weights in declared (checkpoint) order.
  std::vector<Parameter*> parameters();

  // Deep parameter copy to/from another identically shaped model.
  std::vector<Tensor> snapshot_parameters() const;
  void restore_parameters(const std::vector<Tensor>& snapshot);

  struct ForwardOptions {
    bool train_mode = false;
    Rng* rng = nullptr;  // required in train mode when dropout_keep < 1
  };

  // Builds the scoring graph for one (MR, text) pair and returns the scalar
  // score node. The MR encoding may be precomputed and reused for a second
  // branch.
  Var mr_encoding(Tape& tape, const MeaningRepresentation& mr,
                  const ForwardOptions& opts);
  Var score_branch(Tape& tape, Var mr_enc, const TextOutput& text,
                   const ForwardOptions& opts);
  Var score_on_tape(Tape& tape, const MeaningRepresentation& mr,
                    const TextOutput& text, const ForwardOptions& opts);

  // Eval-mode score; deterministic pure function of the parameters.
  double score(const MeaningRepresentation& mr, const TextOutput& text);

  // Score with the optional clamp applied when the config requests it.
  double predict_rating(const MeaningRepresentation& mr,
                        const TextOutput& text);

  ScorePair score_pair(const MeaningRepresentation& mr, const TextOutput& a,
                       const TextOutput& b);
  RankResult rank_pair(const MeaningRepresentation& mr, const TextOutput& a,
                       const TextOutput& b);

  // Indices of `texts` sorted best-first by score; stable for equal scores.
  std::vector<std::size_t> rank_n(const MeaningRepresentation& mr,
                                  const std::vector<TextOutput>& texts);

  // The joint loss on one instance:
  //   rating:  (score(text_a) - y)^2          (text_b never evaluated)
  //   ranking: max(0, 1 - (score(a) - score(b)))   (rating ignored)
  Var instance_loss(Tape& tape, const QEInstance& instance,
                    const ForwardOptions& opts);

  void save(const std::string& path) const;
  static QEModel load(const std::string& path);

 private:
  std::vector<int> encode_tokens(const std::vector<std::string>& tokens) const;

  Vocabulary vocab_;
  TrainConfig config_;
  std::vector<DelexRule> rules_;
  CheckpointMeta meta_;

  Parameter embedding_;
  GRUParams mr_fwd_, mr_bwd_;
  GRUParams txt_fwd_, txt_bwd_;
  std::vector<Parameter> dense_w_, dense_b_;
  Parameter out_w_, out_b_;
};

}  // namespace nlgqe
