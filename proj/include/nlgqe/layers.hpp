#pragma once

#include <vector>

#include "nlgqe/rng.hpp"
#include "nlgqe/tape.hpp"

namespace nlgqe {

// Update gate, reset gate and candidate weights of one GRU direction.
struct GRUParams {
  Parameter w_update, u_update, b_update;
  Parameter w_reset, u_reset, b_reset;
  Parameter w_cand, u_cand, b_cand;

  GRUParams() = default;
  GRUParams(const std::string& prefix, std::size_t input_width,
            std::size_t hidden_width);

  std::vector<Parameter*> parameters();
};

// Glorot-uniform weights, zero biases, embeddings uniform in +-0.1.
void init_uniform(Parameter& p, Rng& rng, double limit);
void init_glorot(Parameter& p, Rng& rng);
void init_gru(GRUParams& p, Rng& rng);

// One GRU recurrence step:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   c = tanh(Wh x + Uh (r * h) + bh)
//   h' = (1 - z) * h + z * c
Var gru_step(Tape& tape, Var x, Var h_prev, GRUParams& p);

// Final forward state over tokens concatenated with the final backward state
// over the reversed tokens; result width is twice the hidden width.
// `embedded` is the (T x width) matrix of (possibly dropped-out) embeddings.
Var bidir_encode(Tape& tape, Var embedded, GRUParams& fwd, GRUParams& bwd);

enum class Activation { kTanh, kIdentity };

Var dense(Tape& tape, Var x, Parameter& w, Parameter& b,
          Activation activation);

// Inverted-dropout mask: zeros with probability 1-keep_rate, survivors scaled
// by 1/keep_rate, so evaluation needs no scaling at all.
Tensor dropout_mask(const std::vector<std::size_t>& dims, double keep_rate,
                    Rng& rng);

// Applies train-mode dropout; in eval mode this is the identity.
Var dropout(Tape& tape, Var x, double keep_rate, bool train_mode, Rng& rng);

}  // namespace nlgqe
