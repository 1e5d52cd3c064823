#include "nlgqe/layers.hpp"

#include <cmath>

#include "nlgqe/error.hpp"

namespace nlgqe {

GRUParams::GRUParams(const std::string& prefix, std::size_t input_width,
                     std::size_t hidden_width)
    : w_update(prefix + ".w_update", Tensor({hidden_width, input_width})),
      u_update(prefix + ".u_update", Tensor({hidden_width, hidden_width})),
      b_update(prefix + ".b_update", Tensor({hidden_width})),
      w_reset(prefix + ".w_reset", Tensor({hidden_width, input_width})),
      u_reset(prefix + ".u_reset", Tensor({hidden_width, hidden_width})),
      b_reset(prefix + ".b_reset", Tensor({hidden_width})),
      w_cand(prefix + ".w_cand", Tensor({hidden_width, input_width})),
      u_cand(prefix + ".u_cand", Tensor({hidden_width, hidden_width})),
      b_cand(prefix + ".b_cand", Tensor({hidden_width})) {}

std::vector<Parameter*> GRUParams::parameters() {
  return {&w_update, &u_update, &b_update, &w_reset, &u_reset,
          &b_reset,  &w_cand,   &u_cand,   &b_cand};
}

void init_uniform(Parameter& p, Rng& rng, double limit) {
  for (double& x : p.value.v) x = rng.uniform(-limit, limit);
}

void init_glorot(Parameter& p, Rng& rng) {
  const double fan_in = static_cast<double>(p.value.cols());
  const double fan_out = static_cast<double>(p.value.rows());
  init_uniform(p, rng, std::sqrt(6.0 / (fan_in + fan_out)));
}

void init_gru(GRUParams& p, Rng& rng) {
  for (Parameter* w : p.parameters()) {
    if (w->value.dims.size() == 2) {
      init_glorot(*w, rng);
    } else {
      w->value.fill(0.0);
    }
  }
}

Var gru_step(Tape& tape, Var x, Var h_prev, GRUParams& p) {
  if (tape.val(x).numel() != p.w_update.value.cols() ||
      tape.val(h_prev).numel() != p.u_update.value.cols()) {
    throw DataError("gru_step: input/hidden width mismatch");
  }
  Var z = tape.sigmoid(tape.add(
      tape.affine(tape.param(p.w_update), x, tape.param(p.b_update)),
      tape.matvec(tape.param(p.u_update), h_prev)));
  Var r = tape.sigmoid(
      tape.add(tape.affine(tape.param(p.w_reset), x, tape.param(p.b_reset)),
               tape.matvec(tape.param(p.u_reset), h_prev)));
  Var cand = tape.tanh_act(
      tape.add(tape.affine(tape.param(p.w_cand), x, tape.param(p.b_cand)),
               tape.matvec(tape.param(p.u_cand), tape.mul(r, h_prev))));
  return tape.add(tape.mul(tape.one_minus(z), h_prev), tape.mul(z, cand));
}

Var bidir_encode(Tape& tape, Var embedded, GRUParams& fwd, GRUParams& bwd) {
  const Tensor& emb = tape.val(embedded);
  const std::size_t steps = emb.rows();
  if (steps == 0) throw DataError("bidir_encode: empty sequence");
  const std::size_t hidden = fwd.u_update.value.cols();

  Var h_fwd = tape.constant(Tensor({hidden}));
  for (std::size_t t = 0; t < steps; ++t) {
    h_fwd = gru_step(tape, tape.slice_row(embedded, t), h_fwd, fwd);
  }
  Var h_bwd = tape.constant(Tensor({hidden}));
  for (std::size_t t = steps; t-- > 0;) {
    h_bwd = gru_step(tape, tape.slice_row(embedded, t), h_bwd, bwd);
  }
  return tape.concat(h_fwd, h_bwd);
}

Var dense(Tape& tape, Var x, Parameter& w, Parameter& b,
          Activation activation) {
  Var y = tape.affine(tape.param(w), x, tape.param(b));
  return activation == Activation::kTanh ? tape.tanh_act(y) : y;
}

Tensor dropout_mask(const std::vector<std::size_t>& dims, double keep_rate,
                    Rng& rng) {
  if (keep_rate <= 0.0 || keep_rate > 1.0) {
    throw DataError("dropout: keep rate must be in (0, 1]");
  }
  Tensor mask(dims);
  const double scale = 1.0 / keep_rate;
  for (double& m : mask.v) m = rng.bernoulli(keep_rate) ? scale : 0.0;
  return mask;
}

Var dropout(Tape& tape, Var x, double keep_rate, bool train_mode, Rng& rng) {
  if (!train_mode || keep_rate >= 1.0) return x;
  return tape.mask_mul(x, dropout_mask(tape.val(x).dims, keep_rate, rng));
}

}  // namespace nlgqe
