#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "nlgqe/adam.hpp"
#include "nlgqe/error.hpp"
#include "nlgqe/layers.hpp"
#include "nlgqe/rng.hpp"
#include "nlgqe/tape.hpp"
#include "oracles.hpp"

using namespace nlgqe;

namespace {

using GraphBuilder = std::function<Var(Tape&)>;

double eval_scalar(const GraphBuilder& build) {
  Tape tape;
  Var root = build(tape);
  const Tensor& value = tape.val(root);
  REQUIRE(value.numel() == 1);
  return value.at(0);
}

// Central-difference check of every coordinate of every parameter against
// the gradient the tape reports.
void check_gradients(std::vector<Parameter*> params, const GraphBuilder& build,
                     double tolerance = 1e-6) {
  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape;
    tape.backward(build(tape));
  }
  const double h = 1e-5;
  for (Parameter* p : params) {
    for (std::size_t i = 0; i < p->value.numel(); ++i) {
      const double keep = p->value.at(i);
      p->value.at(i) = keep + h;
      const double up = eval_scalar(build);
      p->value.at(i) = keep - h;
      const double down = eval_scalar(build);
      p->value.at(i) = keep;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = p->grad.at(i);
      const double scale =
          std::max({1.0, std::fabs(numeric), std::fabs(analytic)});
      CHECK(std::fabs(numeric - analytic) / scale <= tolerance);
    }
  }
}

Parameter make_param(const std::string& name, std::vector<std::size_t> dims,
                     std::uint64_t seed, double limit = 1.0) {
  Parameter p(name, Tensor(std::move(dims)));
  Rng rng(seed);
  init_uniform(p, rng, limit);
  return p;
}

void copy_weights(const GRUParams& from, GRUParams& to) {
  std::vector<const Parameter*> src{&from.w_update, &from.u_update,
                                    &from.b_update, &from.w_reset,
                                    &from.u_reset,  &from.b_reset,
                                    &from.w_cand,   &from.u_cand,
                                    &from.b_cand};
  std::vector<Parameter*> dst = to.parameters();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->value = src[i]->value;
}

oracle::GruWeights to_oracle(GRUParams& p) {
  auto matrix = [](const Parameter& w) {
    std::vector<std::vector<double>> out(w.value.rows());
    for (std::size_t i = 0; i < w.value.rows(); ++i) {
      out[i].resize(w.value.cols());
      for (std::size_t j = 0; j < w.value.cols(); ++j) out[i][j] = w.value.at(i, j);
    }
    return out;
  };
  oracle::GruWeights w;
  w.wz = matrix(p.w_update);
  w.uz = matrix(p.u_update);
  w.wr = matrix(p.w_reset);
  w.ur = matrix(p.u_reset);
  w.wh = matrix(p.w_cand);
  w.uh = matrix(p.u_cand);
  w.bz = p.b_update.value.v;
  w.br = p.b_reset.value.v;
  w.bh = p.b_cand.value.v;
  return w;
}

}  // namespace

TEST_CASE("tensor shapes, access and factories") {
  Tensor t({2, 3});
  CHECK(t.numel() == 6);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  t.at(1, 2) = 7.0;
  CHECK(t.v[5] == 7.0);  // row-major layout
  t.fill(1.5);
  CHECK(t.at(0, 0) == 1.5);

  CHECK(Tensor::scalar(3.0).numel() == 1);
  CHECK(Tensor::vector({1, 2, 3}).dims == std::vector<std::size_t>{3});
  CHECK(Tensor{}.numel() == 0);
  CHECK(Tensor({2, 3}).shape_string() == "(2x3)");
}

TEST_CASE("forward values of the elementwise and reduction ops") {
  Tape tape;
  Var a = tape.constant(Tensor::vector({1.0, -2.0, 3.0}));
  Var b = tape.constant(Tensor::vector({0.5, 4.0, -1.0}));

  CHECK(tape.val(tape.add(a, b)).v == std::vector<double>{1.5, 2.0, 2.0});
  CHECK(tape.val(tape.sub(a, b)).v == std::vector<double>{0.5, -6.0, 4.0});
  CHECK(tape.val(tape.mul(a, b)).v == std::vector<double>{0.5, -8.0, -3.0});
  CHECK(tape.val(tape.scale(a, -2.0)).v == std::vector<double>{-2.0, 4.0, -6.0});
  CHECK(tape.val(tape.one_minus(a)).v == std::vector<double>{0.0, 3.0, -2.0});
  CHECK(tape.val(tape.square(a)).v == std::vector<double>{1.0, 4.0, 9.0});
  CHECK(tape.val(tape.sum(a)).at(0) == 2.0);

  const Tensor& sig = tape.val(tape.sigmoid(a));
  CHECK(sig.at(0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(sig.at(1) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))));
  const Tensor& th = tape.val(tape.tanh_act(a));
  CHECK(th.at(2) == doctest::Approx(std::tanh(3.0)));

  const Tensor& cat = tape.val(tape.concat(a, b));
  CHECK(cat.v == std::vector<double>{1.0, -2.0, 3.0, 0.5, 4.0, -1.0});
}

TEST_CASE("shape mismatches are rejected") {
  Tape tape;
  Var a = tape.constant(Tensor::vector({1.0, 2.0}));
  Var b = tape.constant(Tensor::vector({1.0, 2.0, 3.0}));
  CHECK_THROWS_AS(tape.add(a, b), DataError);
  CHECK_THROWS_AS(tape.mul(a, b), DataError);

  Tensor w({2, 2});
  CHECK_THROWS_AS(tape.matvec(tape.constant(w), b), DataError);
}

TEST_CASE("affine and matvec compute W x + b") {
  Tape tape;
  Tensor w({2, 3});
  // rows (1,2,3) and (4,5,6)
  for (std::size_t i = 0; i < 6; ++i) w.v[i] = static_cast<double>(i + 1);
  Var x = tape.constant(Tensor::vector({1.0, 0.0, -1.0}));
  Var b = tape.constant(Tensor::vector({10.0, 20.0}));
  const Tensor& y = tape.val(tape.affine(tape.constant(w), x, b));
  CHECK(y.v == std::vector<double>{8.0, 18.0});
  const Tensor& mv = tape.val(tape.matvec(tape.constant(w), x));
  CHECK(mv.v == std::vector<double>{-2.0, -2.0});
}

TEST_CASE("hinge forward: max(0, 1 - margin)") {
  Tape tape;
  CHECK(tape.val(tape.hinge_from_margin(tape.constant_scalar(1.5))).at(0) == 0.0);
  CHECK(tape.val(tape.hinge_from_margin(tape.constant_scalar(0.0))).at(0) == 1.0);
  CHECK(tape.val(tape.hinge_from_margin(tape.constant_scalar(-0.5))).at(0) ==
        doctest::Approx(1.5));
}

TEST_CASE("backward fixtures: square and constants") {
  Parameter x("x", Tensor::scalar(3.0));
  x.zero_grad();
  Tape tape;
  tape.backward(tape.sum(tape.square(tape.param(x))));
  CHECK(x.grad.at(0) == doctest::Approx(6.0));

  // Constants accumulate nothing anywhere.
  Parameter y("y", Tensor::scalar(2.0));
  y.zero_grad();
  Tape t2;
  t2.param(y);
  t2.backward(t2.sum(t2.constant(Tensor::vector({1.0, 2.0}))));
  CHECK(y.grad.at(0) == 0.0);
}

TEST_CASE("backward seed scales the whole gradient") {
  Parameter x("x", Tensor::scalar(3.0));
  x.zero_grad();
  Tape tape;
  tape.backward(tape.sum(tape.square(tape.param(x))), 0.5);
  CHECK(x.grad.at(0) == doctest::Approx(3.0));

  // Gradients accumulate across backward passes until zero_grad.
  Tape again;
  again.backward(again.sum(again.square(again.param(x))), 0.5);
  CHECK(x.grad.at(0) == doctest::Approx(6.0));
}

TEST_CASE("gradients of every primitive match finite differences") {
  Parameter a = make_param("a", {4}, 11);
  Parameter b = make_param("b", {4}, 12);
  Parameter w = make_param("w", {3, 4}, 13);
  Parameter c = make_param("c", {3}, 14);

  check_gradients({&a, &b}, [&](Tape& t) {
    return t.sum(t.mul(t.add(t.param(a), t.param(b)), t.sub(t.param(a), t.param(b))));
  });
  check_gradients({&a}, [&](Tape& t) {
    return t.sum(t.square(t.scale(t.param(a), -1.7)));
  });
  check_gradients({&a}, [&](Tape& t) {
    return t.sum(t.sigmoid(t.one_minus(t.param(a))));
  });
  check_gradients({&a}, [&](Tape& t) {
    return t.sum(t.tanh_act(t.param(a)));
  });
  check_gradients({&w, &a, &c}, [&](Tape& t) {
    return t.sum(t.tanh_act(t.affine(t.param(w), t.param(a), t.param(c))));
  });
  check_gradients({&w, &a}, [&](Tape& t) {
    return t.sum(t.matvec(t.param(w), t.param(a)));
  });
  check_gradients({&a, &b}, [&](Tape& t) {
    return t.sum(t.square(t.concat(t.param(a), t.param(b))));
  });
  // Margins on both sides of the hinge kink at 1.
  for (double base : {0.2, 2.5, -1.0}) {
    Parameter m("m", Tensor::scalar(base));
    check_gradients({&m}, [&](Tape& t) {
      return t.hinge_from_margin(t.param(m));
    });
  }

  Tensor mask({4});
  mask.v = {1.25, 0.0, 1.25, 1.25};
  check_gradients({&a}, [&](Tape& t) {
    return t.sum(t.square(t.mask_mul(t.param(a), mask)));
  });
}

TEST_CASE("embedding rows select and accumulate per token id") {
  Parameter table = make_param("emb", {5, 3}, 21);
  const std::vector<int> ids{4, 0, 4};

  Tape tape;
  const Tensor& rows = tape.val(tape.embed_rows(tape.param(table), ids));
  CHECK(rows.rows() == 3);
  CHECK(rows.cols() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(rows.at(0, j) == table.value.at(4, j));
    CHECK(rows.at(1, j) == table.value.at(0, j));
    CHECK(rows.at(2, j) == table.value.at(4, j));
  }

  // Row 4 is used twice, so its gradient doubles; unused rows stay zero.
  table.zero_grad();
  Tape t2;
  t2.backward(t2.sum(t2.embed_rows(t2.param(table), ids)));
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(table.grad.at(4, j) == doctest::Approx(2.0));
    CHECK(table.grad.at(0, j) == doctest::Approx(1.0));
    CHECK(table.grad.at(2, j) == 0.0);
  }

  check_gradients({&table}, [&](Tape& t) {
    return t.sum(t.square(t.embed_rows(t.param(table), ids)));
  });

  CHECK_THROWS_AS(tape.embed_rows(tape.param(table), {5}), DataError);
  CHECK_THROWS_AS(tape.embed_rows(tape.param(table), {-1}), DataError);
}

TEST_CASE("slice_row picks one row and routes its gradient") {
  Parameter table = make_param("m", {3, 2}, 31);
  check_gradients({&table}, [&](Tape& t) {
    return t.sum(t.square(t.slice_row(t.param(table), 1)));
  });
  Tape tape;
  CHECK_THROWS_AS(tape.slice_row(tape.param(table), 3), DataError);
}

TEST_CASE("a zero-weight gru maps the zero state to zero") {
  GRUParams p("gru", 3, 4);
  Tape tape;
  Var x = tape.constant(Tensor::vector({1.0, -2.0, 0.5}));
  Var h0 = tape.constant(Tensor({4}));
  const Tensor& h1 = tape.val(gru_step(tape, x, h0, p));
  for (double v : h1.v) CHECK(v == 0.0);
}

TEST_CASE("gru_step agrees with the scalar oracle") {
  GRUParams p("gru", 3, 4);
  Rng rng(77);
  init_gru(p, rng);
  // Nonzero biases exercise every term.
  init_uniform(p.b_update, rng, 0.3);
  init_uniform(p.b_reset, rng, 0.3);
  init_uniform(p.b_cand, rng, 0.3);

  const std::vector<double> x{0.4, -1.2, 2.0};
  const std::vector<double> h{0.1, -0.2, 0.3, -0.4};
  const auto expected = oracle::gru_step(x, h, to_oracle(p));

  Tape tape;
  const Tensor& got = tape.val(gru_step(tape, tape.constant(Tensor::vector(x)),
                                        tape.constant(Tensor::vector(h)), p));
  REQUIRE(got.numel() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(got.at(i) == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("gru gradients match finite differences") {
  GRUParams p("gru", 2, 3);
  Rng rng(5);
  init_gru(p, rng);
  init_uniform(p.b_update, rng, 0.2);
  Parameter x = make_param("x", {2}, 6);
  Parameter h = make_param("h", {3}, 7, 0.5);

  std::vector<Parameter*> all = p.parameters();
  all.push_back(&x);
  all.push_back(&h);
  check_gradients(all, [&](Tape& t) {
    return t.sum(t.square(gru_step(t, t.param(x), t.param(h), p)));
  });
}

TEST_CASE("bidirectional encoding halves coincide on symmetric input") {
  GRUParams fwd("fwd", 3, 4), bwd("bwd", 3, 4);
  Rng rng(9);
  init_gru(fwd, rng);
  copy_weights(fwd, bwd);

  // Single token: both directions read the same one-step sequence.
  Tensor one({1, 3});
  one.v = {0.3, -0.6, 0.9};
  Tape tape;
  const Tensor& enc = tape.val(bidir_encode(tape, tape.constant(one), fwd, bwd));
  REQUIRE(enc.numel() == 8);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(enc.at(i) == doctest::Approx(enc.at(4 + i)).epsilon(1e-12));
  }

  // Palindromic sequence: reversal changes nothing either.
  Tensor pal({3, 3});
  for (std::size_t j = 0; j < 3; ++j) {
    pal.at(0, j) = 0.1 * static_cast<double>(j + 1);
    pal.at(2, j) = pal.at(0, j);
    pal.at(1, j) = -0.2;
  }
  Tape t2;
  const Tensor& enc2 = t2.val(bidir_encode(t2, t2.constant(pal), fwd, bwd));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(enc2.at(i) == doctest::Approx(enc2.at(4 + i)).epsilon(1e-12));
  }

  // Asymmetric sequence: the halves genuinely differ.
  Tensor asym({2, 3});
  asym.v = {1.0, 0.0, 0.0, 0.0, 0.0, 1.0};
  Tape t3;
  const Tensor& enc3 = t3.val(bidir_encode(t3, t3.constant(asym), fwd, bwd));
  double diff = 0.0;
  for (std::size_t i = 0; i < 4; ++i) diff += std::fabs(enc3.at(i) - enc3.at(4 + i));
  CHECK(diff > 1e-6);

  Tape t4;
  CHECK_THROWS_AS(bidir_encode(t4, t4.constant(Tensor({0, 3})), fwd, bwd),
                  DataError);
}

TEST_CASE("bidirectional encoding is differentiable end to end") {
  GRUParams fwd("fwd", 2, 2), bwd("bwd", 2, 2);
  Rng rng(13);
  init_gru(fwd, rng);
  init_gru(bwd, rng);
  Parameter emb = make_param("emb", {3, 2}, 14, 0.5);

  std::vector<Parameter*> all = fwd.parameters();
  for (Parameter* p : bwd.parameters()) all.push_back(p);
  all.push_back(&emb);
  check_gradients(all, [&](Tape& t) {
    return t.sum(t.square(bidir_encode(t, t.param(emb), fwd, bwd)));
  });
}

TEST_CASE("dense layer applies the chosen activation") {
  Parameter w("w", Tensor({2, 2}));
  w.value.v = {1.0, 0.0, 0.0, 1.0};
  Parameter b("b", Tensor({2}));
  b.value.v = {0.5, -0.5};
  Tape tape;
  Var x = tape.constant(Tensor::vector({0.25, 0.75}));
  const Tensor& lin = tape.val(dense(tape, x, w, b, Activation::kIdentity));
  CHECK(lin.v == std::vector<double>{0.75, 0.25});
  const Tensor& act = tape.val(dense(tape, x, w, b, Activation::kTanh));
  CHECK(act.at(0) == doctest::Approx(std::tanh(0.75)));
  CHECK(act.at(1) == doctest::Approx(std::tanh(0.25)));
}

TEST_CASE("dropout masks zero or rescale and vanish in eval mode") {
  Rng rng(3);
  const Tensor mask = dropout_mask({1000}, 0.8, rng);
  double sum = 0.0;
  for (double m : mask.v) {
    CHECK((m == 0.0 || m == doctest::Approx(1.25)));
    sum += m;
  }
  // Inverted dropout keeps the expectation near one.
  CHECK(sum / 1000.0 == doctest::Approx(1.0).epsilon(0.05));

  Tape tape;
  Var x = tape.constant(Tensor::vector({1.0, 2.0, 3.0}));
  Rng eval_rng(4);
  CHECK(dropout(tape, x, 0.8, false, eval_rng).id == x.id);
  CHECK(dropout(tape, x, 1.0, true, eval_rng).id == x.id);
  Var dropped = dropout(tape, x, 0.5, true, eval_rng);
  CHECK(dropped.id != x.id);
  for (std::size_t i = 0; i < 3; ++i) {
    const double v = tape.val(dropped).at(i);
    CHECK((v == 0.0 || v == doctest::Approx(2.0 * tape.val(x).at(i))));
  }

  CHECK_THROWS_AS(dropout_mask({4}, 0.0, rng), DataError);
  CHECK_THROWS_AS(dropout_mask({4}, 1.5, rng), DataError);
}

TEST_CASE("adam leaves parameters alone when the gradient is zero") {
  Parameter p("p", Tensor::vector({1.0, -2.0}));
  p.zero_grad();
  std::vector<Parameter*> params{&p};
  AdamState adam(params);
  adam.step(params, 0.1);
  CHECK(p.value.v == std::vector<double>{1.0, -2.0});
  CHECK(adam.step_count() == 1);
}

TEST_CASE("the first adam step moves by about lr in the gradient direction") {
  Parameter p("p", Tensor::vector({0.0, 0.0, 0.0}));
  p.zero_grad();
  p.grad.v = {0.5, -3.0, 1e-12};
  std::vector<Parameter*> params{&p};
  AdamState adam(params);
  adam.step(params, 0.0001);
  CHECK(p.value.at(0) == doctest::Approx(-0.0001).epsilon(1e-3));
  CHECK(p.value.at(1) == doctest::Approx(0.0001).epsilon(1e-3));
  // Tiny gradients are damped by epsilon rather than amplified.
  CHECK(std::fabs(p.value.at(2)) < 0.0001);
  // The step consumed the gradient.
  CHECK(p.grad.v == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("adam trajectory matches the scalar oracle") {
  Parameter p("p", Tensor::scalar(1.3));
  p.zero_grad();
  std::vector<Parameter*> params{&p};
  AdamState adam(params);

  double shadow = 1.3;
  oracle::AdamScalar reference;
  for (int step = 0; step < 25; ++step) {
    // Gradient of 0.5 * (x - 2)^2 at the current point.
    const double g = shadow - 2.0;
    p.grad.at(0) = p.value.at(0) - 2.0;
    adam.step(params, 0.05);
    shadow += reference.update(g, 0.05);
    CHECK(p.value.at(0) == doctest::Approx(shadow).epsilon(1e-12));
  }
  CHECK(std::fabs(p.value.at(0) - 1.3) > 0.01);
}

TEST_CASE("tape reset reuses storage without stale state") {
  Parameter p("p", Tensor::scalar(2.0));
  p.zero_grad();
  Tape tape;
  tape.backward(tape.sum(tape.square(tape.param(p))));
  CHECK(p.grad.at(0) == doctest::Approx(4.0));
  tape.reset();
  CHECK(tape.size() == 0);
  p.zero_grad();
  tape.backward(tape.sum(tape.square(tape.param(p))));
  CHECK(p.grad.at(0) == doctest::Approx(4.0));
}

TEST_CASE("initialisation is deterministic in the seed") {
  GRUParams a("g", 4, 4), b("g", 4, 4);
  Rng ra(123), rb(123);
  init_gru(a, ra);
  init_gru(b, rb);
  CHECK(a.w_update.value.v == b.w_update.value.v);
  CHECK(a.u_cand.value.v == b.u_cand.value.v);

  Rng rc(124);
  GRUParams c("g", 4, 4);
  init_gru(c, rc);
  CHECK(a.w_update.value.v != c.w_update.value.v);

  // Glorot limit scales with fan-in and fan-out.
  Parameter wide = make_param("wide", {2, 200}, 1, 0.0);
  Rng rd(9);
  init_glorot(wide, rd);
  double max_abs = 0.0;
  for (double v : wide.value.v) max_abs = std::max(max_abs, std::fabs(v));
  CHECK(max_abs <= std::sqrt(6.0 / 202.0));
}
