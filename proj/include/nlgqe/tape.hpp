#pragma once

#include <string>
#include <vector>

#include "nlgqe/tensor.hpp"

namespace nlgqe {

// Named weight tensor with a persistent gradient accumulator. Gradients from
// successive backward passes add up until zero_grad().
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.dims) {}

  void zero_grad() { grad.fill(0.0); }
};

// Handle to a tape node.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode autodiff tape over a fixed set of vector/matrix primitives.
// Nodes are recorded in topological order during the forward pass; backward()
// sweeps them once in reverse and flushes leaf gradients into their
// Parameters.
class Tape {
 public:
  Var constant(Tensor t);
  Var constant_scalar(double x) { return constant(Tensor::scalar(x)); }
  // Leaf bound to a parameter. Repeated calls for the same parameter within
  // one tape return the same node, which is what makes weight sharing between
  // scoring branches structural rather than copied.
  Var param(Parameter& p);

  // y = W x + b, W is (m x n), x is n, b is m.
  Var affine(Var W, Var x, Var b);
  Var matvec(Var W, Var x);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double s);
  Var one_minus(Var a);  // 1 - a, elementwise
  Var sigmoid(Var a);
  Var tanh_act(Var a);
  Var concat(Var a, Var b);
  Var sum(Var a);     // scalar
  Var square(Var a);  // elementwise a*a
  // max(0, 1 - m) on a scalar margin; subgradient 0 at the kink.
  Var hinge_from_margin(Var margin);
  // Rows of `table` selected by token ids, producing a (T x width) matrix.
  Var embed_rows(Var table, const std::vector<int>& ids);
  Var slice_row(Var matrix, std::size_t row);
  // Elementwise product with a constant mask (dropout).
  Var mask_mul(Var a, Tensor mask);

  const Tensor& val(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Reverse sweep from a scalar root. seed scales the whole gradient, which
  // lets batch-mean accumulation run one instance at a time.
  void backward(Var root, double seed = 1.0);

  // Drops all nodes but keeps allocated capacity for reuse.
  void reset();

 private:
  enum class Op {
    kConstant,
    kParam,
    kAffine,
    kMatVec,
    kAdd,
    kSub,
    kMul,
    kScale,
    kOneMinus,
    kSigmoid,
    kTanh,
    kConcat,
    kSum,
    kSquare,
    kHinge,
    kEmbedRows,
    kSliceRow,
    kMaskMul,
  };

  struct Node {
    Op op;
    Tensor value;
    Tensor grad;
    bool grad_live = false;
    int p0 = -1, p1 = -1, p2 = -1;
    double aux = 0.0;
    std::size_t row = 0;
    std::vector<int> ids;  // embed_rows only
    Tensor mask;           // mask_mul only
    Parameter* bound = nullptr;
  };

  Var push(Node node);
  Node& node(Var v);
  const Node& node(Var v) const;
  Tensor& grad_of(int id);

  std::vector<Node> nodes_;
  std::vector<std::pair<Parameter*, int>> param_nodes_;
};

}  // namespace nlgqe
