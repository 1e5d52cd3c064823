#include "nlgqe/tape.hpp"

#include <cmath>
#include <sstream>

#include "nlgqe/error.hpp"

namespace nlgqe {

std::string Tensor::shape_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) os << 'x';
    os << dims[i];
  }
  os << ')';
  return os.str();
}

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a,
                              const Tensor& b) {
  throw DataError(std::string(op) + ": shape mismatch " + a.shape_string() +
                  " vs " + b.shape_string());
}

}  // namespace

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Node& Tape::node(Var v) { return nodes_[static_cast<std::size_t>(v.id)]; }

const Tape::Node& Tape::node(Var v) const {
  return nodes_[static_cast<std::size_t>(v.id)];
}

const Tensor& Tape::val(Var v) const { return node(v).value; }

Tensor& Tape::grad_of(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.grad_live) {
    n.grad = Tensor(n.value.dims);
    n.grad_live = true;
  }
  return n.grad;
}

Var Tape::constant(Tensor t) {
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(t);
  return push(std::move(n));
}

Var Tape::param(Parameter& p) {
  for (const auto& [bound, id] : param_nodes_) {
    if (bound == &p) return Var{id};
  }
  Node n;
  n.op = Op::kParam;
  n.value = p.value;
  n.bound = &p;
  Var v = push(std::move(n));
  param_nodes_.emplace_back(&p, v.id);
  return v;
}

Var Tape::affine(Var W, Var x, Var b) {
  const Tensor& w = val(W);
  const Tensor& xv = val(x);
  const Tensor& bv = val(b);
  if (w.dims.size() != 2 || w.cols() != xv.numel() || w.rows() != bv.numel()) {
    shape_error("affine", w, xv);
  }
  Node n;
  n.op = Op::kAffine;
  n.p0 = W.id;
  n.p1 = x.id;
  n.p2 = b.id;
  n.value = Tensor({w.rows()});
  const std::size_t rows = w.rows(), cols = w.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w.v.data() + r * cols;
    double acc = bv.v[r];
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * xv.v[c];
    n.value.v[r] = acc;
  }
  return push(std::move(n));
}

Var Tape::matvec(Var W, Var x) {
  const Tensor& w = val(W);
  const Tensor& xv = val(x);
  if (w.dims.size() != 2 || w.cols() != xv.numel()) shape_error("matvec", w, xv);
  Node n;
  n.op = Op::kMatVec;
  n.p0 = W.id;
  n.p1 = x.id;
  n.value = Tensor({w.rows()});
  const std::size_t rows = w.rows(), cols = w.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w.v.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * xv.v[c];
    n.value.v[r] = acc;
  }
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (!av.same_shape(bv)) shape_error("add", av, bv);
  Node n;
  n.op = Op::kAdd;
  n.p0 = a.id;
  n.p1 = b.id;
  n.value = av;
  for (std::size_t i = 0; i < n.value.numel(); ++i) n.value.v[i] += bv.v[i];
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (!av.same_shape(bv)) shape_error("sub", av, bv);
  Node n;
  n.op = Op::kSub;
  n.p0 = a.id;
  n.p1 = b.id;
  n.value = av;
  for (std::size_t i = 0; i < n.value.numel(); ++i) n.value.v[i] -= bv.v[i];
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (!av.same_shape(bv)) shape_error("mul", av, bv);
  Node n;
  n.op = Op::kMul;
  n.p0 = a.id;
  n.p1 = b.id;
  n.value = av;
  for (std::size_t i = 0; i < n.value.numel(); ++i) n.value.v[i] *= bv.v[i];
  return push(std::move(n));
}

Var Tape::scale(Var a, double s) {
  Node n;
  n.op = Op::kScale;
  n.p0 = a.id;
  n.aux = s;
  n.value = val(a);
  for (double& x : n.value.v) x *= s;
  return push(std::move(n));
}

Var Tape::one_minus(Var a) {
  Node n;
  n.op = Op::kOneMinus;
  n.p0 = a.id;
  n.value = val(a);
  for (double& x : n.value.v) x = 1.0 - x;
  return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
  Node n;
  n.op = Op::kSigmoid;
  n.p0 = a.id;
  n.value = val(a);
  for (double& x : n.value.v) x = 1.0 / (1.0 + std::exp(-x));
  return push(std::move(n));
}

Var Tape::tanh_act(Var a) {
  Node n;
  n.op = Op::kTanh;
  n.p0 = a.id;
  n.value = val(a);
  for (double& x : n.value.v) x = std::tanh(x);
  return push(std::move(n));
}

Var Tape::concat(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  Node n;
  n.op = Op::kConcat;
  n.p0 = a.id;
  n.p1 = b.id;
  n.value = Tensor({av.numel() + bv.numel()});
  for (std::size_t i = 0; i < av.numel(); ++i) n.value.v[i] = av.v[i];
  for (std::size_t i = 0; i < bv.numel(); ++i) {
    n.value.v[av.numel() + i] = bv.v[i];
  }
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  Node n;
  n.op = Op::kSum;
  n.p0 = a.id;
  double acc = 0.0;
  for (double x : val(a).v) acc += x;
  n.value = Tensor::scalar(acc);
  return push(std::move(n));
}

Var Tape::square(Var a) {
  Node n;
  n.op = Op::kSquare;
  n.p0 = a.id;
  n.value = val(a);
  for (double& x : n.value.v) x *= x;
  return push(std::move(n));
}

Var Tape::hinge_from_margin(Var margin) {
  const Tensor& m = val(margin);
  if (m.numel() != 1) {
    throw DataError("hinge_from_margin: margin must be scalar");
  }
  Node n;
  n.op = Op::kHinge;
  n.p0 = margin.id;
  n.value = Tensor::scalar(std::max(0.0, 1.0 - m.v[0]));
  return push(std::move(n));
}

Var Tape::embed_rows(Var table, const std::vector<int>& ids) {
  const Tensor& t = val(table);
  if (t.dims.size() != 2) throw DataError("embed_rows: table must be 2-D");
  const std::size_t width = t.cols();
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= t.rows()) {
      throw DataError("embed_rows: token index " + std::to_string(id) +
                      " out of range for table with " +
                      std::to_string(t.rows()) + " rows");
    }
  }
  Node n;
  n.op = Op::kEmbedRows;
  n.p0 = table.id;
  n.ids = ids;
  n.value = Tensor({ids.size(), width});
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const double* src = t.v.data() + static_cast<std::size_t>(ids[r]) * width;
    double* dst = n.value.v.data() + r * width;
    for (std::size_t c = 0; c < width; ++c) dst[c] = src[c];
  }
  return push(std::move(n));
}

Var Tape::slice_row(Var matrix, std::size_t row) {
  const Tensor& m = val(matrix);
  if (m.dims.size() != 2 || row >= m.rows()) {
    throw DataError("slice_row: row " + std::to_string(row) +
                    " out of range for " + m.shape_string());
  }
  Node n;
  n.op = Op::kSliceRow;
  n.p0 = matrix.id;
  n.row = row;
  n.value = Tensor({m.cols()});
  const double* src = m.v.data() + row * m.cols();
  for (std::size_t c = 0; c < m.cols(); ++c) n.value.v[c] = src[c];
  return push(std::move(n));
}

Var Tape::mask_mul(Var a, Tensor mask) {
  const Tensor& av = val(a);
  if (!av.same_shape(mask)) shape_error("mask_mul", av, mask);
  Node n;
  n.op = Op::kMaskMul;
  n.p0 = a.id;
  n.value = av;
  for (std::size_t i = 0; i < n.value.numel(); ++i) {
    n.value.v[i] *= mask.v[i];
  }
  n.mask = std::move(mask);
  return push(std::move(n));
}

void Tape::backward(Var root, double seed) {
  if (!root.valid()) throw DataError("backward: invalid root");
  if (val(root).numel() != 1) {
    throw DataError("backward: root must be scalar, got " +
                    val(root).shape_string());
  }
  grad_of(root.id).v[0] += seed;

  for (int i = root.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.grad_live) continue;
    const Tensor& g = n.grad;
    switch (n.op) {
      case Op::kConstant:
        break;
      case Op::kParam:
        for (std::size_t j = 0; j < g.numel(); ++j) {
          n.bound->grad.v[j] += g.v[j];
        }
        break;
      case Op::kAffine:
      case Op::kMatVec: {
        const Tensor& w = nodes_[n.p0].value;
        const Tensor& x = nodes_[n.p1].value;
        Tensor& dw = grad_of(n.p0);
        Tensor& dx = grad_of(n.p1);
        const std::size_t rows = w.rows(), cols = w.cols();
        for (std::size_t r = 0; r < rows; ++r) {
          const double gr = g.v[r];
          if (gr == 0.0) continue;
          double* dwr = dw.v.data() + r * cols;
          const double* wr = w.v.data() + r * cols;
          for (std::size_t c = 0; c < cols; ++c) {
            dwr[c] += gr * x.v[c];
            dx.v[c] += gr * wr[c];
          }
        }
        if (n.op == Op::kAffine) {
          Tensor& db = grad_of(n.p2);
          for (std::size_t r = 0; r < rows; ++r) db.v[r] += g.v[r];
        }
        break;
      }
      case Op::kAdd: {
        Tensor& da = grad_of(n.p0);
        Tensor& db = grad_of(n.p1);
        for (std::size_t j = 0; j < g.numel(); ++j) {
          da.v[j] += g.v[j];
          db.v[j] += g.v[j];
        }
        break;
      }
      case Op::kSub: {
        Tensor& da = grad_of(n.p0);
        Tensor& db = grad_of(n.p1);
        for (std::size_t j = 0; j < g.numel(); ++j) {
          da.v[j] += g.v[j];
          db.v[j] -= g.v[j];
        }
        break;
      }
      case Op::kMul: {
        const Tensor& a = nodes_[n.p0].value;
        const Tensor& b = nodes_[n.p1].value;
        Tensor& da = grad_of(n.p0);
        Tensor& db = grad_of(n.p1);
        for (std::size_t j = 0; j < g.numel(); ++j) {
          da.v[j] += g.v[j] * b.v[j];
          db.v[j] += g.v[j] * a.v[j];
        }
        break;
      }
      case Op::kScale: {
        Tensor& da = grad_of(n.p0);
        for (std::size_t j = 0; j < g.numel(); ++j) da.v[j] += n.aux * g.v[j];
        break;
      }
      case Op::kOneMinus: {
        Tensor& da = grad_of(n.p0);
        for (std::size_t j = 0; j < g.numel(); ++j) da.v[j] -= g.v[j];
        break;
      }
      case Op::kSigmoid: {
        Tensor& da = grad_of(n.p0);
        for (std::size_t j = 0; j < g.numel(); ++j) {
          const double y = n.value.v[j];
          da.v[j] += g.v[j] * y * (1.0 - y);
        }
        break;
      }
      case Op::kTanh: {
        Tensor& da = grad_of(n.p0);
        for (std::size_t j = 0; j < g.numel(); ++j) {
          const double y = n.value.v[j];
          da.v[j] += g.v[j] * (1.0 - y * y);
        }
        break;
      }
      case Op::kConcat: {
        Tensor& da = grad_of(n.p0);
        Tensor& db = grad_of(n.p1);
        const std::size_t na = da.numel();
        for (std::size_t j = 0; j < na; ++j) da.v[j] += g.v[j];
        for (std::size_t j = 0; j < db.numel(); ++j) db.v[j] += g.v[na + j];
        break;
      }
      case Op::kSum: {
        Tensor& da = grad_of(n.p0);
        for (std::size_t j = 0; j < da.numel(); ++j) da.v[j] += g.v[0];
        break;
      }
      case Op::kSquare: {
        const Tensor& a = nodes_[n.p0].value;
        Tensor& da = grad_of(n.p0);
        for (std::size_t j = 0; j < g.numel(); ++j) {
          da.v[j] += 2.0 * a.v[j] * g.v[j];
        }
        break;
      }
      case Op::kHinge: {
        const double m = nodes_[n.p0].value.v[0];
        if (1.0 - m > 0.0) grad_of(n.p0).v[0] -= g.v[0];
        break;
      }
      case Op::kEmbedRows: {
        Tensor& dt = grad_of(n.p0);
        const std::size_t width = n.value.cols();
        for (std::size_t r = 0; r < n.ids.size(); ++r) {
          double* dst =
              dt.v.data() + static_cast<std::size_t>(n.ids[r]) * width;
          const double* src = g.v.data() + r * width;
          for (std::size_t c = 0; c < width; ++c) dst[c] += src[c];
        }
        break;
      }
      case Op::kSliceRow: {
        Tensor& dm = grad_of(n.p0);
        double* dst = dm.v.data() + n.row * dm.cols();
        for (std::size_t c = 0; c < g.numel(); ++c) dst[c] += g.v[c];
        break;
      }
      case Op::kMaskMul: {
        Tensor& da = grad_of(n.p0);
        for (std::size_t j = 0; j < g.numel(); ++j) {
          da.v[j] += g.v[j] * n.mask.v[j];
        }
        break;
      }
    }
  }
}

void Tape::reset() {
  nodes_.clear();
  param_nodes_.clear();
}

}  // namespace nlgqe
