#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nlgqe {

// Dense row-major tensor of doubles. The network is tiny, so everything is
// double precision; that also keeps finite-difference checks tight.
struct Tensor {
  std::vector<std::size_t> dims;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape)
      : dims(std::move(shape)), v(numel_of(dims), 0.0) {}

  static std::size_t numel_of(const std::vector<std::size_t>& dims) {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return dims.empty() ? 0 : n;
  }

  static Tensor zeros(std::vector<std::size_t> shape) {
    return Tensor(std::move(shape));
  }
  static Tensor scalar(double x) {
    Tensor t({1});
    t.v[0] = x;
    return t;
  }
  static Tensor vector(std::vector<double> values) {
    Tensor t;
    t.dims = {values.size()};
    t.v = std::move(values);
    return t;
  }

  std::size_t numel() const { return v.size(); }
  std::size_t rows() const { return dims.empty() ? 0 : dims[0]; }
  std::size_t cols() const { return dims.size() < 2 ? 1 : dims[1]; }

  double& at(std::size_t i) { return v[i]; }
  double at(std::size_t i) const { return v[i]; }
  double& at(std::size_t r, std::size_t c) { return v[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols() + c]; }

  void fill(double x) {
    for (double& x_i : v) x_i = x;
  }

  bool same_shape(const Tensor& other) const { return dims == other.dims; }

  std::string shape_string() const;
};

}  // namespace nlgqe
