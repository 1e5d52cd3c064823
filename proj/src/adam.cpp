#include "nlgqe/adam.hpp"

#include <cmath>

#include "nlgqe/error.hpp"

namespace nlgqe {

AdamState::AdamState(const std::vector<Parameter*>& params, double beta1,
                     double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Parameter* p : params) {
    m_.emplace_back(p->value.dims);
    v_.emplace_back(p->value.dims);
  }
}

void AdamState::step(const std::vector<Parameter*>& params,
                     double learning_rate) {
  if (params.size() != m_.size()) {
    throw DataError("adam: parameter list changed size");
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (!p.value.same_shape(m_[i])) {
      throw DataError("adam: parameter " + p.name + " changed shape");
    }
    for (std::size_t j = 0; j < p.value.numel(); ++j) {
      const double g = p.grad.v[j];
      m_[i].v[j] = beta1_ * m_[i].v[j] + (1.0 - beta1_) * g;
      v_[i].v[j] = beta2_ * v_[i].v[j] + (1.0 - beta2_) * g * g;
      const double m_hat = m_[i].v[j] / bc1;
      const double v_hat = v_[i].v[j] / bc2;
      p.value.v[j] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
    p.zero_grad();
  }
}

}  // namespace nlgqe
