#pragma once

#include <vector>

#include "nlgqe/tape.hpp"

namespace nlgqe {

// Adam with bias correction over a fixed parameter list. Moment slots are
// aligned with the list positionally, so the list must not change between
// steps.
class AdamState {
 public:
  explicit AdamState(const std::vector<Parameter*>& params, double beta1 = 0.9,
                     double beta2 = 0.999, double epsilon = 1e-8);

  // One update from the gradients currently accumulated in the parameters;
  // clears them afterwards.
  void step(const std::vector<Parameter*>& params, double learning_rate);

  std::size_t step_count() const { return step_; }
  double beta1() const { return beta1_; }
  double beta2() const { return beta2_; }
  double epsilon() const { return epsilon_; }

 private:
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::size_t step_ = 0;
  double beta1_, beta2_, epsilon_;
};

}  // namespace nlgqe
