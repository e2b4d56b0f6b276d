#pragma once

#include <string>

#include "srlx/nn/params.hpp"

namespace srlx {

// Adadelta with global L2 gradient clipping. Accumulators live in their own
// store so checkpoints can carry them alongside the parameters.
class Adadelta {
 public:
  Adadelta(nn::ParamStore& params, double lr = 1.0, double rho = 0.95,
           double eps = 1e-6, double clip_norm = 5.0);

  Adadelta(const Adadelta&) = delete;
  Adadelta& operator=(const Adadelta&) = delete;

  // applies one update from the gradients currently in the store and zeroes
  // them; returns false (and changes nothing) when any gradient is non-finite
  bool step();

  double lr() const { return lr_; }
  size_t steps_taken() const { return steps_; }

  // squared-gradient and squared-delta running averages, for inspection
  const nn::Mat& sq_grad(const std::string& name) const;
  const nn::Mat& sq_delta(const std::string& name) const;

  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  nn::ParamStore* params_;
  nn::ParamStore acc_;
  double lr_, rho_, eps_, clip_norm_;
  size_t steps_ = 0;
};

}  // namespace srlx
