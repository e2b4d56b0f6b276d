#pragma once

#include <functional>
#include <string>

#include "srlx/nn/params.hpp"

namespace srlx::nn {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_tensor;
  int worst_row = -1;
  int worst_col = -1;
};

// Central-difference verification of the analytic gradient. loss(true) must
// run forward and backward (accumulating into Tensor::grad); loss(false)
// runs forward only. The callable must be deterministic: freeze any noise
// before calling. Checks every coordinate of small tensors and a seeded
// sample of at least max_coords for large ones.
GradCheckResult grad_check(ParamStore& store,
                           const std::function<double(bool)>& loss,
                           double eps = 1e-5, size_t max_coords = 64,
                           uint64_t seed = 0);

}  // namespace srlx::nn
