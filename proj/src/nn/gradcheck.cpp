#include "srlx/nn/gradcheck.hpp"

#include <cmath>
#include <set>

namespace srlx::nn {

GradCheckResult grad_check(ParamStore& store,
                           const std::function<double(bool)>& loss, double eps,
                           size_t max_coords, uint64_t seed) {
  store.zero_grads();
  double base = loss(true);
  if (!std::isfinite(base)) throw DataError("grad check: non-finite loss");

  GradCheckResult res;
  store.for_each([&](Tensor& t) {
    const size_t total = static_cast<size_t>(t.value.size());
    std::vector<size_t> coords;
    if (total <= max_coords) {
      coords.resize(total);
      for (size_t i = 0; i < total; ++i) coords[i] = i;
    } else {
      Rng rng = Rng::derive(seed, {fnv1a(t.name)});
      std::set<size_t> chosen;
      while (chosen.size() < max_coords)
        chosen.insert(static_cast<size_t>(rng.below(total)));
      coords.assign(chosen.begin(), chosen.end());
    }
    for (size_t flat : coords) {
      int r = static_cast<int>(flat % static_cast<size_t>(t.value.rows()));
      int c = static_cast<int>(flat / static_cast<size_t>(t.value.rows()));
      double saved = t.value(r, c);
      t.value(r, c) = saved + eps;
      double up = loss(false);
      t.value(r, c) = saved - eps;
      double down = loss(false);
      t.value(r, c) = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw DataError("grad check: non-finite loss during perturbation of " +
                        t.name);
      double numeric = (up - down) / (2.0 * eps);
      double analytic = t.grad(r, c);
      double rel = std::abs(analytic - numeric) /
                   std::max({std::abs(analytic), std::abs(numeric), 1e-2});
      if (rel > res.max_rel_err) {
        res.max_rel_err = rel;
        res.worst_tensor = t.name;
        res.worst_row = r;
        res.worst_col = c;
      }
    }
  });
  return res;
}

}  // namespace srlx::nn
