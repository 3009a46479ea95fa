// Central finite-difference gradient checking against the tape's analytic
// gradients, over every scalar of every registered parameter.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "spanproto/params.hpp"

namespace gradcheck {

struct Result {
  double max_rel_err = 0.0;
  long checked = 0;
  std::string worst;  // "param[k]" of the worst mismatch
};

// loss_fn evaluates the loss at the registry's current values without
// touching gradients. Analytic gradients must already be accumulated in the
// registry (zero_grads + backward done by the caller).
inline Result check(spanproto::ParameterRegistry& params,
                    const std::function<double()>& loss_fn, double eps = 1e-5) {
  Result res;
  for (int p = 0; p < params.size(); ++p) {
    spanproto::Param& param = params.at(p);
    for (size_t k = 0; k < param.value.size(); ++k) {
      const double saved = param.value.a[k];
      param.value.a[k] = saved + eps;
      const double up = loss_fn();
      param.value.a[k] = saved - eps;
      const double down = loss_fn();
      param.value.a[k] = saved;

      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = param.grad.a[k];
      const double denom = std::max({std::fabs(numeric), std::fabs(analytic), 1e-6});
      const double rel = std::fabs(numeric - analytic) / denom;
      ++res.checked;
      if (rel > res.max_rel_err) {
        res.max_rel_err = rel;
        res.worst = param.name + "[" + std::to_string(k) + "]";
      }
    }
  }
  return res;
}

}  // namespace gradcheck
