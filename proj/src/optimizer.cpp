#include "spanproto/optimizer.hpp"

#include <cmath>

namespace spanproto {

void AdamW::step(ParameterRegistry& params, int step_index) {
  if (m_.empty()) {
    for (int i = 0; i < params.size(); ++i) {
      m_.emplace_back(params.at(i).value.rows, params.at(i).value.cols);
      v_.emplace_back(params.at(i).value.rows, params.at(i).value.cols);
    }
  }
  for (int i = 0; i < params.size(); ++i) {
    if (!params.at(i).grad.all_finite()) {
      throw std::runtime_error("optimizer: non-finite gradient in parameter " +
                               params.at(i).name);
    }
  }

  ++t_;
  const double lr = effective_lr(step_index);
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));

  for (int i = 0; i < params.size(); ++i) {
    Param& p = params.at(i);
    Mat& m = m_[static_cast<size_t>(i)];
    Mat& v = v_[static_cast<size_t>(i)];
    for (size_t k = 0; k < p.value.size(); ++k) {
      const double g = p.grad.a[k];
      m.a[k] = config_.beta1 * m.a[k] + (1.0 - config_.beta1) * g;
      v.a[k] = config_.beta2 * v.a[k] + (1.0 - config_.beta2) * g * g;
      const double mhat = m.a[k] / bc1;
      const double vhat = v.a[k] / bc2;
      p.value.a[k] -=
          lr * (mhat / (std::sqrt(vhat) + config_.epsilon) + config_.weight_decay * p.value.a[k]);
    }
  }
}

}  // namespace spanproto
