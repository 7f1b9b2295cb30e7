#include "autodiff/adam.hpp"

#include <cmath>

#include "error.hpp"

namespace gradphon::ad {

void Adam::step(std::span<Parameter* const> params) {
  if (first_moment_.empty()) {
    for (const Parameter* p : params) {
      first_moment_.emplace_back(p->value.size(), 0.0);
      second_moment_.emplace_back(p->value.size(), 0.0);
    }
  }
  if (params.size() != first_moment_.size()) {
    fail(ErrorKind::Dimension, "adam: optimizer holds state for " + std::to_string(first_moment_.size()) +
                                   " parameters, step got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = *params[i];
    if (p.value.size() != first_moment_[i].size() || p.grad.size() != p.value.size()) {
      fail(ErrorKind::Dimension, "adam: parameter '" + p.name + "' of shape " + shape_str(p.shape) +
                                     " does not match its optimizer state");
    }
  }

  ++steps_;
  const Real b1 = config_.beta1, b2 = config_.beta2;
  const Real correction1 = 1.0 - std::pow(b1, static_cast<Real>(steps_));
  const Real correction2 = 1.0 - std::pow(b2, static_cast<Real>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    auto& m = first_moment_[i];
    auto& v = second_moment_[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const Real g = p.grad[j];
      m[j] = b1 * m[j] + (1.0 - b1) * g;
      v[j] = b2 * v[j] + (1.0 - b2) * g * g;
      const Real m_hat = m[j] / correction1;
      const Real v_hat = v[j] / correction2;
      p.value[j] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

Real clip_global_norm(std::span<Parameter* const> params, Real max_norm) {
  Real sq = 0;
  for (const Parameter* p : params)
    for (Real g : p->grad) sq += g * g;
  const Real norm = std::sqrt(sq);
  if (norm > max_norm) {
    const Real factor = max_norm / norm;
    for (Parameter* p : params)
      for (Real& g : p->grad) g *= factor;
  }
  return norm;
}

}  // namespace gradphon::ad
