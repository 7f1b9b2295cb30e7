#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "autodiff/tensor.hpp"

namespace gradphon::ad {

struct AdamConfig {
  Real learning_rate = 1e-3;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real epsilon = 1e-8;
};

/// Bias-corrected Adam. Moment buffers are bound to the parameter list seen
/// on the first step; later steps must pass parameters of the same shapes in
/// the same order.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// Applies one update in place using each parameter's `grad`.
  void step(std::span<Parameter* const> params);

  Real learning_rate() const { return config_.learning_rate; }
  void set_learning_rate(Real lr) { config_.learning_rate = lr; }
  std::uint64_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<std::vector<Real>> first_moment_;
  std::vector<std::vector<Real>> second_moment_;
};

/// Rescales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
Real clip_global_norm(std::span<Parameter* const> params, Real max_norm);

}  // namespace gradphon::ad
