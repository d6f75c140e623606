#pragma once

#include <cmath>
#include <vector>

#include "ibinet/nn/layers.hpp"
#include "ibinet/tensor.hpp"

namespace ibinet::nn {

/// First/second moment buffers matching a fixed parameter list, plus the
/// shared step counter.
template <typename Scalar>
struct AdamState {
  std::vector<Tensor<Scalar>> m;
  std::vector<Tensor<Scalar>> v;
  long step = 0;

  static AdamState for_parameters(const std::vector<ParamRef<Scalar>>& params) {
    AdamState s;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const auto& p : params) {
      s.m.emplace_back(p.value->shape());
      s.v.emplace_back(p.value->shape());
    }
    return s;
  }
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update over a parameter list. Gradients are read
/// from each ParamRef's grad tensor.
template <typename Scalar>
void adam_step(const std::vector<ParamRef<Scalar>>& params, AdamState<Scalar>& state,
               const AdamConfig& cfg) {
  if (params.size() != state.m.size())
    throw ParameterError("adam_step: state holds " + std::to_string(state.m.size()) +
                         " moments for " + std::to_string(params.size()) + " parameters");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = *params[i].value;
    const auto& g = *params[i].grad;
    require_same_shape(p, g, "adam_step");
    auto& m = state.m[i].array();
    auto& v = state.v[i].array();
    m = Scalar(cfg.beta1) * m + Scalar(1.0 - cfg.beta1) * g.array();
    v = Scalar(cfg.beta2) * v + Scalar(1.0 - cfg.beta2) * g.array().square();
    const auto m_hat = (m / Scalar(bc1)).eval();
    const auto v_hat = (v / Scalar(bc2)).eval();
    p.array() -= Scalar(cfg.lr) * m_hat / (v_hat.sqrt() + Scalar(cfg.eps));
  }
}

inline constexpr double kLrStages[5] = {0.007, 0.0035, 0.0018, 7e-5, 7e-6};

/// Staged learning rate: five equal stages across the run.
inline double staged_lr(int epoch, int total_epochs) {
  if (total_epochs < 1) throw ParameterError("staged_lr: total_epochs must be >= 1");
  if (epoch < 0 || epoch >= total_epochs)
    throw ParameterError("staged_lr: epoch " + std::to_string(epoch) + " outside [0, " +
                         std::to_string(total_epochs) + ")");
  const int stage_len = (total_epochs + 4) / 5;
  const int stage = std::min(epoch / stage_len, 4);
  return kLrStages[stage];
}

/// The 200-epoch schedule: 0.007 / 0.0035 / 0.0018 / 7e-5 / 7e-6 in 40-epoch
/// stages.
inline double lr_schedule(int epoch) { return staged_lr(epoch, 200); }

}  // namespace ibinet::nn
