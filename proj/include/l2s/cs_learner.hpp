#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "l2s/error.hpp"
#include "l2s/feature_vector.hpp"

namespace l2s {

// Shared features, one cost per allowed action. Costs come in min-shifted
// (differential), so min(costs) == 0.
struct CostSensitiveExample {
  FeatureVector features;
  std::vector<int> allowed;
  std::vector<double> costs;
};

// One-against-all regression onto costs over hashed features, per-feature
// AdaGrad. Weights are dense per action block: slot(a,i) = a << bits | i.
struct LinearCSModel {
  uint32_t bits;
  int num_actions;
  double eta;
  double epsilon;
  uint64_t update_count = 0;
  std::vector<double> weights;
  std::vector<double> grad_sq;

  LinearCSModel(uint32_t bits_, int num_actions_, double eta_ = 0.5, double epsilon_ = 1e-6)
      : bits(bits_), num_actions(num_actions_), eta(eta_), epsilon(epsilon_) {
    if (bits < kMinBits || bits > kMaxBits) throw ConfigError("model bits must be in [8,31]");
    if (num_actions < 1) throw ConfigError("model needs at least one action");
    if (eta <= 0) throw ConfigError("learning rate must be positive");
    size_t per_action = size_t{1} << bits;
    weights.assign(per_action * num_actions, 0.0);
    grad_sq.assign(per_action * num_actions, 0.0);
  }

  size_t slot(int action, uint64_t index) const {
    return (static_cast<size_t>(action) << bits) + index;
  }
};

inline double cs_score(const LinearCSModel& m, const FeatureVector& fv, int action) {
  if (action < 0 || action >= m.num_actions)
    throw ContractError("cs_score: action " + std::to_string(action) + " out of range");
  double s = 0.0;
  for (const auto& e : fv.entries) s += m.weights[m.slot(action, e.index)] * e.value;
  return s;
}

// Argmin of cs_score over the allowed set; ties go to the smallest action id.
inline int cs_predict(const LinearCSModel& m, const FeatureVector& fv,
                      const std::vector<int>& allowed) {
  if (allowed.empty()) throw ContractError("cs_predict: empty allowed set");
  int best = -1;
  double best_score = 0.0;
  for (int a : allowed) {
    double s = cs_score(m, fv, a);
    if (best < 0 || s < best_score || (s == best_score && a < best)) {
      best = a;
      best_score = s;
    }
  }
  return best;
}

inline void cs_update(LinearCSModel& m, const CostSensitiveExample& ex) {
  if (ex.allowed.size() != ex.costs.size())
    throw ContractError("cs_update: allowed/costs size mismatch");
  for (size_t j = 0; j < ex.allowed.size(); ++j) {
    int a = ex.allowed[j];
    double residual = cs_score(m, ex.features, a) - ex.costs[j];
    if (!std::isfinite(residual))
      throw NumericError("cs_update: non-finite residual for action " + std::to_string(a));
    for (const auto& e : ex.features.entries) {
      double g = residual * e.value;
      size_t s = m.slot(a, e.index);
      m.grad_sq[s] += g * g;
      m.weights[s] -= m.eta * g / std::sqrt(m.grad_sq[s] + m.epsilon);
    }
  }
  ++m.update_count;
}

}  // namespace l2s
