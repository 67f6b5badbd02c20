#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "l2s/counters.hpp"
#include "l2s/cs_learner.hpp"
#include "l2s/error.hpp"
#include "l2s/hashing.hpp"
#include "l2s/session.hpp"

namespace l2s {

enum class Algorithm { Dagger, Searn, Lols };
enum class RollinSource { Learned, Mix };
enum class RolloutSource { Reference, Learned, Mix, None };

struct TrainerConfig {
  Algorithm algorithm = Algorithm::Lols;
  RollinSource rollin_source = RollinSource::Learned;
  RolloutSource rollout_source = RolloutSource::Mix;
  double interpolation = 1e-8;   // beta for (1-beta)^u reference decay
  double rollout_mix_prob = 0.5; // P(reference) per deviation trajectory
  std::optional<int> collapse_h;
  double subsample = 1.0;        // keep rate for deviation positions
  double passes = 1.0;
  bool update_per_example = false;
  bool cache_enabled = true;
  uint64_t seed = 1;
};

inline void validate_config(const TrainerConfig& cfg) {
  if (cfg.algorithm == Algorithm::Dagger && cfg.rollout_source != RolloutSource::None)
    throw ConfigError("dagger does no rollouts; use --rollout none");
  if (cfg.algorithm != Algorithm::Dagger && cfg.rollout_source == RolloutSource::None)
    throw ConfigError("--rollout none is only meaningful with dagger");
  if (cfg.interpolation <= 0 || cfg.interpolation > 1)
    throw ConfigError("interpolation must be in (0,1]");
  if (cfg.rollout_mix_prob < 0 || cfg.rollout_mix_prob > 1)
    throw ConfigError("rollout mix probability must be in [0,1]");
  if (cfg.subsample <= 0 || cfg.subsample > 1)
    throw ConfigError("subsample must be in (0,1]");
  if (cfg.passes <= 0) throw ConfigError("passes must be positive");
  if (cfg.collapse_h && *cfg.collapse_h < 1) throw ConfigError("collapse horizon must be >= 1");
}

enum class Phase : uint64_t { Rollin = 1, Rollout = 2, Subsample = 3 };
enum class PolicySel { Reference, Learned };

// Tied randomness: a counter-based draw keyed by (seed, phase, t, example,
// pass), so every deviation of one example sees the same coin at the same t.
inline double tied_uniform(uint64_t seed, Phase phase, int t, uint64_t example_id,
                           uint64_t pass_index) {
  uint64_t h = mix64(seed ^ (static_cast<uint64_t>(phase) << 56));
  h = mix64(h ^ (static_cast<uint64_t>(t) + 1));
  h = mix64(h ^ (example_id * 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ pass_index);
  return unit_double(h);
}

// Policy selector for one prediction. Rollin mixing interpolates toward the
// learned policy as updates accumulate: P(reference) = (1-beta)^u. Rollout
// mixing flips one coin per deviation trajectory (callers pass t = t0).
inline PolicySel choose_policy_tied(const TrainerConfig& cfg, Phase phase, int t,
                                    uint64_t example_id, uint64_t pass_index,
                                    uint64_t update_count) {
  if (phase == Phase::Rollin) {
    if (cfg.rollin_source == RollinSource::Learned) return PolicySel::Learned;
    double p_ref = std::pow(1.0 - cfg.interpolation, static_cast<double>(update_count));
    return tied_uniform(cfg.seed, phase, t, example_id, pass_index) < p_ref
               ? PolicySel::Reference
               : PolicySel::Learned;
  }
  switch (cfg.rollout_source) {
    case RolloutSource::Reference: return PolicySel::Reference;
    case RolloutSource::Learned: return PolicySel::Learned;
    case RolloutSource::None: return PolicySel::Reference;  // unreachable in training
    case RolloutSource::Mix: break;
  }
  return tied_uniform(cfg.seed, phase, t, example_id, pass_index) < cfg.rollout_mix_prob
             ? PolicySel::Reference
             : PolicySel::Learned;
}

// Differential costs: each action is charged its rollout loss minus the best
// rollout loss, so the cheapest action costs exactly zero.
inline std::vector<double> make_cost_vector(const std::vector<double>& losses) {
  if (losses.empty()) throw ContractError("make_cost_vector: no actions");
  double lo = std::numeric_limits<double>::infinity();
  for (double v : losses) {
    if (!std::isfinite(v)) throw NumericError("make_cost_vector: non-finite loss");
    lo = std::min(lo, v);
  }
  std::vector<double> costs(losses.size());
  for (size_t i = 0; i < losses.size(); ++i) costs[i] = losses[i] - lo;
  return costs;
}

// The underlying learner, as the trainer sees it. Tests may substitute their
// own hooks; make_hooks adapts a LinearCSModel.
struct LearnerHooks {
  int num_actions = 0;
  std::function<int(const FeatureVector&, const std::vector<int>&)> predict;
  std::function<void(const CostSensitiveExample&)> update;
  std::function<uint64_t()> update_count;
};

inline LearnerHooks make_hooks(LinearCSModel& model) {
  LearnerHooks hooks;
  hooks.num_actions = model.num_actions;
  hooks.predict = [&model](const FeatureVector& fv, const std::vector<int>& allowed) {
    return cs_predict(model, fv, allowed);
  };
  hooks.update = [&model](const CostSensitiveExample& ex) { cs_update(model, ex); };
  hooks.update_count = [&model]() { return model.update_count; };
  return hooks;
}

// A task program plus the one property the optimizer needs to know about it.
// run must terminate for every policy; the engine re-executes it freely and
// cannot detect nontermination.
struct TaskProgram {
  std::function<void(Session&)> run;
  bool history_independent_loss = false;
};

namespace detail {

// The reference decision, clamped into the allowed set (smallest id wins
// when the advice itself is not available).
inline int clamp_reference(int ref, const std::vector<int>& allowed) {
  int best = allowed[0];
  for (int a : allowed) {
    if (a == ref) return ref;
    best = std::min(best, a);
  }
  return best;
}

inline int reference_action(const PredictRequest& req) {
  if (!req.allowed) return req.ref;
  return clamp_reference(req.ref, *req.allowed);
}

inline PolicyFn learned_policy(const LearnerHooks& hooks, int num_actions) {
  std::vector<int> all(num_actions);
  for (int a = 0; a < num_actions; ++a) all[a] = a;
  return [&hooks, all](const PredictRequest& req, int) {
    return hooks.predict(req.features, req.allowed ? *req.allowed : all);
  };
}

}  // namespace detail

// One structured example through the full credit-assignment loop: a rollin
// pass, then (unless the config says dagger) one re-execution per one-step
// deviation, a differential cost vector per sampled position, and online
// updates (optionally batched until the example is finished). Returns the
// counter deltas this example generated.
inline Counters learn_example(const TaskProgram& task, const LearnerHooks& hooks,
                              const TrainerConfig& cfg, uint64_t example_id, uint64_t pass_index,
                              double* rollin_loss_out = nullptr) {
  validate_config(cfg);
  if (cfg.collapse_h && !task.history_independent_loss)
    throw ConfigError("collapse horizon requires a history-independent task loss");

  Session session(hooks.num_actions);
  session.cache_enabled = cfg.cache_enabled;
  session.collapse_h = cfg.collapse_h;
  session.clear_memo();

  PolicyFn learned = detail::learned_policy(hooks, hooks.num_actions);
  PolicyFn reference = [](const PredictRequest& req, int) { return detail::reference_action(req); };

  session.rollin_policy = [&, learned, reference](const PredictRequest& req, int step) {
    PolicySel sel = choose_policy_tied(cfg, Phase::Rollin, step, example_id, pass_index,
                                       hooks.update_count());
    return sel == PolicySel::Reference ? reference(req, step) : learned(req, step);
  };
  session.decode_policy = learned;

  session.begin_rollin();
  task.run(session);
  session.end_run();
  const int T = session.T;
  if (rollin_loss_out) *rollin_loss_out = session.rollin_loss;

  const bool dagger = cfg.rollout_source == RolloutSource::None;
  std::vector<CostSensitiveExample> pending;

  for (int t0 = 1; t0 <= T; ++t0) {
    if (cfg.subsample < 1.0 &&
        tied_uniform(cfg.seed, Phase::Subsample, t0, example_id, pass_index) >= cfg.subsample)
      continue;
    const Session::Step& step = session.ex[t0 - 1];

    CostSensitiveExample csex;
    csex.features = step.features;
    csex.allowed = step.allowed;

    if (dagger) {
      // No rollouts: unit cost against the reference decision at this state.
      int ref = detail::clamp_reference(step.ref, step.allowed);
      csex.costs.resize(step.allowed.size());
      for (size_t j = 0; j < step.allowed.size(); ++j)
        csex.costs[j] = step.allowed[j] == ref ? 0.0 : 1.0;
    } else {
      PolicySel sel =
          choose_policy_tied(cfg, Phase::Rollout, t0, example_id, pass_index, hooks.update_count());
      session.rollout_policy = sel == PolicySel::Reference ? reference : learned;
      session.rollout_salt =
          cfg.rollout_source == RolloutSource::Mix ? (sel == PolicySel::Reference ? 1 : 2) : 0;

      std::vector<double> losses(step.allowed.size(), 0.0);
      for (size_t j = 0; j < step.allowed.size(); ++j) {
        session.begin_deviation(t0, step.allowed[j]);
        task.run(session);
        session.end_run();
        losses[j] += session.loss_acc;
      }
      csex.costs = make_cost_vector(losses);
    }

    ++session.counters.cs_examples;
    if (cfg.update_per_example)
      pending.push_back(std::move(csex));
    else
      hooks.update(csex);
  }
  for (const auto& csex : pending) hooks.update(csex);
  return session.counters;
}

inline Counters learn_example(const TaskProgram& task, LinearCSModel& model,
                              const TrainerConfig& cfg, uint64_t example_id, uint64_t pass_index,
                              double* rollin_loss_out = nullptr) {
  LearnerHooks hooks = make_hooks(model);
  return learn_example(task, hooks, cfg, example_id, pass_index, rollin_loss_out);
}

// Single pass in decode mode: the learned policy only, no rollouts, loss as
// declared by the task.
inline double test_decode(const std::function<void(Session&)>& run, const PolicyFn& policy,
                          int num_actions, Counters* counters = nullptr) {
  Session session(num_actions);
  session.decode_policy = policy;
  session.begin_decode();
  run(session);
  session.end_run();
  if (counters) *counters += session.counters;
  return session.loss_acc;
}

inline double test_decode(const std::function<void(Session&)>& run, const LinearCSModel& model,
                          Counters* counters = nullptr) {
  PolicyFn policy = [&model](const PredictRequest& req, int) {
    if (req.allowed) return cs_predict(model, req.features, *req.allowed);
    std::vector<int> all(model.num_actions);
    for (int a = 0; a < model.num_actions; ++a) all[a] = a;
    return cs_predict(model, req.features, all);
  };
  return test_decode(run, policy, model.num_actions, counters);
}

}  // namespace l2s
