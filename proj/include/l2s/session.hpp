#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "l2s/counters.hpp"
#include "l2s/error.hpp"
#include "l2s/feature_vector.hpp"

namespace l2s {

struct PredictRequest {
  FeatureVector features;
  int ref = 0;                            // reference decision (training advice)
  int tag = 0;                            // >= 1, names this prediction
  std::vector<int> condition_tags;        // tags this prediction's features depend on
  std::optional<std::vector<int>> allowed;  // restricted action set, if any
};

enum class SessionMode { Rollin, Deviation, TestDecode };

// A policy sees the request plus the 1-based step index within the run.
using PolicyFn = std::function<int(const PredictRequest&, int step)>;

// Execution state machine for one structured example. A task program is an
// ordinary function calling predict() and declare_loss(); the session decides
// what each predict() means depending on the run mode:
//
//   Rollin      — call the rollin policy, record features/allowed/ref, cache
//                 the action.
//   Deviation   — replay the cache before t0, force a0 at t0, and resolve
//                 later steps with the rollout policy (memoized, optionally
//                 collapsed to a constant action after collapse_h steps).
//   TestDecode  — call the decode policy only; ref is ignored.
//
// Sessions are strictly single-threaded.
class Session {
 public:
  struct Step {
    FeatureVector features;
    std::vector<int> allowed;
    int ref;
    int tag;
  };

  int num_actions;
  bool cache_enabled = true;
  std::optional<int> collapse_h;
  PolicyFn rollin_policy;
  PolicyFn rollout_policy;
  PolicyFn decode_policy;
  int rollout_salt = 0;  // distinguishes memo entries under mixed rollouts

  Counters counters;

  std::vector<Step> ex;
  std::vector<int> cache;
  int T = 0;

  double loss_acc = 0.0;     // deviation / decode loss of the current run
  double rollin_loss = 0.0;  // bookkeeping only; never feeds costs

  explicit Session(int num_actions_) : num_actions(num_actions_) {
    if (num_actions < 1) throw ConfigError("session needs at least one action");
  }

  void begin_rollin() {
    begin(SessionMode::Rollin);
    ex.clear();
    cache.clear();
    T = 0;
    rollin_loss = 0.0;
  }

  void begin_deviation(int t0, int a0) {
    if (t0 < 1 || t0 > T) throw ContractError("deviation t0 outside the preceding rollin");
    begin(SessionMode::Deviation);
    t0_ = t0;
    a0_ = a0;
  }

  void begin_decode() { begin(SessionMode::TestDecode); }

  void end_run() {
    if (!active_) throw ContractError("end_run without an active run");
    if (mode_ == SessionMode::Rollin) T = t_;
    active_ = false;
  }

  bool run_active() const { return active_; }
  SessionMode mode() const { return mode_; }

  int predict(const PredictRequest& req) {
    if (!active_) throw ContractError("predict called outside a task run");
    if (req.allowed && req.allowed->empty()) throw ContractError("predict: empty allowed set");
    validate_request(req);
    ++t_;
    int action = -1;
    switch (mode_) {
      case SessionMode::Rollin: {
        Step step{req.features, effective_allowed(req), req.ref, req.tag};
        action = call_policy(rollin_policy, req);
        ex.push_back(std::move(step));
        cache.push_back(action);
        break;
      }
      case SessionMode::Deviation: {
        if (t_ < t0_) {
          action = cache[t_ - 1];
        } else if (t_ == t0_) {
          action = a0_;
        } else if (collapse_h && rollout_steps_taken_ >= *collapse_h) {
          action = smallest_allowed(req);
        } else {
          action = memo_lookup_or_call(req);
          ++rollout_steps_taken_;
          ++counters.rollout_steps;
        }
        break;
      }
      case SessionMode::TestDecode:
        action = call_policy(decode_policy, req);
        break;
    }
    check_action(action, req);
    tag_actions_[req.tag] = action;
    return action;
  }

  void declare_loss(double val) {
    if (!active_) throw ContractError("loss declared outside a task run");
    if (!std::isfinite(val)) throw NumericError("declared loss not finite");
    if (val < 0) throw ContractError("declared loss is negative");
    if (mode_ == SessionMode::Rollin)
      rollin_loss += val;  // never charged to any deviation
    else
      loss_acc += val;
  }

  void clear_memo() { memo_.clear(); }

  // Resolves a rollout prediction through the tag/condition memo. The key is
  // the triple (tag, condition tags, actions currently assigned to those
  // tags); under the user's tag contract, equal keys imply equal predictions
  // for a fixed rollout policy, so a hit skips the policy call entirely.
  int memo_lookup_or_call(const PredictRequest& req) {
    if (!cache_enabled) return call_policy(rollout_policy, req);
    std::vector<int> key;
    key.reserve(2 + 2 * req.condition_tags.size());
    key.push_back(rollout_salt);
    key.push_back(req.tag);
    for (int ct : req.condition_tags) {
      auto it = tag_actions_.find(ct);
      if (it == tag_actions_.end())
        throw ContractError("condition tag " + std::to_string(ct) +
                            " was never predicted in this trajectory");
      key.push_back(ct);
      key.push_back(it->second);
    }
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      ++counters.memo_hits;
      return it->second;
    }
    int action = call_policy(rollout_policy, req);
    memo_.emplace(std::move(key), action);
    ++counters.memo_stores;
    return action;
  }

 private:
  struct KeyHash {
    size_t operator()(const std::vector<int>& key) const {
      uint64_t h = 0xcbf29ce484222325ULL;
      for (int v : key) {
        h ^= static_cast<uint32_t>(v);
        h *= 0x100000001b3ULL;
      }
      return static_cast<size_t>(h);
    }
  };

  void begin(SessionMode m) {
    if (active_) throw ContractError("previous run still active");
    mode_ = m;
    active_ = true;
    t_ = 0;
    t0_ = 0;
    a0_ = -1;
    rollout_steps_taken_ = 0;
    loss_acc = 0.0;
    tag_actions_.clear();
    ++counters.run_executions;
  }

  void validate_request(const PredictRequest& req) const {
    if (req.tag < 1) throw ContractError("predict tag must be >= 1");
    if (req.ref < 0 || req.ref >= num_actions)
      throw ConfigError("reference action " + std::to_string(req.ref) + " >= " +
                        std::to_string(num_actions) + " actions");
    if (req.allowed)
      for (int a : *req.allowed)
        if (a < 0 || a >= num_actions)
          throw ConfigError("allowed action " + std::to_string(a) + " >= " +
                            std::to_string(num_actions) + " actions");
  }

  std::vector<int> effective_allowed(const PredictRequest& req) const {
    if (req.allowed) return *req.allowed;
    std::vector<int> all(num_actions);
    for (int a = 0; a < num_actions; ++a) all[a] = a;
    return all;
  }

  static int smallest_allowed(const PredictRequest& req) {
    if (!req.allowed) return 0;
    int best = (*req.allowed)[0];
    for (int a : *req.allowed) best = std::min(best, a);
    return best;
  }

  int call_policy(const PolicyFn& policy, const PredictRequest& req) {
    if (!policy) throw ContractError("no policy installed for this run mode");
    ++counters.policy_calls;
    return policy(req, t_);
  }

  void check_action(int action, const PredictRequest& req) const {
    if (action < 0 || action >= num_actions)
      throw ConfigError("policy returned action " + std::to_string(action) + " >= " +
                        std::to_string(num_actions) + " actions");
    if (req.allowed) {
      for (int a : *req.allowed)
        if (a == action) return;
      throw ContractError("action " + std::to_string(action) + " violates the allowed set");
    }
  }

  SessionMode mode_ = SessionMode::TestDecode;
  bool active_ = false;
  int t_ = 0;
  int t0_ = 0;
  int a0_ = -1;
  int rollout_steps_taken_ = 0;
  std::unordered_map<std::vector<int>, int, KeyHash> memo_;
  std::unordered_map<int, int> tag_actions_;
};

}  // namespace l2s
