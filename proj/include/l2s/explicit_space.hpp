#pragma once

#include <string>
#include <utility>
#include <vector>

#include "l2s/error.hpp"
#include "l2s/session.hpp"
#include "l2s/trainer.hpp"

namespace l2s {

// A search space given extensionally: states, ordered successor lists, and a
// loss on end states (states with no successors). Every state must reach an
// end state.
struct ExplicitSearchSpace {
  int start = 0;
  std::vector<std::vector<int>> next;  // next[s] empty <=> s is an end state
  std::vector<double> end_loss;        // meaningful where next[s] is empty

  int num_states() const { return static_cast<int>(next.size()); }
  bool is_end(int s) const { return next[s].empty(); }
  int max_branching() const {
    size_t b = 1;
    for (const auto& succ : next) b = std::max(b, succ.size());
    return static_cast<int>(b);
  }
};

// Wraps the space as a task program: walk from the start, asking the policy
// for an index into the successor list at each step (features are the
// one-hot state id), then declare the end state's loss. A walk longer than
// |S| steps means the space has a cycle, which its invariants forbid.
inline std::function<void(Session&)> explicit_space_program(const ExplicitSearchSpace& space,
                                                            int* end_state_out = nullptr,
                                                            uint32_t bits = 18) {
  return [&space, end_state_out, bits](Session& session) {
    int state = space.start;
    int step = 0;
    while (!space.is_end(state)) {
      if (++step > space.num_states())
        throw ContractError("search space did not terminate within " +
                            std::to_string(space.num_states()) + " steps");
      const auto& succ = space.next[state];
      PredictRequest req;
      req.features = FeatureVector(bits);
      req.features.add("s", std::to_string(state));
      req.ref = 0;
      req.tag = step;
      std::vector<int> allowed(succ.size());
      for (size_t i = 0; i < succ.size(); ++i) allowed[i] = static_cast<int>(i);
      req.allowed = std::move(allowed);
      state = succ[session.predict(req)];
    }
    if (end_state_out) *end_state_out = state;
    session.declare_loss(space.end_loss[state]);
  };
}

// Runs the space to an end state under the given policy and reports its loss.
inline std::pair<int, double> run_explicit_space(const ExplicitSearchSpace& space,
                                                 const PolicyFn& policy) {
  int end_state = -1;
  auto run = explicit_space_program(space, &end_state);
  double loss = test_decode(run, policy, std::max(1, space.max_branching()));
  return {end_state, loss};
}

}  // namespace l2s
