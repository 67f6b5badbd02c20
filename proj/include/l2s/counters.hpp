#pragma once

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>

namespace l2s {

// Instrumentation for the complexity claims. run_executions counts task
// re-executions (rollin, deviations, decodes); policy_calls counts actual
// policy invocations, i.e. predictions not served by the rollin cache, the
// memo table, or the collapse constant.
struct Counters {
  uint64_t run_executions = 0;
  uint64_t policy_calls = 0;
  uint64_t memo_hits = 0;
  uint64_t memo_stores = 0;
  uint64_t rollout_steps = 0;
  uint64_t cs_examples = 0;

  Counters& operator+=(const Counters& o) {
    run_executions += o.run_executions;
    policy_calls += o.policy_calls;
    memo_hits += o.memo_hits;
    memo_stores += o.memo_stores;
    rollout_steps += o.rollout_steps;
    cs_examples += o.cs_examples;
    return *this;
  }
};

inline std::ostream& operator<<(std::ostream& out, const Counters& c) {
  out << "run_executions=" << c.run_executions << '\n'
      << "policy_calls=" << c.policy_calls << '\n'
      << "memo_hits=" << c.memo_hits << '\n'
      << "memo_stores=" << c.memo_stores << '\n'
      << "rollout_steps=" << c.rollout_steps << '\n'
      << "cs_examples=" << c.cs_examples << '\n';
  return out;
}

inline std::string to_string(const Counters& c) {
  std::ostringstream ss;
  ss << c;
  return ss.str();
}

}  // namespace l2s
