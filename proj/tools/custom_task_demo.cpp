// A complete custom task on the raw library API: track a drifting state from
// partial observations. Half the positions observe the true state, the rest
// see only "?"; at the blank positions the previous prediction is the only
// evidence. Compare an independent baseline (no previous-prediction feature)
// against the structured version.

#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "l2s/cs_learner.hpp"
#include "l2s/driver.hpp"
#include "l2s/session.hpp"
#include "l2s/trainer.hpp"

using namespace l2s;

namespace {

constexpr int kStates = 4;
constexpr int kLength = 15;
constexpr uint32_t kBits = 14;

struct Walk {
  std::vector<int> truth;
  std::vector<std::string> observed;  // "0".."3" or "?"
};

std::vector<Walk> sample_walks(int count, double blank_rate, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> any_state(0, kStates - 1);
  std::vector<Walk> walks(count);
  for (auto& walk : walks) {
    int state = any_state(rng);
    for (int t = 0; t < kLength; ++t) {
      // directional chain: advance one step with probability 0.9, else jump
      if (t > 0) state = unit(rng) < 0.9 ? (state + 1) % kStates : any_state(rng);
      walk.truth.push_back(state);
      walk.observed.push_back(unit(rng) < blank_rate ? "?" : std::to_string(state));
    }
  }
  return walks;
}

// The task program: one predict per position, Hamming loss declared early.
TaskProgram make_task(const Walk& walk, bool structured) {
  auto run = [&walk, structured](Session& session) {
    int prev = -1;
    for (int t = 0; t < kLength; ++t) {
      PredictRequest req;
      req.features = FeatureVector(kBits);
      req.features.add("o", "obs=" + walk.observed[t]);
      if (structured && t > 0) {
        req.features.add("q", "prev=" + std::to_string(prev));
        req.condition_tags = {t};
      }
      req.ref = walk.truth[t];
      req.tag = t + 1;
      prev = session.predict(req);
      session.declare_loss(prev == walk.truth[t] ? 0.0 : 1.0);
    }
  };
  return {run, /*history_independent_loss=*/true};
}

double evaluate(const std::vector<Walk>& walks, const LinearCSModel& model, bool structured) {
  double total_loss = 0.0;
  for (const auto& walk : walks)
    total_loss += test_decode(make_task(walk, structured).run, model);
  return 1.0 - total_loss / (walks.size() * kLength);
}

}  // namespace

int main() {
  auto train_walks = sample_walks(400, 0.5, 11);
  auto test_walks = sample_walks(100, 0.5, 22);

  for (bool structured : {false, true}) {
    LinearCSModel model(kBits, kStates);
    TrainerConfig cfg;  // LOLS: learned rollin, mixed rollouts
    cfg.seed = 3;
    for (uint64_t pass = 0; pass < 2; ++pass)
      for (size_t i = 0; i < train_walks.size(); ++i)
        learn_example(make_task(train_walks[i], structured), model, cfg, i, pass);
    std::cout << (structured ? "structured " : "independent") << " accuracy: "
              << evaluate(test_walks, model, structured) << '\n';
  }
  return 0;
}
