#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "l2s/counters.hpp"
#include "l2s/error.hpp"
#include "l2s/hashing.hpp"
#include "l2s/trainer.hpp"

namespace l2s {

struct TrainStats {
  Counters counters;
  double wall_seconds = 0.0;
  uint64_t examples_seen = 0;
  uint64_t epochs = 0;
  double rollin_loss = 0.0;       // summed over all rollin passes
  double last_epoch_rollin_loss = 0.0;
};

// Epoch schedule: floor(passes) full epochs, then one more epoch with the
// subsample rate scaled by the fractional remainder. passes = 0.5 therefore
// means a single epoch visiting roughly half the deviation positions.
inline std::vector<std::pair<uint64_t, double>> epoch_schedule(double passes, double subsample) {
  std::vector<std::pair<uint64_t, double>> epochs;
  uint64_t full = static_cast<uint64_t>(std::floor(passes));
  for (uint64_t e = 0; e < full; ++e) epochs.push_back({e, subsample});
  double remainder = passes - static_cast<double>(full);
  if (remainder > 1e-12) epochs.push_back({full, subsample * remainder});
  if (epochs.empty()) throw ConfigError("passes must be positive");
  return epochs;
}

// Shuffled online training over a corpus. make_run binds one example into a
// task closure; example ids stay stable across epochs so tied randomness
// lines up.
template <class Example, class MakeRun>
TrainStats train_corpus(const std::vector<Example>& examples, MakeRun&& make_run,
                        bool history_independent_loss, const LearnerHooks& hooks,
                        const TrainerConfig& cfg) {
  validate_config(cfg);
  auto start = std::chrono::steady_clock::now();
  TrainStats stats;

  std::vector<size_t> order(examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (auto [pass_index, keep_rate] : epoch_schedule(cfg.passes, cfg.subsample)) {
    std::mt19937_64 rng(mix64(cfg.seed ^ (pass_index * 0x9e3779b97f4a7c15ULL + 0x51)));
    std::shuffle(order.begin(), order.end(), rng);
    TrainerConfig epoch_cfg = cfg;
    epoch_cfg.subsample = keep_rate;
    stats.last_epoch_rollin_loss = 0.0;
    for (size_t idx : order) {
      TaskProgram task{make_run(examples[idx]), history_independent_loss};
      double rollin_loss = 0.0;
      stats.counters += learn_example(task, hooks, epoch_cfg, idx, pass_index, &rollin_loss);
      stats.rollin_loss += rollin_loss;
      stats.last_epoch_rollin_loss += rollin_loss;
      ++stats.examples_seen;
    }
    ++stats.epochs;
  }
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

template <class Example, class MakeRun>
TrainStats train_corpus(const std::vector<Example>& examples, MakeRun&& make_run,
                        bool history_independent_loss, LinearCSModel& model,
                        const TrainerConfig& cfg) {
  LearnerHooks hooks = make_hooks(model);
  return train_corpus(examples, std::forward<MakeRun>(make_run), history_independent_loss, hooks,
                      cfg);
}

struct BenchRow {
  std::string name;
  Counters counters;
  double train_seconds = 0.0;
  double metric = 0.0;
};

// The four optimization settings, most expensive first. Each row trains a
// fresh model under the same seed and reports counters plus a caller-chosen
// evaluation metric.
template <class Example, class MakeRun, class ModelFactory, class EvalFn>
std::vector<BenchRow> run_bench(const std::vector<Example>& examples, MakeRun&& make_run,
                                bool history_independent_loss, ModelFactory&& fresh_model,
                                EvalFn&& evaluate, const TrainerConfig& base_cfg) {
  struct RowSpec {
    const char* name;
    bool cache;
    std::optional<int> collapse;
  };
  const RowSpec rows[] = {
      {"no_opts", false, std::nullopt},
      {"memoization", true, std::nullopt},
      {"collapse4+memoization", true, 4},
      {"collapse2+memoization", true, 2},
  };
  std::vector<BenchRow> out;
  for (const auto& row : rows) {
    TrainerConfig cfg = base_cfg;
    cfg.cache_enabled = row.cache;
    cfg.collapse_h = row.collapse;
    LinearCSModel model = fresh_model();
    TrainStats stats = train_corpus(examples, make_run, history_independent_loss, model, cfg);
    out.push_back({row.name, stats.counters, stats.wall_seconds, evaluate(model)});
  }
  return out;
}

// FNV-1a over a file's bytes; the determinism checks compare these.
inline uint64_t fnv_file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for hashing: " + path);
  uint64_t h = kFnvOffsetBasis;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= kFnvPrime;
    }
    if (!in) break;
  }
  return h;
}

}  // namespace l2s
