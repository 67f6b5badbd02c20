#pragma once

#include <random>
#include <string>
#include <vector>

#include "l2s/conll.hpp"
#include "l2s/error.hpp"

namespace l2s {

// Order-1 Markov label chain with noisy emissions. With probability
// trans_prob the next label is (cur+1) mod k, otherwise uniform; each token
// reveals its label ("w<label>") unless the emission flips to an
// uninformative noise word. An independent tagger tops out near
// (1-noise) + noise/k, so structured features have headroom to show up.
struct SynthConfig {
  int k = 5;
  int length = 20;
  int num_sentences = 100;
  double emission_noise = 0.3;
  double trans_prob = 0.8;
  uint64_t seed = 1;
};

inline std::vector<Sentence> gen_markov_corpus(const SynthConfig& cfg, LabelDict& labels) {
  if (cfg.k < 2) throw ConfigError("synthetic corpus needs k >= 2");
  if (cfg.length < 1 || cfg.num_sentences < 0) throw ConfigError("bad synthetic corpus shape");
  // labels are "1".."k" so the same corpus also feeds the detection task
  for (int a = 1; a <= cfg.k; ++a) labels.intern(std::to_string(a));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick_label(0, cfg.k - 1);
  std::uniform_int_distribution<int> pick_noise(0, 15);

  std::vector<Sentence> corpus;
  corpus.reserve(cfg.num_sentences);
  for (int s = 0; s < cfg.num_sentences; ++s) {
    Sentence sent;
    int label = pick_label(rng);
    for (int pos = 0; pos < cfg.length; ++pos) {
      if (pos > 0)
        label = unit(rng) < cfg.trans_prob ? (label + 1) % cfg.k : pick_label(rng);
      std::string word = unit(rng) < cfg.emission_noise
                             ? "n" + std::to_string(pick_noise(rng))
                             : "w" + std::to_string(label + 1);
      std::string name = std::to_string(label + 1);
      sent.tokens.push_back(Token{{word, name}});
      sent.gold_labels.push_back(labels.lookup(name));
    }
    corpus.push_back(std::move(sent));
  }
  return corpus;
}

}  // namespace l2s
