#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "l2s/conll.hpp"
#include "l2s/session.hpp"
#include "l2s/templates.hpp"

namespace l2s {

// Left-to-right sequence labeling. markov_order controls how many previous
// predictions feed conditioned features (and the condition tags handed to
// the memoizer); a constraint, when set, restricts the allowed labels as a
// function of the previous prediction (-1 at sentence start).
struct SequenceTaskConfig {
  int markov_order = 1;
  TemplateSpec templates;
  uint32_t bits = 18;
  const LabelDict* labels = nullptr;
  std::function<std::vector<int>(int prev)> constraint;
};

inline std::vector<int> run_sequence(Session& session, const Sentence& sent,
                                     const SequenceTaskConfig& cfg) {
  if (sent.size() == 0) throw ContractError("run_sequence: empty sentence");
  const int n = static_cast<int>(sent.size());
  std::vector<int> output(n, -1);
  for (int pos = 0; pos < n; ++pos) {
    PredictRequest req;
    req.features = apply_templates(sent, pos, cfg.templates, cfg.bits);
    int order = std::min(cfg.markov_order, pos);
    for (int back = 1; back <= order; ++back) {
      const std::string& name = cfg.labels->names.at(output[pos - back]);
      req.features.add("q", "prev_" + std::to_string(back) + "=" + name);
      req.condition_tags.push_back(pos + 1 - back);
    }
    req.ref = sent.gold_labels[pos];
    req.tag = pos + 1;
    if (cfg.constraint) req.allowed = cfg.constraint(pos == 0 ? -1 : output[pos - 1]);
    output[pos] = session.predict(req);
    session.declare_loss(output[pos] == sent.gold_labels[pos] ? 0.0 : 1.0);
  }
  return output;
}

// BIO label inventory: "O", "B-x", "I-x". I-x is only reachable after B-x or
// I-x of the same x.
struct BioInventory {
  std::vector<std::string> types;    // entity type of each label id ("" for O)
  std::vector<char> kind;            // 'O', 'B', or 'I' per label id
  std::vector<int> base_allowed;     // O and all B-x

  explicit BioInventory(const LabelDict& labels) {
    const int n = labels.size();
    types.resize(n);
    kind.resize(n);
    for (int id = 0; id < n; ++id) {
      const std::string& name = labels.names[id];
      if (name == "O") {
        kind[id] = 'O';
      } else if (name.size() > 2 && (name[0] == 'B' || name[0] == 'I') && name[1] == '-') {
        kind[id] = name[0];
        types[id] = name.substr(2);
      } else {
        throw ConfigError("label '" + name + "' is not BIO (want O, B-x or I-x)");
      }
      if (kind[id] != 'I') base_allowed.push_back(id);
    }
  }

  size_t size() const { return kind.size(); }
};

// Allowed label set given the previous prediction (-1 at sentence start).
inline std::vector<int> bio_valid_labels(int prev, const BioInventory& inv) {
  std::vector<int> allowed = inv.base_allowed;
  if (prev >= 0 && inv.kind[prev] != 'O') {
    for (size_t id = 0; id < inv.size(); ++id)
      if (inv.kind[id] == 'I' && inv.types[id] == inv.types[prev])
        allowed.push_back(static_cast<int>(id));
  }
  std::sort(allowed.begin(), allowed.end());
  return allowed;
}

}  // namespace l2s
