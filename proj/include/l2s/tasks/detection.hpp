#pragma once

#include <string>
#include <vector>

#include "l2s/conll.hpp"
#include "l2s/session.hpp"
#include "l2s/templates.hpp"

namespace l2s {

// Sequential detection: predict every element, keep the running maximum, and
// pay an asymmetric loss once at the end — false_negative_loss when the gold
// maximum was missed, 1 for overshooting, 0 on a hit. Labels must be
// positive integers; scoring happens on their values, not their dictionary
// ids. The loss only exists at termination, so it is not
// history-independent and path collapse does not apply.
struct DetectionTaskConfig {
  TemplateSpec templates;
  uint32_t bits = 18;
  const LabelDict* labels = nullptr;
  double false_negative_loss = 5.0;

  std::vector<int> label_values() const {
    std::vector<int> values(labels->size());
    for (int id = 0; id < labels->size(); ++id) {
      const std::string& name = labels->names[id];
      try {
        values[id] = std::stoi(name);
      } catch (const std::exception&) {
        values[id] = 0;
      }
      if (values[id] < 1)
        throw ConfigError("detection label '" + name + "' is not a positive integer");
    }
    return values;
  }
};

inline int run_detection(Session& session, const Sentence& sent, const DetectionTaskConfig& cfg,
                         std::vector<int>* output_sink = nullptr) {
  if (cfg.false_negative_loss <= 0) throw ConfigError("false negative loss must be positive");
  std::vector<int> values = cfg.label_values();

  int max_value = 1;
  for (int gold : sent.gold_labels) max_value = std::max(max_value, values.at(gold));

  int max_prediction = 1;
  for (size_t pos = 0; pos < sent.size(); ++pos) {
    PredictRequest req;
    req.features = apply_templates(sent, pos, cfg.templates, cfg.bits);
    req.ref = sent.gold_labels[pos];
    req.tag = static_cast<int>(pos) + 1;
    int action = session.predict(req);
    max_prediction = std::max(max_prediction, values.at(action));
  }

  if (max_value > max_prediction)
    session.declare_loss(cfg.false_negative_loss);
  else if (max_value < max_prediction)
    session.declare_loss(1.0);
  else
    session.declare_loss(0.0);

  if (output_sink) output_sink->push_back(max_prediction);
  return max_prediction;
}

}  // namespace l2s
