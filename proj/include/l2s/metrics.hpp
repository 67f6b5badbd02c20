#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "l2s/error.hpp"

namespace l2s {

struct Span {
  int start;  // inclusive token indices
  int end;
  std::string type;

  bool operator==(const Span& o) const {
    return start == o.start && end == o.end && type == o.type;
  }
  bool operator<(const Span& o) const {
    return std::tie(start, end, type) < std::tie(o.start, o.end, o.type);
  }
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long tp = 0, fp = 0, fn = 0;
};

namespace detail {
inline PRF prf_from_counts(long tp, long fp, long fn) {
  PRF r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0
                                       : 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}
}  // namespace detail

inline double hamming_accuracy(const std::vector<int>& pred, const std::vector<int>& gold) {
  if (pred.size() != gold.size())
    throw ContractError("hamming_accuracy: length mismatch " + std::to_string(pred.size()) +
                        " vs " + std::to_string(gold.size()));
  if (pred.empty()) return 1.0;
  long match = 0;
  for (size_t i = 0; i < pred.size(); ++i) match += pred[i] == gold[i];
  return static_cast<double>(match) / pred.size();
}

// Rewrites any I-x that does not continue a B-x/I-x run of the same type into
// B-x. Incoherent tag sequences then segment cleanly.
inline std::vector<std::string> fix_malpositioned_bio(const std::vector<std::string>& labels) {
  std::vector<std::string> fixed = labels;
  for (size_t i = 0; i < fixed.size(); ++i) {
    if (fixed[i].size() < 3 || fixed[i][0] != 'I' || fixed[i][1] != '-') continue;
    std::string type = fixed[i].substr(2);
    bool continues = i > 0 && fixed[i - 1].size() > 2 &&
                     (fixed[i - 1][0] == 'B' || fixed[i - 1][0] == 'I') &&
                     fixed[i - 1].substr(2) == type;
    if (!continues) fixed[i][0] = 'B';
  }
  return fixed;
}

// Maximal B-x (I-x)* runs after the malpositioned-tag fix.
inline std::vector<Span> extract_spans_bio(const std::vector<std::string>& labels) {
  std::vector<std::string> fixed = fix_malpositioned_bio(labels);
  std::vector<Span> spans;
  for (size_t i = 0; i < fixed.size(); ++i) {
    if (fixed[i].size() < 3 || fixed[i][0] != 'B') continue;
    std::string type = fixed[i].substr(2);
    size_t j = i;
    while (j + 1 < fixed.size() && fixed[j + 1] == "I-" + type) ++j;
    spans.push_back({static_cast<int>(i), static_cast<int>(j), type});
  }
  return spans;
}

enum class Averaging { Macro, Micro };

// Span F1 over parallel corpora. A predicted span counts as a true positive
// only when the identical (start, end, type) span is gold. Macro averages
// per-type F1 (types absent on both sides are skipped); micro pools counts.
inline PRF span_f1(const std::vector<std::vector<std::string>>& pred,
                   const std::vector<std::vector<std::string>>& gold, Averaging avg) {
  if (pred.size() != gold.size()) throw ContractError("span_f1: corpus size mismatch");
  std::map<std::string, std::array<long, 3>> by_type;  // tp, fp, fn
  for (size_t s = 0; s < pred.size(); ++s) {
    std::set<Span> gold_spans;
    for (const auto& sp : extract_spans_bio(gold[s])) gold_spans.insert(sp);
    std::set<Span> pred_spans;
    for (const auto& sp : extract_spans_bio(pred[s])) pred_spans.insert(sp);
    for (const auto& sp : pred_spans) {
      if (gold_spans.count(sp))
        ++by_type[sp.type][0];
      else
        ++by_type[sp.type][1];
    }
    for (const auto& sp : gold_spans)
      if (!pred_spans.count(sp)) ++by_type[sp.type][2];
  }
  if (avg == Averaging::Micro) {
    long tp = 0, fp = 0, fn = 0;
    for (const auto& [type, c] : by_type) {
      tp += c[0];
      fp += c[1];
      fn += c[2];
    }
    return detail::prf_from_counts(tp, fp, fn);
  }
  double sum_f1 = 0.0;
  long ntypes = 0;
  PRF out;
  for (const auto& [type, c] : by_type) {
    PRF t = detail::prf_from_counts(c[0], c[1], c[2]);
    sum_f1 += t.f1;
    ++ntypes;
    out.tp += c[0];
    out.fp += c[1];
    out.fn += c[2];
  }
  out.f1 = ntypes == 0 ? 0.0 : sum_f1 / ntypes;
  PRF pooled = detail::prf_from_counts(out.tp, out.fp, out.fn);
  out.precision = pooled.precision;
  out.recall = pooled.recall;
  return out;
}

struct RelationInstance {
  int arg1, arg2;
  int type;

  bool operator<(const RelationInstance& o) const {
    return std::tie(arg1, arg2, type) < std::tie(o.arg1, o.arg2, o.type);
  }
};

// Pooled F1 over relations, excluding "none" on both sides. A relation
// matches only on (arg1, arg2, type).
inline PRF micro_f1_relations(const std::vector<std::vector<RelationInstance>>& pred,
                              const std::vector<std::vector<RelationInstance>>& gold,
                              int none_id) {
  if (pred.size() != gold.size()) throw ContractError("micro_f1_relations: size mismatch");
  long tp = 0, fp = 0, fn = 0;
  for (size_t s = 0; s < pred.size(); ++s) {
    std::set<RelationInstance> g;
    for (const auto& r : gold[s])
      if (r.type != none_id) g.insert(r);
    std::set<RelationInstance> p;
    for (const auto& r : pred[s])
      if (r.type != none_id) p.insert(r);
    for (const auto& r : p)
      g.count(r) ? ++tp : ++fp;
    for (const auto& r : g)
      if (!p.count(r)) ++fn;
  }
  return detail::prf_from_counts(tp, fp, fn);
}

// Pooled F1 of entity type assignments (every entity carries exactly one
// type, so a mistake is one fp plus one fn).
inline PRF micro_f1_entities(const std::vector<std::vector<int>>& pred,
                             const std::vector<std::vector<int>>& gold) {
  if (pred.size() != gold.size()) throw ContractError("micro_f1_entities: size mismatch");
  long tp = 0, fp = 0, fn = 0;
  for (size_t s = 0; s < pred.size(); ++s) {
    if (pred[s].size() != gold[s].size())
      throw ContractError("micro_f1_entities: entity count mismatch");
    for (size_t e = 0; e < pred[s].size(); ++e) {
      if (pred[s][e] == gold[s][e]) {
        ++tp;
      } else {
        ++fp;
        ++fn;
      }
    }
  }
  return detail::prf_from_counts(tp, fp, fn);
}

// Unlabeled attachment score; heads[0] is the unused root slot.
inline double uas(const std::vector<int>& pred_heads, const std::vector<int>& gold_heads) {
  if (pred_heads.size() != gold_heads.size()) throw ContractError("uas: length mismatch");
  if (pred_heads.size() <= 1) return 1.0;
  long match = 0;
  for (size_t w = 1; w < pred_heads.size(); ++w) match += pred_heads[w] == gold_heads[w];
  return static_cast<double>(match) / (pred_heads.size() - 1);
}

}  // namespace l2s
