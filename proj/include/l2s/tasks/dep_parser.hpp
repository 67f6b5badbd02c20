#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "l2s/error.hpp"
#include "l2s/feature_vector.hpp"
#include "l2s/session.hpp"

namespace l2s {

// Arc-hybrid transitions. Shift moves the buffer front onto the stack;
// LeftArc attaches the stack top to the buffer front; RightArc attaches the
// stack top to the item below it. Ids are ordered so that the oracle's
// Shift < RightArc < LeftArc tie-break is the smallest-id rule.
enum DepAction : int { kShift = 0, kRightArc = 1, kLeftArc = 2 };
constexpr int kNumDepActions = 3;

// Tokens are 1..n; 0 is the synthetic Root at the bottom of the stack. The
// buffer is always the contiguous suffix [buf_front, n].
struct ParserState {
  std::vector<int> stack;
  int buf_front = 1;
  int n = 0;
  std::vector<int> heads;  // -1 = unassigned; heads[0] unused

  explicit ParserState(int num_words) : n(num_words), heads(num_words + 1, -1) {
    stack.push_back(0);
  }

  bool buffer_empty() const { return buf_front > n; }
  bool terminal() const { return buffer_empty() && stack.size() == 1; }
};

inline std::vector<int> dep_valid_actions(const ParserState& s) {
  std::vector<int> valid;
  if (!s.buffer_empty()) valid.push_back(kShift);
  if (s.stack.size() >= 2) valid.push_back(kRightArc);
  if (!s.buffer_empty() && s.stack.back() != 0) valid.push_back(kLeftArc);
  return valid;
}

inline ParserState dep_trans(const ParserState& s, int action) {
  auto valid = dep_valid_actions(s);
  if (std::find(valid.begin(), valid.end(), action) == valid.end())
    throw ContractError("transition " + std::to_string(action) + " invalid in this state");
  ParserState next = s;
  switch (action) {
    case kShift:
      next.stack.push_back(next.buf_front++);
      break;
    case kLeftArc:
      next.heads[next.stack.back()] = next.buf_front;
      next.stack.pop_back();
      break;
    case kRightArc:
      next.heads[next.stack.back()] = next.stack[next.stack.size() - 2];
      next.stack.pop_back();
      break;
    default:
      throw ContractError("unknown transition " + std::to_string(action));
  }
  return next;
}

// Memo for the oracle's completion search, keyed on (stack, buffer front):
// the attachment loss still reachable from a state depends on nothing else.
using DepOracleMemo = std::unordered_map<std::string, int>;

namespace detail {

inline std::string dep_memo_key(const ParserState& s) {
  std::string key;
  key.reserve(3 * s.stack.size() + 4);
  for (int w : s.stack) {
    key += std::to_string(w);
    key += ',';
  }
  key += '|';
  key += std::to_string(s.buf_front);
  return key;
}

// Head mismatch charged by this action right now (arc actions only).
inline int dep_arc_cost(const ParserState& s, int action, const std::vector<int>& gold_heads) {
  if (action == kLeftArc) return gold_heads[s.stack.back()] == s.buf_front ? 0 : 1;
  if (action == kRightArc)
    return gold_heads[s.stack.back()] == s.stack[s.stack.size() - 2] ? 0 : 1;
  return 0;
}

inline int dep_min_future_loss(const ParserState& s, const std::vector<int>& gold_heads,
                               DepOracleMemo& memo) {
  if (s.terminal()) return 0;
  std::string key = dep_memo_key(s);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  int best = s.n + 1;
  for (int action : dep_valid_actions(s)) {
    int cost = dep_arc_cost(s, action, gold_heads) +
               dep_min_future_loss(dep_trans(s, action), gold_heads, memo);
    best = std::min(best, cost);
  }
  memo.emplace(std::move(key), best);
  return best;
}

}  // namespace detail

// Dynamic oracle by exhaustive completion search: the returned action reaches
// an end state of minimal attachment loss from here; ties break toward the
// smallest action id (Shift, then RightArc, then LeftArc).
inline int dep_gold_action(const ParserState& s, const std::vector<int>& gold_heads,
                           DepOracleMemo& memo) {
  if (s.terminal()) throw ContractError("dep_gold_action on a terminal state");
  int best_action = -1;
  int best_cost = s.n + 1;
  for (int action : dep_valid_actions(s)) {
    int cost = detail::dep_arc_cost(s, action, gold_heads) +
               detail::dep_min_future_loss(dep_trans(s, action), gold_heads, memo);
    if (cost < best_cost) {
      best_cost = cost;
      best_action = action;
    }
  }
  return best_action;
}

struct DepSentence {
  std::vector<std::string> words;            // 1-based alongside heads
  std::vector<int> gold_heads;               // gold_heads[0] unused; 0 = Root
};

// word HEAD per line, blank line between sentences; heads are 1-based token
// indices with 0 for the root.
inline std::vector<DepSentence> read_dep_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus: " + path);
  std::vector<DepSentence> sentences;
  DepSentence cur;
  cur.words.push_back("<root>");
  cur.gold_heads.push_back(-1);
  std::string line;
  size_t line_no = 0;
  auto flush = [&]() {
    if (cur.words.size() > 1) {
      for (size_t w = 1; w < cur.gold_heads.size(); ++w)
        if (cur.gold_heads[w] < 0 || cur.gold_heads[w] >= static_cast<int>(cur.words.size()))
          throw DataError(path + ": head index out of range in sentence ending at line " +
                          std::to_string(line_no));
      sentences.push_back(std::move(cur));
    }
    cur = DepSentence{};
    cur.words.push_back("<root>");
    cur.gold_heads.push_back(-1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string word;
    int head;
    if (!(ss >> word)) {
      flush();
      continue;
    }
    if (!(ss >> head))
      throw DataError(path + ":" + std::to_string(line_no) + ": want WORD HEAD");
    cur.words.push_back(word);
    cur.gold_heads.push_back(head);
  }
  flush();
  return sentences;
}

// A tree is projective when every arc (h,d) spans no token whose own head
// falls outside the span.
inline bool is_projective(const std::vector<int>& gold_heads) {
  const int n = static_cast<int>(gold_heads.size()) - 1;
  for (int d = 1; d <= n; ++d) {
    int h = gold_heads[d];
    int lo = std::min(h, d), hi = std::max(h, d);
    for (int k = lo + 1; k < hi; ++k)
      if (gold_heads[k] < lo || gold_heads[k] > hi) return false;
  }
  return true;
}

struct DepTaskConfig {
  uint32_t bits = 18;
};

namespace detail {

inline const std::string& dep_word(const DepSentence& sent, int idx) {
  static const std::string kNone = "<none>";
  if (idx < 0 || idx >= static_cast<int>(sent.words.size())) return kNone;
  return sent.words[idx];
}

inline FeatureVector dep_features(const DepSentence& sent, const ParserState& s,
                                  const DepTaskConfig& cfg) {
  FeatureVector fv(cfg.bits);
  int s0 = s.stack.size() >= 1 ? s.stack[s.stack.size() - 1] : -1;
  int s1 = s.stack.size() >= 2 ? s.stack[s.stack.size() - 2] : -1;
  int b0 = s.buffer_empty() ? -1 : s.buf_front;
  int b1 = s.buf_front + 1 <= s.n ? s.buf_front + 1 : -1;
  const std::string& ws0 = dep_word(sent, s0);
  const std::string& wb0 = dep_word(sent, b0);
  fv.add("s", "s0=" + ws0);
  fv.add("s", "s1=" + dep_word(sent, s1));
  fv.add("n", "b0=" + wb0);
  fv.add("n", "b1=" + dep_word(sent, b1));
  fv.add("g", "s0b0=" + ws0 + "|" + wb0);
  fv.add("a", "s0s2=" + ws0.substr(ws0.size() - std::min<size_t>(2, ws0.size())));
  fv.add("a", "b0s2=" + wb0.substr(wb0.size() - std::min<size_t>(2, wb0.size())));
  fv.add("b", "bias");
  return fv;
}

}  // namespace detail

// Shift-reduce parsing as a task program. Each step predicts among the valid
// transitions with the dynamic oracle as reference; every prediction can
// reshape the rest of the parse, so each step conditions on all earlier
// tags. The attachment loss is declared at termination.
inline std::vector<int> run_dep_parser(Session& session, const DepSentence& sent,
                                       const DepTaskConfig& cfg = {}) {
  const int n = static_cast<int>(sent.words.size()) - 1;
  if (n < 1) throw ContractError("run_dep_parser: empty sentence");
  ParserState state(n);
  DepOracleMemo oracle_memo;
  int step = 0;
  std::vector<int> condition_tags;
  while (!state.terminal()) {
    ++step;
    PredictRequest req;
    req.features = detail::dep_features(sent, state, cfg);
    req.ref = dep_gold_action(state, sent.gold_heads, oracle_memo);
    req.tag = step;
    req.condition_tags = condition_tags;
    req.allowed = dep_valid_actions(state);
    int action = session.predict(req);
    state = dep_trans(state, action);
    condition_tags.push_back(step);
  }
  int wrong = 0;
  for (int w = 1; w <= n; ++w)
    if (state.heads[w] != sent.gold_heads[w]) ++wrong;
  session.declare_loss(static_cast<double>(wrong));
  return state.heads;
}

}  // namespace l2s
