#include <catch2/catch.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "l2s/tasks/dep_parser.hpp"
#include "l2s/trainer.hpp"

using namespace l2s;

namespace {

std::string fixture(const char* name) {
  return std::string(L2S_DATA_DIR) + "/" + name;
}

DepSentence make_sentence(const std::vector<int>& heads) {
  DepSentence s;
  s.words.push_back("<root>");
  s.gold_heads.push_back(-1);
  for (size_t i = 0; i < heads.size(); ++i) {
    s.words.push_back("w" + std::to_string(i + 1));
    s.gold_heads.push_back(heads[i]);
  }
  return s;
}

// Brute force over complete transition sequences, memoized on the full state
// (stack, buffer front, heads assigned so far). Written independently of the
// oracle's loss decomposition.
int brute_min_loss(const ParserState& s, const std::vector<int>& gold,
                   std::map<std::string, int>* memo) {
  if (s.terminal()) {
    int wrong = 0;
    for (int w = 1; w <= s.n; ++w) wrong += s.heads[w] != gold[w];
    return wrong;
  }
  std::string key;
  for (int w : s.stack) key += std::to_string(w) + ".";
  key += "/" + std::to_string(s.buf_front) + "/";
  for (int w = 1; w <= s.n; ++w) key += std::to_string(s.heads[w]) + ",";
  if (auto it = memo->find(key); it != memo->end()) return it->second;
  int best = s.n + 1;
  for (int action : dep_valid_actions(s))
    best = std::min(best, brute_min_loss(dep_trans(s, action), gold, memo));
  (*memo)[key] = best;
  return best;
}

// All head assignments over n words that form a projective tree.
std::vector<std::vector<int>> all_projective_trees(int n) {
  std::vector<std::vector<int>> trees;
  std::vector<int> heads(n + 1, -1);
  std::function<void(int)> rec = [&](int w) {
    if (w > n) {
      // exactly one root child chain, no cycles: walk each token to 0
      for (int start = 1; start <= n; ++start) {
        int cur = start;
        for (int hops = 0; hops <= n; ++hops) {
          cur = heads[cur];
          if (cur == 0) break;
          if (hops == n) return;  // cycle
        }
        if (cur != 0) return;
      }
      if (is_projective(heads)) trees.push_back(heads);
      return;
    }
    for (int h = 0; h <= n; ++h) {
      if (h == w) continue;
      heads[w] = h;
      rec(w + 1);
    }
    heads[w] = -1;
  };
  rec(1);
  return trees;
}

}  // namespace

TEST_CASE("valid actions follow the arc-hybrid preconditions") {
  ParserState s(1);
  REQUIRE(dep_valid_actions(s) == std::vector<int>{kShift});  // ([Root],[w1])

  ParserState two(2);
  ParserState shifted = dep_trans(two, kShift);  // ([Root,a],[b])
  auto valid = dep_valid_actions(shifted);
  REQUIRE(valid == std::vector<int>{kShift, kRightArc, kLeftArc});

  ParserState done(1);
  done = dep_trans(done, kShift);
  done = dep_trans(done, kRightArc);
  REQUIRE(done.terminal());
  REQUIRE(dep_valid_actions(done).empty());
}

TEST_CASE("transitions move and attach as defined") {
  ParserState s(2);

  ParserState after_shift = dep_trans(s, kShift);
  REQUIRE(after_shift.stack == std::vector<int>{0, 1});
  REQUIRE(after_shift.buf_front == 2);

  // LeftArc on ([Root,a],[b]): head(a) = b
  ParserState after_left = dep_trans(after_shift, kLeftArc);
  REQUIRE(after_left.heads[1] == 2);
  REQUIRE(after_left.stack == std::vector<int>{0});

  // RightArc on ([Root,b],[]) : head(b) = Root
  ParserState rb = dep_trans(after_left, kShift);
  ParserState after_right = dep_trans(rb, kRightArc);
  REQUIRE(after_right.heads[2] == 0);
  REQUIRE(after_right.terminal());
}

TEST_CASE("invalid transitions are contract errors") {
  ParserState s(1);
  REQUIRE_THROWS_AS(dep_trans(s, kRightArc), ContractError);
  REQUIRE_THROWS_AS(dep_trans(s, kLeftArc), ContractError);
}

TEST_CASE("a one-word sentence forces Shift then RightArc") {
  DepSentence sent = make_sentence({0});
  std::vector<int> actions;
  PolicyFn spy = [&](const PredictRequest& req, int) {
    actions.push_back(req.ref);
    return req.ref;
  };
  std::vector<int> heads;
  double loss = test_decode([&](Session& s) { heads = run_dep_parser(s, sent); }, spy,
                            kNumDepActions);
  REQUIRE(actions == std::vector<int>{kShift, kRightArc});
  REQUIRE(heads[1] == 0);
  REQUIRE(loss == 0.0);
}

TEST_CASE("head(a)=b, head(b)=Root parses as Shift LeftArc Shift RightArc") {
  DepSentence sent = make_sentence({2, 0});
  std::vector<int> actions;
  PolicyFn oracle = [&](const PredictRequest& req, int) {
    actions.push_back(req.ref);
    return req.ref;
  };
  std::vector<int> heads;
  double loss = test_decode([&](Session& s) { heads = run_dep_parser(s, sent); }, oracle,
                            kNumDepActions);
  REQUIRE(actions == std::vector<int>{kShift, kLeftArc, kShift, kRightArc});
  REQUIRE(heads[1] == 2);
  REQUIRE(heads[2] == 0);
  REQUIRE(loss == 0.0);
}

TEST_CASE("any policy terminates with loss at most n") {
  DepSentence sent = make_sentence({2, 0, 2});
  for (int fixed = 0; fixed < kNumDepActions; ++fixed) {
    PolicyFn stubborn = [fixed](const PredictRequest& req, int) {
      const auto& allowed = *req.allowed;
      if (std::count(allowed.begin(), allowed.end(), fixed)) return fixed;
      return allowed[0];
    };
    double loss =
        test_decode([&](Session& s) { run_dep_parser(s, sent); }, stubborn, kNumDepActions);
    REQUIRE(loss >= 0.0);
    REQUIRE(loss <= 3.0);
  }
}

TEST_CASE("gold action attains the brute-force minimum on small trees") {
  for (int n = 1; n <= 4; ++n) {
    for (const auto& heads : all_projective_trees(n)) {
      std::vector<int> tail(heads.begin() + 1, heads.end());
      DepSentence sent = make_sentence(tail);

      // walk every reachable configuration
      std::vector<ParserState> frontier{ParserState(n)};
      std::map<std::string, int> brute_memo;
      DepOracleMemo oracle_memo;
      while (!frontier.empty()) {
        ParserState state = frontier.back();
        frontier.pop_back();
        if (state.terminal()) continue;
        int choice = dep_gold_action(state, sent.gold_heads, oracle_memo);
        int best = brute_min_loss(state, sent.gold_heads, &brute_memo);
        REQUIRE(brute_min_loss(dep_trans(state, choice), sent.gold_heads, &brute_memo) == best);
        for (int action : dep_valid_actions(state)) frontier.push_back(dep_trans(state, action));
      }
    }
  }
}

TEST_CASE("following the oracle from the start reaches loss zero") {
  for (int n = 1; n <= 4; ++n) {
    for (const auto& heads : all_projective_trees(n)) {
      std::vector<int> tail(heads.begin() + 1, heads.end());
      DepSentence sent = make_sentence(tail);
      DepOracleMemo memo;
      ParserState state(n);
      while (!state.terminal())
        state = dep_trans(state, dep_gold_action(state, sent.gold_heads, memo));
      for (int w = 1; w <= n; ++w) REQUIRE(state.heads[w] == sent.gold_heads[w]);
    }
  }
}

TEST_CASE("oracle ties break Shift before RightArc before LeftArc") {
  // initial state of the two-word example: Shift costs 0 and wins
  DepSentence sent = make_sentence({2, 0});
  DepOracleMemo memo;
  ParserState state(2);
  REQUIRE(dep_gold_action(state, sent.gold_heads, memo) == kShift);
}

TEST_CASE("toy treebank loads projective and parses to gold under the oracle") {
  auto sentences = read_dep_corpus(fixture("toy_treebank.conll"));
  REQUIRE(sentences.size() == 10);
  for (const auto& sent : sentences) {
    REQUIRE(is_projective(sent.gold_heads));
    std::vector<int> heads;
    double loss = test_decode([&](Session& s) { heads = run_dep_parser(s, sent); },
                              [](const PredictRequest& req, int) { return req.ref; },
                              kNumDepActions);
    REQUIRE(loss == 0.0);
  }
}

TEST_CASE("non-projective trees are detected") {
  // arcs 1<-3 and 2<-4 cross
  std::vector<int> heads{-1, 3, 4, 0, 3};
  REQUIRE_FALSE(is_projective(heads));
  REQUIRE(is_projective({-1, 2, 0, 2}));
}
