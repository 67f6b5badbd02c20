#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "l2s/error.hpp"

namespace l2s {

struct Token {
  std::vector<std::string> columns;  // word [pos ...] label
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<int> gold_labels;

  size_t size() const { return tokens.size(); }
};

// Label strings -> contiguous ids, assigned in first-appearance order.
struct LabelDict {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;

  int intern(const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(names.size());
    names.push_back(name);
    ids.emplace(name, id);
    return id;
  }

  // -1 when unknown
  int lookup(const std::string& name) const {
    auto it = ids.find(name);
    return it == ids.end() ? -1 : it->second;
  }

  int size() const { return static_cast<int>(names.size()); }
};

namespace detail {
inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(std::move(tok));
  return out;
}
}  // namespace detail

// One token per line, whitespace-separated columns, blank line between
// sentences. label_column may be negative to count from the end (-1 = last).
// The label dictionary is extended in place so a test corpus shares ids with
// the training corpus.
inline std::vector<Sentence> read_conll(const std::string& path, int label_column,
                                        LabelDict& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus: " + path);

  std::vector<Sentence> sentences;
  Sentence cur;
  std::string line;
  size_t line_no = 0;
  int ncols = -1;

  auto flush = [&]() {
    if (!cur.tokens.empty()) {
      sentences.push_back(std::move(cur));
      cur = Sentence{};
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto cols = detail::split_ws(line);
    if (cols.empty()) {
      flush();
      continue;
    }
    if (ncols < 0) ncols = static_cast<int>(cols.size());
    if (static_cast<int>(cols.size()) != ncols)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(ncols) + " columns, got " + std::to_string(cols.size()));
    int lc = label_column < 0 ? ncols + label_column : label_column;
    if (lc < 0 || lc >= ncols)
      throw DataError(path + ":" + std::to_string(line_no) + ": label column " +
                      std::to_string(label_column) + " out of range");
    cur.gold_labels.push_back(labels.intern(cols[lc]));
    cur.tokens.push_back(Token{std::move(cols)});
  }
  flush();
  return sentences;
}

inline void write_conll(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (size_t s = 0; s < sentences.size(); ++s) {
    if (s) out << '\n';  // blank line separates sentences, no trailing separator
    for (const auto& tok : sentences[s].tokens) {
      for (size_t c = 0; c < tok.columns.size(); ++c) {
        if (c) out << ' ';
        out << tok.columns[c];
      }
      out << '\n';
    }
  }
}

inline void write_conll(const std::string& path, const std::vector<Sentence>& sentences) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus: " + path);
  write_conll(out, sentences);
}

}  // namespace l2s
