#pragma once

#include <string>
#include <vector>

#include "l2s/conll.hpp"
#include "l2s/error.hpp"
#include "l2s/feature_vector.hpp"

namespace l2s {

struct NeighborFeature {
  int offset;       // token offset relative to the current position
  std::string ns;   // feature namespace, e.g. "w"
  size_t column;    // source column in the token
};

struct AffixSpec {
  int length;      // 1..7
  bool suffix;     // false = prefix
  std::string ns;  // source namespace (column tag)
  size_t column;
};

struct TemplateSpec {
  std::vector<NeighborFeature> neighbors;
  std::vector<AffixSpec> affixes;
};

namespace detail {
inline size_t column_for_ns(const std::string& ns) {
  if (ns == "w") return 0;
  if (ns == "p") return 1;
  throw ConfigError("unknown template namespace '" + ns + "' (expected w or p)");
}
}  // namespace detail

// "-1:w,1:w" -> neighbor features at the given offsets. Offsets must be
// distinct per namespace.
inline void parse_neighbor_spec(const std::string& spec, TemplateSpec& out) {
  if (spec.empty()) return;
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("bad neighbor feature '" + item + "' (want OFFSET:NS)");
    int offset = 0;
    try {
      offset = std::stoi(item.substr(0, colon));
    } catch (const std::exception&) {
      throw ConfigError("bad neighbor offset in '" + item + "'");
    }
    std::string ns = item.substr(colon + 1);
    for (const auto& nb : out.neighbors)
      if (nb.offset == offset && nb.ns == ns)
        throw ConfigError("duplicate neighbor feature '" + item + "'");
    out.neighbors.push_back({offset, ns, detail::column_for_ns(ns)});
  }
}

// "-2w,+2w": '-' takes a suffix, '+' a prefix, digit is the length.
inline void parse_affix_spec(const std::string& spec, TemplateSpec& out) {
  if (spec.empty()) return;
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.size() < 3 || (item[0] != '-' && item[0] != '+'))
      throw ConfigError("bad affix '" + item + "' (want +LENns or -LENns)");
    bool suffix = item[0] == '-';
    size_t pos = 1;
    int length = 0;
    while (pos < item.size() && isdigit(static_cast<unsigned char>(item[pos])))
      length = length * 10 + (item[pos++] - '0');
    if (length < 1 || length > 7) throw ConfigError("affix length must be 1..7 in '" + item + "'");
    std::string ns = item.substr(pos);
    out.affixes.push_back({length, suffix, ns, detail::column_for_ns(ns)});
  }
}

// Expands the templates at one position. Emits one feature per neighbor
// entry (out-of-range offsets yield the <s>/</s> sentinels), the configured
// affixes of the current token, and a constant bias feature. Never looks at
// predictions; prediction-conditioned features are the tasks' business.
inline FeatureVector apply_templates(const Sentence& sent, size_t pos, const TemplateSpec& spec,
                                     uint32_t bits) {
  if (pos >= sent.size()) throw ContractError("apply_templates: position out of range");
  FeatureVector fv(bits);
  for (const auto& nb : spec.neighbors) {
    long j = static_cast<long>(pos) + nb.offset;
    std::string_view value;
    if (j < 0)
      value = "<s>";
    else if (j >= static_cast<long>(sent.size()))
      value = "</s>";
    else
      value = sent.tokens[j].columns.at(nb.column);
    fv.add(nb.ns, std::to_string(nb.offset) + "=" + std::string(value));
  }
  for (const auto& af : spec.affixes) {
    const std::string& word = sent.tokens[pos].columns.at(af.column);
    size_t n = std::min<size_t>(af.length, word.size());
    std::string slice = af.suffix ? word.substr(word.size() - n) : word.substr(0, n);
    std::string ns = std::string("a") + (af.suffix ? "-" : "+") + std::to_string(af.length) + af.ns;
    fv.add(ns, slice);
  }
  fv.add("b", "bias");
  return fv;
}

}  // namespace l2s
