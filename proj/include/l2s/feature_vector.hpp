#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "l2s/error.hpp"
#include "l2s/hashing.hpp"

namespace l2s {

struct FeatureEntry {
  uint64_t index;
  double value;
};

// Sparse hashed feature vector. Entries are appended namespace by namespace
// by the emitters; indices all live below 2^bits.
struct FeatureVector {
  uint32_t bits = 18;
  std::vector<FeatureEntry> entries;

  FeatureVector() = default;
  explicit FeatureVector(uint32_t b) : bits(b) {}

  void add(std::string_view ns, std::string_view name, double value = 1.0) {
    if (!std::isfinite(value)) throw NumericError("feature value not finite");
    entries.push_back({hash_feature(ns, name, bits), value});
  }

  void add_index(uint64_t index, double value = 1.0) {
    if (index >= (uint64_t{1} << bits)) throw ContractError("feature index out of range");
    entries.push_back({index, value});
  }

  size_t size() const { return entries.size(); }
};

}  // namespace l2s
