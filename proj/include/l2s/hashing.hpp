#pragma once

#include <cstdint>
#include <string_view>

#include "l2s/error.hpp"

namespace l2s {

constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

inline uint64_t fnv1a64(std::string_view data, uint64_t h = kFnvOffsetBasis) {
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

constexpr uint32_t kMinBits = 8;
constexpr uint32_t kMaxBits = 31;

// Feature index: FNV-1a over namespace ++ 0x1F ++ name, masked to the low
// `bits` bits. The 0x1F separator keeps ("ab","c") and ("a","bc") apart.
inline uint64_t hash_feature(std::string_view ns, std::string_view name, uint32_t bits) {
  if (bits < kMinBits || bits > kMaxBits)
    throw ConfigError("hash_feature: bits must be in [8,31], got " + std::to_string(bits));
  uint64_t h = fnv1a64(ns);
  h ^= 0x1Fu;
  h *= kFnvPrime;
  h = fnv1a64(name, h);
  return h & ((uint64_t{1} << bits) - 1);
}

// splitmix64 finalizer; used for tied randomness and the synthetic generator.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double unit_double(uint64_t x) {
  return static_cast<double>(x >> 11) * (1.0 / 9007199254740992.0);  // 2^-53
}

}  // namespace l2s
