#pragma once

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "l2s/conll.hpp"
#include "l2s/cs_learner.hpp"
#include "l2s/error.hpp"

namespace l2s {

// Binary model file, little-endian throughout:
//   magic "L2S1", version u8, bits u32, num_actions u32, eta f64,
//   label table (u32 count, then u32 length + bytes each),
//   u64 entry count, entries (action u32, index u64, weight f64, grad_sq f64).
// Only slots with nonzero weight or nonzero grad_sq are written.

constexpr char kModelMagic[4] = {'L', '2', 'S', '1'};
constexpr uint8_t kModelVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  uint64_t bits = 0;
  static_assert(sizeof(T) <= 8);
  std::memcpy(&bits, &v, sizeof(T));
  for (size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
    throw ModelError("model file truncated");
  uint64_t bits = 0;
  for (size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<uint64_t>(buf[i]) << (8 * i);
  T v;
  std::memcpy(&v, &bits, sizeof(T));
  return v;
}

}  // namespace detail

inline void save_model(const LinearCSModel& m, const LabelDict& labels, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write model file: " + path);
  out.write(kModelMagic, 4);
  detail::put_le<uint8_t>(out, kModelVersion);
  detail::put_le<uint32_t>(out, m.bits);
  detail::put_le<uint32_t>(out, static_cast<uint32_t>(m.num_actions));
  detail::put_le<double>(out, m.eta);
  detail::put_le<uint32_t>(out, static_cast<uint32_t>(labels.names.size()));
  for (const auto& name : labels.names) {
    detail::put_le<uint32_t>(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  uint64_t count = 0;
  uint64_t per_action = uint64_t{1} << m.bits;
  for (int a = 0; a < m.num_actions; ++a)
    for (uint64_t i = 0; i < per_action; ++i) {
      size_t s = m.slot(a, i);
      if (m.weights[s] != 0.0 || m.grad_sq[s] != 0.0) ++count;
    }
  detail::put_le<uint64_t>(out, count);
  for (int a = 0; a < m.num_actions; ++a)
    for (uint64_t i = 0; i < per_action; ++i) {
      size_t s = m.slot(a, i);
      if (m.weights[s] == 0.0 && m.grad_sq[s] == 0.0) continue;
      detail::put_le<uint32_t>(out, static_cast<uint32_t>(a));
      detail::put_le<uint64_t>(out, i);
      detail::put_le<double>(out, m.weights[s]);
      detail::put_le<double>(out, m.grad_sq[s]);
    }
  if (!out) throw ModelError("error while writing model file: " + path);
}

struct LoadedModel {
  LinearCSModel model;
  LabelDict labels;
};

inline LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0)
    throw ModelError("not a model file (bad magic): " + path);
  uint8_t version = detail::get_le<uint8_t>(in);
  if (version != kModelVersion)
    throw ModelError("unsupported model version " + std::to_string(version) + " (expected " +
                     std::to_string(kModelVersion) + ")");
  uint32_t bits = detail::get_le<uint32_t>(in);
  uint32_t num_actions = detail::get_le<uint32_t>(in);
  double eta = detail::get_le<double>(in);
  if (bits < kMinBits || bits > kMaxBits || num_actions == 0)
    throw ModelError("model header out of range: bits=" + std::to_string(bits) +
                     " actions=" + std::to_string(num_actions));

  LoadedModel lm{LinearCSModel(bits, static_cast<int>(num_actions), eta), LabelDict{}};
  uint32_t nlabels = detail::get_le<uint32_t>(in);
  for (uint32_t i = 0; i < nlabels; ++i) {
    uint32_t len = detail::get_le<uint32_t>(in);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw ModelError("model file truncated");
    lm.labels.intern(name);
  }
  uint64_t count = detail::get_le<uint64_t>(in);
  for (uint64_t n = 0; n < count; ++n) {
    uint32_t action = detail::get_le<uint32_t>(in);
    uint64_t index = detail::get_le<uint64_t>(in);
    double w = detail::get_le<double>(in);
    double g = detail::get_le<double>(in);
    if (action >= num_actions || index >= (uint64_t{1} << bits))
      throw ModelError("model entry out of range");
    size_t s = lm.model.slot(static_cast<int>(action), index);
    lm.model.weights[s] = w;
    lm.model.grad_sq[s] = g;
  }
  return lm;
}

}  // namespace l2s
