#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "qrpl/bytes.hpp"

namespace qrpl::crypto {

struct HashDigest {
  std::array<uint8_t, 32> bytes{};

  auto operator<=>(const HashDigest&) const = default;

  std::string hex() const { return to_hex(view()); }
  BytesView view() const { return BytesView(bytes.data(), bytes.size()); }

  static HashDigest from_hex(std::string_view hex);

  // First 8 bytes, big-endian.
  uint64_t lead64() const {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | bytes[i];
    return v;
  }

  // Uniform fraction in [0, 1).
  double as_fraction() const { return static_cast<double>(lead64() >> 11) * 0x1.0p-53; }

  bool is_zero() const {
    for (uint8_t b : bytes)
      if (b != 0) return false;
    return true;
  }
};

struct HashDigestHasher {
  size_t operator()(const HashDigest& d) const {
    size_t v;
    std::memcpy(&v, d.bytes.data(), sizeof(v));
    return v;
  }
};

// SHA3-256 of the raw input.
HashDigest hash(BytesView data);
inline HashDigest hash(const Bytes& data) { return hash(BytesView(data)); }

// Domain-separated hash: canonical encoding of (label, part0, part1, ...).
HashDigest hash_parts(std::string_view label, std::initializer_list<BytesView> parts);

// Counter-mode expansion of a seed to an arbitrary-length pseudorandom string.
// expand(seed, n) is not a prefix of expand(seed, m) for n != m; the output
// length is bound into every block.
Bytes expand(std::string_view label, BytesView seed, size_t out_len);

}  // namespace qrpl::crypto
