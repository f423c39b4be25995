#pragma once

#include <cstdint>

#include "qrpl/crypto/hash.hpp"

namespace qrpl::net {

// Deterministic local randomness chain standing in for an external beacon
// service. Every consumer at a given round sees the same value, and the whole
// chain is reproducible from (seed, round).
struct BeaconChain {
  uint64_t round{0};
  crypto::HashDigest value;

  static BeaconChain genesis(uint64_t seed);
  BeaconChain next() const;  // value' = hash(value || round)
  static crypto::HashDigest value_at(uint64_t seed, uint64_t round);
};

}  // namespace qrpl::net
