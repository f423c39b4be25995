#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qrpl/consensus/consensus.hpp"
#include "qrpl/crypto/hash.hpp"

namespace qrpl::net {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ShardAssignment {
  uint64_t epoch{};
  std::map<uint64_t, uint32_t> mapping;           // validator id -> shard
  std::vector<std::vector<uint64_t>> by_shard;    // shard -> validator ids

  uint32_t shard_of(uint64_t validator_id) const { return mapping.at(validator_id); }
};

// Beacon-seeded uniform shuffle split into near-equal groups (sizes differ by
// at most one). Deterministic in (beacon value, epoch, validator ids).
ShardAssignment assign_validators(std::span<const uint64_t> validator_ids,
                                  const crypto::HashDigest& beacon_value, uint64_t epoch,
                                  uint32_t shard_count);

ShardAssignment assign_validators(std::span<const consensus::Validator> validators,
                                  const crypto::HashDigest& beacon_value, uint64_t epoch,
                                  uint32_t shard_count);

}  // namespace qrpl::net
