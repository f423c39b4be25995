#include "qrpl/net/assignment.hpp"

#include <algorithm>

#include "qrpl/rng.hpp"

namespace qrpl::net {

ShardAssignment assign_validators(std::span<const uint64_t> validator_ids,
                                  const crypto::HashDigest& beacon_value, uint64_t epoch,
                                  uint32_t shard_count) {
  if (shard_count == 0) throw ConfigError("shard_count must be positive");
  if (validator_ids.size() < shard_count) {
    throw ConfigError("fewer validators (" + std::to_string(validator_ids.size()) +
                      ") than shards (" + std::to_string(shard_count) + ")");
  }

  std::vector<uint64_t> ids(validator_ids.begin(), validator_ids.end());
  std::sort(ids.begin(), ids.end());

  Encoder enc;
  enc.str("qrpl.assignment").raw32(beacon_value.view()).u64(epoch);
  Rng rng(crypto::hash(enc.view()).lead64());
  // Fisher-Yates with the beacon-derived stream.
  for (size_t i = ids.size() - 1; i > 0; --i) {
    size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i)));
    std::swap(ids[i], ids[j]);
  }

  ShardAssignment out;
  out.epoch = epoch;
  out.by_shard.resize(shard_count);
  size_t n = ids.size();
  size_t base = n / shard_count;
  size_t extra = n % shard_count;  // first `extra` shards take one more
  size_t pos = 0;
  for (uint32_t s = 0; s < shard_count; ++s) {
    size_t take = base + (s < extra ? 1 : 0);
    for (size_t k = 0; k < take; ++k) {
      out.by_shard[s].push_back(ids[pos]);
      out.mapping[ids[pos]] = s;
      ++pos;
    }
  }
  return out;
}

ShardAssignment assign_validators(std::span<const consensus::Validator> validators,
                                  const crypto::HashDigest& beacon_value, uint64_t epoch,
                                  uint32_t shard_count) {
  std::vector<uint64_t> ids;
  ids.reserve(validators.size());
  for (const consensus::Validator& v : validators) ids.push_back(v.id);
  return assign_validators(std::span<const uint64_t>(ids), beacon_value, epoch, shard_count);
}

}  // namespace qrpl::net
