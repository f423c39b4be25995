#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qrpl/crypto/proof.hpp"
#include "qrpl/ledger/ledger.hpp"

namespace qrpl::net {

class StaleSwapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SwapProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SwapState { Init, LockedAtSource, ProofRelayed, UnlockedAtTarget, Refunded };

const char* to_string(SwapState s);

// Lock / prove / unlock transfer between shard ledgers. Value moves by
// burn-on-source, mint-on-target; while in flight it is excluded from both
// shards' spendable sets and accounted as in-flight by the caller.
struct CrossShardSwap {
  crypto::HashDigest swap_id;
  uint32_t source_shard{};
  uint32_t target_shard{};
  ledger::UtxoToken locked_token;  // burned source token, held as the receipt
  Bytes recipient_pk;
  SwapState state{SwapState::Init};
  int64_t deadline_us{};
  crypto::ProofArtifact lock_proof;

  bool terminal() const { return state == SwapState::UnlockedAtTarget || state == SwapState::Refunded; }
};

// Statement binding the lock receipt: (swap id, source, target, token, value).
crypto::Statement swap_statement(const CrossShardSwap& swap);

// Burns the token on the source shard and emits the lock proof.
CrossShardSwap swap_initiate(ledger::LedgerState& source, uint32_t source_shard,
                             uint32_t target_shard, const crypto::HashDigest& token_id,
                             BytesView recipient_pk, int64_t now_us, int64_t timeout_us, Rng& rng);

// Marks the lock proof as relayed toward the target shard.
void swap_mark_relayed(CrossShardSwap& swap);

// Verifies the relayed proof and mints the equivalent token on the target.
// Returns the minted token id. Throws StaleSwapError past the deadline and
// SwapProtocolViolation on a second terminal transition.
crypto::HashDigest swap_complete(CrossShardSwap& swap, ledger::LedgerState& target,
                                 const crypto::ProofArtifact& relayed_proof, int64_t now_us);

// Refunds on the source shard once the deadline has passed. No-op if the swap
// already completed (a timer may fire late); returns the refund token id when
// a refund was minted.
std::optional<crypto::HashDigest> swap_timeout(CrossShardSwap& swap, ledger::LedgerState& source,
                                               int64_t now_us);

}  // namespace qrpl::net
