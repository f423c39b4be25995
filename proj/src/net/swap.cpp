#include "qrpl/net/swap.hpp"

namespace qrpl::net {

const char* to_string(SwapState s) {
  switch (s) {
    case SwapState::Init: return "Init";
    case SwapState::LockedAtSource: return "LockedAtSource";
    case SwapState::ProofRelayed: return "ProofRelayed";
    case SwapState::UnlockedAtTarget: return "UnlockedAtTarget";
    case SwapState::Refunded: return "Refunded";
  }
  return "?";
}

namespace {
Bytes swap_public_input(const CrossShardSwap& swap) {
  Encoder enc;
  enc.raw32(swap.swap_id.view())
      .u64(swap.source_shard)
      .u64(swap.target_shard)
      .raw32(swap.locked_token.token_id.view())
      .i64(swap.locked_token.value)
      .bytes(as_view(swap.recipient_pk));
  return enc.take();
}
}  // namespace

crypto::Statement swap_statement(const CrossShardSwap& swap) {
  crypto::Statement st;
  st.name = "qrpl.swap.lock";
  st.public_input = swap_public_input(swap);
  st.predicate = [](const crypto::Witness&) { return true; };  // lock receipt attests by binding
  return st;
}

CrossShardSwap swap_initiate(ledger::LedgerState& source, uint32_t source_shard,
                             uint32_t target_shard, const crypto::HashDigest& token_id,
                             BytesView recipient_pk, int64_t now_us, int64_t timeout_us, Rng& rng) {
  auto it = source.unspent.find(token_id);
  if (it == source.unspent.end()) {
    throw ledger::UnknownInputError("swap of unknown or spent token: " + token_id.hex());
  }
  CrossShardSwap swap;
  swap.source_shard = source_shard;
  swap.target_shard = target_shard;
  swap.locked_token = it->second;
  swap.recipient_pk = Bytes(recipient_pk.begin(), recipient_pk.end());
  Encoder idenc;
  idenc.str("qrpl.swap")
      .u64(source_shard)
      .u64(target_shard)
      .raw32(token_id.view())
      .bytes(recipient_pk)
      .u64(rng.next_u64());
  swap.swap_id = crypto::hash(idenc.view());
  swap.deadline_us = now_us + timeout_us;

  ledger::burn_token(source, token_id);  // locked: excluded from spendable set
  swap.state = SwapState::LockedAtSource;
  swap.lock_proof = crypto::prove(swap_statement(swap), {}, rng);
  return swap;
}

void swap_mark_relayed(CrossShardSwap& swap) {
  if (swap.state != SwapState::LockedAtSource) {
    throw SwapProtocolViolation("relay from state " + std::string(to_string(swap.state)));
  }
  swap.state = SwapState::ProofRelayed;
}

crypto::HashDigest swap_complete(CrossShardSwap& swap, ledger::LedgerState& target,
                                 const crypto::ProofArtifact& relayed_proof, int64_t now_us) {
  if (swap.terminal()) {
    throw SwapProtocolViolation("swap already terminal: " + std::string(to_string(swap.state)));
  }
  if (swap.state == SwapState::Init) throw SwapProtocolViolation("swap not locked");
  if (now_us > swap.deadline_us) {
    throw StaleSwapError("swap past deadline: " + swap.swap_id.hex());
  }
  if (!crypto::verify_proof(swap_statement(swap), relayed_proof)) {
    throw SwapProtocolViolation("relayed lock proof does not verify");
  }
  // Mint the equivalent token for the recipient; blinding is derived from the
  // swap id so completion is deterministic.
  Bytes blinding = crypto::expand("qrpl.swap.blind", swap.swap_id.view(), 32);
  const ledger::UtxoToken& minted =
      ledger::mint_token(target, swap.locked_token.value, as_view(swap.recipient_pk), blinding);
  swap.state = SwapState::UnlockedAtTarget;
  return minted.token_id;
}

std::optional<crypto::HashDigest> swap_timeout(CrossShardSwap& swap, ledger::LedgerState& source,
                                               int64_t now_us) {
  if (swap.state == SwapState::UnlockedAtTarget || swap.state == SwapState::Refunded) {
    return std::nullopt;
  }
  if (now_us <= swap.deadline_us) return std::nullopt;
  Bytes blinding = crypto::expand("qrpl.swap.refund", swap.swap_id.view(), 32);
  const ledger::UtxoToken& refund = ledger::mint_token(
      source, swap.locked_token.value, as_view(swap.locked_token.owner_epk), blinding);
  swap.state = SwapState::Refunded;
  return refund.token_id;
}

}  // namespace qrpl::net
