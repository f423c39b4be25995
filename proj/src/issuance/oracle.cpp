#include "qrpl/issuance/oracle.hpp"

#include <set>
#include <sstream>

namespace qrpl::issuance {

void OracleConfig::validate() const {
  if (signer_pks.empty()) throw std::domain_error("oracle needs at least one signer");
  if (threshold < 1 || threshold > signer_pks.size()) {
    throw std::domain_error("oracle threshold out of range");
  }
  if (profile == nullptr) throw std::domain_error("oracle profile missing");
}

Oracle::Oracle(OracleConfig config) : config_(std::move(config)) { config_.validate(); }

Bytes Oracle::mint_statement(int64_t fiat_amount, BytesView recipient_pk) const {
  Encoder enc;
  enc.str("qrpl.oracle.mint").i64(fiat_amount).bytes(recipient_pk).u64(next_event_id_);
  return enc.take();
}

Bytes Oracle::redeem_statement(std::span<const crypto::HashDigest> token_ids) const {
  Encoder enc;
  enc.str("qrpl.oracle.redeem").u64(token_ids.size());
  for (const crypto::HashDigest& id : token_ids) enc.raw32(id.view());
  enc.u64(next_event_id_);
  return enc.take();
}

uint32_t Oracle::count_valid_approvals(BytesView statement,
                                       std::span<const Approval> approvals) const {
  // Duplicate signers count once.
  std::set<Bytes> counted;
  for (const Approval& a : approvals) {
    bool configured = false;
    for (const Bytes& pk : config_.signer_pks) {
      if (pk == a.signer_pk) {
        configured = true;
        break;
      }
    }
    if (!configured) continue;
    if (!crypto::verify(statement, as_view(a.signature), as_view(a.signer_pk), *config_.profile)) {
      continue;
    }
    counted.insert(a.signer_pk);
  }
  return static_cast<uint32_t>(counted.size());
}

Bytes OracleEvent::encode_body() const {
  Encoder enc;
  enc.u64(event_id);
  enc.u64(kind == OracleEventKind::Mint ? 0 : 1);
  enc.i64(fiat_amount);
  enc.i64(tokens_delta);
  enc.u64(approvals);
  enc.u64(height);
  return enc.take();
}

const OracleEvent& Oracle::append_event(OracleEventKind kind, int64_t fiat_amount,
                                        int64_t tokens_delta, uint32_t approvals, uint64_t height) {
  OracleEvent ev;
  ev.event_id = next_event_id_++;
  ev.kind = kind;
  ev.fiat_amount = fiat_amount;
  ev.tokens_delta = tokens_delta;
  ev.approvals = approvals;
  ev.height = height;
  Encoder chain;
  chain.raw32(chain_tip_.view()).bytes(as_view(ev.encode_body()));
  ev.chain_digest = crypto::hash(chain.view());
  chain_tip_ = ev.chain_digest;
  audit_.push_back(std::move(ev));
  return audit_.back();
}

const ledger::UtxoToken& Oracle::mint(ledger::LedgerState& state, int64_t fiat_amount,
                                      std::span<const Approval> approvals, BytesView recipient_pk,
                                      Rng& rng) {
  if (fiat_amount <= 0) throw std::domain_error("mint amount must be positive");
  Bytes statement = mint_statement(fiat_amount, recipient_pk);
  uint32_t valid = count_valid_approvals(statement, approvals);
  if (valid < config_.threshold) {
    throw ThresholdError("mint approvals " + std::to_string(valid) + " below threshold " +
                         std::to_string(config_.threshold));
  }
  // 1:1 parity: tokens minted equal the verified fiat deposit exactly.
  const ledger::UtxoToken& token =
      ledger::mint_token(state, fiat_amount, recipient_pk, as_view(rng.bytes(32)));
  append_event(OracleEventKind::Mint, fiat_amount, fiat_amount, valid, state.height);
  return token;
}

const OracleEvent& Oracle::redeem(ledger::LedgerState& state,
                                  std::span<const crypto::HashDigest> token_ids,
                                  std::span<const Approval> approvals) {
  if (token_ids.empty()) throw std::domain_error("redeem needs at least one token");
  Bytes statement = redeem_statement(token_ids);
  uint32_t valid = count_valid_approvals(statement, approvals);
  if (valid < config_.threshold) {
    throw ThresholdError("redeem approvals " + std::to_string(valid) + " below threshold " +
                         std::to_string(config_.threshold));
  }
  for (const crypto::HashDigest& id : token_ids) {
    if (state.spent_log.contains(id)) throw DoubleSpendError("redeem of spent token: " + id.hex());
    if (!state.unspent.contains(id)) {
      throw ledger::UnknownInputError("redeem of unknown token: " + id.hex());
    }
  }
  int64_t burned = 0;
  for (const crypto::HashDigest& id : token_ids) burned += ledger::burn_token(state, id);
  return append_event(OracleEventKind::Redeem, burned, -burned, valid, state.height);
}

bool Oracle::verify_chain() const {
  crypto::HashDigest tip{};
  for (const OracleEvent& ev : audit_) {
    Encoder chain;
    chain.raw32(tip.view()).bytes(as_view(ev.encode_body()));
    if (crypto::hash(chain.view()) != ev.chain_digest) return false;
    tip = ev.chain_digest;
  }
  return true;
}

std::string Oracle::export_audit_jsonl() const {
  std::ostringstream os;
  for (const OracleEvent& ev : audit_) {
    os << "{\"event_id\":" << ev.event_id << ",\"kind\":\""
       << (ev.kind == OracleEventKind::Mint ? "mint" : "redeem")
       << "\",\"fiat_amount\":" << ev.fiat_amount << ",\"tokens_delta\":" << ev.tokens_delta
       << ",\"approvals\":" << ev.approvals << ",\"height\":" << ev.height << ",\"chain_digest\":\""
       << ev.chain_digest.hex() << "\"}\n";
  }
  return os.str();
}

}  // namespace qrpl::issuance
