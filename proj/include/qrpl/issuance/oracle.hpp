#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qrpl/crypto/scheme.hpp"
#include "qrpl/ledger/ledger.hpp"
#include "qrpl/rng.hpp"

namespace qrpl::issuance {

class ThresholdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DoubleSpendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  std::vector<Bytes> signer_pks;
  uint32_t threshold{};
  const crypto::SchemeProfile* profile{&crypto::dilithium2()};
  // Parity is fixed at 1:1 by construction; no configuration exists for it.

  void validate() const;
};

struct Approval {
  Bytes signer_pk;
  crypto::Signature signature;
};

enum class OracleEventKind { Mint, Redeem };

struct OracleEvent {
  uint64_t event_id{};
  OracleEventKind kind{};
  int64_t fiat_amount{};
  int64_t tokens_delta{};  // +minted / -burned; |tokens_delta| == fiat_amount
  uint32_t approvals{};
  uint64_t height{};
  crypto::HashDigest chain_digest;  // hash(previous digest || event body)

  Bytes encode_body() const;
};

// Central-bank mint/redeem oracle with an append-only, hash-chained audit
// trail. Interest accrual is structurally impossible: no operation grows a
// balance.
class Oracle {
 public:
  explicit Oracle(OracleConfig config);

  // Statements the configured signers must sign for the next event.
  Bytes mint_statement(int64_t fiat_amount, BytesView recipient_pk) const;
  Bytes redeem_statement(std::span<const crypto::HashDigest> token_ids) const;

  const ledger::UtxoToken& mint(ledger::LedgerState& state, int64_t fiat_amount,
                                std::span<const Approval> approvals, BytesView recipient_pk,
                                Rng& rng);

  const OracleEvent& redeem(ledger::LedgerState& state,
                            std::span<const crypto::HashDigest> token_ids,
                            std::span<const Approval> approvals);

  const std::vector<OracleEvent>& audit_trail() const { return audit_; }
  const OracleEvent& last_event() const { return audit_.back(); }

  // Replays the chain digests; false if any event was mutated.
  bool verify_chain() const;
  std::string export_audit_jsonl() const;

  const OracleConfig& config() const { return config_; }

 private:
  uint32_t count_valid_approvals(BytesView statement, std::span<const Approval> approvals) const;
  const OracleEvent& append_event(OracleEventKind kind, int64_t fiat_amount, int64_t tokens_delta,
                                  uint32_t approvals, uint64_t height);

  OracleConfig config_;
  std::vector<OracleEvent> audit_;
  crypto::HashDigest chain_tip_{};
  uint64_t next_event_id_{0};
};

}  // namespace qrpl::issuance
