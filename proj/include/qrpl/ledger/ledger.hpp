#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrpl/bytes.hpp"
#include "qrpl/crypto/commitment.hpp"
#include "qrpl/crypto/proof.hpp"
#include "qrpl/crypto/scheme.hpp"
#include "qrpl/rng.hpp"

namespace qrpl::ledger {

using crypto::HashDigest;

class ImbalanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnknownInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nominal fee policy: 0.01% of the transferred amount, floor-rounded.
inline int64_t default_fee(int64_t amount) {
  if (amount < 0) throw std::domain_error("default_fee: negative amount");
  return amount / 10'000;
}

struct UtxoToken {
  HashDigest token_id;
  crypto::Commitment commitment;
  int64_t value{};
  Bytes owner_epk;
  uint64_t created_at{};

  bool operator==(const UtxoToken&) const = default;

  // token_id = hash of the canonical encoding of the remaining fields.
  Bytes encode_body() const;
  static UtxoToken make(int64_t value, BytesView blinding, BytesView owner_epk, uint64_t created_at);

  Bytes encode() const;
  static UtxoToken decode(Decoder& dec);
};

struct Transaction {
  std::vector<HashDigest> inputs;
  std::vector<UtxoToken> outputs;
  int64_t fee{};
  crypto::ProofArtifact zk_proof;
  crypto::Signature signature;
  Bytes sender_pk;           // verification key for `signature`
  std::string profile_name;  // signature scheme of sender_pk
  HashDigest tx_hash;        // hash(inputs || outputs || fee)

  static HashDigest compute_hash(std::span<const HashDigest> inputs,
                                 std::span<const UtxoToken> outputs, int64_t fee);

  Bytes encode() const;
  static Transaction decode(Decoder& dec);
};

// Digest-binding statement for a transaction's validity proof. The witness is
// the list of input spend secrets; the predicate (attached at construction
// time, where input data is in scope) checks ownership and conservation.
crypto::Statement tx_statement(const HashDigest& tx_hash);

enum class Verdict { Accept, DoubleSpend, UnknownInput, Imbalance, BadProof, BadSignature };

const char* to_string(Verdict v);

struct PruningConfig {
  // One year of blocks at 10 s block time.
  uint64_t challenge_period_blocks = 3'153'600;
};

struct LedgerState {
  std::map<HashDigest, UtxoToken> unspent;
  std::map<HashDigest, uint64_t> spent_log;  // token id -> spend height
  uint64_t height{0};
  int64_t total_supply{0};

  bool operator==(const LedgerState&) const = default;

  Bytes encode() const;
  static LedgerState decode(BytesView data);
  std::string to_json() const;  // human-readable dump, token ids hex-encoded
};

// Spending keys for tokens a party controls. The base keypair is the party's
// identity; ephemeral keypairs arrive with incoming payments.
struct Wallet {
  crypto::KeyPair keys;
  std::map<HashDigest, crypto::KeyPair> spend_keys;

  const crypto::KeyPair* spend_key(const HashDigest& token_id) const;
  void grant(const HashDigest& token_id, crypto::KeyPair key);
  void forget(const HashDigest& token_id);

  // Tokens in `state` this wallet can spend, in deterministic (id) order.
  std::vector<HashDigest> owned_tokens(const LedgerState& state) const;
  int64_t balance(const LedgerState& state) const;
  // Smallest prefix of owned tokens covering `amount`; nullopt if underfunded.
  std::optional<std::vector<HashDigest>> select_inputs(const LedgerState& state, int64_t amount) const;
};

struct PaymentOutput {
  Bytes recipient_pk;
  int64_t value{};
};

struct BuiltTransaction {
  Transaction tx;
  // Ephemeral keypair controlling outputs[i]; handed to each recipient
  // out-of-band with the payment.
  std::vector<crypto::KeyPair> output_keys;
};

BuiltTransaction create_transaction(const LedgerState& state, const Wallet& sender,
                                    std::span<const PaymentOutput> payments, int64_t fee, Rng& rng);

// Single-recipient form: every output value goes to recipient_pk, each under
// a fresh per-output nonce.
BuiltTransaction create_transaction(const LedgerState& state, const Wallet& sender,
                                    BytesView recipient_pk, std::span<const HashDigest> input_ids,
                                    std::span<const int64_t> output_values, int64_t fee, Rng& rng);

BuiltTransaction create_transaction(const LedgerState& state, const Wallet& sender,
                                    std::span<const PaymentOutput> payments,
                                    std::span<const HashDigest> input_ids, int64_t fee, Rng& rng);

Verdict validate_transaction(const LedgerState& state, const Transaction& tx);

// Pre: validate_transaction(state, tx) == Accept; throws ProtocolViolation
// otherwise. Fees burn here; consensus-layer crediting is separate.
void apply_transaction(LedgerState& state, const Transaction& tx);

void prune(LedgerState& state, const PruningConfig& config);

// Direct supply mutations used by issuance and cross-shard settlement.
const UtxoToken& mint_token(LedgerState& state, int64_t value, BytesView owner_epk,
                            BytesView blinding);
int64_t burn_token(LedgerState& state, const HashDigest& token_id);

}  // namespace qrpl::ledger
