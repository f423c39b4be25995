#include "qrpl/ledger/ledger.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace qrpl::ledger {

namespace {
HashDigest digest_from(const Bytes& raw) {
  HashDigest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}
}  // namespace

Bytes UtxoToken::encode_body() const {
  Encoder enc;
  enc.raw32(commitment.digest.view()).i64(value).bytes(as_view(owner_epk)).u64(created_at);
  return enc.take();
}

UtxoToken UtxoToken::make(int64_t value, BytesView blinding, BytesView owner_epk, uint64_t created_at) {
  if (value < 0) throw std::domain_error("token value must be non-negative");
  UtxoToken t;
  t.commitment = crypto::commit(value, blinding);
  t.value = value;
  t.owner_epk = Bytes(owner_epk.begin(), owner_epk.end());
  t.created_at = created_at;
  t.token_id = crypto::hash(t.encode_body());
  return t;
}

Bytes UtxoToken::encode() const {
  Encoder enc;
  enc.raw32(token_id.view()).raw32(commitment.digest.view()).i64(value).bytes(as_view(owner_epk)).u64(created_at);
  return enc.take();
}

UtxoToken UtxoToken::decode(Decoder& dec) {
  UtxoToken t;
  t.token_id = digest_from(dec.raw32());
  t.commitment.digest = digest_from(dec.raw32());
  t.value = dec.i64();
  t.owner_epk = dec.bytes();
  t.created_at = dec.u64();
  if (t.value < 0) throw DecodeError("token value negative");
  if (t.token_id != crypto::hash(t.encode_body())) throw DecodeError("token id mismatch");
  return t;
}

HashDigest Transaction::compute_hash(std::span<const HashDigest> inputs,
                                     std::span<const UtxoToken> outputs, int64_t fee) {
  Encoder enc;
  enc.str("qrpl.tx");
  enc.u64(inputs.size());
  for (const HashDigest& id : inputs) enc.raw32(id.view());
  enc.u64(outputs.size());
  for (const UtxoToken& out : outputs) enc.bytes(as_view(out.encode_body()));
  enc.i64(fee);
  return crypto::hash(enc.view());
}

Bytes Transaction::encode() const {
  Encoder enc;
  enc.u64(inputs.size());
  for (const HashDigest& id : inputs) enc.raw32(id.view());
  enc.u64(outputs.size());
  for (const UtxoToken& out : outputs) enc.bytes(as_view(out.encode()));
  enc.i64(fee);
  enc.bytes(as_view(zk_proof.encode()));
  enc.bytes(as_view(signature));
  enc.bytes(as_view(sender_pk));
  enc.str(profile_name);
  enc.raw32(tx_hash.view());
  return enc.take();
}

Transaction Transaction::decode(Decoder& dec) {
  Transaction tx;
  uint64_t n_in = dec.u64();
  for (uint64_t i = 0; i < n_in; ++i) tx.inputs.push_back(digest_from(dec.raw32()));
  uint64_t n_out = dec.u64();
  for (uint64_t i = 0; i < n_out; ++i) {
    Bytes raw = dec.bytes();
    Decoder inner(raw);
    tx.outputs.push_back(UtxoToken::decode(inner));
    inner.expect_done();
  }
  tx.fee = dec.i64();
  {
    Bytes raw = dec.bytes();
    Decoder inner(raw);
    tx.zk_proof = crypto::ProofArtifact::decode(inner);
    inner.expect_done();
  }
  tx.signature = dec.bytes();
  tx.sender_pk = dec.bytes();
  tx.profile_name = dec.str();
  tx.tx_hash = digest_from(dec.raw32());
  return tx;
}

crypto::Statement tx_statement(const HashDigest& tx_hash) {
  crypto::Statement st;
  st.name = "qrpl.tx.valid";
  st.public_input = Bytes(tx_hash.bytes.begin(), tx_hash.bytes.end());
  return st;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "Accept";
    case Verdict::DoubleSpend: return "DoubleSpend";
    case Verdict::UnknownInput: return "UnknownInput";
    case Verdict::Imbalance: return "Imbalance";
    case Verdict::BadProof: return "BadProof";
    case Verdict::BadSignature: return "BadSignature";
  }
  return "?";
}

const crypto::KeyPair* Wallet::spend_key(const HashDigest& token_id) const {
  auto it = spend_keys.find(token_id);
  return it == spend_keys.end() ? nullptr : &it->second;
}

void Wallet::grant(const HashDigest& token_id, crypto::KeyPair key) {
  spend_keys[token_id] = std::move(key);
}

void Wallet::forget(const HashDigest& token_id) { spend_keys.erase(token_id); }

std::vector<HashDigest> Wallet::owned_tokens(const LedgerState& state) const {
  std::vector<HashDigest> out;
  for (const auto& [id, kp] : spend_keys) {
    auto it = state.unspent.find(id);
    if (it != state.unspent.end() && it->second.owner_epk == kp.public_key) out.push_back(id);
  }
  return out;
}

int64_t Wallet::balance(const LedgerState& state) const {
  int64_t total = 0;
  for (const HashDigest& id : owned_tokens(state)) total += state.unspent.at(id).value;
  return total;
}

std::optional<std::vector<HashDigest>> Wallet::select_inputs(const LedgerState& state,
                                                             int64_t amount) const {
  std::vector<HashDigest> picked;
  int64_t covered = 0;
  for (const HashDigest& id : owned_tokens(state)) {
    picked.push_back(id);
    covered += state.unspent.at(id).value;
    if (covered >= amount) return picked;
  }
  return std::nullopt;
}

namespace {

// Predicate data captured at construction: per-input (owner key, value).
struct InputFact {
  Bytes owner_epk;
  int64_t value;
};

crypto::Statement full_tx_statement(const HashDigest& tx_hash, std::vector<InputFact> facts,
                                    int64_t out_sum, int64_t fee) {
  crypto::Statement st = tx_statement(tx_hash);
  st.predicate = [facts = std::move(facts), out_sum, fee](const crypto::Witness& witness) {
    Decoder dec(witness);
    try {
      uint64_t n = dec.u64();
      if (n != facts.size()) return false;
      int64_t in_sum = 0;
      for (uint64_t i = 0; i < n; ++i) {
        Bytes secret = dec.bytes();
        if (crypto::public_key_for_secret(secret, facts[i].owner_epk.size()) != facts[i].owner_epk) {
          return false;
        }
        in_sum += facts[i].value;
      }
      dec.expect_done();
      return in_sum == out_sum + fee;
    } catch (const DecodeError&) {
      return false;
    }
  };
  return st;
}

}  // namespace

BuiltTransaction create_transaction(const LedgerState& state, const Wallet& sender,
                                    std::span<const PaymentOutput> payments,
                                    std::span<const HashDigest> input_ids, int64_t fee, Rng& rng) {
  if (fee < 0) throw std::domain_error("fee must be non-negative");
  if (input_ids.empty()) throw UnknownInputError("transaction needs at least one input");
  if (payments.empty()) throw std::domain_error("transaction needs at least one output");

  int64_t in_sum = 0;
  std::vector<InputFact> facts;
  crypto::Witness witness;
  Encoder wit;
  wit.u64(input_ids.size());
  std::set<HashDigest> seen;
  for (const HashDigest& id : input_ids) {
    if (!seen.insert(id).second) throw UnknownInputError("duplicate input token");
    auto it = state.unspent.find(id);
    if (it == state.unspent.end()) {
      throw UnknownInputError("input token unknown or already spent: " + id.hex());
    }
    const crypto::KeyPair* key = sender.spend_key(id);
    if (key == nullptr || key->public_key != it->second.owner_epk) {
      throw UnknownInputError("input token not owned by sender: " + id.hex());
    }
    wit.bytes(as_view(key->secret_key));
    facts.push_back({it->second.owner_epk, it->second.value});
    in_sum += it->second.value;
  }
  witness = wit.take();

  int64_t out_sum = 0;
  for (const PaymentOutput& p : payments) {
    if (p.value < 0) throw std::domain_error("output value must be non-negative");
    out_sum += p.value;
  }
  if (in_sum != out_sum + fee) {
    throw ImbalanceError("Value imbalance in transaction: inputs " + std::to_string(in_sum) +
                         " != outputs " + std::to_string(out_sum) + " + fee " + std::to_string(fee));
  }

  BuiltTransaction built;
  Transaction& tx = built.tx;
  tx.inputs.assign(input_ids.begin(), input_ids.end());
  uint64_t created_at = state.height + 1;
  for (const PaymentOutput& p : payments) {
    uint64_t nonce = rng.next_u64();
    crypto::KeyPair epk =
        crypto::derive_ephemeral(as_view(sender.keys.secret_key), as_view(p.recipient_pk), nonce);
    Bytes blinding = rng.bytes(32);
    tx.outputs.push_back(UtxoToken::make(p.value, blinding, as_view(epk.public_key), created_at));
    built.output_keys.push_back(std::move(epk));
  }
  tx.fee = fee;
  tx.tx_hash = Transaction::compute_hash(tx.inputs, tx.outputs, tx.fee);

  crypto::Statement st = full_tx_statement(tx.tx_hash, std::move(facts), out_sum, fee);
  tx.zk_proof = crypto::prove(st, witness, rng);
  tx.signature = crypto::sign(tx.tx_hash.view(), sender.keys);
  tx.sender_pk = sender.keys.public_key;
  tx.profile_name = sender.keys.profile->name;
  return built;
}

BuiltTransaction create_transaction(const LedgerState& state, const Wallet& sender,
                                    std::span<const PaymentOutput> payments, int64_t fee, Rng& rng) {
  int64_t out_sum = 0;
  for (const PaymentOutput& p : payments) out_sum += p.value;
  auto inputs = sender.select_inputs(state, out_sum + fee);
  if (!inputs) throw UnknownInputError("insufficient funds for payment");
  // Exact-cover requirement: add change to self when the selection overshoots.
  int64_t covered = 0;
  for (const HashDigest& id : *inputs) covered += state.unspent.at(id).value;
  std::vector<PaymentOutput> outs(payments.begin(), payments.end());
  if (covered > out_sum + fee) {
    outs.push_back({sender.keys.public_key, covered - out_sum - fee});
  }
  return create_transaction(state, sender, outs, *inputs, fee, rng);
}

BuiltTransaction create_transaction(const LedgerState& state, const Wallet& sender,
                                    BytesView recipient_pk, std::span<const HashDigest> input_ids,
                                    std::span<const int64_t> output_values, int64_t fee, Rng& rng) {
  std::vector<PaymentOutput> payments;
  payments.reserve(output_values.size());
  for (int64_t v : output_values) {
    payments.push_back({Bytes(recipient_pk.begin(), recipient_pk.end()), v});
  }
  return create_transaction(state, sender, payments, input_ids, fee, rng);
}

Verdict validate_transaction(const LedgerState& state, const Transaction& tx) {
  // Input presence first: spent beats unknown so replays surface as
  // DoubleSpend while never-seen ids surface as UnknownInput.
  if (tx.inputs.empty()) return Verdict::UnknownInput;
  std::set<HashDigest> seen;
  int64_t in_sum = 0;
  for (const HashDigest& id : tx.inputs) {
    if (!seen.insert(id).second) return Verdict::DoubleSpend;
    if (state.spent_log.contains(id)) return Verdict::DoubleSpend;
    auto it = state.unspent.find(id);
    if (it == state.unspent.end()) return Verdict::UnknownInput;
    in_sum += it->second.value;
  }

  // Conservation.
  if (tx.outputs.empty() || tx.fee < 0) return Verdict::Imbalance;
  int64_t out_sum = 0;
  for (const UtxoToken& out : tx.outputs) {
    if (out.value < 0) return Verdict::Imbalance;
    out_sum += out.value;
  }
  if (in_sum != out_sum + tx.fee) return Verdict::Imbalance;

  // Proof: structural token integrity, recomputed hash binding, artifact.
  HashDigest expected_hash = Transaction::compute_hash(tx.inputs, tx.outputs, tx.fee);
  if (tx.tx_hash != expected_hash) return Verdict::BadProof;
  for (const UtxoToken& out : tx.outputs) {
    if (out.token_id != crypto::hash(out.encode_body())) return Verdict::BadProof;
  }
  if (!crypto::verify_proof(tx_statement(expected_hash), tx.zk_proof)) return Verdict::BadProof;

  // Signature over the transaction hash.
  const crypto::SchemeProfile* profile = crypto::find_profile(tx.profile_name);
  if (profile == nullptr) return Verdict::BadSignature;
  if (!crypto::verify(expected_hash.view(), as_view(tx.signature), as_view(tx.sender_pk), *profile)) {
    return Verdict::BadSignature;
  }
  return Verdict::Accept;
}

void apply_transaction(LedgerState& state, const Transaction& tx) {
  Verdict v = validate_transaction(state, tx);
  if (v != Verdict::Accept) {
    throw ProtocolViolation(std::string("apply_transaction on non-Accept tx: ") + to_string(v));
  }
  for (const HashDigest& id : tx.inputs) {
    state.unspent.erase(id);
    state.spent_log[id] = state.height;
  }
  for (const UtxoToken& out : tx.outputs) state.unspent[out.token_id] = out;
  state.total_supply -= tx.fee;
}

void prune(LedgerState& state, const PruningConfig& config) {
  if (config.challenge_period_blocks == 0) throw std::domain_error("challenge period must be positive");
  for (auto it = state.spent_log.begin(); it != state.spent_log.end();) {
    if (state.height > it->second && state.height - it->second > config.challenge_period_blocks) {
      it = state.spent_log.erase(it);
    } else {
      ++it;
    }
  }
}

const UtxoToken& mint_token(LedgerState& state, int64_t value, BytesView owner_epk,
                            BytesView blinding) {
  if (value <= 0) throw std::domain_error("minted value must be positive");
  UtxoToken t = UtxoToken::make(value, blinding, owner_epk, state.height);
  auto [it, inserted] = state.unspent.emplace(t.token_id, std::move(t));
  if (!inserted) throw ProtocolViolation("token id collision on mint");
  state.total_supply += value;
  return it->second;
}

int64_t burn_token(LedgerState& state, const HashDigest& token_id) {
  auto it = state.unspent.find(token_id);
  if (it == state.unspent.end()) throw UnknownInputError("burn of unknown token: " + token_id.hex());
  int64_t value = it->second.value;
  state.unspent.erase(it);
  state.spent_log[token_id] = state.height;
  state.total_supply -= value;
  return value;
}

Bytes LedgerState::encode() const {
  Encoder enc;
  enc.str("qrpl.ledger.v1");
  enc.u64(height);
  enc.i64(total_supply);
  enc.u64(unspent.size());
  for (const auto& [id, token] : unspent) enc.bytes(as_view(token.encode()));
  enc.u64(spent_log.size());
  for (const auto& [id, h] : spent_log) {
    enc.raw32(id.view());
    enc.u64(h);
  }
  return enc.take();
}

LedgerState LedgerState::decode(BytesView data) {
  Decoder dec(data);
  if (dec.str() != "qrpl.ledger.v1") throw DecodeError("bad ledger snapshot magic");
  LedgerState state;
  state.height = dec.u64();
  state.total_supply = dec.i64();
  uint64_t n_unspent = dec.u64();
  for (uint64_t i = 0; i < n_unspent; ++i) {
    Bytes raw = dec.bytes();
    Decoder inner(raw);
    UtxoToken t = UtxoToken::decode(inner);
    inner.expect_done();
    state.unspent.emplace(t.token_id, std::move(t));
  }
  uint64_t n_spent = dec.u64();
  for (uint64_t i = 0; i < n_spent; ++i) {
    HashDigest id = digest_from(dec.raw32());
    state.spent_log[id] = dec.u64();
  }
  dec.expect_done();
  return state;
}

std::string LedgerState::to_json() const {
  std::ostringstream os;
  os << "{\"height\":" << height << ",\"total_supply\":" << total_supply << ",\"unspent\":[";
  bool first = true;
  for (const auto& [id, t] : unspent) {
    if (!first) os << ",";
    first = false;
    os << "{\"token_id\":\"" << id.hex() << "\",\"value\":" << t.value << ",\"owner_epk\":\""
       << to_hex(as_view(t.owner_epk)) << "\",\"created_at\":" << t.created_at
       << ",\"commitment\":\"" << t.commitment.digest.hex() << "\"}";
  }
  os << "],\"spent\":[";
  first = true;
  for (const auto& [id, h] : spent_log) {
    if (!first) os << ",";
    first = false;
    os << "{\"token_id\":\"" << id.hex() << "\",\"spent_at\":" << h << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace qrpl::ledger
