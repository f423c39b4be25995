#include "qrpl/offline/offline.hpp"

#include <algorithm>

namespace qrpl::offline {

TierTable TierTable::standard(int64_t unit_scale, uint32_t levels) {
  if (unit_scale <= 0) throw std::domain_error("unit_scale must be positive");
  if (levels == 0) throw std::domain_error("tier table needs at least one level");
  TierTable t;
  int64_t limit = 300 * unit_scale;
  for (uint32_t l = 0; l < levels; ++l) {
    t.tiers.push_back({l, limit});
    limit *= 10;
  }
  t.validate();
  return t;
}

const KycTier& TierTable::at(uint32_t level) const {
  if (level >= tiers.size()) throw std::out_of_range("unknown KYC tier level");
  return tiers[level];
}

void TierTable::validate() const {
  if (tiers.empty()) throw std::domain_error("empty tier table");
  for (size_t i = 0; i < tiers.size(); ++i) {
    if (tiers[i].level != i) throw std::domain_error("tier levels must be contiguous from 0");
    if (tiers[i].per_tx_limit <= 0) throw std::domain_error("tier limit must be positive");
    if (i > 0 && tiers[i].per_tx_limit < tiers[i - 1].per_tx_limit) {
      throw std::domain_error("tier limits must be non-decreasing");
    }
  }
}

Bytes OfflineVoucher::encode_body() const {
  Encoder enc;
  enc.bytes(as_view(tx.encode())).i64(amount).u64(tier.level).i64(tier.per_tx_limit).i64(created_at);
  return enc.take();
}

OfflineVoucher OfflineVoucher::from_parts(ledger::Transaction tx, int64_t amount, KycTier tier,
                                          int64_t created_at) {
  OfflineVoucher v;
  v.tx = std::move(tx);
  v.amount = amount;
  v.tier = tier;
  v.created_at = created_at;
  v.voucher_id = crypto::hash(v.encode_body());
  return v;
}

DeviceState DeviceState::create(uint64_t id, crypto::KeyPair keys) {
  DeviceState d;
  d.device_id = id;
  d.wallet.keys = std::move(keys);
  return d;
}

int64_t DeviceState::spendable() const { return wallet.balance(local_view); }

void DeviceState::sync_from(const ledger::LedgerState& ledger) {
  // Promote pending voucher outputs that actually landed on-chain. Outputs of
  // vouchers the counterparty has not synced yet stay pending; outputs whose
  // token was already consumed are dropped.
  for (auto it = pending_keys.begin(); it != pending_keys.end();) {
    auto tok = ledger.unspent.find(it->first);
    if (tok != ledger.unspent.end() && tok->second.owner_epk == it->second.public_key) {
      wallet.grant(it->first, it->second);
      it = pending_keys.erase(it);
    } else if (ledger.spent_log.contains(it->first)) {
      it = pending_keys.erase(it);
    } else {
      ++it;
    }
  }
  // Base-key owned tokens (mints, refunds) are spendable directly.
  for (const auto& [id, tok] : ledger.unspent) {
    if (tok.owner_epk == wallet.keys.public_key) wallet.grant(id, wallet.keys);
  }
  // Rebuild the local view from ledger truth.
  local_view = ledger::LedgerState{};
  local_view.height = ledger.height;
  for (auto it = wallet.spend_keys.begin(); it != wallet.spend_keys.end();) {
    auto tok = ledger.unspent.find(it->first);
    if (tok != ledger.unspent.end() && tok->second.owner_epk == it->second.public_key) {
      local_view.unspent.emplace(tok->first, tok->second);
      local_view.total_supply += tok->second.value;
      ++it;
    } else {
      it = wallet.spend_keys.erase(it);
    }
  }
  synced_height = ledger.height;
}

OfflineVoucher offline_transfer(DeviceState& sender, DeviceState& recipient, int64_t amount,
                                const KycTier& tier, Rng& rng) {
  if (amount <= 0) throw std::domain_error("offline transfer amount must be positive");
  if (amount > tier.per_tx_limit) {
    throw TierLimitError("amount " + std::to_string(amount) + " exceeds tier " +
                         std::to_string(tier.level) + " limit " +
                         std::to_string(tier.per_tx_limit));
  }
  int64_t fee = ledger::default_fee(amount);
  if (sender.spendable() < amount + fee) {
    throw BalanceError("insufficient offline balance: " + std::to_string(sender.spendable()) +
                       " < " + std::to_string(amount + fee));
  }

  ledger::PaymentOutput pay{recipient.wallet.keys.public_key, amount};
  ledger::BuiltTransaction built = ledger::create_transaction(
      sender.local_view, sender.wallet, std::span<const ledger::PaymentOutput>(&pay, 1), fee, rng);

  OfflineVoucher voucher =
      OfflineVoucher::from_parts(built.tx, amount, tier, ++sender.clock);

  if (validate_voucher_locally(voucher) != ledger::Verdict::Accept) {
    throw ledger::ProtocolViolation("freshly built voucher failed on-device validation");
  }

  // Inputs become spent-pending: locked on the sender until sync. Outputs do
  // not enter any local view; received value is not re-spendable offline.
  for (const HashDigest& id : built.tx.inputs) {
    ledger::burn_token(sender.local_view, id);
    sender.wallet.forget(id);
  }
  for (size_t oi = 0; oi < built.tx.outputs.size(); ++oi) {
    const HashDigest& tid = built.tx.outputs[oi].token_id;
    if (oi == 0) {
      recipient.pending_keys[tid] = built.output_keys[oi];
    } else {
      sender.pending_keys[tid] = built.output_keys[oi];  // change
    }
  }
  sender.outbox.push_back(voucher);
  recipient.inbox.push_back(voucher);
  recipient.clock = std::max(recipient.clock, voucher.created_at) + 1;
  return voucher;
}

ledger::Verdict validate_voucher_locally(const OfflineVoucher& voucher) {
  const ledger::Transaction& tx = voucher.tx;
  if (tx.inputs.empty()) return ledger::Verdict::UnknownInput;
  if (tx.outputs.empty() || tx.fee < 0 || voucher.amount <= 0) return ledger::Verdict::Imbalance;
  for (const ledger::UtxoToken& out : tx.outputs) {
    if (out.value < 0) return ledger::Verdict::Imbalance;
    if (out.token_id != crypto::hash(out.encode_body())) return ledger::Verdict::BadProof;
  }
  if (voucher.amount != tx.outputs.front().value) return ledger::Verdict::Imbalance;
  HashDigest expected = ledger::Transaction::compute_hash(tx.inputs, tx.outputs, tx.fee);
  if (tx.tx_hash != expected) return ledger::Verdict::BadProof;
  if (!crypto::verify_proof(ledger::tx_statement(expected), tx.zk_proof)) {
    return ledger::Verdict::BadProof;
  }
  const crypto::SchemeProfile* profile = crypto::find_profile(tx.profile_name);
  if (profile == nullptr) return ledger::Verdict::BadSignature;
  if (!crypto::verify(expected.view(), as_view(tx.signature), as_view(tx.sender_pk), *profile)) {
    return ledger::Verdict::BadSignature;
  }
  return ledger::Verdict::Accept;
}

namespace {
constexpr size_t kChecksumBytes = 4;

Bytes voucher_payload(const OfflineVoucher& voucher) {
  Encoder enc;
  enc.raw32(voucher.voucher_id.view()).bytes(as_view(voucher.encode_body()));
  Bytes payload = enc.take();
  crypto::HashDigest sum = crypto::hash(payload);
  payload.insert(payload.end(), sum.bytes.begin(), sum.bytes.begin() + kChecksumBytes);
  return payload;
}

OfflineVoucher voucher_from_payload(BytesView payload) {
  if (payload.size() < kChecksumBytes) throw ChecksumError("payload shorter than checksum");
  BytesView body = payload.subspan(0, payload.size() - kChecksumBytes);
  BytesView sum = payload.subspan(payload.size() - kChecksumBytes);
  crypto::HashDigest expected = crypto::hash(body);
  if (!std::equal(sum.begin(), sum.end(), expected.bytes.begin())) {
    throw ChecksumError("voucher checksum mismatch");
  }
  Decoder dec(body);
  HashDigest id;
  {
    Bytes raw = dec.raw32();
    std::copy(raw.begin(), raw.end(), id.bytes.begin());
  }
  Bytes inner_raw = dec.bytes();
  dec.expect_done();

  Decoder inner(inner_raw);
  Bytes tx_raw = inner.bytes();
  OfflineVoucher v;
  {
    Decoder txdec(tx_raw);
    v.tx = ledger::Transaction::decode(txdec);
    txdec.expect_done();
  }
  v.amount = inner.i64();
  v.tier.level = static_cast<uint32_t>(inner.u64());
  v.tier.per_tx_limit = inner.i64();
  v.created_at = inner.i64();
  inner.expect_done();
  v.voucher_id = crypto::hash(v.encode_body());
  if (v.voucher_id != id) throw ChecksumError("voucher id mismatch after decode");
  return v;
}
}  // namespace

EncodedVoucher encode_voucher(const OfflineVoucher& voucher, Transport transport) {
  Bytes payload = voucher_payload(voucher);
  EncodedVoucher out;
  out.transport = transport;
  if (transport == Transport::NFC) {
    out.frames.push_back(std::move(payload));
    return out;
  }
  // QR: chunked frames, 2-byte index + 2-byte total header, frame <= 2900 B.
  size_t chunk_bytes = kQrFrameBytes - 4;
  size_t total = (payload.size() + chunk_bytes - 1) / chunk_bytes;
  if (total > 0xffff) throw std::length_error("voucher too large for QR chunking");
  for (size_t i = 0; i < total; ++i) {
    Bytes frame;
    frame.push_back(static_cast<uint8_t>(i >> 8));
    frame.push_back(static_cast<uint8_t>(i));
    frame.push_back(static_cast<uint8_t>(total >> 8));
    frame.push_back(static_cast<uint8_t>(total));
    size_t lo = i * chunk_bytes;
    size_t hi = std::min(payload.size(), lo + chunk_bytes);
    frame.insert(frame.end(), payload.begin() + lo, payload.begin() + hi);
    out.frames.push_back(std::move(frame));
  }
  return out;
}

OfflineVoucher decode_voucher(const EncodedVoucher& encoded) {
  if (encoded.frames.empty()) throw IncompletePayloadError("no frames");
  if (encoded.transport == Transport::NFC) {
    if (encoded.frames.size() != 1) throw IncompletePayloadError("NFC expects a single frame");
    return voucher_from_payload(encoded.frames.front());
  }
  uint16_t total = 0;
  std::vector<const Bytes*> by_index;
  for (const Bytes& frame : encoded.frames) {
    if (frame.size() < 4) throw IncompletePayloadError("QR frame shorter than header");
    uint16_t idx = static_cast<uint16_t>((frame[0] << 8) | frame[1]);
    uint16_t tot = static_cast<uint16_t>((frame[2] << 8) | frame[3]);
    if (total == 0) {
      total = tot;
      if (total == 0) throw IncompletePayloadError("QR total of zero");
      by_index.assign(total, nullptr);
    } else if (tot != total) {
      throw IncompletePayloadError("inconsistent QR frame totals");
    }
    if (idx >= total) throw IncompletePayloadError("QR frame index out of range");
    if (by_index[idx] != nullptr) throw IncompletePayloadError("duplicate QR frame");
    by_index[idx] = &frame;
  }
  Bytes payload;
  for (uint16_t i = 0; i < total; ++i) {
    if (by_index[i] == nullptr) {
      throw IncompletePayloadError("missing QR frame " + std::to_string(i));
    }
    payload.insert(payload.end(), by_index[i]->begin() + 4, by_index[i]->end());
  }
  return voucher_from_payload(payload);
}

namespace {
// The exact transaction already ran: every input consumed and every output
// token id minted (token ids are content hashes, so presence pins the tx).
bool already_settled(const ledger::LedgerState& ledger, const ledger::Transaction& tx) {
  for (const HashDigest& id : tx.inputs) {
    if (!ledger.spent_log.contains(id)) return false;
  }
  for (const ledger::UtxoToken& out : tx.outputs) {
    if (!ledger.unspent.contains(out.token_id) && !ledger.spent_log.contains(out.token_id)) {
      return false;
    }
  }
  return true;
}
}  // namespace

ReconcileReport reconcile(DeviceState& device, ledger::LedgerState& ledger) {
  std::vector<OfflineVoucher> pending;
  pending.insert(pending.end(), device.outbox.begin(), device.outbox.end());
  pending.insert(pending.end(), device.inbox.begin(), device.inbox.end());
  std::sort(pending.begin(), pending.end(), [](const OfflineVoucher& a, const OfflineVoucher& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.voucher_id < b.voucher_id;
  });

  ReconcileReport report;
  for (const OfflineVoucher& v : pending) {
    // Tier enforcement repeats here so a voucher injected around
    // offline_transfer still cannot exceed its declared tier.
    if (v.amount > v.tier.per_tx_limit || v.amount <= 0) {
      report.rejected.push_back({v.voucher_id, "TierLimit"});
      continue;
    }
    if (validate_voucher_locally(v) != ledger::Verdict::Accept) {
      report.rejected.push_back({v.voucher_id, "Malformed"});
      continue;
    }
    ledger::Verdict verdict = ledger::validate_transaction(ledger, v.tx);
    if (verdict == ledger::Verdict::Accept) {
      ledger::apply_transaction(ledger, v.tx);
      report.applied.push_back({v.voucher_id, "Applied"});
    } else if (already_settled(ledger, v.tx)) {
      report.already_settled.push_back({v.voucher_id, "AlreadySettled"});
    } else {
      report.rejected.push_back({v.voucher_id, ledger::to_string(verdict)});
    }
  }
  device.outbox.clear();
  device.inbox.clear();
  device.sync_from(ledger);
  return report;
}

}  // namespace qrpl::offline
