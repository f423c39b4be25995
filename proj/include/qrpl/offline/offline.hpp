#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qrpl/ledger/ledger.hpp"
#include "qrpl/rng.hpp"

namespace qrpl::offline {

using crypto::HashDigest;

class TierLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BalanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ChecksumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class IncompletePayloadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KycTier {
  uint32_t level{};
  int64_t per_tx_limit{};

  bool operator==(const KycTier&) const = default;
};

// Limits are non-decreasing in level; level 0 is pinned to 300 units (scaled
// by unit_scale where ledger integers are minor units), each higher level
// defaults to 10x the previous.
struct TierTable {
  std::vector<KycTier> tiers;

  static TierTable standard(int64_t unit_scale = 1, uint32_t levels = 4);
  const KycTier& at(uint32_t level) const;
  void validate() const;
};

struct OfflineVoucher {
  HashDigest voucher_id;
  ledger::Transaction tx;  // self-contained: proof + signature embedded
  int64_t amount{};        // declared transfer value, checked against the tier
  KycTier tier;
  int64_t created_at{};    // device-local time

  Bytes encode_body() const;  // voucher_id = hash(encode_body)
  static OfflineVoucher from_parts(ledger::Transaction tx, int64_t amount, KycTier tier,
                                   int64_t created_at);
};

struct DeviceState {
  uint64_t device_id{};
  ledger::Wallet wallet;
  ledger::LedgerState local_view;  // tokens the device believes it can spend
  std::vector<OfflineVoucher> outbox;
  std::vector<OfflineVoucher> inbox;
  std::map<HashDigest, crypto::KeyPair> pending_keys;  // voucher outputs awaiting sync
  uint64_t synced_height{};
  int64_t clock{};

  static DeviceState create(uint64_t id, crypto::KeyPair keys);
  int64_t spendable() const;
  // Pulls ledger truth: rebuilds the local view from tokens this device's
  // keys control and promotes pending keys that materialized on-chain.
  void sync_from(const ledger::LedgerState& ledger);
};

// Peer-to-peer transfer without network connectivity. The voucher embeds a
// full transaction; spent inputs are locked on the sender until sync, and
// received value is not re-spendable offline before sync.
OfflineVoucher offline_transfer(DeviceState& sender, DeviceState& recipient, int64_t amount,
                                const KycTier& tier, Rng& rng);

// Proof and signature checks a device can run with no network: digest
// binding, artifact validity, signature over the transaction hash, declared
// amount consistent with the first output and the tier.
ledger::Verdict validate_voucher_locally(const OfflineVoucher& voucher);

enum class Transport { NFC, QR };

inline constexpr size_t kQrFrameBytes = 2'900;  // includes the 4-byte chunk header

struct EncodedVoucher {
  Transport transport{};
  std::vector<Bytes> frames;
};

EncodedVoucher encode_voucher(const OfflineVoucher& voucher, Transport transport);
OfflineVoucher decode_voucher(const EncodedVoucher& encoded);

struct ReconcileEntry {
  HashDigest voucher_id;
  std::string outcome;  // "Applied", "AlreadySettled", or the rejection category
};

struct ReconcileReport {
  std::vector<ReconcileEntry> applied;
  std::vector<ReconcileEntry> already_settled;  // counterparty synced it first
  std::vector<ReconcileEntry> rejected;

  bool clean() const { return rejected.empty(); }
};

// Submits pending vouchers in device-local creation order; the first valid
// spend of a token wins, later conflicts surface as DoubleSpend entries.
// Device state is updated to ledger truth afterwards.
ReconcileReport reconcile(DeviceState& device, ledger::LedgerState& ledger);

}  // namespace qrpl::offline
