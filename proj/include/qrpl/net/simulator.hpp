#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "qrpl/consensus/consensus.hpp"
#include "qrpl/issuance/oracle.hpp"
#include "qrpl/ledger/ledger.hpp"
#include "qrpl/net/assignment.hpp"
#include "qrpl/net/beacon.hpp"
#include "qrpl/net/swap.hpp"

namespace qrpl::net {

struct NetworkConfig {
  uint32_t shard_count = 256;
  double block_time_s = 10.0;  // valid range [10, 20]
  double propagation_delay_s = 0.3;
  double vote_delay_s = 0.3;
  double cross_shard_delay_s = 0.7;
  double swap_timeout_s = 5.0;
  uint32_t tx_per_block = 20;
  // Nominal per-transaction wire costs driving the block byte budget.
  double sig_kb = 2.5;
  double proof_kb = 100.0;
  double other_kb = 1.0;
  double block_limit_kb = 4096.0;
  // Adversarial harness knobs, off by default.
  double message_loss_prob = 0.0;
  double delay_jitter_frac = 0.0;

  void validate() const;
  uint32_t max_txs_by_size() const;  // floor(limit / (sig + proof + other))
  int64_t block_time_us() const { return static_cast<int64_t>(block_time_s * 1e6); }
};

struct Block {
  uint32_t shard{};
  uint64_t height{};
  uint64_t proposer{};
  crypto::VrfOutput vrf;
  std::vector<ledger::Transaction> txs;
  int64_t produced_at_us{};

  crypto::HashDigest digest() const;
};

struct RejectedTx {
  crypto::HashDigest tx_hash;
  ledger::Verdict verdict{};
};

// Validates and applies pending transactions up to the block budget. The
// producing validator must be the one selection picked.
Block produce_block(ledger::LedgerState& ledger, uint32_t shard, uint64_t height,
                    const consensus::SelectionResult& selection, uint64_t producer_id,
                    std::span<const ledger::Transaction> pending, const NetworkConfig& config,
                    int64_t now_us, std::vector<RejectedTx>* rejected = nullptr);

struct SimConfig {
  NetworkConfig net{};
  uint32_t validators = 16;
  uint64_t blocks_per_shard = 100;
  uint32_t epoch_blocks = 360;
  int64_t genesis_funding = 1'000'000;  // per wallet, minted at genesis
  uint32_t txs_per_block_target = 4;
  double swap_probability = 0.25;  // per block tick
  double double_sign_prob = 0.0;
  double adversary_fraction = 0.0;  // flagged for takeover-ratio reporting
  uint64_t seed = 42;

  void validate() const;
};

struct SimReport {
  uint64_t events_processed{};
  uint64_t blocks_produced{};
  uint64_t txs_applied{};
  uint64_t txs_rejected{};
  uint64_t swaps_initiated{};
  uint64_t swaps_completed{};
  uint64_t swaps_refunded{};
  uint64_t slash_events{};
  int64_t initial_supply{};
  int64_t final_supply{};
  int64_t fees_burned{};
  int64_t fees_credited{};  // proposer earnings, consensus-layer bookkeeping
  bool conservation_ok = true;
  bool atomicity_ok = true;
  // Worst shard-level adversary share observed (stake and weight separately;
  // the adversary bound is stated on stake, weights include activity).
  double max_adversary_stake_ratio{};
  double max_adversary_weight_ratio{};
  std::string event_log_jsonl;

  std::string to_json() const;  // summary without the event log
};

// Deterministic multi-shard simulation: a pure function of (config, seed).
SimReport run_simulation(const SimConfig& config);

}  // namespace qrpl::net
