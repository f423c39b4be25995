#include "qrpl/net/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qrpl::net {

void NetworkConfig::validate() const {
  if (shard_count == 0) throw ConfigError("shard_count must be positive");
  if (block_time_s < 10.0 || block_time_s > 20.0) {
    throw ConfigError("block_time_s outside [10, 20]");
  }
  for (double d : {propagation_delay_s, vote_delay_s, cross_shard_delay_s, swap_timeout_s}) {
    if (d < 0) throw ConfigError("delays must be non-negative");
  }
  if (message_loss_prob < 0 || message_loss_prob > 1) throw ConfigError("loss probability outside [0,1]");
  if (sig_kb <= 0 || proof_kb <= 0 || other_kb <= 0 || block_limit_kb <= 0) {
    throw ConfigError("size parameters must be positive");
  }
  if (tx_per_block == 0) throw ConfigError("tx_per_block must be positive");
}

uint32_t NetworkConfig::max_txs_by_size() const {
  return static_cast<uint32_t>(block_limit_kb / (sig_kb + proof_kb + other_kb));
}

void SimConfig::validate() const {
  net.validate();
  if (validators < net.shard_count) throw ConfigError("need at least one validator per shard");
  if (blocks_per_shard == 0) throw ConfigError("blocks_per_shard must be positive");
  if (epoch_blocks == 0) throw ConfigError("epoch_blocks must be positive");
  if (genesis_funding <= 0) throw ConfigError("genesis_funding must be positive");
  if (swap_probability < 0 || swap_probability > 1) throw ConfigError("swap_probability outside [0,1]");
  if (adversary_fraction < 0 || adversary_fraction > 1) throw ConfigError("adversary_fraction outside [0,1]");
}

crypto::HashDigest Block::digest() const {
  Encoder enc;
  enc.str("qrpl.block").u64(shard).u64(height).u64(proposer).raw32(vrf.value.view());
  enc.u64(txs.size());
  for (const ledger::Transaction& tx : txs) enc.raw32(tx.tx_hash.view());
  enc.i64(produced_at_us);
  return crypto::hash(enc.view());
}

Block produce_block(ledger::LedgerState& ledger_state, uint32_t shard, uint64_t height,
                    const consensus::SelectionResult& selection, uint64_t producer_id,
                    std::span<const ledger::Transaction> pending, const NetworkConfig& config,
                    int64_t now_us, std::vector<RejectedTx>* rejected) {
  if (producer_id != selection.validator_id) {
    throw ledger::ProtocolViolation("producer " + std::to_string(producer_id) +
                                    " is not the selected proposer " +
                                    std::to_string(selection.validator_id));
  }
  Block block;
  block.shard = shard;
  block.height = height;
  block.proposer = producer_id;
  block.vrf = selection.vrf;
  block.produced_at_us = now_us;

  ledger_state.height = height;
  uint32_t budget = std::min(config.tx_per_block, config.max_txs_by_size());
  for (const ledger::Transaction& tx : pending) {
    if (block.txs.size() >= budget) break;
    ledger::Verdict v = ledger::validate_transaction(ledger_state, tx);
    if (v == ledger::Verdict::Accept) {
      ledger::apply_transaction(ledger_state, tx);
      block.txs.push_back(tx);
    } else if (rejected != nullptr) {
      rejected->push_back({tx.tx_hash, v});
    }
  }
  return block;
}

namespace {

enum class EventKind { EpochStart, BlockTick, SwapRelay, SwapTimeout };

struct Event {
  int64_t time_us;
  uint64_t seq;
  EventKind kind;
  uint32_t shard;
  uint64_t index;  // swap index or epoch number
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time_us != b.time_us) return a.time_us > b.time_us;
    return a.seq > b.seq;
  }
};

struct SwapMeta {
  CrossShardSwap swap;
  size_t owner_wallet;      // refund key holder
  size_t recipient_wallet;  // spend key recipient on completion
  crypto::KeyPair owner_key;
};

class SimulatorImpl {
 public:
  explicit SimulatorImpl(const SimConfig& config)
      : cfg_(config),
        rng_master_(config.seed),
        rng_stake_(rng_master_.fork(1)),
        rng_txgen_(rng_master_.fork(2)),
        rng_swap_(rng_master_.fork(3)),
        rng_oracle_(rng_master_.fork(4)),
        rng_crypto_(rng_master_.fork(5)),
        beacon_(BeaconChain::genesis(config.seed)) {
    cfg_.validate();
  }

  SimReport run();

 private:
  void setup();
  void schedule(int64_t time_us, EventKind kind, uint32_t shard, uint64_t index = 0);
  void on_epoch_start(uint64_t epoch);
  void on_block_tick(uint32_t shard, int64_t now);
  void on_swap_relay(uint64_t idx, int64_t now);
  void on_swap_timeout(uint64_t idx, int64_t now);
  void initiate_swap(uint32_t source_shard, int64_t now);
  void record_takeover_ratios();
  void audit_conservation();
  void log_event(int64_t time_us, uint32_t shard, const char* kind, const crypto::HashDigest& payload);
  int64_t jittered(double base_s);

  size_t pick_funded_wallet(uint32_t shard, Rng& rng);

  SimConfig cfg_;
  Rng rng_master_, rng_stake_, rng_txgen_, rng_swap_, rng_oracle_, rng_crypto_;
  BeaconChain beacon_;

  std::vector<consensus::Validator> validators_;
  std::vector<bool> adversary_;
  std::vector<ledger::Wallet> wallets_;
  std::vector<uint32_t> wallet_shard_;
  std::vector<ledger::LedgerState> shards_;
  std::vector<uint64_t> shard_height_;
  ShardAssignment assignment_;
  consensus::ConsensusParams params_;

  std::vector<SwapMeta> swaps_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  uint64_t next_seq_{0};

  int64_t in_flight_{0};
  SimReport report_;
  std::ostringstream log_;
};

void SimulatorImpl::schedule(int64_t time_us, EventKind kind, uint32_t shard, uint64_t index) {
  queue_.push(Event{time_us, next_seq_++, kind, shard, index});
}

void SimulatorImpl::log_event(int64_t time_us, uint32_t shard, const char* kind,
                              const crypto::HashDigest& payload) {
  log_ << "{\"time_us\":" << time_us << ",\"shard\":" << shard << ",\"kind\":\"" << kind
       << "\",\"payload\":\"" << payload.hex() << "\"}\n";
}

int64_t SimulatorImpl::jittered(double base_s) {
  double s = base_s;
  if (cfg_.net.delay_jitter_frac > 0) {
    // Uniform perturbation of +/- the configured fraction.
    double f = cfg_.net.delay_jitter_frac;
    s = base_s * rng_swap_.uniform(1.0 - f, 1.0 + f);
  }
  return static_cast<int64_t>(s * 1e6);
}

void SimulatorImpl::setup() {
  params_.epoch_blocks = cfg_.epoch_blocks;

  uint32_t n = cfg_.validators;
  uint32_t shards = cfg_.net.shard_count;
  validators_.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    consensus::Validator v;
    v.id = i;
    v.stake = rng_stake_.uniform_int(1'000, 10'000);
    v.keypair = crypto::generate_keypair(rng_crypto_, crypto::ecdsa_p256());
    validators_.push_back(std::move(v));
  }
  uint32_t n_adv = static_cast<uint32_t>(std::floor(cfg_.adversary_fraction * n));
  adversary_.assign(n, false);
  for (uint32_t i = 0; i < n_adv; ++i) adversary_[i] = true;

  assignment_ = assign_validators(std::span<const consensus::Validator>(validators_), beacon_.value,
                                  0, shards);
  for (consensus::Validator& v : validators_) v.shard = assignment_.shard_of(v.id);

  shards_.assign(shards, ledger::LedgerState{});
  shard_height_.assign(shards, 0);

  // One wallet per validator, pinned round-robin to a home shard. Funds do
  // not migrate with epoch reassignment.
  issuance::OracleConfig ocfg;
  std::vector<crypto::KeyPair> signers;
  for (int i = 0; i < 3; ++i) signers.push_back(crypto::generate_keypair(rng_crypto_, crypto::dilithium2()));
  for (const crypto::KeyPair& kp : signers) ocfg.signer_pks.push_back(kp.public_key);
  ocfg.threshold = 2;
  issuance::Oracle oracle(ocfg);

  wallets_.resize(n);
  wallet_shard_.resize(n);
  for (uint32_t i = 0; i < n; ++i) {
    wallets_[i].keys = crypto::generate_keypair(rng_crypto_, crypto::dilithium2());
    wallet_shard_[i] = i % shards;
    Bytes stmt = oracle.mint_statement(cfg_.genesis_funding, as_view(wallets_[i].keys.public_key));
    std::vector<issuance::Approval> approvals;
    for (int s = 0; s < 2; ++s) {
      approvals.push_back({signers[s].public_key, crypto::sign(stmt, signers[s])});
    }
    const ledger::UtxoToken& tok = oracle.mint(shards_[wallet_shard_[i]], cfg_.genesis_funding,
                                               approvals, as_view(wallets_[i].keys.public_key),
                                               rng_oracle_);
    // Genesis tokens are spendable with the wallet's base keypair.
    wallets_[i].grant(tok.token_id, wallets_[i].keys);
    report_.initial_supply += cfg_.genesis_funding;
    log_event(0, wallet_shard_[i], "genesis_mint", tok.token_id);
  }

  record_takeover_ratios();

  // Epoch boundaries first (low seq), then the per-shard block cadence.
  int64_t horizon = static_cast<int64_t>(cfg_.blocks_per_shard) * cfg_.net.block_time_us();
  for (uint64_t e = 1; e * cfg_.epoch_blocks * cfg_.net.block_time_us() <= static_cast<uint64_t>(horizon); ++e) {
    schedule(static_cast<int64_t>(e * cfg_.epoch_blocks) * cfg_.net.block_time_us(),
             EventKind::EpochStart, 0, e);
  }
  for (uint32_t s = 0; s < shards; ++s) {
    schedule(cfg_.net.block_time_us(), EventKind::BlockTick, s);
  }
}

size_t SimulatorImpl::pick_funded_wallet(uint32_t shard, Rng& rng) {
  std::vector<size_t> candidates;
  for (size_t i = 0; i < wallets_.size(); ++i) {
    if (wallet_shard_[i] == shard && wallets_[i].balance(shards_[shard]) > 1) {
      candidates.push_back(i);
    }
  }
  if (candidates.empty()) return wallets_.size();
  return candidates[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(candidates.size()) - 1))];
}

void SimulatorImpl::on_epoch_start(uint64_t epoch) {
  record_takeover_ratios();  // end-of-epoch weights, before the reset
  beacon_ = beacon_.next();
  assignment_ = assign_validators(std::span<const consensus::Validator>(validators_), beacon_.value,
                                  epoch, cfg_.net.shard_count);
  for (consensus::Validator& v : validators_) v.shard = assignment_.shard_of(v.id);
  consensus::reset_epoch_activity(validators_);
  log_event(static_cast<int64_t>(epoch * cfg_.epoch_blocks) * cfg_.net.block_time_us(), 0, "epoch",
            beacon_.value);
}

void SimulatorImpl::record_takeover_ratios() {
  for (uint32_t s = 0; s < cfg_.net.shard_count; ++s) {
    int64_t stake_all = 0, stake_adv = 0;
    double weight_all = 0, weight_adv = 0;
    for (uint64_t vid : assignment_.by_shard[s]) {
      const consensus::Validator& v = validators_[vid];
      double w = consensus::compute_weight(v, params_).to_double();
      stake_all += v.stake;
      weight_all += w;
      if (adversary_[vid]) {
        stake_adv += v.stake;
        weight_adv += w;
      }
    }
    if (stake_all > 0) {
      report_.max_adversary_stake_ratio = std::max(
          report_.max_adversary_stake_ratio, static_cast<double>(stake_adv) / static_cast<double>(stake_all));
    }
    if (weight_all > 0) {
      report_.max_adversary_weight_ratio =
          std::max(report_.max_adversary_weight_ratio, weight_adv / weight_all);
    }
  }
}

void SimulatorImpl::on_block_tick(uint32_t shard, int64_t now) {
  uint64_t height = ++shard_height_[shard];
  uint64_t round = height * cfg_.net.shard_count + shard;

  std::vector<consensus::Validator> shard_validators;
  for (uint64_t vid : assignment_.by_shard[shard]) shard_validators.push_back(validators_[vid]);
  consensus::SelectionResult sel =
      consensus::select_proposer(shard_validators, beacon_.value, round, params_);

  // Candidate transactions from wallets homed on this shard.
  struct Candidate {
    size_t sender;
    size_t recipient;
    ledger::BuiltTransaction built;
  };
  std::vector<ledger::Transaction> pending;
  std::vector<Candidate> candidates;
  for (uint32_t i = 0; i < cfg_.txs_per_block_target; ++i) {
    size_t sender = pick_funded_wallet(shard, rng_txgen_);
    if (sender == wallets_.size()) break;
    std::vector<size_t> peers;
    for (size_t w = 0; w < wallets_.size(); ++w) {
      if (wallet_shard_[w] == shard && w != sender) peers.push_back(w);
    }
    size_t recipient = peers.empty()
                           ? sender
                           : peers[static_cast<size_t>(rng_txgen_.uniform_int(0, static_cast<int64_t>(peers.size()) - 1))];
    int64_t balance = wallets_[sender].balance(shards_[shard]);
    int64_t max_amount = std::max<int64_t>(1, balance / 4);
    int64_t amount = rng_txgen_.uniform_int(1, max_amount);
    int64_t fee = ledger::default_fee(amount);
    if (amount + fee > balance) continue;
    try {
      ledger::PaymentOutput pay{wallets_[recipient].keys.public_key, amount};
      ledger::BuiltTransaction b = ledger::create_transaction(
          shards_[shard], wallets_[sender], std::span<const ledger::PaymentOutput>(&pay, 1), fee,
          rng_txgen_);
      pending.push_back(b.tx);
      candidates.push_back({sender, recipient, std::move(b)});
    } catch (const std::exception&) {
      // Conflicting candidate in the same tick (inputs already promised);
      // skipping mirrors a mempool dropping a double-spend.
      continue;
    }
  }

  std::vector<RejectedTx> rejected;
  Block block = produce_block(shards_[shard], shard, height, sel, sel.validator_id, pending,
                              cfg_.net, now, &rejected);
  report_.blocks_produced++;
  report_.txs_applied += block.txs.size();
  report_.txs_rejected += rejected.size();

  // Post-apply bookkeeping: hand spend keys over, credit fees.
  int64_t block_fees = 0;
  for (const ledger::Transaction& tx : block.txs) {
    auto it = std::find_if(candidates.begin(), candidates.end(), [&](const Candidate& c) {
      return c.built.tx.tx_hash == tx.tx_hash;
    });
    if (it == candidates.end()) continue;
    // Output 0 is the payment (key handed to the recipient with the
    // transfer), any further output is change back to the sender.
    for (size_t oi = 0; oi < it->built.tx.outputs.size(); ++oi) {
      size_t dest = oi == 0 ? it->recipient : it->sender;
      wallets_[dest].grant(it->built.tx.outputs[oi].token_id, it->built.output_keys[oi]);
    }
    for (const crypto::HashDigest& spent : it->built.tx.inputs) wallets_[it->sender].forget(spent);
    block_fees += tx.fee;
    // Activity accrues to the fee payer.
    consensus::Validator& payer = validators_[it->sender];
    crypto::ProofArtifact proof = consensus::make_activity_proof(payer, tx.fee, rng_txgen_);
    payer = consensus::accrue_activity(std::move(payer), tx.fee, proof);
  }
  report_.fees_burned += block_fees;
  report_.fees_credited += block_fees;  // proposer earnings ledgered off-chain

  // Swap initiation from this shard.
  if (cfg_.net.shard_count > 1 && rng_swap_.bernoulli(cfg_.swap_probability)) {
    initiate_swap(shard, now);
  }

  // Injected double-sign evidence.
  if (cfg_.double_sign_prob > 0 && rng_txgen_.bernoulli(cfg_.double_sign_prob)) {
    uint64_t vid = assignment_.by_shard[shard][static_cast<size_t>(rng_txgen_.uniform_int(
        0, static_cast<int64_t>(assignment_.by_shard[shard].size()) - 1))];
    auto [slashed, ev] =
        consensus::slash(validators_[vid], params_, consensus::SlashReason::DoubleSign, height);
    validators_[vid] = std::move(slashed);
    if (ev.applied) {
      report_.slash_events++;
      Encoder enc;
      enc.u64(ev.validator_id).i64(ev.stake_before).i64(ev.stake_after).u64(ev.height);
      log_event(now, shard, "slash", crypto::hash(enc.view()));
    }
  }

  log_event(now, shard, "block", block.digest());

  if (height < cfg_.blocks_per_shard) {
    schedule(now + cfg_.net.block_time_us(), EventKind::BlockTick, shard);
  }
  audit_conservation();
}

void SimulatorImpl::initiate_swap(uint32_t source_shard, int64_t now) {
  size_t owner = pick_funded_wallet(source_shard, rng_swap_);
  if (owner == wallets_.size()) return;
  std::vector<crypto::HashDigest> owned = wallets_[owner].owned_tokens(shards_[source_shard]);
  if (owned.empty()) return;
  crypto::HashDigest token_id =
      owned[static_cast<size_t>(rng_swap_.uniform_int(0, static_cast<int64_t>(owned.size()) - 1))];

  uint32_t target = static_cast<uint32_t>(rng_swap_.uniform_int(0, cfg_.net.shard_count - 2));
  if (target >= source_shard) target++;
  std::vector<size_t> recipients;
  for (size_t w = 0; w < wallets_.size(); ++w) {
    if (wallet_shard_[w] == target) recipients.push_back(w);
  }
  if (recipients.empty()) return;
  size_t recipient = recipients[static_cast<size_t>(
      rng_swap_.uniform_int(0, static_cast<int64_t>(recipients.size()) - 1))];

  SwapMeta meta;
  meta.owner_wallet = owner;
  meta.recipient_wallet = recipient;
  meta.owner_key = *wallets_[owner].spend_key(token_id);
  meta.swap = swap_initiate(shards_[source_shard], source_shard, target, token_id,
                            as_view(wallets_[recipient].keys.public_key), now,
                            static_cast<int64_t>(cfg_.net.swap_timeout_s * 1e6), rng_swap_);
  wallets_[owner].forget(token_id);
  in_flight_ += meta.swap.locked_token.value;
  swap_mark_relayed(meta.swap);
  swaps_.push_back(std::move(meta));
  uint64_t idx = swaps_.size() - 1;
  report_.swaps_initiated++;
  log_event(now, source_shard, "swap_lock", swaps_[idx].swap.swap_id);

  if (!rng_swap_.bernoulli(cfg_.net.message_loss_prob)) {
    schedule(now + jittered(cfg_.net.cross_shard_delay_s), EventKind::SwapRelay, target, idx);
  }
  schedule(now + static_cast<int64_t>(cfg_.net.swap_timeout_s * 1e6) + 1, EventKind::SwapTimeout,
           source_shard, idx);
  audit_conservation();
}

void SimulatorImpl::on_swap_relay(uint64_t idx, int64_t now) {
  SwapMeta& meta = swaps_[idx];
  if (meta.swap.terminal()) {
    report_.atomicity_ok = false;  // relay after terminal state is a harness bug
    return;
  }
  try {
    crypto::HashDigest minted =
        swap_complete(meta.swap, shards_[meta.swap.target_shard], meta.swap.lock_proof, now);
    wallets_[meta.recipient_wallet].grant(minted, wallets_[meta.recipient_wallet].keys);
    in_flight_ -= meta.swap.locked_token.value;
    report_.swaps_completed++;
    log_event(now, meta.swap.target_shard, "swap_unlock", meta.swap.swap_id);
  } catch (const StaleSwapError&) {
    // Arrived past the deadline; the timeout path will refund.
    log_event(now, meta.swap.target_shard, "swap_stale", meta.swap.swap_id);
  }
  audit_conservation();
}

void SimulatorImpl::on_swap_timeout(uint64_t idx, int64_t now) {
  SwapMeta& meta = swaps_[idx];
  bool was_unlocked = meta.swap.state == SwapState::UnlockedAtTarget;
  std::optional<crypto::HashDigest> refund =
      swap_timeout(meta.swap, shards_[meta.swap.source_shard], now);
  if (refund) {
    if (was_unlocked) report_.atomicity_ok = false;
    wallets_[meta.owner_wallet].grant(*refund, meta.owner_key);
    in_flight_ -= meta.swap.locked_token.value;
    report_.swaps_refunded++;
    log_event(now, meta.swap.source_shard, "swap_refund", meta.swap.swap_id);
  }
  audit_conservation();
}

void SimulatorImpl::audit_conservation() {
  int64_t total = in_flight_;
  for (const ledger::LedgerState& s : shards_) total += s.total_supply;
  if (total != report_.initial_supply - report_.fees_burned) {
    report_.conservation_ok = false;
  }
}

SimReport SimulatorImpl::run() {
  setup();
  audit_conservation();
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    report_.events_processed++;
    switch (ev.kind) {
      case EventKind::EpochStart: on_epoch_start(ev.index); break;
      case EventKind::BlockTick: on_block_tick(ev.shard, ev.time_us); break;
      case EventKind::SwapRelay: on_swap_relay(ev.index, ev.time_us); break;
      case EventKind::SwapTimeout: on_swap_timeout(ev.index, ev.time_us); break;
    }
  }
  // Any swap still non-terminal at horizon violates the protocol's guarantee
  // that exactly one terminal transition happens.
  for (SwapMeta& meta : swaps_) {
    if (!meta.swap.terminal()) {
      std::optional<crypto::HashDigest> refund = swap_timeout(
          meta.swap, shards_[meta.swap.source_shard], meta.swap.deadline_us + 1);
      if (refund) {
        wallets_[meta.owner_wallet].grant(*refund, meta.owner_key);
        in_flight_ -= meta.swap.locked_token.value;
        report_.swaps_refunded++;
        log_event(meta.swap.deadline_us + 1, meta.swap.source_shard, "swap_refund",
                  meta.swap.swap_id);
      }
    }
  }
  record_takeover_ratios();
  audit_conservation();
  int64_t final_supply = in_flight_;
  for (const ledger::LedgerState& s : shards_) final_supply += s.total_supply;
  report_.final_supply = final_supply;
  report_.event_log_jsonl = log_.str();
  return report_;
}

}  // namespace

SimReport run_simulation(const SimConfig& config) {
  SimulatorImpl sim(config);
  return sim.run();
}

std::string SimReport::to_json() const {
  std::ostringstream os;
  os << "{\"events_processed\":" << events_processed << ",\"blocks_produced\":" << blocks_produced
     << ",\"txs_applied\":" << txs_applied << ",\"txs_rejected\":" << txs_rejected
     << ",\"swaps_initiated\":" << swaps_initiated << ",\"swaps_completed\":" << swaps_completed
     << ",\"swaps_refunded\":" << swaps_refunded << ",\"slash_events\":" << slash_events
     << ",\"initial_supply\":" << initial_supply << ",\"final_supply\":" << final_supply
     << ",\"fees_burned\":" << fees_burned << ",\"fees_credited\":" << fees_credited
     << ",\"conservation_ok\":" << (conservation_ok ? "true" : "false")
     << ",\"atomicity_ok\":" << (atomicity_ok ? "true" : "false")
     << ",\"max_adversary_stake_ratio\":" << max_adversary_stake_ratio
     << ",\"max_adversary_weight_ratio\":" << max_adversary_weight_ratio << "}";
  return os.str();
}

}  // namespace qrpl::net
