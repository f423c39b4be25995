#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qrpl/crypto/proof.hpp"
#include "qrpl/crypto/scheme.hpp"
#include "qrpl/crypto/vrf.hpp"
#include "qrpl/ratio.hpp"

namespace qrpl::consensus {

class NoEligibleValidator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Validator {
  uint64_t id{};
  int64_t stake{};     // s_v
  int64_t activity{};  // a_v, cumulative fees paid this epoch
  crypto::KeyPair keypair;
  uint32_t shard{};
};

struct ConsensusParams {
  Ratio alpha_weight{1, 2};     // activity weighting
  Ratio slash_penalty{1, 10};   // multiplicative stake penalty
  Ratio fee_rate{1, 10'000};    // 0.01% per transaction
  uint32_t epoch_blocks{360};   // ~1 hour at 10 s blocks
  Ratio adversary_bound{33, 100};

  void validate() const;
};

// w_v = s_v + alpha * a_v, exact.
Ratio compute_weight(const Validator& v, const ConsensusParams& params);

// Statement attesting a validator's cumulative fees paid.
crypto::Statement activity_statement(uint64_t validator_id, int64_t fees_paid);
crypto::ProofArtifact make_activity_proof(const Validator& v, int64_t fees_paid, Rng& rng,
                                          crypto::ProverMode mode = crypto::ProverMode::Honest);

// Returns the validator with activity increased by fees_paid when the proof
// verifies; unchanged otherwise.
Validator accrue_activity(Validator v, int64_t fees_paid, const crypto::ProofArtifact& proof);

void reset_epoch_activity(std::span<Validator> validators);

struct SelectionResult {
  uint64_t validator_id{};
  crypto::VrfOutput vrf;  // winning proof, carried in the produced block
};

// Each validator maps its VRF fraction u on (beacon || round) to the score
// u^(1/weight); the maximal score wins, which samples proportionally to
// weight. Ties break to the lowest id.
SelectionResult select_proposer(std::span<const Validator> validators,
                                const crypto::HashDigest& beacon_value, uint64_t round,
                                const ConsensusParams& params);

enum class SlashReason { DoubleSign, InvalidBlock };

const char* to_string(SlashReason r);

struct SlashingEvent {
  uint64_t validator_id{};
  SlashReason reason{};
  uint64_t height{};
  int64_t stake_before{};
  int64_t stake_after{};
  bool applied{};  // false for the zero-stake warning no-op
};

std::pair<Validator, SlashingEvent> slash(Validator v, const ConsensusParams& params,
                                          SlashReason reason, uint64_t height);

struct AttackCostReport {
  int64_t total_stake{};
  int64_t weight_gain{};         // target_relative_gain * total_stake
  int64_t required_activity{};   // weight_gain / alpha
  int64_t sham_volume{};         // required_activity / fee_rate
  int64_t fee_cost{};            // == required_activity (activity = fees paid)
  int64_t block_reward_value{};
  bool profitable{};

  std::string to_json() const;
};

AttackCostReport attack_cost(int64_t total_stake, const ConsensusParams& params,
                             const Ratio& target_relative_gain, int64_t block_reward_value);

}  // namespace qrpl::consensus
