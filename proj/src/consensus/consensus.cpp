#include "qrpl/consensus/consensus.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qrpl::consensus {

void ConsensusParams::validate() const {
  Ratio zero{0, 1};
  Ratio one{1, 1};
  for (const Ratio* r : {&alpha_weight, &slash_penalty, &fee_rate, &adversary_bound}) {
    if (!(*r > zero) || !(*r < one)) {
      throw std::domain_error("consensus fraction out of (0,1): " + r->str());
    }
  }
  if (epoch_blocks < 1) throw std::domain_error("epoch_blocks must be >= 1");
}

Ratio compute_weight(const Validator& v, const ConsensusParams& params) {
  if (v.stake < 0 || v.activity < 0) throw std::domain_error("negative stake or activity");
  return Ratio::whole(v.stake) + params.alpha_weight * Ratio::whole(v.activity);
}

crypto::Statement activity_statement(uint64_t validator_id, int64_t fees_paid) {
  crypto::Statement st;
  st.name = "qrpl.activity";
  Encoder enc;
  enc.u64(validator_id).i64(fees_paid);
  st.public_input = enc.take();
  st.predicate = [fees_paid](const crypto::Witness& witness) {
    try {
      Decoder dec(witness);
      int64_t attested = dec.i64();
      dec.expect_done();
      return attested == fees_paid && attested >= 0;
    } catch (const DecodeError&) {
      return false;
    }
  };
  return st;
}

crypto::ProofArtifact make_activity_proof(const Validator& v, int64_t fees_paid, Rng& rng,
                                          crypto::ProverMode mode) {
  crypto::Statement st = activity_statement(v.id, fees_paid);
  Encoder wit;
  wit.i64(fees_paid);
  return crypto::prove(st, wit.take(), rng, mode);
}

Validator accrue_activity(Validator v, int64_t fees_paid, const crypto::ProofArtifact& proof) {
  if (fees_paid < 0) throw std::domain_error("fees_paid must be non-negative");
  crypto::Statement st = activity_statement(v.id, fees_paid);
  if (!crypto::verify_proof(st, proof)) return v;  // rejected, unchanged
  v.activity += fees_paid;
  return v;
}

void reset_epoch_activity(std::span<Validator> validators) {
  for (Validator& v : validators) v.activity = 0;
}

SelectionResult select_proposer(std::span<const Validator> validators,
                                const crypto::HashDigest& beacon_value, uint64_t round,
                                const ConsensusParams& params) {
  if (validators.empty()) throw NoEligibleValidator("empty validator set");
  Encoder enc;
  enc.raw32(beacon_value.view()).u64(round);
  Bytes input = enc.take();

  const Validator* best = nullptr;
  crypto::VrfOutput best_vrf;
  double best_score = -std::numeric_limits<double>::infinity();
  bool any_eligible = false;
  for (const Validator& v : validators) {
    Ratio w = compute_weight(v, params);
    if (!(w > Ratio{0, 1})) continue;
    any_eligible = true;
    crypto::VrfOutput out = crypto::vrf_eval(v.keypair, input);
    double u = out.fraction();
    // Maximizing u^(1/w) is maximizing ln(u)/w; ln is safe for u in (0,1)
    // and u == 0 maps to the worst possible score.
    double score = u > 0.0 ? std::log(u) / w.to_double()
                           : -std::numeric_limits<double>::infinity();
    bool wins = score > best_score || (score == best_score && best != nullptr && v.id < best->id);
    if (best == nullptr || wins) {
      best = &v;
      best_vrf = out;
      best_score = score;
    }
  }
  if (!any_eligible) throw NoEligibleValidator("all validator weights are zero");
  return SelectionResult{best->id, best_vrf};
}

const char* to_string(SlashReason r) {
  switch (r) {
    case SlashReason::DoubleSign: return "DoubleSign";
    case SlashReason::InvalidBlock: return "InvalidBlock";
  }
  return "?";
}

std::pair<Validator, SlashingEvent> slash(Validator v, const ConsensusParams& params,
                                          SlashReason reason, uint64_t height) {
  SlashingEvent ev;
  ev.validator_id = v.id;
  ev.reason = reason;
  ev.height = height;
  ev.stake_before = v.stake;
  if (v.stake <= 0) {
    ev.stake_after = v.stake;
    ev.applied = false;  // warning event, nothing to forfeit
    return {std::move(v), ev};
  }
  Ratio retained = Ratio{1, 1} - params.slash_penalty;
  v.stake = retained.floor_mul(v.stake);
  ev.stake_after = v.stake;
  ev.applied = true;
  return {std::move(v), ev};
}

AttackCostReport attack_cost(int64_t total_stake, const ConsensusParams& params,
                             const Ratio& target_relative_gain, int64_t block_reward_value) {
  if (total_stake <= 0) throw std::domain_error("total_stake must be positive");
  if (!(target_relative_gain >= Ratio{0, 1}) || !(target_relative_gain < Ratio{1, 1})) {
    throw std::domain_error("target_relative_gain must be in [0,1)");
  }
  if (params.fee_rate.num == 0) throw std::domain_error("fee_rate must be nonzero");

  Ratio stake{total_stake, 1};
  Ratio weight_gain = target_relative_gain * stake;
  Ratio required_activity = weight_gain / params.alpha_weight;
  Ratio sham_volume = required_activity / params.fee_rate;

  AttackCostReport r;
  r.total_stake = total_stake;
  r.weight_gain = weight_gain.floor();
  r.required_activity = required_activity.floor();
  r.sham_volume = sham_volume.floor();
  r.fee_cost = r.required_activity;  // activity score is fees paid
  r.block_reward_value = block_reward_value;
  r.profitable = block_reward_value > r.fee_cost;
  return r;
}

std::string AttackCostReport::to_json() const {
  std::ostringstream os;
  os << "{\"weight_gain\":" << weight_gain << ",\"required_activity\":" << required_activity
     << ",\"sham_volume\":" << sham_volume << ",\"fee_cost\":" << fee_cost
     << ",\"profitable\":" << (profitable ? "true" : "false") << "}";
  return os.str();
}

}  // namespace qrpl::consensus
