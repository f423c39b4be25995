#include <map>

#include "doctest.h"
#include "qrpl/consensus/consensus.hpp"
#include "support/stats.hpp"

using namespace qrpl;
using namespace qrpl::consensus;

namespace {
Validator make_validator(uint64_t id, int64_t stake, int64_t activity, Rng& rng) {
  Validator v;
  v.id = id;
  v.stake = stake;
  v.activity = activity;
  v.keypair = crypto::generate_keypair(rng, crypto::ecdsa_p256());
  return v;
}
}  // namespace

TEST_CASE("weight is stake plus alpha-scaled activity, exactly") {
  Rng rng(1);
  ConsensusParams params;
  CHECK(compute_weight(make_validator(0, 100, 0, rng), params) == Ratio{100, 1});
  CHECK(compute_weight(make_validator(0, 100, 50, rng), params) == Ratio{125, 1});
  // Odd activity keeps the exact half.
  CHECK(compute_weight(make_validator(0, 100, 51, rng), params) == Ratio{251, 2});
}

TEST_CASE("weight is strictly increasing in activity for positive alpha") {
  Rng rng(2);
  ConsensusParams params;
  for (int i = 0; i < 200; ++i) {
    int64_t stake = rng.uniform_int(0, 1'000'000);
    int64_t activity = rng.uniform_int(0, 1'000'000);
    Validator lo = make_validator(0, stake, activity, rng);
    Validator hi = make_validator(0, stake, activity + rng.uniform_int(1, 1000), rng);
    CHECK(compute_weight(hi, params) > compute_weight(lo, params));
  }
}

TEST_CASE("activity accrual requires a verifying proof") {
  Rng rng(3);
  ConsensusParams params;
  Validator v = make_validator(7, 1000, 0, rng);

  SUBCASE("accruing zero is a no-op") {
    crypto::ProofArtifact proof = make_activity_proof(v, 0, rng);
    Validator after = accrue_activity(v, 0, proof);
    CHECK(after.activity == 0);
  }
  SUBCASE("honest accrual adds exactly the fees paid") {
    crypto::ProofArtifact proof = make_activity_proof(v, 250, rng);
    Validator after = accrue_activity(v, 250, proof);
    CHECK(after.activity == 250);
  }
  SUBCASE("adversarial proof leaves activity unchanged") {
    crypto::ProofArtifact proof = make_activity_proof(v, 250, rng, crypto::ProverMode::Adversarial);
    proof.valid_flag = false;
    Validator after = accrue_activity(v, 250, proof);
    CHECK(after.activity == 0);
  }
  SUBCASE("proof for a different total is rejected") {
    crypto::ProofArtifact proof = make_activity_proof(v, 200, rng);
    Validator after = accrue_activity(v, 250, proof);
    CHECK(after.activity == 0);
  }
  SUBCASE("proof for a different validator is rejected") {
    Validator other = make_validator(8, 1000, 0, rng);
    crypto::ProofArtifact proof = make_activity_proof(other, 250, rng);
    Validator after = accrue_activity(v, 250, proof);
    CHECK(after.activity == 0);
  }
}

TEST_CASE("$2M of fees on a $100M network buys about one point of relative weight") {
  Rng rng(4);
  ConsensusParams params;  // alpha 0.5
  const int64_t total_stake = 100'000'000;
  const int64_t own_stake = 1'000'000;
  Validator v = make_validator(0, own_stake, 0, rng);

  double before = static_cast<double>(own_stake) / static_cast<double>(total_stake);
  crypto::ProofArtifact proof = make_activity_proof(v, 2'000'000, rng);
  v = accrue_activity(std::move(v), 2'000'000, proof);
  Ratio w = compute_weight(v, params);
  double total_weight = static_cast<double>(total_stake - own_stake) + w.to_double();
  double after = w.to_double() / total_weight;
  double gain = after - before;
  CHECK(gain > 0.009);
  CHECK(gain < 0.011);
}

TEST_CASE("proposer selection: single validator, determinism, zero-weight error") {
  Rng rng(5);
  ConsensusParams params;
  crypto::HashDigest beacon = crypto::hash(to_bytes("beacon"));

  std::vector<Validator> solo{make_validator(3, 10, 0, rng)};
  for (uint64_t round = 0; round < 16; ++round) {
    CHECK(select_proposer(solo, beacon, round, params).validator_id == 3);
  }

  std::vector<Validator> pair{make_validator(0, 5, 0, rng), make_validator(1, 9, 0, rng)};
  SelectionResult a = select_proposer(pair, beacon, 11, params);
  SelectionResult b = select_proposer(pair, beacon, 11, params);
  CHECK(a.validator_id == b.validator_id);
  CHECK(a.vrf == b.vrf);
  // The winning VRF output is publicly checkable.
  Encoder enc;
  enc.raw32(beacon.view()).u64(11);
  CHECK(crypto::vrf_verify(as_view(pair[a.validator_id].keypair.public_key), enc.view(), a.vrf));

  std::vector<Validator> broke{make_validator(0, 0, 0, rng), make_validator(1, 0, 0, rng)};
  CHECK_THROWS_AS(select_proposer(broke, beacon, 0, params), NoEligibleValidator);
  CHECK_THROWS_AS(select_proposer(std::vector<Validator>{}, beacon, 0, params), NoEligibleValidator);
}

TEST_CASE("selection frequencies are proportional to weight: {1,3} over 10^5 rounds") {
  Rng rng(6);
  ConsensusParams params;
  std::vector<Validator> vals{make_validator(0, 1, 0, rng), make_validator(1, 3, 0, rng)};
  crypto::HashDigest beacon = crypto::hash(to_bytes("sortition"));

  const int rounds = 100'000;
  uint64_t won[2] = {0, 0};
  for (int r = 0; r < rounds; ++r) {
    won[select_proposer(vals, beacon, static_cast<uint64_t>(r), params).validator_id]++;
  }
  double f0 = static_cast<double>(won[0]) / rounds;
  // Within 3 sigma of 0.25.
  double sigma = std::sqrt(0.25 * 0.75 / rounds);
  CHECK(std::fabs(f0 - 0.25) <= 3 * sigma);
  // Chi-square with 1 dof at p > 0.001.
  double e0 = rounds * 0.25, e1 = rounds * 0.75;
  double chi2 = (won[0] - e0) * (won[0] - e0) / e0 + (won[1] - e1) * (won[1] - e1) / e1;
  CHECK(teststats::chi2_pvalue(chi2, 1.0) > 0.001);
}

TEST_CASE("argmax invariance: scaling all weights never changes the winner") {
  Rng rng(7);
  ConsensusParams params;
  crypto::HashDigest beacon = crypto::hash(to_bytes("scale"));
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Validator> vals;
    for (uint64_t i = 0; i < 8; ++i) {
      vals.push_back(make_validator(i, rng.uniform_int(1, 1000), rng.uniform_int(0, 1000), rng));
    }
    std::vector<Validator> scaled = vals;
    for (Validator& v : scaled) {
      v.stake *= 7;
      v.activity *= 7;
    }
    for (uint64_t round = 0; round < 4; ++round) {
      CHECK(select_proposer(vals, beacon, round, params).validator_id ==
            select_proposer(scaled, beacon, round, params).validator_id);
    }
  }
}

TEST_CASE("slashing follows s(1 - penalty) with floor rounding") {
  Rng rng(8);
  ConsensusParams params;  // penalty 0.1
  Validator v = make_validator(0, 1000, 0, rng);

  auto [once, ev1] = slash(v, params, SlashReason::DoubleSign, 5);
  CHECK(once.stake == 900);
  CHECK(ev1.applied);
  CHECK(ev1.stake_before == 1000);
  CHECK(ev1.stake_after == 900);
  CHECK(ev1.height == 5);

  auto [twice, ev2] = slash(once, params, SlashReason::InvalidBlock, 6);
  CHECK(twice.stake == 810);
  CHECK(ev2.reason == SlashReason::InvalidBlock);

  auto [broke, ev3] = slash(make_validator(1, 0, 0, rng), params, SlashReason::DoubleSign, 7);
  CHECK(broke.stake == 0);
  CHECK(!ev3.applied);  // warning no-op
}

TEST_CASE("repeated slashing decreases monotonically and never goes negative") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    ConsensusParams params;
    params.slash_penalty = Ratio(static_cast<int64_t>(rng.uniform_int(1, 99)), 100);
    Validator v = make_validator(0, rng.uniform_int(1, 1'000'000), 0, rng);
    int64_t prev = v.stake;
    for (int i = 0; i < 200 && v.stake > 0; ++i) {
      auto [next, ev] = slash(v, params, SlashReason::DoubleSign, static_cast<uint64_t>(i));
      v = std::move(next);
      CHECK(v.stake >= 0);
      CHECK(v.stake < prev);
      prev = v.stake;
    }
  }
}

TEST_CASE("attack cost reproduces the published economics exactly") {
  ConsensusParams params;  // alpha 0.5, fee 0.01%
  AttackCostReport r = attack_cost(100'000'000, params, Ratio(1, 100), 5'000);
  CHECK(r.weight_gain == 1'000'000);
  CHECK(r.required_activity == 2'000'000);
  CHECK(r.sham_volume == 20'000'000'000);
  CHECK(r.fee_cost == 2'000'000);
  CHECK(!r.profitable);

  AttackCostReport free_lunch = attack_cost(100'000'000, params, Ratio(0, 1), 5'000);
  CHECK(free_lunch.required_activity == 0);
  CHECK(free_lunch.fee_cost == 0);
  CHECK(free_lunch.profitable);  // any positive reward beats zero cost

  std::string json = r.to_json();
  CHECK(json.find("\"sham_volume\":20000000000") != std::string::npos);
  CHECK(json.find("\"profitable\":false") != std::string::npos);
}

TEST_CASE("attack cost scales linearly in gain and inversely in fee rate") {
  ConsensusParams params;
  AttackCostReport base = attack_cost(100'000'000, params, Ratio(1, 100), 0);
  for (int64_t k : {2, 3, 5}) {
    AttackCostReport scaled = attack_cost(100'000'000, params, Ratio(k, 100), 0);
    CHECK(scaled.required_activity == k * base.required_activity);
    CHECK(scaled.sham_volume == k * base.sham_volume);
  }
  for (int64_t d : {2, 4, 10}) {
    ConsensusParams cheap = params;
    cheap.fee_rate = Ratio(1, 10'000 * d);
    AttackCostReport r = attack_cost(100'000'000, cheap, Ratio(1, 100), 0);
    CHECK(r.sham_volume == d * base.sham_volume);
    CHECK(r.fee_cost == base.fee_cost);
  }
}

TEST_CASE("parameter validation rejects out-of-range fractions") {
  ConsensusParams params;
  params.validate();
  params.fee_rate = Ratio(0, 1);
  CHECK_THROWS_AS(params.validate(), std::domain_error);
  CHECK_THROWS_AS(attack_cost(100, params, Ratio(1, 100), 0), std::domain_error);
  params.fee_rate = Ratio(1, 1);
  CHECK_THROWS_AS(params.validate(), std::domain_error);
  params = ConsensusParams{};
  params.epoch_blocks = 0;
  CHECK_THROWS_AS(params.validate(), std::domain_error);
  CHECK_THROWS_AS(attack_cost(0, ConsensusParams{}, Ratio(1, 100), 0), std::domain_error);
  CHECK_THROWS_AS(attack_cost(100, ConsensusParams{}, Ratio(3, 2), 0), std::domain_error);
}

TEST_CASE("epoch reset clears activity for every validator") {
  Rng rng(10);
  std::vector<Validator> vals;
  for (uint64_t i = 0; i < 5; ++i) vals.push_back(make_validator(i, 100, 50 + (int64_t)i, rng));
  reset_epoch_activity(vals);
  for (const Validator& v : vals) CHECK(v.activity == 0);
}
