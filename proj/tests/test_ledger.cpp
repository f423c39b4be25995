#include <set>

#include "doctest.h"
#include "qrpl/ledger/ledger.hpp"

using namespace qrpl;
using namespace qrpl::ledger;

namespace {

struct Party {
  Wallet wallet;
};

// One funded wallet on a fresh ledger.
std::pair<LedgerState, Wallet> funded_ledger(Rng& rng, std::span<const int64_t> token_values) {
  LedgerState state;
  Wallet w;
  w.keys = crypto::generate_keypair(rng, crypto::dilithium2());
  for (int64_t v : token_values) {
    const UtxoToken& t = mint_token(state, v, as_view(w.keys.public_key), as_view(rng.bytes(32)));
    w.grant(t.token_id, w.keys);
  }
  return {std::move(state), std::move(w)};
}

}  // namespace

TEST_CASE("alice pays bob: fresh unlinkable output key, accepted and applied") {
  Rng rng(1);
  auto [state, alice] = funded_ledger(rng, std::array<int64_t, 1>{10});
  Wallet bob;
  bob.keys = crypto::generate_keypair(rng, crypto::dilithium2());

  std::vector<HashDigest> inputs = alice.owned_tokens(state);
  std::vector<int64_t> values{10};
  BuiltTransaction built = create_transaction(state, alice, as_view(bob.keys.public_key), inputs,
                                              values, 0, rng);
  CHECK(validate_transaction(state, built.tx) == Verdict::Accept);
  CHECK(built.tx.outputs.size() == 1);
  CHECK(built.tx.outputs[0].value == 10);
  // Bob's output owner key is not any key Alice has used before.
  CHECK(built.tx.outputs[0].owner_epk != alice.keys.public_key);
  CHECK(built.tx.outputs[0].owner_epk != bob.keys.public_key);

  apply_transaction(state, built.tx);
  for (const HashDigest& id : inputs) {
    CHECK(state.spent_log.contains(id));
    CHECK(!state.unspent.contains(id));
  }
  CHECK(state.total_supply == 10);
}

TEST_CASE("value imbalance raises the literal construction error") {
  Rng rng(2);
  auto [state, alice] = funded_ledger(rng, std::array<int64_t, 1>{100});
  std::vector<HashDigest> inputs = alice.owned_tokens(state);
  std::vector<int64_t> values{90};
  try {
    create_transaction(state, alice, as_view(alice.keys.public_key), inputs, values, 5, rng);
    FAIL("expected ImbalanceError");
  } catch (const ImbalanceError& e) {
    CHECK(std::string(e.what()).find("Value imbalance in transaction") != std::string::npos);
  }
}

TEST_CASE("default fee policy charges 0.01%") {
  CHECK(default_fee(1'000'000) == 100);
  CHECK(default_fee(10'000) == 1);
  CHECK(default_fee(9'999) == 0);
  CHECK_THROWS_AS(default_fee(-1), std::domain_error);
}

TEST_CASE("construction rejects unknown inputs, negative fees, zero inputs") {
  Rng rng(3);
  auto [state, alice] = funded_ledger(rng, std::array<int64_t, 1>{50});
  std::vector<HashDigest> inputs = alice.owned_tokens(state);
  std::vector<int64_t> values{50};

  CHECK_THROWS_AS(create_transaction(state, alice, as_view(alice.keys.public_key),
                                     std::vector<HashDigest>{crypto::hash(to_bytes("nope"))},
                                     values, 0, rng),
                  UnknownInputError);
  CHECK_THROWS_AS(create_transaction(state, alice, as_view(alice.keys.public_key), inputs, values,
                                     -1, rng),
                  std::domain_error);
  CHECK_THROWS_AS(create_transaction(state, alice, as_view(alice.keys.public_key),
                                     std::vector<HashDigest>{}, values, 0, rng),
                  UnknownInputError);
}

TEST_CASE("validation verdicts carry the first failed check") {
  Rng rng(4);
  auto [state, alice] = funded_ledger(rng, std::array<int64_t, 2>{60, 40});
  Wallet bob;
  bob.keys = crypto::generate_keypair(rng, crypto::dilithium2());
  std::vector<HashDigest> inputs = alice.owned_tokens(state);
  std::vector<int64_t> values{99};
  BuiltTransaction built =
      create_transaction(state, alice, as_view(bob.keys.public_key), inputs, values, 1, rng);

  SUBCASE("honest transaction accepts") {
    CHECK(validate_transaction(state, built.tx) == Verdict::Accept);
  }
  SUBCASE("replay after apply is a double spend") {
    apply_transaction(state, built.tx);
    CHECK(validate_transaction(state, built.tx) == Verdict::DoubleSpend);
  }
  SUBCASE("unknown input") {
    Transaction tx = built.tx;
    tx.inputs[0] = crypto::hash(to_bytes("never-minted"));
    CHECK(validate_transaction(state, tx) == Verdict::UnknownInput);
  }
  SUBCASE("duplicate input inside one transaction is a double spend") {
    Transaction tx = built.tx;
    tx.inputs[1] = tx.inputs[0];
    CHECK(validate_transaction(state, tx) == Verdict::DoubleSpend);
  }
  SUBCASE("tampered output value is an imbalance") {
    Transaction tx = built.tx;
    tx.outputs[0].value += 1;
    CHECK(validate_transaction(state, tx) == Verdict::Imbalance);
  }
  SUBCASE("adversarial-mode proof is rejected as BadProof") {
    Transaction tx = built.tx;
    // A prover without a satisfying witness can only emit in adversarial
    // mode; the digest binds but the artifact carries valid_flag=false.
    crypto::Statement st = tx_statement(tx.tx_hash);
    st.predicate = [](const crypto::Witness&) { return false; };
    tx.zk_proof = crypto::prove(st, {}, rng, crypto::ProverMode::Adversarial);
    CHECK(validate_transaction(state, tx) == Verdict::BadProof);
  }
  SUBCASE("proof bound to a different transaction is BadProof") {
    Transaction tx = built.tx;
    tx.zk_proof.statement_digest.bytes[5] ^= 1;
    CHECK(validate_transaction(state, tx) == Verdict::BadProof);
  }
  SUBCASE("tampered signature is BadSignature") {
    Transaction tx = built.tx;
    tx.signature[100] ^= 1;
    CHECK(validate_transaction(state, tx) == Verdict::BadSignature);
  }
  SUBCASE("foreign signing key is BadSignature") {
    Transaction tx = built.tx;
    tx.sender_pk = bob.keys.public_key;
    CHECK(validate_transaction(state, tx) == Verdict::BadSignature);
  }
  SUBCASE("applying a non-Accept transaction is a protocol violation") {
    Transaction tx = built.tx;
    tx.outputs[0].value += 1;
    CHECK_THROWS_AS(apply_transaction(state, tx), ProtocolViolation);
  }
}

TEST_CASE("apply conserves value exactly: supply drops by the fee alone") {
  Rng rng(5);
  auto [state, alice] = funded_ledger(rng, std::array<int64_t, 1>{1'000'000});
  int64_t initial = state.total_supply;
  std::vector<HashDigest> inputs = alice.owned_tokens(state);
  int64_t fee = default_fee(1'000'000);
  std::vector<int64_t> values{1'000'000 - fee};
  BuiltTransaction built =
      create_transaction(state, alice, as_view(alice.keys.public_key), inputs, values, fee, rng);
  apply_transaction(state, built.tx);

  int64_t unspent_sum = 0;
  for (const auto& [id, t] : state.unspent) unspent_sum += t.value;
  CHECK(state.total_supply == initial - fee);
  CHECK(unspent_sum == state.total_supply);
}

TEST_CASE("accounting oracle: 1000 random transactions burn exactly the fees") {
  Rng rng(6);
  auto [state, alice] = funded_ledger(rng, std::array<int64_t, 4>{250'000, 250'000, 250'000, 250'000});
  Wallet bob;
  bob.keys = crypto::generate_keypair(rng, crypto::dilithium2());
  std::vector<Wallet*> parties{&alice, &bob};

  int64_t initial = state.total_supply;
  int64_t fees_paid = 0;
  int applied = 0;
  for (int i = 0; i < 1000; ++i) {
    Wallet& sender = *parties[i % 2];
    Wallet& recipient = *parties[(i + 1) % 2];
    int64_t balance = sender.balance(state);
    if (balance < 2) continue;
    int64_t amount = rng.uniform_int(1, balance / 2);
    int64_t fee = default_fee(amount);
    if (amount + fee > balance) continue;
    PaymentOutput pay{recipient.keys.public_key, amount};
    BuiltTransaction built =
        create_transaction(state, sender, std::span<const PaymentOutput>(&pay, 1), fee, rng);
    apply_transaction(state, built.tx);
    // Hand out spend keys: payment to recipient, change back to sender.
    for (size_t oi = 0; oi < built.tx.outputs.size(); ++oi) {
      (oi == 0 ? recipient : sender).grant(built.tx.outputs[oi].token_id, built.output_keys[oi]);
    }
    for (const HashDigest& id : built.tx.inputs) sender.forget(id);
    fees_paid += fee;
    ++applied;
    state.height++;
  }
  CHECK(applied > 500);

  // Brute-force recount against the incremental bookkeeping.
  int64_t unspent_sum = 0;
  for (const auto& [id, t] : state.unspent) unspent_sum += t.value;
  CHECK(state.total_supply == initial - fees_paid);
  CHECK(unspent_sum == state.total_supply);
}

TEST_CASE("unlinkability proxy: 10^3 payments from one sender use pairwise-distinct keys") {
  Rng rng(7);
  std::vector<int64_t> funding(1000, 10);
  auto [state, alice] = funded_ledger(rng, funding);
  Wallet bob;
  bob.keys = crypto::generate_keypair(rng, crypto::dilithium2());

  std::set<Bytes> output_keys;
  std::vector<HashDigest> owned = alice.owned_tokens(state);
  for (int i = 0; i < 1000; ++i) {
    std::vector<HashDigest> inputs{owned[static_cast<size_t>(i)]};
    std::vector<int64_t> values{10};
    BuiltTransaction built =
        create_transaction(state, alice, as_view(bob.keys.public_key), inputs, values, 0, rng);
    CHECK(output_keys.insert(built.tx.outputs[0].owner_epk).second);
  }
}

TEST_CASE("apply-validate is deterministic: identical inputs give byte-identical states") {
  auto run = [](uint64_t seed) {
    Rng rng(seed);
    auto [state, alice] = funded_ledger(rng, std::array<int64_t, 2>{500, 300});
    Wallet bob;
    bob.keys = crypto::generate_keypair(rng, crypto::dilithium2());
    std::vector<HashDigest> inputs = alice.owned_tokens(state);
    std::vector<int64_t> values{799};
    BuiltTransaction built =
        create_transaction(state, alice, as_view(bob.keys.public_key), inputs, values, 1, rng);
    apply_transaction(state, built.tx);
    return state.encode();
  };
  CHECK(run(42) == run(42));
}

TEST_CASE("prune honors the challenge period boundary") {
  Rng rng(8);
  auto [state, alice] = funded_ledger(rng, std::array<int64_t, 1>{10});
  PruningConfig config{100};

  SUBCASE("prune on empty spent log is a no-op") {
    LedgerState before = state;
    prune(state, config);
    CHECK(state == before);
  }

  SUBCASE("entries survive exactly the challenge period") {
    std::vector<HashDigest> inputs = alice.owned_tokens(state);
    std::vector<int64_t> values{10};
    BuiltTransaction built =
        create_transaction(state, alice, as_view(alice.keys.public_key), inputs, values, 0, rng);
    state.height = 50;
    apply_transaction(state, built.tx);  // spent at height 50
    HashDigest spent_id = inputs[0];

    state.height = 150;  // age == period: retained
    prune(state, config);
    CHECK(state.spent_log.contains(spent_id));
    CHECK(validate_transaction(state, built.tx) == Verdict::DoubleSpend);

    state.height = 151;  // age > period: discarded
    prune(state, config);
    CHECK(!state.spent_log.contains(spent_id));
    // Unspent set untouched; the stale double-spend degrades to UnknownInput.
    CHECK(state.unspent.size() == 1);
    CHECK(validate_transaction(state, built.tx) == Verdict::UnknownInput);
  }

  SUBCASE("a valid transaction still validates after pruning") {
    std::vector<HashDigest> inputs = alice.owned_tokens(state);
    std::vector<int64_t> values{10};
    BuiltTransaction built =
        create_transaction(state, alice, as_view(alice.keys.public_key), inputs, values, 0, rng);
    state.height = 10'000;
    prune(state, config);
    CHECK(validate_transaction(state, built.tx) == Verdict::Accept);
  }
}

TEST_CASE("property: no token id is consumed twice across randomized sequences") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Rng trial_rng = rng.fork(static_cast<uint64_t>(trial));
    std::vector<int64_t> funding{1000, 800, 600};
    auto [state, alice] = funded_ledger(trial_rng, funding);
    PruningConfig config{5};
    std::set<HashDigest> consumed;
    for (int op = 0; op < 60; ++op) {
      state.height++;
      double dice = trial_rng.uniform();
      if (dice < 0.6) {
        int64_t balance = alice.balance(state);
        if (balance < 2) continue;
        int64_t amount = trial_rng.uniform_int(1, balance / 2);
        PaymentOutput pay{alice.keys.public_key, amount};
        int64_t fee = default_fee(amount);
        if (amount + fee > balance) continue;
        BuiltTransaction built =
            create_transaction(state, alice, std::span<const PaymentOutput>(&pay, 1), fee, trial_rng);
        for (const HashDigest& id : built.tx.inputs) {
          CHECK(consumed.insert(id).second);  // never consumed before
        }
        apply_transaction(state, built.tx);
        for (size_t oi = 0; oi < built.tx.outputs.size(); ++oi) {
          alice.grant(built.tx.outputs[oi].token_id, built.output_keys[oi]);
        }
        for (const HashDigest& id : built.tx.inputs) alice.forget(id);
      } else if (dice < 0.8) {
        prune(state, config);
      } else {
        const UtxoToken& t = mint_token(state, trial_rng.uniform_int(1, 500),
                                        as_view(alice.keys.public_key), as_view(trial_rng.bytes(32)));
        alice.grant(t.token_id, alice.keys);
      }
    }
  }
}

TEST_CASE("snapshot export/import round trips, JSON dump is hex-addressed") {
  Rng rng(10);
  auto [state, alice] = funded_ledger(rng, std::array<int64_t, 3>{5, 6, 7});
  state.height = 12;
  Bytes snapshot = state.encode();
  LedgerState restored = LedgerState::decode(snapshot);
  CHECK(restored == state);
  CHECK(restored.encode() == snapshot);

  std::string json = state.to_json();
  CHECK(json.find("\"height\":12") != std::string::npos);
  CHECK(json.find(state.unspent.begin()->first.hex()) != std::string::npos);

  Bytes corrupt = snapshot;
  corrupt[snapshot.size() / 2] ^= 1;
  CHECK_THROWS_AS(LedgerState::decode(corrupt), DecodeError);
}

TEST_CASE("transaction wire encoding round trips") {
  Rng rng(11);
  auto [state, alice] = funded_ledger(rng, std::array<int64_t, 1>{77});
  std::vector<HashDigest> inputs = alice.owned_tokens(state);
  std::vector<int64_t> values{70, 7};
  BuiltTransaction built =
      create_transaction(state, alice, as_view(alice.keys.public_key), inputs, values, 0, rng);
  Bytes wire = built.tx.encode();
  Decoder dec(wire);
  Transaction decoded = Transaction::decode(dec);
  dec.expect_done();
  CHECK(decoded.encode() == wire);
  CHECK(validate_transaction(state, decoded) == Verdict::Accept);
}
