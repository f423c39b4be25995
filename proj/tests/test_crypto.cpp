#include <algorithm>
#include <bit>
#include <set>

#include "doctest.h"
#include "qrpl/crypto/commitment.hpp"
#include "qrpl/crypto/hash.hpp"
#include "qrpl/crypto/proof.hpp"
#include "qrpl/crypto/scheme.hpp"
#include "qrpl/crypto/vrf.hpp"
#include "qrpl/rng.hpp"
#include "support/stats.hpp"

using namespace qrpl;
using namespace qrpl::crypto;

namespace {
int bit_difference(const HashDigest& a, const HashDigest& b) {
  int bits = 0;
  for (size_t i = 0; i < 32; ++i) bits += std::popcount(static_cast<unsigned>(a.bytes[i] ^ b.bytes[i]));
  return bits;
}
}  // namespace

TEST_CASE("hash determinism and distinctness") {
  Bytes x = to_bytes("the quick brown fox");
  CHECK(hash(x) == hash(x));
  CHECK(hash(Bytes{}) != hash(Bytes{0}));
  CHECK(hash(x).bytes.size() == 32);
}

TEST_CASE("hash avalanche: single bit flip changes >= 100 output bits on average") {
  Rng rng(7);
  double total = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    Bytes input = rng.bytes(64);
    HashDigest before = hash(input);
    size_t byte = static_cast<size_t>(rng.uniform_int(0, 63));
    int bit = static_cast<int>(rng.uniform_int(0, 7));
    input[byte] ^= static_cast<uint8_t>(1u << bit);
    total += bit_difference(before, hash(input));
  }
  CHECK(total / trials >= 100.0);
  CHECK(total / trials <= 156.0);
}

TEST_CASE("hash: no collisions over 10^6 random 64-byte inputs") {
  Rng rng(11);
  std::vector<std::array<uint8_t, 32>> digests;
  digests.reserve(1'000'000);
  for (int i = 0; i < 1'000'000; ++i) digests.push_back(hash(rng.bytes(64)).bytes);
  std::sort(digests.begin(), digests.end());
  CHECK(std::adjacent_find(digests.begin(), digests.end()) == digests.end());
}

TEST_CASE("expand binds the output length") {
  Bytes seed = to_bytes("seed");
  Bytes a = expand("t", seed, 64);
  Bytes b = expand("t", seed, 128);
  CHECK(a.size() == 64);
  CHECK(b.size() == 128);
  CHECK(!std::equal(a.begin(), a.end(), b.begin()));  // not a prefix
}

TEST_CASE("ephemeral derivation: deterministic, recipient-sensitive, order-sensitive") {
  Bytes sk = to_bytes("alice-secret");
  Bytes pk_b = to_bytes("bob-public");
  Bytes pk_c = to_bytes("carol-public");

  CHECK(derive_ephemeral(sk, pk_b).public_key == derive_ephemeral(sk, pk_b).public_key);
  CHECK(derive_ephemeral(sk, pk_b).public_key != derive_ephemeral(sk, pk_c).public_key);
  CHECK(derive_ephemeral(sk, pk_b).public_key != derive_ephemeral(pk_b, sk).public_key);

  CHECK_THROWS_AS(derive_ephemeral(Bytes{}, pk_b), MalformedKeyError);
  CHECK_THROWS_AS(derive_ephemeral(sk, Bytes{}), MalformedKeyError);
}

TEST_CASE("ephemeral derivation: distinct recipients never collide over 10^4 trials") {
  Rng rng(13);
  Bytes sk = rng.bytes(32);
  std::set<Bytes> seen;
  for (int i = 0; i < 10'000; ++i) {
    CHECK(seen.insert(derive_ephemeral(sk, rng.bytes(32)).public_key).second);
  }
}

TEST_CASE("scheme profiles carry the published sizes") {
  CHECK(ecdsa_p256().public_key_bytes == 32);
  CHECK(ecdsa_p256().signature_bytes == 64);
  CHECK(dilithium2().public_key_bytes == 1312);
  CHECK(dilithium2().signature_bytes == 2420);
  CHECK(falcon512().public_key_bytes == 897);
  CHECK(falcon512().signature_bytes == 666);
  for (const SchemeProfile* p : {&ecdsa_p256(), &dilithium2(), &falcon512()}) {
    CHECK(p->sign_ops_per_sec > 0);
    CHECK(p->verify_ops_per_sec > 0);
    CHECK(p->security_bits == 128);
    CHECK(find_profile(p->name) == p);
  }
  CHECK(find_profile("RSA-4096") == nullptr);
}

TEST_CASE("sign/verify round trip with exact wire sizes") {
  Rng rng(17);
  Bytes msg = to_bytes("transfer 10 units");

  KeyPair kd = generate_keypair(rng, dilithium2());
  Signature sig = sign(msg, kd);
  CHECK(sig.size() == 2420);
  CHECK(kd.public_key.size() == 1312);
  CHECK(verify(msg, sig, as_view(kd.public_key), dilithium2()));

  Bytes tampered = msg;
  tampered[0] ^= 0x01;
  CHECK(!verify(tampered, sig, as_view(kd.public_key), dilithium2()));

  KeyPair kf = generate_keypair(rng, falcon512());
  CHECK(sign(msg, kf).size() == 666);

  // Length mismatch is a false verdict, not an exception.
  Bytes truncated(sig.begin(), sig.end() - 1);
  CHECK(!verify(msg, truncated, as_view(kd.public_key), dilithium2()));
}

TEST_CASE("verification fails on any single-bit mutation") {
  Rng rng(19);
  KeyPair kp = generate_keypair(rng, falcon512());
  Bytes msg = rng.bytes(48);
  Signature sig = sign(msg, kp);
  for (int trial = 0; trial < 1000; ++trial) {
    int which = static_cast<int>(rng.uniform_int(0, 2));
    Bytes m = msg, s = sig, p = kp.public_key;
    Bytes& target = which == 0 ? m : which == 1 ? s : p;
    size_t byte = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(target.size()) - 1));
    target[byte] ^= static_cast<uint8_t>(1u << rng.uniform_int(0, 7));
    CHECK(!verify(m, s, p, falcon512()));
  }
}

TEST_CASE("commitment round trip and binding") {
  Rng rng(23);
  Bytes r = rng.bytes(32);
  Bytes r2 = rng.bytes(32);
  Commitment c = commit(10, r);
  CHECK(open(c, 10, r));
  CHECK(!open(c, 11, r));
  CHECK(!open(c, 10, r2));
  CHECK_THROWS_AS(commit(-1, r), std::domain_error);
}

TEST_CASE("commitment binding holds over random opening attempts") {
  Rng rng(29);
  for (int i = 0; i < 200; ++i) {
    int64_t v = rng.uniform_int(0, 1'000'000);
    Bytes r = rng.bytes(32);
    Commitment c = commit(v, r);
    int64_t v2 = rng.uniform_int(0, 1'000'000);
    Bytes r2 = rng.bytes(32);
    if (v2 == v) continue;
    CHECK(!open(c, v2, r));
    CHECK(!open(c, v, r2));
  }
}

TEST_CASE("vrf: determinism, round trip, tamper rejection") {
  Rng rng(31);
  KeyPair kp = generate_keypair(rng, ecdsa_p256());
  Bytes input = to_bytes("round-7");

  VrfOutput a = vrf_eval(kp, input);
  VrfOutput b = vrf_eval(kp, input);
  CHECK(a == b);
  CHECK(vrf_verify(as_view(kp.public_key), input, a));

  VrfOutput forged = a;
  forged.value.bytes[0] ^= 1;
  CHECK(!vrf_verify(as_view(kp.public_key), input, forged));
  VrfOutput cut = a;
  cut.proof.pop_back();
  CHECK(!vrf_verify(as_view(kp.public_key), input, cut));
  CHECK(!vrf_verify(as_view(kp.public_key), to_bytes("round-8"), a));
}

TEST_CASE("vrf output is uniform: chi-square over 2^10 buckets, 10^5 samples") {
  Rng rng(37);
  KeyPair kp = generate_keypair(rng, ecdsa_p256());
  std::vector<uint64_t> buckets(1024, 0);
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    Encoder enc;
    enc.u64(static_cast<uint64_t>(i));
    VrfOutput out = vrf_eval(kp, enc.view());
    buckets[static_cast<size_t>(out.fraction() * 1024.0)]++;
  }
  double chi2 = teststats::chi2_statistic(buckets, n / 1024.0);
  CHECK(teststats::chi2_pvalue(chi2, 1023.0) > 0.001);
}

namespace {
Statement trivial_statement(bool outcome) {
  Statement st;
  st.name = "test.trivial";
  st.public_input = to_bytes(outcome ? "sat" : "unsat");
  st.predicate = [outcome](const Witness&) { return outcome; };
  return st;
}
}  // namespace

TEST_CASE("proof simulation: honest path, digest binding, adversarial mode") {
  Rng rng(41);
  Statement st = trivial_statement(true);
  ProofArtifact proof = prove(st, {}, rng);
  CHECK(verify_proof(st, proof));

  Statement other = trivial_statement(true);
  other.public_input = to_bytes("different");
  CHECK(!verify_proof(other, proof));

  Statement bad = trivial_statement(false);
  CHECK_THROWS_AS(prove(bad, {}, rng, ProverMode::Honest), ConstraintViolation);
  ProofArtifact forged = prove(bad, {}, rng, ProverMode::Adversarial);
  CHECK(!forged.valid_flag);
  CHECK(!verify_proof(bad, forged));
}

TEST_CASE("proof samples stay inside the modeled ranges with mean gen time in [300, 400] ms") {
  Rng rng(43);
  Statement st = trivial_statement(true);
  double total_ms = 0;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) {
    ProofArtifact p = prove(st, {}, rng);
    CHECK(p.simulated_size_bytes >= kProofSizeMinBytes);
    CHECK(p.simulated_size_bytes <= kProofSizeMaxBytes);
    CHECK(p.simulated_gen_ms >= kProofGenMinMs);
    CHECK(p.simulated_gen_ms <= kProofGenMaxMs);
    total_ms += p.simulated_gen_ms;
  }
  double mean = total_ms / n;
  CHECK(mean >= 300.0);
  CHECK(mean <= 400.0);
}

TEST_CASE("proof artifact wire form occupies exactly the simulated size") {
  Rng rng(47);
  Statement st = trivial_statement(true);
  ProofArtifact p = prove(st, {}, rng);
  Bytes wire = p.encode();
  CHECK(wire.size() == p.simulated_size_bytes);
  Decoder dec(wire);
  ProofArtifact q = ProofArtifact::decode(dec);
  dec.expect_done();
  CHECK(p == q);
}

TEST_CASE("equal seeds produce bit-identical artifacts") {
  Statement st = trivial_statement(true);
  auto run = [&](uint64_t seed) {
    Rng rng(seed);
    KeyPair kp = generate_keypair(rng, dilithium2());
    Bytes msg = rng.bytes(64);
    ProofArtifact p = prove(st, {}, rng);
    Encoder enc;
    enc.bytes(as_view(kp.public_key)).bytes(as_view(sign(msg, kp))).bytes(as_view(p.encode()));
    return enc.take();
  };
  CHECK(run(99) == run(99));
  CHECK(run(99) != run(100));
}
