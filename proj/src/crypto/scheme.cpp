#include "qrpl/crypto/scheme.hpp"

namespace qrpl::crypto {

namespace {
constexpr std::string_view kPkLabel = "qrpl.pk";
constexpr std::string_view kSigLabel = "qrpl.sig";
constexpr std::string_view kEpkLabel = "qrpl.epk";
}  // namespace

const SchemeProfile& ecdsa_p256() {
  static const SchemeProfile p{"ECDSA-P256", 32, 64, 10000, 5000, 128};
  return p;
}

const SchemeProfile& dilithium2() {
  static const SchemeProfile p{"Dilithium-2", 1312, 2420, 12000, 6000, 128};
  return p;
}

const SchemeProfile& falcon512() {
  static const SchemeProfile p{"Falcon-512", 897, 666, 8000, 7000, 128};
  return p;
}

const SchemeProfile* find_profile(std::string_view name) {
  for (const SchemeProfile* p : {&ecdsa_p256(), &dilithium2(), &falcon512()}) {
    if (p->name == name) return p;
  }
  return nullptr;
}

Bytes public_key_for_secret(BytesView secret, size_t public_key_bytes) {
  if (secret.empty()) throw MalformedKeyError("secret key must be non-empty");
  return expand(kPkLabel, secret, public_key_bytes);
}

KeyPair keypair_from_secret(BytesView secret, const SchemeProfile& profile) {
  if (secret.empty()) throw MalformedKeyError("secret key must be non-empty");
  KeyPair kp;
  kp.secret_key = Bytes(secret.begin(), secret.end());
  kp.public_key = public_key_for_secret(secret, profile.public_key_bytes);
  kp.profile = &profile;
  return kp;
}

KeyPair generate_keypair(Rng& rng, const SchemeProfile& profile) {
  return keypair_from_secret(rng.bytes(32), profile);
}

KeyPair derive_ephemeral(BytesView sender_sk, BytesView recipient_pk, const SchemeProfile& profile) {
  if (sender_sk.empty()) throw MalformedKeyError("sender secret key must be non-empty");
  if (recipient_pk.empty()) throw MalformedKeyError("recipient public key must be non-empty");
  HashDigest shared = hash_parts(kEpkLabel, {sender_sk, recipient_pk});
  return keypair_from_secret(shared.view(), profile);
}

KeyPair derive_ephemeral(BytesView sender_sk, BytesView recipient_pk, uint64_t nonce,
                         const SchemeProfile& profile) {
  if (sender_sk.empty()) throw MalformedKeyError("sender secret key must be non-empty");
  if (recipient_pk.empty()) throw MalformedKeyError("recipient public key must be non-empty");
  Encoder enc;
  enc.str(kEpkLabel).bytes(sender_sk).bytes(recipient_pk).u64(nonce);
  return keypair_from_secret(hash(enc.view()).view(), profile);
}

namespace {
Signature compute_tag(BytesView message, BytesView public_key, uint32_t sig_len) {
  // The MAC is keyed on the public key so holders of the key material can
  // check it; the output length is bound into the derivation, so a truncated
  // or extended signature never matches.
  Encoder enc;
  enc.bytes(public_key).raw32(hash(message).view()).u64(sig_len);
  return expand(kSigLabel, enc.view(), sig_len);
}
}  // namespace

Signature sign(BytesView message, const KeyPair& keypair) {
  if (keypair.profile == nullptr || keypair.public_key.empty()) {
    throw MalformedKeyError("keypair missing profile or public key");
  }
  if (keypair.public_key.size() != keypair.profile->public_key_bytes) {
    throw MalformedKeyError("public key length does not match profile");
  }
  return compute_tag(message, keypair.public_key, keypair.profile->signature_bytes);
}

bool verify(BytesView message, BytesView signature, BytesView public_key,
            const SchemeProfile& profile) {
  if (signature.size() != profile.signature_bytes) return false;
  if (public_key.size() != profile.public_key_bytes) return false;
  Signature expected = compute_tag(message, public_key, profile.signature_bytes);
  return std::equal(expected.begin(), expected.end(), signature.begin());
}

}  // namespace qrpl::crypto
