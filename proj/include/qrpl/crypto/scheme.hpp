#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "qrpl/bytes.hpp"
#include "qrpl/crypto/hash.hpp"
#include "qrpl/rng.hpp"

namespace qrpl::crypto {

class MalformedKeyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Size/speed profile of a signature scheme. The simulated schemes reproduce
// the wire sizes and advertised rates of the real algorithms; they do not
// reproduce their security.
struct SchemeProfile {
  std::string name;
  uint32_t public_key_bytes{};
  uint32_t signature_bytes{};
  uint32_t sign_ops_per_sec{};
  uint32_t verify_ops_per_sec{};
  uint32_t security_bits{};

  bool operator==(const SchemeProfile&) const = default;
};

const SchemeProfile& ecdsa_p256();
const SchemeProfile& dilithium2();
const SchemeProfile& falcon512();

// Built-in profile by name; nullptr if unknown.
const SchemeProfile* find_profile(std::string_view name);

struct KeyPair {
  Bytes secret_key;  // 32-byte seed
  Bytes public_key;  // profile-declared length
  const SchemeProfile* profile{};

  bool operator==(const KeyPair& o) const {
    return secret_key == o.secret_key && public_key == o.public_key && profile == o.profile;
  }
};

using Signature = Bytes;

// Public key derived from a secret at an arbitrary length; ownership of a
// token is knowledge of a secret whose derivation matches the owner key.
Bytes public_key_for_secret(BytesView secret, size_t public_key_bytes);

KeyPair keypair_from_secret(BytesView secret, const SchemeProfile& profile);
KeyPair generate_keypair(Rng& rng, const SchemeProfile& profile = dilithium2());

// epk = h(sk_s || pk_r): the "+" is byte concatenation of length-prefixed
// canonical encodings, so the derivation is order-sensitive. The nonce
// overload salts the derivation so one sender can pay one recipient
// repeatedly without key reuse.
KeyPair derive_ephemeral(BytesView sender_sk, BytesView recipient_pk,
                         const SchemeProfile& profile = ecdsa_p256());
KeyPair derive_ephemeral(BytesView sender_sk, BytesView recipient_pk, uint64_t nonce,
                         const SchemeProfile& profile = ecdsa_p256());

// Keyed-hash signature expanded to the profile's exact signature length.
// Tamper-evident and length-exact; not unforgeable (simulation).
Signature sign(BytesView message, const KeyPair& keypair);
bool verify(BytesView message, BytesView signature, BytesView public_key,
            const SchemeProfile& profile);

}  // namespace qrpl::crypto
