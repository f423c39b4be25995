#pragma once

#include "qrpl/bytes.hpp"
#include "qrpl/crypto/hash.hpp"
#include "qrpl/crypto/scheme.hpp"

namespace qrpl::crypto {

// Simulated VRF: value = h(sk || input), proof = tag over (pk, input, value).
// Unpredictable to parties without the secret key; publicly checkable by
// anyone holding the public key and input.
struct VrfOutput {
  HashDigest value;
  Bytes proof;

  double fraction() const { return value.as_fraction(); }

  bool operator==(const VrfOutput& o) const { return value == o.value && proof == o.proof; }
};

VrfOutput vrf_eval(const KeyPair& keypair, BytesView input);
bool vrf_verify(BytesView public_key, BytesView input, const VrfOutput& output);

}  // namespace qrpl::crypto
