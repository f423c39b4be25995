#include "qrpl/crypto/vrf.hpp"

namespace qrpl::crypto {

namespace {
Bytes vrf_tag(BytesView public_key, BytesView input, const HashDigest& value) {
  HashDigest tag = hash_parts("qrpl.vrf.tag", {public_key, input, value.view()});
  return Bytes(tag.bytes.begin(), tag.bytes.end());
}
}  // namespace

VrfOutput vrf_eval(const KeyPair& keypair, BytesView input) {
  if (keypair.secret_key.empty() || keypair.public_key.empty()) {
    throw MalformedKeyError("vrf_eval: malformed keypair");
  }
  VrfOutput out;
  out.value = hash_parts("qrpl.vrf.out", {as_view(keypair.secret_key), input});
  out.proof = vrf_tag(keypair.public_key, input, out.value);
  return out;
}

bool vrf_verify(BytesView public_key, BytesView input, const VrfOutput& output) {
  if (public_key.empty() || output.proof.size() != 32) return false;
  Bytes expected = vrf_tag(public_key, input, output.value);
  return std::equal(expected.begin(), expected.end(), output.proof.begin());
}

}  // namespace qrpl::crypto
