#include "qrpl/net/beacon.hpp"

#include "qrpl/bytes.hpp"

namespace qrpl::net {

BeaconChain BeaconChain::genesis(uint64_t seed) {
  Encoder enc;
  enc.str("qrpl.beacon.genesis").u64(seed);
  return BeaconChain{0, crypto::hash(enc.view())};
}

BeaconChain BeaconChain::next() const {
  Encoder enc;
  enc.raw32(value.view()).u64(round);
  return BeaconChain{round + 1, crypto::hash(enc.view())};
}

crypto::HashDigest BeaconChain::value_at(uint64_t seed, uint64_t round) {
  BeaconChain chain = genesis(seed);
  for (uint64_t i = 0; i < round; ++i) chain = chain.next();
  return chain.value;
}

}  // namespace qrpl::net
