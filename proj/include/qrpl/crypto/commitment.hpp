#pragma once

#include <cstdint>

#include "qrpl/bytes.hpp"
#include "qrpl/crypto/hash.hpp"

namespace qrpl::crypto {

// Hash commitment to (value, blinding). Binding under collision resistance;
// hiding is not claimed by the simulation.
struct Commitment {
  HashDigest digest;

  auto operator<=>(const Commitment&) const = default;
};

Commitment commit(int64_t value, BytesView blinding);
bool open(const Commitment& commitment, int64_t value, BytesView blinding);

}  // namespace qrpl::crypto
