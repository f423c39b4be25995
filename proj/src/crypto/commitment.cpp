#include "qrpl/crypto/commitment.hpp"

#include <stdexcept>

namespace qrpl::crypto {

Commitment commit(int64_t value, BytesView blinding) {
  if (value < 0) throw std::domain_error("commit: value must be non-negative");
  if (blinding.size() != 32) throw std::invalid_argument("commit: blinding must be 32 bytes");
  Encoder enc;
  enc.str("qrpl.commit").i64(value).raw32(blinding);
  return Commitment{hash(enc.view())};
}

bool open(const Commitment& commitment, int64_t value, BytesView blinding) {
  if (value < 0 || blinding.size() != 32) return false;
  return commit(value, blinding).digest == commitment.digest;
}

}  // namespace qrpl::crypto
