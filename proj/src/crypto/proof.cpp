#include "qrpl/crypto/proof.hpp"

namespace qrpl::crypto {

HashDigest Statement::digest() const {
  return hash_parts("qrpl.statement", {BytesView(reinterpret_cast<const uint8_t*>(name.data()), name.size()),
                                       as_view(public_input)});
}

ProofArtifact prove(const Statement& statement, const Witness& witness, Rng& rng, ProverMode mode) {
  if (!statement.predicate) throw std::invalid_argument("prove: statement has no predicate");
  bool satisfied = statement.predicate(witness);
  if (!satisfied && mode == ProverMode::Honest) {
    throw ConstraintViolation("witness does not satisfy statement: " + statement.name);
  }
  ProofArtifact artifact;
  artifact.statement_digest = statement.digest();
  artifact.simulated_size_bytes =
      static_cast<uint32_t>(rng.uniform_int(kProofSizeMinBytes, kProofSizeMaxBytes));
  artifact.simulated_gen_ms = static_cast<uint32_t>(rng.uniform_int(kProofGenMinMs, kProofGenMaxMs));
  artifact.valid_flag = satisfied;
  return artifact;
}

bool verify_proof(const Statement& statement, const ProofArtifact& proof) {
  if (proof.simulated_size_bytes < kProofSizeMinBytes || proof.simulated_size_bytes > kProofSizeMaxBytes) return false;
  if (proof.simulated_gen_ms < kProofGenMinMs || proof.simulated_gen_ms > kProofGenMaxMs) return false;
  return proof.valid_flag && proof.statement_digest == statement.digest();
}

namespace {
// Header: digest (raw 32) + size + gen_ms + flag, encoded canonically.
constexpr size_t kProofHeaderBytes = 32 + 12 + 12 + 5;
}  // namespace

Bytes ProofArtifact::encode() const {
  Encoder enc;
  enc.raw32(statement_digest.view()).u64(simulated_size_bytes).u64(simulated_gen_ms).flag(valid_flag);
  Bytes out = enc.take();
  if (out.size() != kProofHeaderBytes) throw std::logic_error("proof header size drift");
  // Pad to the simulated wire size with deterministic filler.
  if (simulated_size_bytes < kProofHeaderBytes) throw std::logic_error("proof size below header size");
  size_t pad = simulated_size_bytes - kProofHeaderBytes;
  out.reserve(simulated_size_bytes);
  for (size_t i = 0; i < pad; ++i) out.push_back(statement_digest.bytes[i % 32]);
  return out;
}

ProofArtifact ProofArtifact::decode(Decoder& dec) {
  ProofArtifact a;
  Bytes d = dec.raw32();
  std::copy(d.begin(), d.end(), a.statement_digest.bytes.begin());
  a.simulated_size_bytes = static_cast<uint32_t>(dec.u64());
  a.simulated_gen_ms = static_cast<uint32_t>(dec.u64());
  a.valid_flag = dec.flag();
  if (a.simulated_size_bytes < kProofHeaderBytes) throw DecodeError("proof artifact size below header");
  dec.skip(a.simulated_size_bytes - kProofHeaderBytes);
  return a;
}

}  // namespace qrpl::crypto
