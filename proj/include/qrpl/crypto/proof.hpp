#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "qrpl/bytes.hpp"
#include "qrpl/crypto/hash.hpp"
#include "qrpl/rng.hpp"

namespace qrpl::crypto {

class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Witness = Bytes;

// A provable statement. The digest binds (name, public_input); the predicate
// is the transparent oracle the simulated prover evaluates on the witness.
// Verifiers that only check digest binding may leave the predicate empty.
struct Statement {
  std::string name;
  Bytes public_input;
  std::function<bool(const Witness&)> predicate;

  HashDigest digest() const;
};

inline constexpr uint32_t kProofSizeMinBytes = 45'000;
inline constexpr uint32_t kProofSizeMaxBytes = 150'000;
inline constexpr uint32_t kProofGenMinMs = 200;
inline constexpr uint32_t kProofGenMaxMs = 500;

struct ProofArtifact {
  HashDigest statement_digest;
  uint32_t simulated_size_bytes{};  // [45'000, 150'000]
  uint32_t simulated_gen_ms{};      // [200, 500]
  bool valid_flag{};

  bool operator==(const ProofArtifact&) const = default;

  // Wire form: header plus deterministic padding so the encoded artifact
  // occupies exactly simulated_size_bytes, matching the modeled proof sizes.
  Bytes encode() const;
  static ProofArtifact decode(Decoder& dec);
};

enum class ProverMode { Honest, Adversarial };

// Evaluates the statement's predicate on the witness. Honest mode refuses to
// prove a false statement; adversarial mode emits an artifact with
// valid_flag=false so rejection paths can be exercised.
ProofArtifact prove(const Statement& statement, const Witness& witness, Rng& rng,
                    ProverMode mode = ProverMode::Honest);

bool verify_proof(const Statement& statement, const ProofArtifact& proof);

}  // namespace qrpl::crypto
