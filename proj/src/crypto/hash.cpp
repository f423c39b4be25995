#include "qrpl/crypto/hash.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace qrpl::crypto {

namespace {

struct CtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

EVP_MD_CTX* local_ctx() {
  thread_local std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx(EVP_MD_CTX_new());
  return ctx.get();
}

}  // namespace

HashDigest hash(BytesView data) {
  HashDigest out;
  EVP_MD_CTX* ctx = local_ctx();
  unsigned int len = 0;
  if (EVP_DigestInit_ex(ctx, EVP_sha3_256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, out.bytes.data(), &len) != 1 || len != 32) {
    throw std::runtime_error("sha3-256 digest failed");
  }
  return out;
}

HashDigest HashDigest::from_hex(std::string_view hex) {
  Bytes b = qrpl::from_hex(hex);
  if (b.size() != 32) throw DecodeError("digest hex must decode to 32 bytes");
  HashDigest d;
  std::copy(b.begin(), b.end(), d.bytes.begin());
  return d;
}

HashDigest hash_parts(std::string_view label, std::initializer_list<BytesView> parts) {
  Encoder enc;
  enc.str(label);
  for (BytesView p : parts) enc.bytes(p);
  return hash(enc.view());
}

Bytes expand(std::string_view label, BytesView seed, size_t out_len) {
  Bytes out;
  out.reserve(out_len);
  uint32_t counter = 0;
  while (out.size() < out_len) {
    Encoder enc;
    enc.str(label).bytes(seed).u64(out_len).u64(counter++);
    HashDigest block = hash(enc.view());
    size_t need = std::min<size_t>(32, out_len - out.size());
    out.insert(out.end(), block.bytes.begin(), block.bytes.begin() + need);
  }
  return out;
}

}  // namespace qrpl::crypto
