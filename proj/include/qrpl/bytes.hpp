#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qrpl {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_hex(BytesView data);
Bytes from_hex(std::string_view hex);

inline Bytes to_bytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

inline BytesView as_view(const Bytes& b) { return BytesView(b.data(), b.size()); }

// Canonical wire encoding. Variable-length fields are written as a 4-byte
// big-endian length followed by the content; 32-byte digests are written raw;
// integers are 8-byte big-endian fields. Structures encode their fields in
// declaration order. This encoding is the hashing preimage everywhere.
class Encoder {
 public:
  Encoder& bytes(BytesView data);
  Encoder& str(std::string_view s) { return bytes(BytesView(reinterpret_cast<const uint8_t*>(s.data()), s.size())); }
  Encoder& u64(uint64_t v);
  Encoder& i64(int64_t v) { return u64(static_cast<uint64_t>(v)); }
  Encoder& u32(uint32_t v) { return u64(v); }
  Encoder& raw32(BytesView data);  // fixed 32 bytes, no length prefix
  Encoder& flag(bool b);

  Bytes take() { return std::move(buf_); }
  const Bytes& view() const { return buf_; }

 private:
  void push_be32(uint32_t v);
  void push_be64(uint64_t v);
  Bytes buf_;
};

class Decoder {
 public:
  explicit Decoder(BytesView data) : data_(data) {}

  Bytes bytes();
  std::string str();
  uint64_t u64();
  int64_t i64() { return static_cast<int64_t>(u64()); }
  uint32_t u32();
  Bytes raw32();
  bool flag();
  void skip(size_t n);

  bool done() const { return pos_ == data_.size(); }
  void expect_done() const;

 private:
  uint32_t take_be32();
  uint64_t take_be64();
  BytesView take(size_t n);
  BytesView data_;
  size_t pos_{0};
};

}  // namespace qrpl
