#include "qrpl/bytes.hpp"

namespace qrpl {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::string to_hex(BytesView data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("hex string has odd length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out.push_back(static_cast<uint8_t>((hi << 4) | lo));
  }
  return out;
}

void Encoder::push_be32(uint32_t v) {
  buf_.push_back(static_cast<uint8_t>(v >> 24));
  buf_.push_back(static_cast<uint8_t>(v >> 16));
  buf_.push_back(static_cast<uint8_t>(v >> 8));
  buf_.push_back(static_cast<uint8_t>(v));
}

void Encoder::push_be64(uint64_t v) {
  push_be32(static_cast<uint32_t>(v >> 32));
  push_be32(static_cast<uint32_t>(v));
}

Encoder& Encoder::bytes(BytesView data) {
  if (data.size() > 0xffffffffull) throw std::length_error("field too large");
  push_be32(static_cast<uint32_t>(data.size()));
  buf_.insert(buf_.end(), data.begin(), data.end());
  return *this;
}

Encoder& Encoder::u64(uint64_t v) {
  push_be32(8);
  push_be64(v);
  return *this;
}

Encoder& Encoder::raw32(BytesView data) {
  if (data.size() != 32) throw std::length_error("raw32 field must be 32 bytes");
  buf_.insert(buf_.end(), data.begin(), data.end());
  return *this;
}

Encoder& Encoder::flag(bool b) {
  push_be32(1);
  buf_.push_back(b ? 1 : 0);
  return *this;
}

BytesView Decoder::take(size_t n) {
  if (data_.size() - pos_ < n) throw DecodeError("truncated payload");
  BytesView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

uint32_t Decoder::take_be32() {
  BytesView b = take(4);
  return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

uint64_t Decoder::take_be64() {
  uint64_t hi = take_be32();
  uint64_t lo = take_be32();
  return (hi << 32) | lo;
}

Bytes Decoder::bytes() {
  uint32_t len = take_be32();
  BytesView b = take(len);
  return Bytes(b.begin(), b.end());
}

std::string Decoder::str() {
  Bytes b = bytes();
  return std::string(b.begin(), b.end());
}

uint64_t Decoder::u64() {
  if (take_be32() != 8) throw DecodeError("expected 8-byte integer field");
  return take_be64();
}

uint32_t Decoder::u32() {
  uint64_t v = u64();
  if (v > 0xffffffffull) throw DecodeError("integer field out of u32 range");
  return static_cast<uint32_t>(v);
}

Bytes Decoder::raw32() {
  BytesView b = take(32);
  return Bytes(b.begin(), b.end());
}

bool Decoder::flag() {
  if (take_be32() != 1) throw DecodeError("expected 1-byte flag field");
  uint8_t v = take(1)[0];
  if (v > 1) throw DecodeError("flag field not 0/1");
  return v == 1;
}

void Decoder::skip(size_t n) { take(n); }

void Decoder::expect_done() const {
  if (!done()) throw DecodeError("trailing bytes after payload");
}

}  // namespace qrpl
