#include "edgeshare/bytes.hpp"

namespace edgeshare {

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::parse_error, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::parse_error, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto v = take(2);
  return static_cast<std::uint16_t>(v[0] << 8 | v[1]);
}

std::uint32_t ByteReader::u32() {
  auto v = take(4);
  std::uint32_t out = 0;
  for (auto b : v) out = out << 8 | b;
  return out;
}

std::uint64_t ByteReader::u64() {
  auto v = take(8);
  std::uint64_t out = 0;
  for (auto b : v) out = out << 8 | b;
  return out;
}

ByteView ByteReader::take(std::size_t n) {
  if (n > remaining()) throw Error(ErrorCode::parse_error, "truncated input");
  ByteView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

}  // namespace edgeshare
