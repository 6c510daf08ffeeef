#include "wot/bytes.hpp"

#include "wot/error.hpp"

namespace wot {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Length: return "bad length";
    case ErrorCode::InvalidCharacter: return "invalid character";
    case ErrorCode::ZeroAmount: return "zero amount";
    case ErrorCode::InsufficientBalance: return "insufficient balance";
    case ErrorCode::BadSignature: return "bad signature";
    case ErrorCode::Mislinked: return "mislinked block";
    case ErrorCode::Malformed: return "malformed";
    case ErrorCode::Oversize: return "oversize";
    case ErrorCode::Duplicate: return "duplicate";
    case ErrorCode::Authentication: return "authentication failed";
    case ErrorCode::InvalidProof: return "invalid conflict proof";
    case ErrorCode::SignerMismatch: return "signer mismatch";
    case ErrorCode::Config: return "invalid configuration";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown";
}

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (hex_value(text[i]) < 0) {
      throw Error(ErrorCode::InvalidCharacter,
                  "invalid hex character at index " + std::to_string(i), i);
    }
  }
  if (text.size() % 2 != 0) {
    throw Error(ErrorCode::Length, "odd hex length " + std::to_string(text.size()),
                text.size());
  }
  Bytes out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(hex_value(text[2 * i]) << 4 | hex_value(text[2 * i + 1]));
  }
  return out;
}

void put_u8(Bytes& out, std::uint8_t v) { out.push_back(v); }

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_bytes(Bytes& out, ByteView v) { out.insert(out.end(), v.begin(), v.end()); }

ByteView ByteReader::take(std::size_t n) {
  if (remaining() < n) {
    throw Error(ErrorCode::Malformed,
                "truncated input: need " + std::to_string(n) + " octets at offset " +
                    std::to_string(pos_),
                pos_);
  }
  auto v = data_.subspan(pos_, n);
  pos_ += n;
  return v;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto v = take(2);
  return static_cast<std::uint16_t>(v[0] << 8 | v[1]);
}

std::uint32_t ByteReader::u32() {
  std::uint32_t r = 0;
  for (auto b : take(4)) r = r << 8 | b;
  return r;
}

std::uint64_t ByteReader::u64() {
  std::uint64_t r = 0;
  for (auto b : take(8)) r = r << 8 | b;
  return r;
}

}  // namespace wot
