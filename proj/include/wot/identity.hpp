#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "wot/bytes.hpp"

namespace wot {

inline constexpr std::size_t kPublicKeySize = 74;
inline constexpr std::size_t kPublicKeyHexSize = 2 * kPublicKeySize;  // 148
inline constexpr std::size_t kSeedSize = 32;
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::size_t kDigestSize = 32;

// Key envelope: 10-octet scheme tag, raw scheme key, zero padding to 74.
inline constexpr std::size_t kSchemeTagSize = 10;
inline constexpr std::size_t kRawKeySize = 32;

using Digest = std::array<std::uint8_t, kDigestSize>;

Digest sha256(ByteView data);

struct PublicKey {
  std::array<std::uint8_t, kPublicKeySize> bytes{};

  static PublicKey from_bytes(ByteView data);

  auto operator<=>(const PublicKey&) const = default;
};

// Lowercase, always exactly 148 characters.
std::string encode_key_hex(const PublicKey& key);

// Accepts exactly 148 hex characters in either case. Errors carry the
// offending index (or the received length for length errors).
PublicKey decode_key_hex(std::string_view text);

struct Signature {
  std::array<std::uint8_t, kSignatureSize> bytes{};
  auto operator<=>(const Signature&) const = default;
};

class Identity {
 public:
  const PublicKey& public_key() const { return public_; }

  friend Identity generate_identity(ByteView seed);
  friend Signature sign(const Identity& identity, ByteView message);
  friend class SealedBoxCipher;
  friend bool operator==(const Identity& a, const Identity& b) {
    return a.public_ == b.public_ && a.secret_ == b.secret_;
  }

 private:
  Identity() = default;

  PublicKey public_;
  std::array<std::uint8_t, 64> secret_{};
};

// Deterministic Ed25519 identity from a 32-octet seed.
Identity generate_identity(ByteView seed);

Signature sign(const Identity& identity, ByteView message);

// Never throws; malformed keys (wrong scheme tag, nonzero padding, invalid
// curve point) simply fail verification.
bool verify(const PublicKey& key, ByteView message, const Signature& signature);

// Packet cipher used for sealed contact payloads.
class Cipher {
 public:
  virtual ~Cipher() = default;

  virtual Bytes seal(const PublicKey& recipient, ByteView plaintext) const = 0;

  // Throws Error(Authentication) if the ciphertext was not sealed for
  // `identity` or was altered.
  virtual Bytes open(const Identity& identity, ByteView ciphertext) const = 0;

  // |seal(x)| == |x| + overhead() for every x.
  virtual std::size_t overhead() const = 0;
};

// Deterministic keyed-stream cipher for simulation and golden tests.
// NOT cryptographically secure: the ChaCha20 keystream key is a hash of the
// recipient public key and a nonce derived from the plaintext, so anyone who
// knows the recipient key can open it. The 32-octet BLAKE2b tag binds the
// body to the recipient. Layout: nonce(8) || body || tag(32).
class TestCipher final : public Cipher {
 public:
  static constexpr std::size_t kNonceSize = 8;
  static constexpr std::size_t kTagSize = 32;
  static constexpr std::size_t kOverhead = kNonceSize + kTagSize;

  Bytes seal(const PublicKey& recipient, ByteView plaintext) const override;
  Bytes open(const Identity& identity, ByteView ciphertext) const override;
  std::size_t overhead() const override { return kOverhead; }
};

// Anonymous sealed box (X25519 + XSalsa20-Poly1305) keyed by the recipient's
// Ed25519 key converted to its Curve25519 form. Output is randomized.
class SealedBoxCipher final : public Cipher {
 public:
  Bytes seal(const PublicKey& recipient, ByteView plaintext) const override;
  Bytes open(const Identity& identity, ByteView ciphertext) const override;
  std::size_t overhead() const override;
};

}  // namespace wot
