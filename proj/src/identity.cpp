#include "wot/identity.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <string_view>

#include "wot/error.hpp"

namespace wot {
namespace {

constexpr std::array<std::uint8_t, kSchemeTagSize> kEd25519Tag = {'e', 'd', '2', '5', '5',
                                                                 '1', '9', 0,   0,   0};

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error(ErrorCode::InvalidArgument, "libsodium failed to initialise");
  });
}

// Returns false if the envelope does not hold an Ed25519 key.
bool unwrap_ed25519(const PublicKey& key, std::array<std::uint8_t, kRawKeySize>& raw) {
  if (!std::equal(kEd25519Tag.begin(), kEd25519Tag.end(), key.bytes.begin())) return false;
  auto padding_begin = key.bytes.begin() + kSchemeTagSize + kRawKeySize;
  if (!std::all_of(padding_begin, key.bytes.end(), [](std::uint8_t b) { return b == 0; })) {
    return false;
  }
  std::copy_n(key.bytes.begin() + kSchemeTagSize, kRawKeySize, raw.begin());
  return true;
}

constexpr std::string_view kStreamLabel = "wot-test-stream";
constexpr std::string_view kTagLabel = "wot-test-tag";

// BLAKE2b-256 over label || recipient || nonce || body.
std::array<std::uint8_t, 32> keyed_hash(std::string_view label, const PublicKey& recipient, ByteView nonce,
                                        ByteView body) {
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, 32);
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(label.data()), label.size());
  crypto_generichash_update(&st, recipient.bytes.data(), recipient.bytes.size());
  crypto_generichash_update(&st, nonce.data(), nonce.size());
  crypto_generichash_update(&st, body.data(), body.size());
  std::array<std::uint8_t, 32> out{};
  crypto_generichash_final(&st, out.data(), out.size());
  return out;
}

void apply_keystream(const PublicKey& recipient, ByteView nonce, std::span<std::uint8_t> data) {
  auto key = keyed_hash(kStreamLabel, recipient, nonce, {});
  std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> zero_nonce{};
  crypto_stream_chacha20_xor(data.data(), data.data(), data.size(), zero_nonce.data(), key.data());
}

}  // namespace

Digest sha256(ByteView data) {
  ensure_sodium();
  Digest out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

PublicKey PublicKey::from_bytes(ByteView data) {
  if (data.size() != kPublicKeySize) {
    throw Error(ErrorCode::Length, "public key must be 74 octets, got " + std::to_string(data.size()),
                data.size());
  }
  PublicKey k;
  std::copy(data.begin(), data.end(), k.bytes.begin());
  return k;
}

std::string encode_key_hex(const PublicKey& key) { return to_hex(key.bytes); }

PublicKey decode_key_hex(std::string_view text) {
  if (text.size() != kPublicKeyHexSize) {
    throw Error(ErrorCode::Length,
                "key must be 148 hex characters, got " + std::to_string(text.size()), text.size());
  }
  return PublicKey::from_bytes(from_hex(text));
}

Identity generate_identity(ByteView seed) {
  if (seed.size() != kSeedSize) {
    throw Error(ErrorCode::Length, "seed must be 32 octets, got " + std::to_string(seed.size()),
                seed.size());
  }
  ensure_sodium();
  Identity id;
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> raw{};
  crypto_sign_seed_keypair(raw.data(), id.secret_.data(), seed.data());
  std::copy(kEd25519Tag.begin(), kEd25519Tag.end(), id.public_.bytes.begin());
  std::copy(raw.begin(), raw.end(), id.public_.bytes.begin() + kSchemeTagSize);
  return id;
}

Signature sign(const Identity& identity, ByteView message) {
  ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                       identity.secret_.data());
  return sig;
}

bool verify(const PublicKey& key, ByteView message, const Signature& signature) {
  ensure_sodium();
  std::array<std::uint8_t, kRawKeySize> raw{};
  if (!unwrap_ed25519(key, raw)) return false;
  return crypto_sign_verify_detached(signature.bytes.data(), message.data(), message.size(),
                                     raw.data()) == 0;
}

Bytes TestCipher::seal(const PublicKey& recipient, ByteView plaintext) const {
  ensure_sodium();
  std::array<std::uint8_t, kNonceSize> nonce{};
  crypto_generichash(nonce.data(), nonce.size(), plaintext.data(), plaintext.size(), nullptr, 0);

  Bytes out;
  out.reserve(plaintext.size() + kOverhead);
  put_bytes(out, nonce);
  put_bytes(out, plaintext);
  apply_keystream(recipient, nonce, std::span(out).subspan(kNonceSize));
  auto tag = keyed_hash(kTagLabel, recipient, nonce, ByteView(out).subspan(kNonceSize));
  put_bytes(out, tag);
  return out;
}

Bytes TestCipher::open(const Identity& identity, ByteView ciphertext) const {
  if (ciphertext.size() < kOverhead) {
    throw Error(ErrorCode::Authentication, "sealed message shorter than cipher overhead");
  }
  auto nonce = ciphertext.first(kNonceSize);
  auto body = ciphertext.subspan(kNonceSize, ciphertext.size() - kOverhead);
  auto tag = ciphertext.last(kTagSize);
  ensure_sodium();
  auto expected = keyed_hash(kTagLabel, identity.public_key(), nonce, body);
  if (!std::equal(expected.begin(), expected.end(), tag.begin())) {
    throw Error(ErrorCode::Authentication, "sealed message not addressed to this identity");
  }
  Bytes plain(body.begin(), body.end());
  apply_keystream(identity.public_key(), nonce, plain);
  return plain;
}

std::size_t SealedBoxCipher::overhead() const { return crypto_box_SEALBYTES; }

Bytes SealedBoxCipher::seal(const PublicKey& recipient, ByteView plaintext) const {
  ensure_sodium();
  std::array<std::uint8_t, kRawKeySize> ed{};
  if (!unwrap_ed25519(recipient, ed)) {
    throw Error(ErrorCode::InvalidArgument, "recipient key is not an ed25519 envelope");
  }
  std::array<std::uint8_t, crypto_box_PUBLICKEYBYTES> curve{};
  if (crypto_sign_ed25519_pk_to_curve25519(curve.data(), ed.data()) != 0) {
    throw Error(ErrorCode::InvalidArgument, "recipient key is not a valid curve point");
  }
  Bytes out(plaintext.size() + crypto_box_SEALBYTES);
  crypto_box_seal(out.data(), plaintext.data(), plaintext.size(), curve.data());
  return out;
}

Bytes SealedBoxCipher::open(const Identity& identity, ByteView ciphertext) const {
  ensure_sodium();
  if (ciphertext.size() < crypto_box_SEALBYTES) {
    throw Error(ErrorCode::Authentication, "sealed box shorter than overhead");
  }
  std::array<std::uint8_t, kRawKeySize> ed{};
  std::array<std::uint8_t, crypto_box_PUBLICKEYBYTES> curve_pk{};
  std::array<std::uint8_t, crypto_box_SECRETKEYBYTES> curve_sk{};
  if (!unwrap_ed25519(identity.public_key(), ed) ||
      crypto_sign_ed25519_pk_to_curve25519(curve_pk.data(), ed.data()) != 0) {
    throw Error(ErrorCode::Authentication, "identity has no curve25519 form");
  }
  crypto_sign_ed25519_sk_to_curve25519(curve_sk.data(), identity.secret_.data());
  Bytes out(ciphertext.size() - crypto_box_SEALBYTES);
  int rc = crypto_box_seal_open(out.data(), ciphertext.data(), ciphertext.size(), curve_pk.data(),
                                curve_sk.data());
  sodium_memzero(curve_sk.data(), curve_sk.size());
  if (rc != 0) throw Error(ErrorCode::Authentication, "sealed box could not be opened");
  return out;
}

}  // namespace wot
