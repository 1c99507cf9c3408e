#ifndef PRINTSIG_SIGNING_HPP
#define PRINTSIG_SIGNING_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "printsig/fingerprint.hpp"

namespace printsig {

// Ed25519 keys in libsodium's layout (the secret key embeds the public key).
struct SecretKey {
  std::array<std::uint8_t, 64> bytes{};
  bool operator==(const SecretKey &) const = default;
};

struct PublicKey {
  std::array<std::uint8_t, 32> bytes{};
  bool operator==(const PublicKey &) const = default;
};

struct KeyPair {
  SecretKey secret;
  PublicKey public_key;
};

// Random keypair, or a deterministic one derived from `seed` (tests only).
KeyPair keygen(std::optional<std::uint64_t> seed = std::nullopt);

constexpr std::uint16_t kPayloadVersion = 1;
constexpr std::size_t kPayloadHeaderBytes = 26;

// Little-endian: "PSIG", version u16, sample_rate u32, frame_ms u32,
// hop_ms u32, bins u16, k u16, T u32, components (bins x k, column-major f64),
// MFTS (T x k, row-major f64), eigenvalues (k f64).
std::vector<std::uint8_t> encode_payload(const Fingerprint &fp);
std::size_t payload_size(std::size_t bins, std::size_t k, std::size_t frames);
// Throws SignatureError on bad magic, version or length.
Fingerprint decode_payload(std::span<const std::uint8_t> bytes);

// Offset of a trailing signature block, if the text ends with one.
std::optional<std::size_t> find_signature_block(std::string_view text);

// Appends the signature block. Block lines use the body's line ending; if the
// body does not end with a newline the block starts on its last line. Throws
// SignatureError if the body is already signed or has no marker commands.
std::string sign_gcode(std::string_view body, const Fingerprint &fp, const SecretKey &key);

struct SignedGCode {
  std::string body;
  std::vector<std::uint8_t> payload;
  std::array<std::uint8_t, 64> signature{};
  std::uint16_t version = kPayloadVersion;
};

// Splits a signed file without checking the signature. Throws SignatureError
// for a missing, malformed or wrong-version block.
SignedGCode parse_signed(std::string_view text);

struct VerifiedGCode {
  std::string body;
  Fingerprint fingerprint;
};

// Returns the body and fingerprint only if the signature over
// payload || SHA-256(body with "\n" endings) verifies under `key`.
VerifiedGCode verify_extract(std::string_view signed_text, const PublicKey &key);

// Removes the signature block; the input is returned unchanged if unsigned.
std::string strip_signature(std::string_view text);

std::array<std::uint8_t, 32> body_digest(std::string_view body);

// One header line then base64.
std::string secret_key_text(const SecretKey &key);
std::string public_key_text(const PublicKey &key);
SecretKey parse_secret_key(std::string_view text);
PublicKey parse_public_key(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Strict: no whitespace, canonical padding. Throws SignatureError.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace printsig

#endif  // PRINTSIG_SIGNING_HPP
