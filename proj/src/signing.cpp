#include "printsig/signing.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <mutex>

#include <sodium.h>

#include "printsig/error.hpp"
#include "printsig/gcode.hpp"

namespace printsig {

namespace {

constexpr std::string_view kPrefix = ";PRINTSIG ";
constexpr std::string_view kHeader = ";PRINTSIG v";
constexpr std::string_view kPayloadLine = ";PRINTSIG PAYLOAD";
constexpr std::string_view kSigPrefix = ";PRINTSIG SIG ";
constexpr std::string_view kEndLine = ";PRINTSIG END";
constexpr std::size_t kBase64LineChars = 76;
constexpr std::string_view kSecretHeader = "PRINTSIG ED25519 SECRET KEY";
constexpr std::string_view kPublicHeader = "PRINTSIG ED25519 PUBLIC KEY";

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw SignatureError("libsodium initialisation failed");
  });
}

class Writer {
 public:
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(std::string_view s) { bytes.insert(bytes.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> bytes;

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  double f64() { return std::bit_cast<double>(get(8)); }

 private:
  std::uint64_t get(int n) {
    if (pos_ + static_cast<std::size_t>(n) > bytes_.size()) throw SignatureError("payload truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::string_view line_ending(std::string_view body) {
  auto nl = body.find('\n');
  if (nl != std::string_view::npos && nl > 0 && body[nl - 1] == '\r') return "\r\n";
  return "\n";
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string make_block(std::span<const std::uint8_t> payload, std::span<const std::uint8_t> signature,
                       std::string_view eol) {
  std::string block;
  block.append(kHeader).append("1").append(eol);
  block.append(kPayloadLine).append(eol);
  std::string b64 = base64_encode(payload);
  for (std::size_t i = 0; i < b64.size(); i += kBase64LineChars) {
    block.append(kPrefix).append(b64, i, kBase64LineChars).append(eol);
  }
  block.append(kSigPrefix).append(base64_encode(signature)).append(eol);
  block.append(kEndLine).append(eol);
  return block;
}

std::vector<std::uint8_t> signed_message(std::span<const std::uint8_t> payload, std::string_view body) {
  std::vector<std::uint8_t> msg(payload.begin(), payload.end());
  auto digest = body_digest(body);
  msg.insert(msg.end(), digest.begin(), digest.end());
  return msg;
}

std::vector<std::string_view> split_block_lines(std::string_view block) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < block.size()) {
    auto nl = block.find('\n', pos);
    std::string_view line = block.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::string_view key_body(std::string_view text, std::string_view header) {
  auto nl = text.find('\n');
  std::string_view first = text.substr(0, nl);
  if (!first.empty() && first.back() == '\r') first.remove_suffix(1);
  if (first != header) throw SignatureError("key file: expected header '" + std::string(header) + "'");
  if (nl == std::string_view::npos) throw SignatureError("key file: missing key line");
  std::string_view rest = text.substr(nl + 1);
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.remove_suffix(1);
  return rest;
}

}  // namespace

KeyPair keygen(std::optional<std::uint64_t> seed) {
  ensure_sodium();
  KeyPair kp;
  if (seed) {
    std::array<std::uint8_t, 8> le{};
    for (int i = 0; i < 8; ++i) le[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(*seed >> (8 * i));
    std::array<std::uint8_t, crypto_sign_SEEDBYTES> material{};
    crypto_hash_sha256(material.data(), le.data(), le.size());
    crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.secret.bytes.data(), material.data());
    sodium_memzero(material.data(), material.size());
  } else {
    crypto_sign_keypair(kp.public_key.bytes.data(), kp.secret.bytes.data());
  }
  return kp;
}

std::size_t payload_size(std::size_t bins, std::size_t k, std::size_t frames) {
  return kPayloadHeaderBytes + 8 * (bins * k + frames * k + k);
}

std::vector<std::uint8_t> encode_payload(const Fingerprint &fp) {
  const auto bins = static_cast<std::size_t>(fp.components.rows());
  const std::size_t k = fp.k();
  const std::size_t frames = fp.frames();
  if (k == 0 || static_cast<std::size_t>(fp.mfts.cols()) != k || static_cast<std::size_t>(fp.eigenvalues.size()) != k ||
      bins != fp.meta.bins) {
    throw SignatureError("encode_payload: inconsistent fingerprint shape");
  }
  if (k > 0xFFFF || frames > 0xFFFFFFFFu) throw SignatureError("encode_payload: fingerprint too large");

  Writer w;
  w.bytes.reserve(payload_size(bins, k, frames));
  w.raw("PSIG");
  w.u16(kPayloadVersion);
  w.u32(fp.meta.sample_rate);
  w.u32(fp.meta.frame_ms);
  w.u32(fp.meta.hop_ms);
  w.u16(fp.meta.bins);
  w.u16(static_cast<std::uint16_t>(k));
  w.u32(static_cast<std::uint32_t>(frames));
  for (Eigen::Index c = 0; c < fp.components.cols(); ++c) {
    for (Eigen::Index r = 0; r < fp.components.rows(); ++r) w.f64(fp.components(r, c));
  }
  for (Eigen::Index t = 0; t < fp.mfts.rows(); ++t) {
    for (Eigen::Index c = 0; c < fp.mfts.cols(); ++c) w.f64(fp.mfts(t, c));
  }
  for (Eigen::Index c = 0; c < fp.eigenvalues.size(); ++c) w.f64(fp.eigenvalues(c));
  return std::move(w.bytes);
}

Fingerprint decode_payload(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPayloadHeaderBytes) throw SignatureError("payload truncated");
  if (std::memcmp(bytes.data(), "PSIG", 4) != 0) throw SignatureError("payload: bad magic");
  Reader r(bytes.subspan(4));
  std::uint16_t version = r.u16();
  if (version != kPayloadVersion) throw SignatureError("payload: unsupported version " + std::to_string(version));
  Fingerprint fp;
  fp.meta.sample_rate = r.u32();
  fp.meta.frame_ms = r.u32();
  fp.meta.hop_ms = r.u32();
  fp.meta.bins = r.u16();
  const std::size_t k = r.u16();
  const std::size_t frames = r.u32();
  const std::size_t bins = fp.meta.bins;
  if (k == 0 || bins == 0) throw SignatureError("payload: empty fingerprint");
  if (bytes.size() != payload_size(bins, k, frames)) {
    throw SignatureError("payload: length " + std::to_string(bytes.size()) + " does not match header (" +
                         std::to_string(payload_size(bins, k, frames)) + ")");
  }
  const auto kk = static_cast<Eigen::Index>(k);
  fp.components.resize(static_cast<Eigen::Index>(bins), kk);
  fp.mfts.resize(static_cast<Eigen::Index>(frames), kk);
  fp.eigenvalues.resize(kk);
  for (Eigen::Index c = 0; c < kk; ++c) {
    for (Eigen::Index b = 0; b < fp.components.rows(); ++b) fp.components(b, c) = r.f64();
  }
  for (Eigen::Index t = 0; t < fp.mfts.rows(); ++t) {
    for (Eigen::Index c = 0; c < kk; ++c) fp.mfts(t, c) = r.f64();
  }
  for (Eigen::Index c = 0; c < kk; ++c) fp.eigenvalues(c) = r.f64();
  return fp;
}

std::optional<std::size_t> find_signature_block(std::string_view text) {
  if (!(ends_with(text, kEndLine) || ends_with(text, std::string(kEndLine) + "\n") ||
        ends_with(text, std::string(kEndLine) + "\r\n"))) {
    return std::nullopt;
  }
  // The header is a version line directly followed by the PAYLOAD line; a
  // base64 data line cannot be mistaken for it.
  std::size_t pos = text.size();
  while (pos > 0) {
    pos = text.rfind(kHeader, pos - 1);
    if (pos == std::string_view::npos) return std::nullopt;
    std::size_t i = pos + kHeader.size();
    std::size_t digits = i;
    while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits]))) ++digits;
    if (digits > i) {
      std::string_view rest = text.substr(digits);
      if (rest.starts_with("\r\n")) rest.remove_prefix(2);
      else if (rest.starts_with("\n")) rest.remove_prefix(1);
      else rest = {};
      if (rest.starts_with(kPayloadLine)) return pos;
    }
  }
  return std::nullopt;
}

std::array<std::uint8_t, 32> body_digest(std::string_view body) {
  ensure_sodium();
  crypto_hash_sha256_state state;
  crypto_hash_sha256_init(&state);
  std::size_t start = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\r' && i + 1 < body.size() && body[i + 1] == '\n') {
      crypto_hash_sha256_update(&state, reinterpret_cast<const unsigned char *>(body.data() + start), i - start);
      start = i + 1;
    }
  }
  crypto_hash_sha256_update(&state, reinterpret_cast<const unsigned char *>(body.data() + start),
                            body.size() - start);
  std::array<std::uint8_t, 32> out{};
  crypto_hash_sha256_final(&state, out.data());
  return out;
}

std::string sign_gcode(std::string_view body, const Fingerprint &fp, const SecretKey &key) {
  ensure_sodium();
  if (find_signature_block(body)) throw SignatureError("body already signed");
  GCodeProgram program = parse_gcode(body);
  auto markers = std::count_if(program.commands.begin(), program.commands.end(),
                               [](const GCodeCommand &c) { return c.kind == CommandKind::M300; });
  if (markers < 2) throw SignatureError("body lacks start and end marker commands");

  std::vector<std::uint8_t> payload = encode_payload(fp);
  std::vector<std::uint8_t> message = signed_message(payload, body);
  std::array<std::uint8_t, crypto_sign_BYTES> signature{};
  crypto_sign_detached(signature.data(), nullptr, message.data(), message.size(), key.bytes.data());

  std::string out(body);
  out += make_block(payload, signature, line_ending(body));
  return out;
}

SignedGCode parse_signed(std::string_view text) {
  auto pos = find_signature_block(text);
  if (!pos) throw SignatureError("missing signature block");
  SignedGCode signed_gcode;
  signed_gcode.body = std::string(text.substr(0, *pos));
  std::string_view block = text.substr(*pos);
  auto lines = split_block_lines(block);

  std::string_view version = lines.front().substr(kHeader.size());
  if (version != "1") throw SignatureError("signature block version mismatch: v" + std::string(version));
  signed_gcode.version = 1;

  if (lines.size() < 5 || lines[1] != kPayloadLine) throw SignatureError("malformed signature block");
  std::string b64;
  std::size_t i = 2;
  for (; i < lines.size() && !lines[i].starts_with(kSigPrefix); ++i) {
    if (!lines[i].starts_with(kPrefix)) throw SignatureError("malformed signature block");
    b64.append(lines[i].substr(kPrefix.size()));
  }
  if (i + 2 != lines.size() || lines[i + 1] != kEndLine) throw SignatureError("malformed signature block");
  signed_gcode.payload = base64_decode(b64);
  auto sig = base64_decode(lines[i].substr(kSigPrefix.size()));
  if (sig.size() != signed_gcode.signature.size()) throw SignatureError("malformed signature");
  std::copy(sig.begin(), sig.end(), signed_gcode.signature.begin());

  // Only the canonical rendering is accepted.
  if (make_block(signed_gcode.payload, signed_gcode.signature, line_ending(signed_gcode.body)) != block) {
    throw SignatureError("malformed signature block");
  }
  return signed_gcode;
}

VerifiedGCode verify_extract(std::string_view signed_text, const PublicKey &key) {
  ensure_sodium();
  SignedGCode parsed = parse_signed(signed_text);
  std::vector<std::uint8_t> message = signed_message(parsed.payload, parsed.body);
  if (crypto_sign_verify_detached(parsed.signature.data(), message.data(), message.size(), key.bytes.data()) != 0) {
    throw SignatureError("invalid signature");
  }
  return {std::move(parsed.body), decode_payload(parsed.payload)};
}

std::string strip_signature(std::string_view text) {
  auto pos = find_signature_block(text);
  return std::string(pos ? text.substr(0, *pos) : text);
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  ensure_sodium();
  const std::size_t len = sodium_base64_encoded_len(bytes.size(), sodium_base64_VARIANT_ORIGINAL);
  std::string out(len, '\0');
  sodium_bin2base64(out.data(), len, bytes.data(), bytes.size(), sodium_base64_VARIANT_ORIGINAL);
  out.resize(len - 1);
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  ensure_sodium();
  std::vector<std::uint8_t> out(text.size() / 4 * 3 + 3);
  std::size_t len = 0;
  const char *end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw SignatureError("invalid base64");
  }
  out.resize(len);
  return out;
}

std::string secret_key_text(const SecretKey &key) {
  return std::string(kSecretHeader) + "\n" + base64_encode(key.bytes) + "\n";
}

std::string public_key_text(const PublicKey &key) {
  return std::string(kPublicHeader) + "\n" + base64_encode(key.bytes) + "\n";
}

SecretKey parse_secret_key(std::string_view text) {
  auto bytes = base64_decode(key_body(text, kSecretHeader));
  SecretKey key;
  if (bytes.size() != key.bytes.size()) throw SignatureError("secret key: wrong length");
  std::copy(bytes.begin(), bytes.end(), key.bytes.begin());
  return key;
}

PublicKey parse_public_key(std::string_view text) {
  auto bytes = base64_decode(key_body(text, kPublicHeader));
  PublicKey key;
  if (bytes.size() != key.bytes.size()) throw SignatureError("public key: wrong length");
  std::copy(bytes.begin(), bytes.end(), key.bytes.begin());
  return key;
}

}  // namespace printsig
