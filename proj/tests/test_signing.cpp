#include <doctest.h>

#include <cstring>
#include <random>

#include "printsig/error.hpp"
#include "printsig/gcode.hpp"
#include "printsig/signing.hpp"
#include "support.hpp"

using namespace printsig;

namespace {

Fingerprint small_fingerprint(Eigen::Index frames = 4, Eigen::Index k = 3) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  Fingerprint fp;
  fp.components.resize(50, k);
  fp.mfts.resize(frames, k);
  fp.eigenvalues.resize(k);
  for (Eigen::Index i = 0; i < fp.components.size(); ++i) fp.components.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < fp.mfts.size(); ++i) fp.mfts.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < k; ++i) fp.eigenvalues(i) = 10.0 - static_cast<double>(i);
  return fp;
}

const std::string kBody = testing::with_markers("G1 X10 Y5 E0.4 F1200\nG1 X0 Y5 E0.4\n");

// Independent rendering of the block layout.
std::string block_text(const std::vector<std::uint8_t> &payload, const std::array<std::uint8_t, 64> &sig,
                       const std::string &eol = "\n") {
  std::string b64 = base64_encode(payload);
  std::string out = ";PRINTSIG v1" + eol + ";PRINTSIG PAYLOAD" + eol;
  for (std::size_t i = 0; i < b64.size(); i += 76) out += ";PRINTSIG " + b64.substr(i, 76) + eol;
  out += ";PRINTSIG SIG " + base64_encode(sig) + eol + ";PRINTSIG END" + eol;
  return out;
}

}  // namespace

TEST_CASE("seeded keygen is deterministic and distinct per seed") {
  KeyPair a = keygen(7), b = keygen(7), c = keygen(8);
  CHECK(a.secret == b.secret);
  CHECK(a.public_key == b.public_key);
  CHECK_FALSE(a.public_key == c.public_key);
  CHECK(std::memcmp(a.secret.bytes.data() + 32, a.public_key.bytes.data(), 32) == 0);
  CHECK_FALSE(keygen().public_key == keygen().public_key);
}

TEST_CASE("payload round trip is bitwise") {
  Fingerprint fp = small_fingerprint(93, 3);
  fp.mfts(0, 0) = -0.0;
  fp.meta.hop_ms = 100;
  auto bytes = encode_payload(fp);
  CHECK(bytes.size() == payload_size(50, 3, 93));
  Fingerprint back = decode_payload(bytes);
  CHECK(back == fp);
  CHECK(std::signbit(back.mfts(0, 0)));
}

TEST_CASE("payload layout") {
  CHECK(kPayloadHeaderBytes == 26);
  CHECK(payload_size(50, 3, 93) == 26 + 8 * (150 + 279 + 3));
  Fingerprint fp = small_fingerprint(93, 3);
  auto b = encode_payload(fp);
  CHECK(std::memcmp(b.data(), "PSIG", 4) == 0);
  auto u16 = [&](std::size_t at) { return b[at] | (b[at + 1] << 8); };
  auto u32 = [&](std::size_t at) { return static_cast<std::uint32_t>(u16(at) | (u16(at + 2) << 16)); };
  CHECK(u16(4) == 1);
  CHECK(u32(6) == 2000);
  CHECK(u32(10) == 750);
  CHECK(u32(14) == 100);
  CHECK(u16(18) == 50);
  CHECK(u16(20) == 3);
  CHECK(u32(22) == 93);
  double first;
  std::memcpy(&first, b.data() + 26, 8);
  CHECK(first == fp.components(0, 0));
  std::memcpy(&first, b.data() + 26 + 8 * 1, 8);
  CHECK(first == fp.components(1, 0));  // column-major
  std::memcpy(&first, b.data() + 26 + 8 * (150 + 1), 8);
  CHECK(first == fp.mfts(0, 1));  // row-major
}

TEST_CASE("bad payloads are rejected") {
  auto bytes = encode_payload(small_fingerprint());
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_payload(truncated), SignatureError);
  CHECK_THROWS_AS(decode_payload(std::span<const std::uint8_t>(bytes).first(10)), SignatureError);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_payload(magic), SignatureError);
  auto version = bytes;
  version[4] = 2;
  CHECK_THROWS_AS(decode_payload(version), SignatureError);
  auto longer = bytes;
  longer.push_back(0);
  CHECK_THROWS_AS(decode_payload(longer), SignatureError);
}

TEST_CASE("sign then verify returns the body and fingerprint") {
  KeyPair keys = keygen(1);
  Fingerprint fp = small_fingerprint();
  std::string text = sign_gcode(kBody, fp, keys.secret);
  VerifiedGCode v = verify_extract(text, keys.public_key);
  CHECK(v.body == kBody);
  CHECK(v.fingerprint == fp);
  CHECK(strip_signature(text) == kBody);
  CHECK(strip_signature(kBody) == kBody);
  CHECK(text.substr(kBody.size()) == block_text(encode_payload(fp), parse_signed(text).signature));
}

TEST_CASE("every appended line is a comment and the program ignores the block") {
  KeyPair keys = keygen(1);
  std::string text = sign_gcode(kBody, small_fingerprint(), keys.secret);
  std::string block = text.substr(kBody.size());
  std::size_t pos = 0;
  while (pos < block.size()) {
    CHECK(block[pos] == ';');
    std::size_t nl = block.find('\n', pos);
    CHECK(nl - pos <= 102);  // the SIG line is the longest
    pos = nl + 1;
  }
  CHECK(parse_gcode(text) == parse_gcode(kBody));
}

TEST_CASE("verification fails with the wrong key") {
  std::string text = sign_gcode(kBody, small_fingerprint(), keygen(1).secret);
  try {
    verify_extract(text, keygen(2).public_key);
    FAIL("expected error");
  } catch (const SignatureError &e) {
    CHECK(std::string(e.what()) == "invalid signature");
  }
}

TEST_CASE("flipping any payload bit breaks the signature") {
  KeyPair keys = keygen(3);
  std::string text = sign_gcode(kBody, small_fingerprint(2, 1), keys.secret);
  SignedGCode parsed = parse_signed(text);
  for (std::size_t i = 0; i < parsed.payload.size(); ++i) {
    for (int bit = 0; bit < 8; ++bit) {
      auto payload = parsed.payload;
      payload[i] ^= static_cast<std::uint8_t>(1 << bit);
      std::string forged = parsed.body + block_text(payload, parsed.signature);
      CHECK_THROWS_AS(verify_extract(forged, keys.public_key), SignatureError);
    }
  }
}

TEST_CASE("editing one body line after signing breaks the signature") {
  KeyPair keys = keygen(3);
  std::string text = sign_gcode(kBody, small_fingerprint(), keys.secret);
  std::string edited = text;
  edited.replace(edited.find("X10"), 3, "X11");
  CHECK_THROWS_WITH_AS(verify_extract(edited, keys.public_key), "invalid signature", SignatureError);
}

TEST_CASE("CRLF bodies keep their endings and hash like LF bodies") {
  std::string crlf;
  for (char c : kBody) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  CHECK(body_digest(crlf) == body_digest(kBody));
  KeyPair keys = keygen(4);
  Fingerprint fp = small_fingerprint();
  std::string text = sign_gcode(crlf, fp, keys.secret);
  CHECK(text.substr(crlf.size()) == block_text(encode_payload(fp), parse_signed(text).signature, "\r\n"));
  CHECK(verify_extract(text, keys.public_key).body == crlf);
  CHECK(strip_signature(text) == crlf);
}

TEST_CASE("body without a final newline") {
  std::string body = kBody.substr(0, kBody.size() - 1);
  KeyPair keys = keygen(5);
  std::string text = sign_gcode(body, small_fingerprint(), keys.secret);
  CHECK(verify_extract(text, keys.public_key).body == body);
  CHECK(strip_signature(text) == body);
}

TEST_CASE("signing preconditions") {
  KeyPair keys = keygen(1);
  std::string text = sign_gcode(kBody, small_fingerprint(), keys.secret);
  CHECK_THROWS_WITH_AS(sign_gcode(text, small_fingerprint(), keys.secret), "body already signed", SignatureError);
  CHECK_THROWS_AS(sign_gcode("G1 X1 F100\n", small_fingerprint(), keys.secret), SignatureError);
}

TEST_CASE("malformed and missing blocks") {
  KeyPair keys = keygen(1);
  std::string text = sign_gcode(kBody, small_fingerprint(), keys.secret);
  CHECK_THROWS_WITH_AS(parse_signed(kBody), "missing signature block", SignatureError);

  std::string v2 = text;
  v2.replace(v2.find(";PRINTSIG v1"), 12, ";PRINTSIG v2");
  CHECK_THROWS_WITH_AS(parse_signed(v2), "signature block version mismatch: v2", SignatureError);

  std::string no_end = text.substr(0, text.rfind(";PRINTSIG END"));
  CHECK_THROWS_AS(verify_extract(no_end, keys.public_key), SignatureError);

  std::string spaced = text;
  spaced.insert(spaced.find(";PRINTSIG SIG"), ";PRINTSIG \n");
  CHECK_THROWS_AS(parse_signed(spaced), SignatureError);

  std::string bad_b64 = text;
  bad_b64[bad_b64.find(";PRINTSIG PAYLOAD\n") + 20] = '!';
  CHECK_THROWS_AS(parse_signed(bad_b64), SignatureError);
}

TEST_CASE("key files round trip") {
  KeyPair keys = keygen(9);
  std::string sk = secret_key_text(keys.secret), pk = public_key_text(keys.public_key);
  CHECK(sk.rfind("PRINTSIG ED25519 SECRET KEY\n", 0) == 0);
  CHECK(pk.rfind("PRINTSIG ED25519 PUBLIC KEY\n", 0) == 0);
  CHECK(parse_secret_key(sk) == keys.secret);
  CHECK(parse_public_key(pk) == keys.public_key);
  CHECK_THROWS_AS(parse_public_key(sk), SignatureError);
  CHECK_THROWS_AS(parse_public_key("PRINTSIG ED25519 PUBLIC KEY\nAAAA\n"), SignatureError);
}

TEST_CASE("strict base64") {
  std::vector<std::uint8_t> bytes{0, 1, 2, 250, 251};
  CHECK(base64_encode(bytes) == "AAEC+vs=");
  CHECK(base64_decode("AAEC+vs=") == bytes);
  CHECK(base64_decode("").empty());
  CHECK_THROWS_AS(base64_decode("AAEC+vs"), SignatureError);
  CHECK_THROWS_AS(base64_decode("AAEC +vs="), SignatureError);
  CHECK_THROWS_AS(base64_decode("AAEC+vt="), SignatureError);  // non-canonical padding bits
}
