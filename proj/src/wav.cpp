#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "printsig/audio.hpp"
#include "printsig/error.hpp"

namespace printsig {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u16(std::vector<unsigned char> &out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

double decode_sample(const unsigned char *p, unsigned bits) {
  switch (bits) {
    case 8: return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
  }
  return 0.0;
}

}  // namespace

AudioSignal decode_wav(const std::vector<unsigned char> &bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw AudioError("not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char *data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    std::uint32_t size = read_u32(chunk + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw AudioError("truncated fmt chunk");
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible && size >= 40) {
        format = read_u16(bytes.data() + body + 24);  // subformat GUID prefix
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min<std::size_t>(size, bytes.size() - body);
      if (data_size < size) throw AudioError("truncated data chunk");
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw AudioError("missing fmt chunk");
  if (!data) throw AudioError("missing data chunk");
  if (format != kFormatPcm) throw AudioError("unsupported codec " + std::to_string(format));
  if (bits != 8 && bits != 16 && bits != 24) {
    throw AudioError("unsupported sample width " + std::to_string(bits));
  }
  if (channels < 1 || channels > 2) {
    throw AudioError("unsupported channel count " + std::to_string(channels));
  }
  if (rate == 0) throw AudioError("zero sample rate");

  std::size_t width = bits / 8;
  std::size_t frame = width * channels;
  if (data_size % frame != 0) throw AudioError("truncated sample frame");
  std::size_t n = data_size / frame;

  AudioSignal out;
  out.sample_rate = rate;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char *p = data + i * frame;
    if (channels == 1) {
      out.samples[i] = decode_sample(p, bits);
    } else {
      out.samples[i] = 0.5 * (decode_sample(p, bits) + decode_sample(p + width, bits));
    }
  }
  return out;
}

AudioSignal load_audio(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AudioError("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

std::vector<unsigned char> encode_wav(const std::vector<std::vector<double>> &channels,
                                      unsigned sample_rate, unsigned bits_per_sample) {
  if (channels.empty()) throw AudioError("no channels");
  if (bits_per_sample != 8 && bits_per_sample != 16 && bits_per_sample != 24) {
    throw AudioError("unsupported sample width");
  }
  std::size_t n = channels[0].size();
  for (const auto &c : channels) {
    if (c.size() != n) throw AudioError("channel length mismatch");
  }
  auto nch = static_cast<std::uint16_t>(channels.size());
  std::size_t width = bits_per_sample / 8;
  auto data_size = static_cast<std::uint32_t>(n * nch * width);

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, nch);
  put_u32(out, sample_rate);
  put_u32(out, static_cast<std::uint32_t>(sample_rate * nch * width));
  put_u16(out, static_cast<std::uint16_t>(nch * width));
  put_u16(out, static_cast<std::uint16_t>(bits_per_sample));
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_size);

  for (std::size_t i = 0; i < n; ++i) {
    for (const auto &c : channels) {
      double x = std::clamp(c[i], -1.0, 1.0);
      switch (bits_per_sample) {
        case 8: {
          long v = std::lround(x * 128.0) + 128;
          out.push_back(static_cast<unsigned char>(std::clamp(v, 0L, 255L)));
          break;
        }
        case 16: {
          long v = std::clamp(std::lround(x * 32768.0), -32768L, 32767L);
          put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
          break;
        }
        case 24: {
          long v = std::clamp(std::lround(x * 8388608.0), -8388608L, 8388607L);
          auto u = static_cast<std::uint32_t>(static_cast<std::int32_t>(v));
          out.push_back(static_cast<unsigned char>(u));
          out.push_back(static_cast<unsigned char>(u >> 8));
          out.push_back(static_cast<unsigned char>(u >> 16));
          break;
        }
      }
    }
  }
  return out;
}

std::vector<unsigned char> encode_wav16(const AudioSignal &signal) {
  return encode_wav({signal.samples}, static_cast<unsigned>(std::lround(signal.sample_rate)), 16);
}

void write_wav16(const std::string &path, const AudioSignal &signal) {
  auto bytes = encode_wav16(signal);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AudioError("cannot write " + path);
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw AudioError("write failed: " + path);
}

double mean_power(const std::vector<double> &samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (double x : samples) sum += x * x;
  return sum / static_cast<double>(samples.size());
}

}  // namespace printsig
