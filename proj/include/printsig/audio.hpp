#ifndef PRINTSIG_AUDIO_HPP
#define PRINTSIG_AUDIO_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace printsig {

// Mono signal with samples nominally in [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  double sample_rate = 44100.0;

  double duration() const {
    return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  bool empty() const { return samples.empty(); }
  bool operator==(const AudioSignal &) const = default;
};

// Reads an 8/16/24-bit PCM WAV file; stereo is downmixed by channel average.
// Throws AudioError for other codecs or truncated files.
AudioSignal load_audio(const std::string &path);
AudioSignal decode_wav(const std::vector<unsigned char> &bytes);

// Encodes mono 16-bit PCM; samples are clamped to [-1, 1].
std::vector<unsigned char> encode_wav16(const AudioSignal &signal);
void write_wav16(const std::string &path, const AudioSignal &signal);

// Multichannel PCM writer, used by tests to build stereo/24-bit inputs.
std::vector<unsigned char> encode_wav(const std::vector<std::vector<double>> &channels,
                                      unsigned sample_rate, unsigned bits_per_sample);

double mean_power(const std::vector<double> &samples);

}  // namespace printsig

#endif  // PRINTSIG_AUDIO_HPP
