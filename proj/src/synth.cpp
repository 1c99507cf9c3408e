#include "printsig/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "printsig/error.hpp"

namespace printsig {

std::vector<Tone> segment_tones(const MoveSegment &segment, const SynthConfig &config) {
  std::vector<Tone> tones;
  switch (segment.kind) {
    case MoveSegment::Kind::Dwell:
      break;
    case MoveSegment::Kind::Beep:
      tones.push_back({segment.beep_hz, config.beep_amplitude});
      break;
    case MoveSegment::Kind::Move:
      for (std::size_t a = 0; a < 4; ++a) {
        double v = segment.velocity[a];
        if (std::abs(v) < 1e-9) continue;
        const AxisTone &t = config.tones[a];
        double hz = t.base_hz + t.hz_per_mm_s * std::abs(v) + (v > 0.0 ? config.direction_offset_hz : 0.0);
        hz = std::clamp(hz, config.min_hz, config.max_hz);
        tones.push_back({hz, t.amplitude});
        if (config.harmonic_gain > 0.0) tones.push_back({2.0 * hz, t.amplitude * config.harmonic_gain});
      }
      break;
  }
  return tones;
}

AudioSignal render_segments(const std::vector<MoveSegment> &segments, const SynthConfig &config) {
  const double rate = config.sample_rate;
  AudioSignal out;
  out.sample_rate = rate;
  if (segments.empty()) return out;

  auto to_sample = [rate](double t) { return static_cast<long>(std::llround(t * rate)); };
  const MoveSegment &last = segments.back();
  const long total = to_sample(last.start_s + last.duration);
  out.samples.assign(static_cast<std::size_t>(total), 0.0);
  const long fade = std::max(1L, to_sample(config.crossfade_s));

  for (std::size_t i = 0; i < segments.size(); ++i) {
    const MoveSegment &seg = segments[i];
    long begin = to_sample(seg.start_s);
    long end = std::min(total, to_sample(seg.start_s + seg.duration));
    if (end <= begin) continue;
    bool fade_in = i > 0;
    bool fade_out = i + 1 < segments.size();
    long render_begin = fade_in ? std::max(0L, begin - fade) : begin;

    std::vector<Tone> tones = segment_tones(seg, config);
    if (tones.empty()) continue;

    // Phasors advanced per sample; phase zero at render_begin.
    std::vector<std::complex<double>> phasor(tones.size(), {1.0, 0.0});
    std::vector<std::complex<double>> step(tones.size());
    for (std::size_t k = 0; k < tones.size(); ++k) {
      step[k] = std::polar(1.0, 2.0 * std::numbers::pi * tones[k].hz / rate);
    }
    for (long n = render_begin; n < end; ++n) {
      double gain = 1.0;
      if (fade_in && n < begin) gain = std::min(gain, (n - (begin - fade) + 0.5) / fade);
      if (fade_out && n >= end - fade) gain = std::min(gain, (end - n - 0.5) / fade);
      double x = 0.0;
      for (std::size_t k = 0; k < tones.size(); ++k) {
        x += tones[k].amplitude * phasor[k].imag();
        phasor[k] *= step[k];
      }
      out.samples[static_cast<std::size_t>(n)] += gain * x;
    }
  }
  return out;
}

AudioSignal render(const GCodeProgram &program, const SynthConfig &config) {
  AudioSignal clean = render_segments(kinematics(program, config.kinematics), config);
  if (!config.noise_snr_db) return clean;
  return mix_noise(clean, *config.noise_snr_db, config.rng_seed);
}

AudioSignal mix_noise(const AudioSignal &signal, double snr_db, std::uint64_t seed,
                      const std::vector<TimeInterval> &bursts) {
  if (snr_db == std::numeric_limits<double>::infinity()) return signal;
  if (signal.empty()) throw AudioError("mix_noise: empty signal");

  AudioSignal out = signal;
  const double noise_power = mean_power(signal.samples) / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(noise_power);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t n = out.samples.size();
  if (bursts.empty()) {
    for (double &x : out.samples) x += sigma * normal(rng);
  } else {
    for (const TimeInterval &b : bursts) {
      auto lo = static_cast<std::size_t>(std::clamp(std::llround(b.begin_s * signal.sample_rate), 0LL,
                                                    static_cast<long long>(n)));
      auto hi = static_cast<std::size_t>(std::clamp(std::llround(b.end_s * signal.sample_rate), 0LL,
                                                    static_cast<long long>(n)));
      for (std::size_t i = lo; i < hi; ++i) out.samples[i] += sigma * normal(rng);
    }
  }

  double peak = 0.0;
  for (double x : out.samples) peak = std::max(peak, std::abs(x));
  if (peak > 1.0) {
    for (double &x : out.samples) x /= peak;
  }
  return out;
}

namespace {

double parse_value(const std::string &key, const std::string &value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error("synth config: bad value for " + key + ": '" + value + "'");
  }
  return v;
}

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

SynthConfig parse_synth_config(std::string_view text, SynthConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  static constexpr const char *kAxisNames[] = {"x", "y", "z", "e"};
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("synth config: expected key=value: '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    bool matched = false;
    for (std::size_t a = 0; a < 4 && !matched; ++a) {
      std::string prefix = std::string(kAxisNames[a]) + "_";
      if (key.rfind(prefix, 0) != 0) continue;
      std::string field = key.substr(prefix.size());
      AxisTone &t = base.tones[a];
      if (field == "base_hz") t.base_hz = parse_value(key, value);
      else if (field == "hz_per_mm_s") t.hz_per_mm_s = parse_value(key, value);
      else if (field == "amplitude") t.amplitude = parse_value(key, value);
      else if (field == "steps_per_mm") base.kinematics.steps_per_mm[a] = parse_value(key, value);
      else throw Error("synth config: unknown key " + key);
      matched = true;
    }
    if (matched) continue;

    if (key == "sample_rate") base.sample_rate = parse_value(key, value);
    else if (key == "direction_offset_hz") base.direction_offset_hz = parse_value(key, value);
    else if (key == "harmonic_gain") base.harmonic_gain = parse_value(key, value);
    else if (key == "beep_amplitude") base.beep_amplitude = parse_value(key, value);
    else if (key == "crossfade_s") base.crossfade_s = parse_value(key, value);
    else if (key == "min_hz") base.min_hz = parse_value(key, value);
    else if (key == "max_hz") base.max_hz = parse_value(key, value);
    else if (key == "noise_snr_db") base.noise_snr_db = parse_value(key, value);
    else if (key == "seed" || key == "rng_seed") base.rng_seed = static_cast<std::uint64_t>(parse_value(key, value));
    else throw Error("synth config: unknown key " + key);
  }
  if (!(base.sample_rate > 0.0)) throw Error("synth config: sample_rate must be positive");
  if (base.harmonic_gain < 0.0 || base.harmonic_gain > 1.0) {
    throw Error("synth config: harmonic_gain must be in [0, 1]");
  }
  return base;
}

}  // namespace printsig
