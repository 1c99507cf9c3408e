#ifndef PRINTSIG_SYNTH_HPP
#define PRINTSIG_SYNTH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "printsig/audio.hpp"
#include "printsig/gcode.hpp"

namespace printsig {

struct AxisTone {
  double base_hz = 0.0;
  double hz_per_mm_s = 0.0;
  double amplitude = 0.0;
};

// Stand-in for a printer: every moving axis hums at a speed-dependent pitch.
struct SynthConfig {
  double sample_rate = 44100.0;
  std::array<AxisTone, 4> tones{{
      {100.0, 20.0, 0.2},  // X
      {180.0, 20.0, 0.2},  // Y
      {320.0, 10.0, 0.2},  // Z
      {420.0, 15.0, 0.05}, // E, a quarter of the motion axes
  }};
  double direction_offset_hz = 10.0;
  double harmonic_gain = 0.3;
  double beep_amplitude = 0.8;
  double crossfade_s = 0.005;
  double min_hz = 50.0;
  double max_hz = 950.0;
  std::optional<double> noise_snr_db;
  std::uint64_t rng_seed = 0;
  KinematicsConfig kinematics;
};

struct Tone {
  double hz = 0.0;
  double amplitude = 0.0;
};

// Sinusoids a segment contributes: per moving axis a clamped fundamental and
// its second harmonic; a beep for M300; nothing for a dwell.
std::vector<Tone> segment_tones(const MoveSegment &segment, const SynthConfig &config);

// Deterministic for a given (program, config). Propagates KinematicsError.
AudioSignal render(const GCodeProgram &program, const SynthConfig &config = {});
AudioSignal render_segments(const std::vector<MoveSegment> &segments, const SynthConfig &config);

struct TimeInterval {
  double begin_s = 0.0;
  double end_s = 0.0;
};

// Adds white Gaussian noise at `snr_db` relative to the mean power of the
// whole signal. With `bursts`, noise is confined to those intervals (still at
// that power inside them). The result is peak-normalized if it would clip.
AudioSignal mix_noise(const AudioSignal &signal, double snr_db, std::uint64_t seed,
                      const std::vector<TimeInterval> &bursts = {});

// Flat key=value overrides, e.g. "x_base_hz=100", "noise_snr_db=20", "seed=3".
SynthConfig parse_synth_config(std::string_view text, SynthConfig base = {});

}  // namespace printsig

#endif  // PRINTSIG_SYNTH_HPP
