#ifndef PRINTSIG_TESTS_SUPPORT_HPP
#define PRINTSIG_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "printsig/audio.hpp"
#include "printsig/cube.hpp"
#include "printsig/fingerprint.hpp"
#include "printsig/gcode.hpp"
#include "printsig/synth.hpp"

namespace testing {

// Wraps move lines in the start and end marker blocks.
inline std::string with_markers(const std::string &body) {
  return "G21\nG90\nM83\nG0 X0 Y0 F6000\nM300 S440 P500\nG4 P1000\n" + body + "G4 P1000\nM300 S440 P500\n";
}

inline std::vector<double> sine(double hz, double seconds, double rate, double amplitude = 0.5) {
  std::vector<double> x(static_cast<std::size_t>(std::llround(seconds * rate)));
  for (std::size_t n = 0; n < x.size(); ++n) {
    x[n] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(n) / rate);
  }
  return x;
}

inline printsig::AudioSignal signal_of(std::vector<double> samples, double rate) {
  printsig::AudioSignal s;
  s.samples = std::move(samples);
  s.sample_rate = rate;
  return s;
}

inline void append(std::vector<double> &dst, const std::vector<double> &src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

// A short print with varied moves; renders to about 12 s of body.
inline std::string small_print() {
  printsig::CubeOptions o;
  o.layers = 6;
  return printsig::make_cube_gcode(o).text;
}

// The default test cube and its noiseless master recording, built once.
struct Cube {
  printsig::CubeProgram cube;
  printsig::GCodeProgram program;
  printsig::AudioSignal master;
  printsig::Fingerprint fingerprint;
};

inline const Cube &cube() {
  static const Cube c = [] {
    Cube out;
    out.cube = printsig::make_cube_gcode();
    out.program = printsig::parse_gcode(out.cube.text);
    out.master = printsig::render(out.program);
    out.fingerprint = printsig::generate_fingerprint(out.master);
    return out;
  }();
  return c;
}

inline printsig::SynthConfig noisy(double snr_db, std::uint64_t seed) {
  printsig::SynthConfig cfg;
  cfg.noise_snr_db = snr_db;
  cfg.rng_seed = seed;
  return cfg;
}

}  // namespace testing

#endif  // PRINTSIG_TESTS_SUPPORT_HPP
