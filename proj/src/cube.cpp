#include "printsig/cube.hpp"

#include <cmath>
#include <cstdint>

#include "printsig/error.hpp"
#include "printsig/gcode.hpp"

namespace printsig {

namespace {

class Emitter {
 public:
  std::size_t line(const std::string &text) {
    out_ += text;
    out_ += '\n';
    return count_++;
  }
  std::size_t g(const char *word, std::initializer_list<std::pair<char, double>> params) {
    std::string text = word;
    for (const auto &[letter, value] : params) {
      text += ' ';
      text += letter;
      text += format_number(value);
    }
    return line(text);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
  std::size_t count_ = 0;
};

// Small LCG; only needs to be fixed and spread the choices.
std::size_t pick(std::uint64_t &state, std::size_t n) {
  state = state * 6364136223846793005ULL + 1442695040888963407ULL;
  return static_cast<std::size_t>((state >> 33) % n);
}

}  // namespace

CubeProgram make_cube_gcode(const CubeOptions &o) {
  if (o.layers == 0 || o.side_mm <= 0.0 || o.perimeter_speeds.empty() || o.infill_speeds.empty() ||
      o.infill_lines < 2 || 2.0 * o.infill_inset_mm >= o.side_mm) {
    throw Error("cube: invalid options");
  }
  CubeProgram program;
  Emitter e;
  const double a = o.center_mm - o.side_mm / 2.0;
  const double b = o.center_mm + o.side_mm / 2.0;
  const double lo = a + o.infill_inset_mm;
  const double hi = b - o.infill_inset_mm;
  const double spacing = (hi - lo) / static_cast<double>(o.infill_lines - 1);
  auto fmm = [](double mm_s) { return mm_s * 60.0; };
  auto extrude = [&](double mm) { return mm * o.extrusion_per_mm; };

  e.line("; printsig test cube");
  e.line("G21");
  e.line("G90");
  e.line("M83");
  e.g("G92", {{'E', 0.0}});
  e.g("G0", {{'X', a}, {'Y', a}, {'Z', o.layer_height_mm}, {'F', fmm(o.travel_speed)}});
  e.g("M300", {{'S', o.marker_hz}, {'P', o.marker_ms}});
  e.g("G4", {{'P', o.dwell_ms}});

  std::uint64_t rng = 0x5eed;
  // Each move draws its own feedrate, never repeating the previous one.
  std::size_t last_pick = o.perimeter_speeds.size() + o.infill_speeds.size();
  auto next_speed = [&](const std::vector<double> &speeds) {
    std::size_t i = pick(rng, speeds.size());
    if (speeds.size() > 1 && i == last_pick) i = (i + 1) % speeds.size();
    last_pick = i;
    return fmm(speeds[i]);
  };
  const double side = b - a;
  const double length = hi - lo;
  for (std::size_t layer = 0; layer < o.layers; ++layer) {
    CubeLayer info;
    info.first_command = e.line(";LAYER " + std::to_string(layer));
    e.g("G1", {{'Z', o.layer_height_mm * static_cast<double>(layer + 1)}, {'F', fmm(o.z_speed)}});
    e.g("G0", {{'X', a}, {'Y', a}, {'F', fmm(o.travel_speed)}});
    info.perimeter = e.g("G1", {{'X', b}, {'Y', a}, {'E', extrude(side)}, {'F', next_speed(o.perimeter_speeds)}});
    e.g("G1", {{'X', b}, {'Y', b}, {'E', extrude(side)}, {'F', next_speed(o.perimeter_speeds)}});
    e.g("G1", {{'X', a}, {'Y', b}, {'E', extrude(side)}, {'F', next_speed(o.perimeter_speeds)}});
    e.g("G1", {{'X', a}, {'Y', a}, {'E', extrude(side)}, {'F', next_speed(o.perimeter_speeds)}});
    // Infill start on the anti-diagonal: equidistant from both ends a
    // reversed perimeter can finish at.
    e.g("G0", {{'X', lo}, {'Y', hi}, {'F', fmm(o.travel_speed)}});

    const bool along_x = layer % 2 == 0;
    for (std::size_t i = 0; i < o.infill_lines; ++i) {
      const double offset = static_cast<double>(i) * spacing;
      const bool forward = i % 2 == 0;
      const double f = next_speed(o.infill_speeds);
      std::size_t idx;
      if (along_x) {
        double y = hi - offset;
        if (i > 0) e.g("G1", {{'X', forward ? lo : hi}, {'Y', y}, {'F', f}});
        idx = e.g("G1", {{'X', forward ? hi : lo}, {'Y', y}, {'E', extrude(length)}, {'F', f}});
      } else {
        double x = lo + offset;
        if (i > 0) e.g("G1", {{'X', x}, {'Y', forward ? hi : lo}, {'F', f}});
        idx = e.g("G1", {{'X', x}, {'Y', forward ? lo : hi}, {'E', extrude(length)}, {'F', f}});
      }
      if (i == 0) info.infill = idx;
    }
    program.layers.push_back(info);
  }

  e.g("G4", {{'P', o.dwell_ms}});
  e.g("M300", {{'S', o.marker_hz}, {'P', o.marker_ms}});
  e.line("M84");
  program.text = e.take();
  return program;
}

}  // namespace printsig
