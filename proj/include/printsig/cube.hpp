#ifndef PRINTSIG_CUBE_HPP
#define PRINTSIG_CUBE_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace printsig {

// Test-print generator: a small square tower framed by 440 Hz start and end
// beeps. Moves vary their feedrates so that no two stretches of the print
// sound alike, which is what makes desynchronization visible.
struct CubeOptions {
  std::size_t layers = 40;
  double side_mm = 6.0;
  double center_mm = 100.0;
  double layer_height_mm = 0.2;
  // Feedrates (mm/s) are drawn from these lists by a fixed pseudo-random
  // sequence. Perimeter sides last about 0.3 s, long enough that losing one
  // shifts the rest of the print by a sizeable part of an analysis frame.
  std::vector<double> perimeter_speeds{16.0, 18.0, 20.0, 22.0};
  std::vector<double> infill_speeds{40.0, 46.0, 52.0, 58.0};
  std::size_t infill_lines = 2;
  double infill_inset_mm = 1.5;
  double travel_speed = 100.0;
  double z_speed = 10.0;
  double extrusion_per_mm = 0.033;
  double marker_hz = 440.0;
  double marker_ms = 500.0;
  double dwell_ms = 1000.0;
};

struct CubeLayer {
  std::size_t first_command = 0;  // ";LAYER n" comment line
  std::size_t perimeter = 0;      // first of the four perimeter G1 sides
  std::size_t infill = 0;         // first infill G1
};

struct CubeProgram {
  std::string text;
  std::vector<CubeLayer> layers;
};

// Every perimeter side carries its own F word, and the travel to the infill
// start lies on the square's anti-diagonal, so reversing the last three sides
// leaves the timing of the rest of the print unchanged.
CubeProgram make_cube_gcode(const CubeOptions &options = {});

}  // namespace printsig

#endif  // PRINTSIG_CUBE_HPP
