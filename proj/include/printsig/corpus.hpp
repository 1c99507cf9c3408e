#ifndef PRINTSIG_CORPUS_HPP
#define PRINTSIG_CORPUS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "printsig/gcode.hpp"
#include "printsig/tamper.hpp"

namespace printsig {

struct CorpusCase {
  std::string name;
  std::vector<TamperSpec> specs;  // empty for the benign copy
};

// Command the tamper families act on: the first extruding G1 of the middle
// ";LAYER" (layer 20 of 40 for the test cube), or the middle extruding G1 if
// the file has no layer comments. Throws TamperError if there is none.
std::size_t anchor_command(const GCodeProgram &program);

// Dummy travel moves used by the insertion cases: 20 mm beyond the XY bounding
// box of the print, at 50 mm/s.
std::vector<TravelMove> dummy_moves(const GCodeProgram &program);

// benign, insert_g0_x1/x2, delete_g1_x1/x2, extend_10mm/5mm/2mm,
// feedrate_half_x2, reorder_3, replace_g1_g0_x2.
std::vector<CorpusCase> tamper_families(const GCodeProgram &program);

}  // namespace printsig

#endif  // PRINTSIG_CORPUS_HPP
