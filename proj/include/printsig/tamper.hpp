#ifndef PRINTSIG_TAMPER_HPP
#define PRINTSIG_TAMPER_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "printsig/gcode.hpp"

namespace printsig {

struct TravelMove {
  double x = 0.0;
  double y = 0.0;
  double f = 0.0;
  bool operator==(const TravelMove &) const = default;
};

// Indices below are command (line) indices into GCodeProgram::commands.
struct InsertG0 {
  std::size_t at = 0;  // inserted before this index; == size() appends
  std::vector<TravelMove> moves;
  bool operator==(const InsertG0 &) const = default;
};

struct DeleteG1 {
  std::size_t at = 0;
  std::size_t count = 1;
  bool operator==(const DeleteG1 &) const = default;
};

struct ExtendMove {
  std::size_t at = 0;
  char axis = 'X';
  double delta_mm = 0.0;
  bool operator==(const ExtendMove &) const = default;
};

struct ChangeFeedrate {
  std::size_t at = 0;
  std::size_t count = 1;
  double factor = 1.0;
  bool operator==(const ChangeFeedrate &) const = default;
};

// Command at + i of the result is the original command at + permutation[i].
struct Reorder {
  std::size_t at = 0;
  std::size_t count = 0;
  std::vector<std::size_t> permutation;
  bool operator==(const Reorder &) const = default;
};

struct ReplaceG1WithG0 {
  std::size_t at = 0;
  std::size_t count = 1;
  bool operator==(const ReplaceG1WithG0 &) const = default;
};

using TamperSpec = std::variant<InsertG0, DeleteG1, ExtendMove, ChangeFeedrate,
                                Reorder, ReplaceG1WithG0>;

// Returns a modified copy; every line not named by the spec is untouched.
// Throws TamperError when the spec does not fit the program.
GCodeProgram apply_tamper(const GCodeProgram &program, const TamperSpec &spec);

// Manifest text: one spec per line, '#' starts a comment.
//   insert_g0 at=120 moves=10:20:3000,15:25:3000
//   delete_g1 at=130 count=2
//   extend_move at=130 axis=Y delta=10
//   change_feedrate at=130 count=2 factor=0.5
//   reorder at=130 count=3 perm=2,1,0
//   replace_g1_with_g0 at=130 count=2
std::string to_manifest_line(const TamperSpec &spec);
std::vector<TamperSpec> parse_manifest(std::string_view text);

GCodeProgram apply_all(const GCodeProgram &program, const std::vector<TamperSpec> &specs);

// ExtendMove variants of decreasing magnitude at one command.
std::vector<TamperSpec> graded_extend(std::size_t at, char axis,
                                      const std::vector<double> &deltas_mm = {10.0, 5.0, 2.0});

}  // namespace printsig

#endif  // PRINTSIG_TAMPER_HPP
