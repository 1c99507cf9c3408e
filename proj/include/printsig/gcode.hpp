#ifndef PRINTSIG_GCODE_HPP
#define PRINTSIG_GCODE_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace printsig {

enum class CommandKind { G0, G1, G4, M300, Other };

const char *to_string(CommandKind kind);

// Parameter words understood by the interpreter. Other letters are dropped.
class Params {
 public:
  static constexpr std::string_view kLetters = "XYZEFSP";

  static bool is_known(char letter) {
    return kLetters.find(letter) != std::string_view::npos;
  }

  std::optional<double> get(char letter) const;
  bool has(char letter) const { return get(letter).has_value(); }
  void set(char letter, double value);
  void erase(char letter);

  bool operator==(const Params &) const = default;

 private:
  static std::size_t slot(char letter);
  std::array<std::optional<double>, kLetters.size()> values_{};
};

struct GCodeCommand {
  CommandKind kind = CommandKind::Other;
  Params params;
  // Leading command word for Other lines ("G92", "M104"); empty for comments
  // and blank lines.
  std::string word;
  std::string raw_text;
  // 1-based source line; 0 for commands synthesized after parsing.
  std::size_t line_no = 0;

  bool is_move() const {
    return kind == CommandKind::G0 || kind == CommandKind::G1;
  }
  bool operator==(const GCodeCommand &) const = default;
};

struct GCodeProgram {
  std::vector<GCodeCommand> commands;
  // Source used "\r\n"; serialize() restores it.
  bool crlf = false;
  bool trailing_newline = false;

  std::size_t size() const { return commands.size(); }
  bool operator==(const GCodeProgram &) const = default;
};

// Parses a program. A trailing signature block (see signing.hpp) is ignored.
// Throws ParseError on a malformed numeric parameter of a G0/G1/G4/M300 line.
GCodeProgram parse_gcode(std::string_view text);

std::string serialize(const GCodeProgram &program);

// Canonical text for a command, e.g. "G1 X10 Y20.5 E0.0333 F1500".
std::string format_command(const GCodeCommand &command);

// Builds a command whose raw_text is its canonical form.
GCodeCommand make_command(CommandKind kind, const Params &params);

// Formats a value with at most four decimals and no trailing zeros.
std::string format_number(double value);

enum Axis : std::size_t { kAxisX = 0, kAxisY = 1, kAxisZ = 2, kAxisE = 3 };
using AxisVector = std::array<double, 4>;

struct MoveSegment {
  enum class Kind { Move, Dwell, Beep };
  Kind kind = Kind::Move;
  double start_s = 0.0;
  double duration = 0.0;
  // mm/s, signed, per axis X/Y/Z/E.
  AxisVector velocity{};
  AxisVector start{};
  AxisVector end{};
  double beep_hz = 0.0;
  std::size_t command_index = 0;
};

struct KinematicsConfig {
  // Targets are snapped to whole motor steps; 0 disables snapping for an axis.
  AxisVector steps_per_mm{80.0, 80.0, 400.0, 93.0};
};

// Interprets moves in absolute XYZ with relative extrusion. Throws
// KinematicsError("no feedrate") for a move before any F word.
std::vector<MoveSegment> kinematics(const GCodeProgram &program,
                                    const KinematicsConfig &config = {});

double total_duration(const std::vector<MoveSegment> &segments);

}  // namespace printsig

#endif  // PRINTSIG_GCODE_HPP
