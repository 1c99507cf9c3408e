#include "printsig/gcode.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "printsig/error.hpp"
#include "printsig/signing.hpp"

namespace printsig {

const char *to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::G0: return "G0";
    case CommandKind::G1: return "G1";
    case CommandKind::G4: return "G4";
    case CommandKind::M300: return "M300";
    case CommandKind::Other: return "Other";
  }
  return "?";
}

std::size_t Params::slot(char letter) {
  return kLetters.find(letter);
}

std::optional<double> Params::get(char letter) const {
  std::size_t i = slot(letter);
  if (i == std::string_view::npos) return std::nullopt;
  return values_[i];
}

void Params::set(char letter, double value) {
  std::size_t i = slot(letter);
  if (i != std::string_view::npos) values_[i] = value;
}

void Params::erase(char letter) {
  std::size_t i = slot(letter);
  if (i != std::string_view::npos) values_[i].reset();
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t'; }

char upper(char c) { return (c >= 'a' && c <= 'z') ? c - 'a' + 'A' : c; }

struct Word {
  char letter;
  std::optional<double> value;
  std::string_view text;
};

// Splits the code part of a line into letter/number words. A number runs up
// to the next blank or letter; words whose number fails to parse keep
// value == nullopt.
std::vector<Word> split_words(std::string_view code) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < code.size()) {
    if (is_space(code[i])) {
      ++i;
      continue;
    }
    std::size_t begin = i++;
    while (i < code.size() && !is_space(code[i]) &&
           !std::isalpha(static_cast<unsigned char>(code[i]))) {
      ++i;
    }
    Word w{upper(code[begin]), std::nullopt, code.substr(begin, i - begin)};
    std::string_view number = code.substr(begin + 1, i - begin - 1);
    if (!number.empty() && number.front() == '+') number.remove_prefix(1);
    if (!number.empty()) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), v);
      if (ec == std::errc() && ptr == number.data() + number.size() && std::isfinite(v)) {
        w.value = v;
      }
    }
    words.push_back(w);
  }
  return words;
}

std::string_view strip_comment(std::string_view line) {
  std::size_t semi = line.find(';');
  if (semi != std::string_view::npos) line = line.substr(0, semi);
  std::size_t star = line.find('*');
  if (star != std::string_view::npos) line = line.substr(0, star);
  return line;
}

GCodeCommand parse_line(std::string_view line, std::size_t line_no) {
  GCodeCommand cmd;
  cmd.raw_text = std::string(line);
  cmd.line_no = line_no;

  std::vector<Word> words = split_words(strip_comment(line));
  std::size_t first = 0;
  if (!words.empty() && words[0].letter == 'N') first = 1;  // line number
  if (first >= words.size()) return cmd;

  const Word &head = words[first];
  if ((head.letter != 'G' && head.letter != 'M') || !head.value ||
      *head.value != std::floor(*head.value)) {
    cmd.word = std::string(head.text);
    return cmd;
  }
  int code = static_cast<int>(*head.value);
  cmd.word = std::string(1, head.letter) + std::to_string(code);

  bool strict = true;
  if (head.letter == 'G' && code == 0) {
    cmd.kind = CommandKind::G0;
  } else if (head.letter == 'G' && code == 1) {
    cmd.kind = CommandKind::G1;
  } else if (head.letter == 'G' && code == 4) {
    cmd.kind = CommandKind::G4;
  } else if (head.letter == 'M' && code == 300) {
    cmd.kind = CommandKind::M300;
  } else {
    strict = false;
  }
  if (strict) cmd.word.clear();

  for (std::size_t w = first + 1; w < words.size(); ++w) {
    const Word &word = words[w];
    if (!Params::is_known(word.letter)) continue;
    if (!word.value) {
      if (strict) {
        throw ParseError(line_no, "malformed parameter '" + std::string(word.text) + "'");
      }
      continue;
    }
    cmd.params.set(word.letter, *word.value);
  }
  if (!strict) return cmd;

  const Params &p = cmd.params;
  switch (cmd.kind) {
    case CommandKind::G0:
    case CommandKind::G1:
      if (!p.has('X') && !p.has('Y') && !p.has('Z') && !p.has('E') && !p.has('F')) {
        throw ParseError(line_no, std::string(to_string(cmd.kind)) + " without axis or feedrate");
      }
      if (p.has('F') && *p.get('F') <= 0.0) throw ParseError(line_no, "feedrate must be positive");
      break;
    case CommandKind::G4:
      if (p.has('P') && *p.get('P') < 0.0) throw ParseError(line_no, "negative dwell");
      if (p.has('S') && *p.get('S') < 0.0) throw ParseError(line_no, "negative dwell");
      break;
    case CommandKind::M300:
      if (!p.has('S')) cmd.params.set('S', 260.0);   // Marlin defaults
      if (!p.has('P')) cmd.params.set('P', 1000.0);
      if (*cmd.params.get('S') <= 0.0 || *cmd.params.get('P') <= 0.0) {
        throw ParseError(line_no, "M300 needs S > 0 and P > 0");
      }
      break;
    case CommandKind::Other:
      break;
  }
  return cmd;
}

}  // namespace

GCodeProgram parse_gcode(std::string_view text) {
  if (auto block = find_signature_block(text)) text = text.substr(0, *block);

  GCodeProgram program;
  if (text.empty()) return program;
  program.trailing_newline = text.back() == '\n';
  if (program.trailing_newline) text.remove_suffix(1);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (true) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
      program.crlf = true;
    }
    program.commands.push_back(parse_line(line, ++line_no));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return program;
}

std::string serialize(const GCodeProgram &program) {
  const char *eol = program.crlf ? "\r\n" : "\n";
  std::string out;
  for (std::size_t i = 0; i < program.commands.size(); ++i) {
    if (i > 0) out += eol;
    out += program.commands[i].raw_text;
  }
  if (program.trailing_newline && !program.commands.empty()) out += eol;
  return out;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string format_command(const GCodeCommand &command) {
  if (command.kind == CommandKind::Other) return command.raw_text;
  std::string out = to_string(command.kind);
  std::string_view order;
  switch (command.kind) {
    case CommandKind::G0:
    case CommandKind::G1: order = "XYZEF"; break;
    case CommandKind::G4: order = "PS"; break;
    case CommandKind::M300: order = "SP"; break;
    case CommandKind::Other: break;
  }
  for (char letter : order) {
    if (auto v = command.params.get(letter)) {
      out += ' ';
      out += letter;
      out += format_number(*v);
    }
  }
  return out;
}

GCodeCommand make_command(CommandKind kind, const Params &params) {
  GCodeCommand cmd;
  cmd.kind = kind;
  cmd.params = params;
  cmd.raw_text = format_command(cmd);
  return cmd;
}

namespace {

double snap(double value, double steps_per_mm) {
  if (steps_per_mm <= 0.0) return value;
  return std::round(value * steps_per_mm) / steps_per_mm;
}

}  // namespace

std::vector<MoveSegment> kinematics(const GCodeProgram &program,
                                    const KinematicsConfig &config) {
  std::vector<MoveSegment> segments;
  AxisVector pos{0.0, 0.0, 0.0, 0.0};
  std::optional<double> feed;
  double clock = 0.0;

  auto emit = [&](MoveSegment seg) {
    seg.start_s = clock;
    clock += seg.duration;
    segments.push_back(seg);
  };

  for (std::size_t i = 0; i < program.commands.size(); ++i) {
    const GCodeCommand &cmd = program.commands[i];
    const Params &p = cmd.params;
    switch (cmd.kind) {
      case CommandKind::G0:
      case CommandKind::G1: {
        if (auto f = p.get('F')) feed = *f;
        AxisVector target = pos;
        static constexpr char kAxes[] = "XYZ";
        for (std::size_t a = 0; a < 3; ++a) {
          if (auto v = p.get(kAxes[a])) target[a] = snap(*v, config.steps_per_mm[a]);
        }
        double de = snap(p.get('E').value_or(0.0), config.steps_per_mm[kAxisE]);
        target[kAxisE] = pos[kAxisE] + de;
        double dx = target[0] - pos[0], dy = target[1] - pos[1], dz = target[2] - pos[2];
        double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (dist == 0.0 && de == 0.0) break;
        if (!feed) {
          throw KinematicsError("line " + std::to_string(cmd.line_no) + ": no feedrate");
        }
        double speed = *feed / 60.0;
        MoveSegment seg;
        seg.kind = MoveSegment::Kind::Move;
        seg.duration = dist > 0.0 ? dist / speed : std::abs(de) / speed;
        seg.start = pos;
        seg.end = target;
        for (std::size_t a = 0; a < 4; ++a) {
          seg.velocity[a] = (target[a] - pos[a]) / seg.duration;
        }
        seg.command_index = i;
        emit(seg);
        pos = target;
        break;
      }
      case CommandKind::G4: {
        double seconds = p.has('P') ? *p.get('P') / 1000.0 : p.get('S').value_or(0.0);
        if (seconds <= 0.0) break;
        MoveSegment seg;
        seg.kind = MoveSegment::Kind::Dwell;
        seg.duration = seconds;
        seg.start = seg.end = pos;
        seg.command_index = i;
        emit(seg);
        break;
      }
      case CommandKind::M300: {
        MoveSegment seg;
        seg.kind = MoveSegment::Kind::Beep;
        seg.duration = *p.get('P') / 1000.0;
        seg.beep_hz = *p.get('S');
        seg.start = seg.end = pos;
        seg.command_index = i;
        emit(seg);
        break;
      }
      case CommandKind::Other: {
        // Position bookkeeping only; these contribute no motion time.
        if (cmd.word == "G92" || cmd.word == "G28") {
          bool any = p.has('X') || p.has('Y') || p.has('Z');
          static constexpr char kAxes[] = "XYZ";
          for (std::size_t a = 0; a < 3; ++a) {
            if (cmd.word == "G28") {
              if (!any || p.has(kAxes[a])) pos[a] = 0.0;
            } else if (auto v = p.get(kAxes[a])) {
              pos[a] = snap(*v, config.steps_per_mm[a]);
            }
          }
        }
        break;
      }
    }
  }
  return segments;
}

double total_duration(const std::vector<MoveSegment> &segments) {
  double total = 0.0;
  for (const auto &s : segments) total += s.duration;
  return total;
}

}  // namespace printsig
