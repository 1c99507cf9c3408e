#include "printsig/tamper.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "printsig/error.hpp"

namespace printsig {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_range(const GCodeProgram &program, std::size_t at, std::size_t count,
                 const char *what) {
  if (count == 0 || at > program.size() || count > program.size() - at) {
    throw TamperError(std::string(what) + ": index range [" + std::to_string(at) + ", " +
                      std::to_string(at + count) + ") outside program of " +
                      std::to_string(program.size()) + " lines");
  }
}

GCodeCommand rewritten(const GCodeCommand &original, CommandKind kind, const Params &params) {
  GCodeCommand cmd = make_command(kind, params);
  cmd.line_no = original.line_no;
  return cmd;
}

GCodeProgram apply(const GCodeProgram &program, const InsertG0 &spec) {
  if (spec.at > program.size()) {
    throw TamperError("insert_g0: index " + std::to_string(spec.at) + " out of range");
  }
  if (spec.moves.empty()) throw TamperError("insert_g0: no moves");
  GCodeProgram out = program;
  std::vector<GCodeCommand> inserted;
  for (const TravelMove &m : spec.moves) {
    if (m.f <= 0.0) throw TamperError("insert_g0: feedrate must be positive");
    Params p;
    p.set('X', m.x);
    p.set('Y', m.y);
    p.set('F', m.f);
    inserted.push_back(make_command(CommandKind::G0, p));
  }
  out.commands.insert(out.commands.begin() + static_cast<std::ptrdiff_t>(spec.at),
                      inserted.begin(), inserted.end());
  return out;
}

GCodeProgram apply(const GCodeProgram &program, const DeleteG1 &spec) {
  check_range(program, spec.at, spec.count, "delete_g1");
  for (std::size_t i = spec.at; i < spec.at + spec.count; ++i) {
    if (program.commands[i].kind != CommandKind::G1) {
      throw TamperError("delete_g1: command " + std::to_string(i) + " is not G1");
    }
  }
  GCodeProgram out = program;
  auto first = out.commands.begin() + static_cast<std::ptrdiff_t>(spec.at);
  out.commands.erase(first, first + static_cast<std::ptrdiff_t>(spec.count));
  return out;
}

GCodeProgram apply(const GCodeProgram &program, const ExtendMove &spec) {
  check_range(program, spec.at, 1, "extend_move");
  if (spec.axis != 'X' && spec.axis != 'Y' && spec.axis != 'Z') {
    throw TamperError(std::string("extend_move: bad axis '") + spec.axis + "'");
  }
  const GCodeCommand &cmd = program.commands[spec.at];
  if (!cmd.is_move() || !cmd.params.has(spec.axis)) {
    throw TamperError("extend_move: command " + std::to_string(spec.at) +
                      " is not a move carrying " + spec.axis);
  }
  GCodeProgram out = program;
  Params p = cmd.params;
  p.set(spec.axis, *p.get(spec.axis) + spec.delta_mm);
  out.commands[spec.at] = rewritten(cmd, cmd.kind, p);
  return out;
}

GCodeProgram apply(const GCodeProgram &program, const ChangeFeedrate &spec) {
  check_range(program, spec.at, spec.count, "change_feedrate");
  if (!(spec.factor > 0.0)) throw TamperError("change_feedrate: factor must be positive");
  GCodeProgram out = program;
  for (std::size_t i = spec.at; i < spec.at + spec.count; ++i) {
    const GCodeCommand &cmd = program.commands[i];
    if (!cmd.is_move() || !cmd.params.has('F')) {
      throw TamperError("change_feedrate: command " + std::to_string(i) +
                        " is not a move with an explicit F");
    }
    Params p = cmd.params;
    p.set('F', *p.get('F') * spec.factor);
    out.commands[i] = rewritten(cmd, cmd.kind, p);
  }
  return out;
}

GCodeProgram apply(const GCodeProgram &program, const Reorder &spec) {
  check_range(program, spec.at, spec.count, "reorder");
  if (spec.permutation.size() != spec.count) {
    throw TamperError("reorder: permutation length differs from count");
  }
  std::vector<bool> seen(spec.count, false);
  for (std::size_t j : spec.permutation) {
    if (j >= spec.count || seen[j]) throw TamperError("reorder: not a permutation");
    seen[j] = true;
  }
  GCodeProgram out = program;
  for (std::size_t i = 0; i < spec.count; ++i) {
    out.commands[spec.at + i] = program.commands[spec.at + spec.permutation[i]];
  }
  return out;
}

GCodeProgram apply(const GCodeProgram &program, const ReplaceG1WithG0 &spec) {
  check_range(program, spec.at, spec.count, "replace_g1_with_g0");
  GCodeProgram out = program;
  for (std::size_t i = spec.at; i < spec.at + spec.count; ++i) {
    const GCodeCommand &cmd = program.commands[i];
    if (cmd.kind != CommandKind::G1) {
      throw TamperError("replace_g1_with_g0: command " + std::to_string(i) + " is not G1");
    }
    Params p = cmd.params;
    p.erase('E');
    out.commands[i] = rewritten(cmd, CommandKind::G0, p);
  }
  return out;
}

std::map<std::string, std::string> key_values(std::istringstream &in, std::size_t line_no) {
  std::map<std::string, std::string> kv;
  std::string token;
  while (in >> token) {
    std::size_t eq = token.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw TamperError("manifest line " + std::to_string(line_no) + ": expected key=value, got '" +
                        token + "'");
    }
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return kv;
}

double to_double(const std::string &s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw TamperError("manifest line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t to_index(const std::string &s, std::size_t line_no) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw TamperError("manifest line " + std::to_string(line_no) + ": bad index '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

const std::string &require(const std::map<std::string, std::string> &kv, const char *key,
                           std::size_t line_no) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    throw TamperError("manifest line " + std::to_string(line_no) + ": missing " + key);
  }
  return it->second;
}

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

GCodeProgram apply_tamper(const GCodeProgram &program, const TamperSpec &spec) {
  return std::visit([&](const auto &s) { return apply(program, s); }, spec);
}

GCodeProgram apply_all(const GCodeProgram &program, const std::vector<TamperSpec> &specs) {
  GCodeProgram out = program;
  for (const auto &spec : specs) out = apply_tamper(out, spec);
  return out;
}

std::string to_manifest_line(const TamperSpec &spec) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const InsertG0 &s) {
                   out << "insert_g0 at=" << s.at << " moves=";
                   for (std::size_t i = 0; i < s.moves.size(); ++i) {
                     if (i) out << ',';
                     out << shortest(s.moves[i].x) << ':' << shortest(s.moves[i].y) << ':'
                         << shortest(s.moves[i].f);
                   }
                 },
                 [&](const DeleteG1 &s) { out << "delete_g1 at=" << s.at << " count=" << s.count; },
                 [&](const ExtendMove &s) {
                   out << "extend_move at=" << s.at << " axis=" << s.axis
                       << " delta=" << shortest(s.delta_mm);
                 },
                 [&](const ChangeFeedrate &s) {
                   out << "change_feedrate at=" << s.at << " count=" << s.count
                       << " factor=" << shortest(s.factor);
                 },
                 [&](const Reorder &s) {
                   out << "reorder at=" << s.at << " count=" << s.count << " perm=";
                   for (std::size_t i = 0; i < s.permutation.size(); ++i) {
                     if (i) out << ',';
                     out << s.permutation[i];
                   }
                 },
                 [&](const ReplaceG1WithG0 &s) {
                   out << "replace_g1_with_g0 at=" << s.at << " count=" << s.count;
                 },
             },
             spec);
  return out.str();
}

std::vector<TamperSpec> parse_manifest(std::string_view text) {
  std::vector<TamperSpec> specs;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream in(line);
    std::string kind;
    if (!(in >> kind)) continue;
    auto kv = key_values(in, line_no);
    std::size_t at = to_index(require(kv, "at", line_no), line_no);
    auto count = [&] { return to_index(require(kv, "count", line_no), line_no); };

    if (kind == "insert_g0") {
      InsertG0 s{at, {}};
      for (const auto &move : split(require(kv, "moves", line_no), ',')) {
        auto xyz = split(move, ':');
        if (xyz.size() != 3) {
          throw TamperError("manifest line " + std::to_string(line_no) + ": move needs x:y:f");
        }
        s.moves.push_back({to_double(xyz[0], line_no), to_double(xyz[1], line_no),
                           to_double(xyz[2], line_no)});
      }
      specs.emplace_back(s);
    } else if (kind == "delete_g1") {
      specs.emplace_back(DeleteG1{at, count()});
    } else if (kind == "extend_move") {
      const std::string &axis = require(kv, "axis", line_no);
      if (axis.size() != 1) {
        throw TamperError("manifest line " + std::to_string(line_no) + ": bad axis");
      }
      specs.emplace_back(ExtendMove{at, axis[0], to_double(require(kv, "delta", line_no), line_no)});
    } else if (kind == "change_feedrate") {
      specs.emplace_back(
          ChangeFeedrate{at, count(), to_double(require(kv, "factor", line_no), line_no)});
    } else if (kind == "reorder") {
      Reorder s{at, count(), {}};
      for (const auto &j : split(require(kv, "perm", line_no), ',')) {
        s.permutation.push_back(to_index(j, line_no));
      }
      specs.emplace_back(s);
    } else if (kind == "replace_g1_with_g0") {
      specs.emplace_back(ReplaceG1WithG0{at, count()});
    } else {
      throw TamperError("manifest line " + std::to_string(line_no) + ": unknown tamper '" +
                        kind + "'");
    }
  }
  return specs;
}

std::vector<TamperSpec> graded_extend(std::size_t at, char axis,
                                      const std::vector<double> &deltas_mm) {
  std::vector<TamperSpec> family;
  for (double d : deltas_mm) family.emplace_back(ExtendMove{at, axis, d});
  return family;
}

}  // namespace printsig
