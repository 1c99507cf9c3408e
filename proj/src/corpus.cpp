#include "printsig/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "printsig/error.hpp"

namespace printsig {

namespace {

bool extruding_g1(const GCodeCommand &c) {
  return c.kind == CommandKind::G1 && c.params.has('E') && (c.params.has('X') || c.params.has('Y'));
}

}  // namespace

std::size_t anchor_command(const GCodeProgram &program) {
  std::vector<std::size_t> layers;
  for (std::size_t i = 0; i < program.size(); ++i) {
    if (program.commands[i].raw_text.starts_with(";LAYER")) layers.push_back(i);
  }
  if (!layers.empty()) {
    for (std::size_t i = layers[layers.size() / 2]; i < program.size(); ++i) {
      if (extruding_g1(program.commands[i])) return i;
    }
  }
  std::vector<std::size_t> moves;
  for (std::size_t i = 0; i < program.size(); ++i) {
    if (extruding_g1(program.commands[i])) moves.push_back(i);
  }
  if (moves.empty()) throw TamperError("corpus: no extruding G1 moves");
  return moves[moves.size() / 2];
}

std::vector<TravelMove> dummy_moves(const GCodeProgram &program) {
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  for (const GCodeCommand &c : program.commands) {
    if (!c.is_move()) continue;
    if (auto x = c.params.get('X')) min_x = std::min(min_x, *x), max_x = std::max(max_x, *x);
    if (auto y = c.params.get('Y')) min_y = std::min(min_y, *y), max_y = std::max(max_y, *y);
  }
  if (!std::isfinite(min_x) || !std::isfinite(min_y)) throw TamperError("corpus: no XY moves");
  constexpr double kMargin = 20.0;
  constexpr double kFeed = 3000.0;
  return {{max_x + kMargin, max_y + kMargin, kFeed}, {min_x - kMargin, max_y + kMargin, kFeed}};
}

std::vector<CorpusCase> tamper_families(const GCodeProgram &program) {
  const std::size_t at = anchor_command(program);
  const std::vector<TravelMove> dummies = dummy_moves(program);

  // Extend along the axis the anchor move travels furthest.
  char axis = 'X';
  for (const MoveSegment &s : kinematics(program)) {
    if (s.command_index != at) continue;
    axis = std::abs(s.end[kAxisY] - s.start[kAxisY]) > std::abs(s.end[kAxisX] - s.start[kAxisX]) ? 'Y' : 'X';
    break;
  }

  std::vector<CorpusCase> cases;
  cases.push_back({"benign", {}});
  cases.push_back({"insert_g0_x1", {InsertG0{at, {dummies[0]}}}});
  cases.push_back({"insert_g0_x2", {InsertG0{at, dummies}}});
  cases.push_back({"delete_g1_x1", {DeleteG1{at, 1}}});
  cases.push_back({"delete_g1_x2", {DeleteG1{at, 2}}});
  const char *extend_names[] = {"extend_10mm", "extend_5mm", "extend_2mm"};
  auto extends = graded_extend(at, axis);
  for (std::size_t i = 0; i < extends.size(); ++i) cases.push_back({extend_names[i], {extends[i]}});
  cases.push_back({"feedrate_half_x2", {ChangeFeedrate{at, 2, 0.5}}});
  cases.push_back({"reorder_3", {Reorder{at + 1, 3, {2, 1, 0}}}});
  cases.push_back({"replace_g1_g0_x2", {ReplaceG1WithG0{at, 2}}});
  return cases;
}

}  // namespace printsig
