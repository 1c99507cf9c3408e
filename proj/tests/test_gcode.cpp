#include <doctest.h>

#include <random>
#include <string>

#include "printsig/error.hpp"
#include "printsig/gcode.hpp"
#include "support.hpp"

using namespace printsig;

TEST_CASE("G1 line maps to its parameters") {
  GCodeProgram p = parse_gcode("G1 X10 Y20 F1500");
  REQUIRE(p.size() == 1);
  const GCodeCommand &c = p.commands[0];
  CHECK(c.kind == CommandKind::G1);
  CHECK(*c.params.get('X') == 10.0);
  CHECK(*c.params.get('Y') == 20.0);
  CHECK(*c.params.get('F') == 1500.0);
  CHECK_FALSE(c.params.has('E'));
  CHECK(c.line_no == 1);
}

TEST_CASE("M300 line maps to frequency and duration") {
  GCodeCommand c = parse_gcode("M300 S440 P500").commands.at(0);
  CHECK(c.kind == CommandKind::M300);
  CHECK(*c.params.get('S') == 440.0);
  CHECK(*c.params.get('P') == 500.0);
}

TEST_CASE("M300 without words gets the firmware defaults") {
  GCodeCommand c = parse_gcode("M300").commands.at(0);
  CHECK(*c.params.get('S') == 260.0);
  CHECK(*c.params.get('P') == 1000.0);
}

TEST_CASE("slicer-style lines with fractional coordinates parse") {
  const char *text =
      "G0 F9000 X1.136 Y-2.509\n"
      "G1 F1500 X-1.136 Y-2.509 E0.04467\n"
      "g1 x1.5 y+2 e.5 ; lower case and a comment\n"
      "N12 G1 X3*45\n";
  GCodeProgram p = parse_gcode(text);
  REQUIRE(p.size() == 4);
  CHECK(p.commands[0].kind == CommandKind::G0);
  CHECK(*p.commands[0].params.get('X') == doctest::Approx(1.136));
  CHECK(*p.commands[1].params.get('E') == doctest::Approx(0.04467));
  CHECK(*p.commands[2].params.get('Y') == 2.0);
  CHECK(*p.commands[2].params.get('E') == 0.5);
  CHECK(*p.commands[3].params.get('X') == 3.0);
}

TEST_CASE("unknown commands and comments are kept verbatim") {
  GCodeProgram p = parse_gcode("M104 S200\n; layer 3\n\nG28\n");
  REQUIRE(p.size() == 4);
  CHECK(p.commands[0].kind == CommandKind::Other);
  CHECK(p.commands[0].word == "M104");
  CHECK(p.commands[1].raw_text == "; layer 3");
  CHECK(p.commands[1].word.empty());
  CHECK(p.commands[2].raw_text.empty());
  CHECK(p.commands[3].word == "G28");
}

TEST_CASE("malformed numeric parameter cites the line") {
  try {
    parse_gcode("G1 X1\nG1 X2\nG1 X1..5 Y2\n");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line_no() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_gcode("G4 P-5"), ParseError);
  CHECK_THROWS_AS(parse_gcode("M300 S0 P100"), ParseError);
  CHECK_THROWS_AS(parse_gcode("G1"), ParseError);
  // Malformed words on commands the interpreter ignores are tolerated.
  CHECK_NOTHROW(parse_gcode("M117 Xhello"));
}

TEST_CASE("serialize: empty program and single comment") {
  CHECK(serialize(parse_gcode("")).empty());
  CHECK(serialize(parse_gcode("; only a comment")) == "; only a comment");
}

TEST_CASE("round trip is byte identical, including CRLF and missing final newline") {
  for (std::string text : {std::string("G1 X1.50 Y2 F600\n;c\n  G0   X0\n"),
                           std::string("G1 X1 F600\r\nG4 P10\r\n"), std::string("G1 X1 F600\nM84")}) {
    GCodeProgram p = parse_gcode(text);
    CHECK(serialize(p) == text);
  }
  CHECK(parse_gcode("G1 X1 F6\r\nG1 X2\r\n").crlf);
}

TEST_CASE("canonical formatting keeps four decimals of each value") {
  Params params;
  params.set('X', 1.23456);
  params.set('E', 0.5);
  params.set('F', 1500.0);
  GCodeCommand c = make_command(CommandKind::G1, params);
  CHECK(c.raw_text == "G1 X1.2346 E0.5 F1500");
  GCodeCommand back = parse_gcode(c.raw_text).commands.at(0);
  CHECK(back.kind == c.kind);
  CHECK(*back.params.get('X') == doctest::Approx(1.2346).epsilon(1e-12));
  CHECK(format_number(-0.00001) == "0");
  CHECK(format_number(12.0) == "12");
}

TEST_CASE("formatting then parsing preserves semantics to four decimals") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-200.0, 200.0);
  for (int i = 0; i < 200; ++i) {
    Params params;
    params.set('X', coord(rng));
    params.set('Y', coord(rng));
    params.set('F', std::abs(coord(rng)) + 1.0);
    GCodeCommand c = make_command(i % 2 ? CommandKind::G1 : CommandKind::G0, params);
    GCodeCommand back = parse_gcode(format_command(c)).commands.at(0);
    CHECK(back.kind == c.kind);
    for (char letter : std::string("XYF")) {
      CHECK(std::abs(*back.params.get(letter) - *params.get(letter)) <= 0.5e-4 + 1e-12);
    }
  }
}

TEST_CASE("kinematics: single axis move") {
  auto segs = kinematics(parse_gcode("G1 X10 F600"));
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].duration == doctest::Approx(1.0));
  CHECK(segs[0].velocity[kAxisX] == doctest::Approx(10.0));
  CHECK(segs[0].velocity[kAxisY] == 0.0);
}

TEST_CASE("kinematics: diagonal move over a 3-4-5 triangle") {
  auto segs = kinematics(parse_gcode("G1 X3 Y4 F300"));
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].duration == doctest::Approx(1.0));
  CHECK(segs[0].velocity[kAxisX] == doctest::Approx(3.0));
  CHECK(segs[0].velocity[kAxisY] == doctest::Approx(4.0));
}

TEST_CASE("kinematics: dwell and beep") {
  auto segs = kinematics(parse_gcode("G4 P2000\nM300 S440 P500\nG4 S1.5\nG4 P0"));
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].kind == MoveSegment::Kind::Dwell);
  CHECK(segs[0].duration == doctest::Approx(2.0));
  CHECK(segs[0].velocity == AxisVector{});
  CHECK(segs[1].kind == MoveSegment::Kind::Beep);
  CHECK(segs[1].beep_hz == 440.0);
  CHECK(segs[1].duration == doctest::Approx(0.5));
  CHECK(segs[2].duration == doctest::Approx(1.5));
  CHECK(segs[2].start_s == doctest::Approx(2.5));
}

TEST_CASE("kinematics: extrusion-only move and zero moves") {
  auto segs = kinematics(parse_gcode("G1 X5 F300\nG1 X5\nG1 E2 F120\nG1 F900"));
  REQUIRE(segs.size() == 2);
  CHECK(segs[1].duration == doctest::Approx(1.0));
  CHECK(segs[1].velocity[kAxisE] == doctest::Approx(2.0));
  CHECK(segs[1].command_index == 2);
}

TEST_CASE("kinematics: move before any feedrate") {
  try {
    kinematics(parse_gcode("G90\nG1 X10"));
    FAIL("expected error");
  } catch (const KinematicsError &e) {
    CHECK(std::string(e.what()).find("no feedrate") != std::string::npos);
  }
}

TEST_CASE("kinematics: targets snap to motor steps") {
  auto segs = kinematics(parse_gcode("G1 X0.0191 F60"));
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].end[kAxisX] == 2.0 / 80.0);
  CHECK(kinematics(parse_gcode("G1 X0.004 F60")).empty());  // below half a step
  KinematicsConfig exact;
  exact.steps_per_mm = {0, 0, 0, 0};
  CHECK(kinematics(parse_gcode("G1 X0.0191 F60"), exact)[0].end[kAxisX] == 0.0191);
}

TEST_CASE("kinematics: other commands take no time but G92 resets position") {
  auto segs = kinematics(parse_gcode("G1 X10 F600\nM104 S200\nG92 X0\nG1 X10"));
  REQUIRE(segs.size() == 2);
  CHECK(segs[1].duration == doctest::Approx(1.0));
  CHECK(total_duration(segs) == doctest::Approx(2.0));
}

TEST_CASE("property: dropping F equal to the modal feedrate leaves kinematics unchanged") {
  std::string with_f = "G1 X10 F600\nG1 Y10 F600\nG1 X0 F600\n";
  std::string without = "G1 X10 F600\nG1 Y10\nG1 X0\n";
  auto a = kinematics(parse_gcode(with_f));
  auto b = kinematics(parse_gcode(without));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].duration == b[i].duration);
    CHECK(a[i].velocity == b[i].velocity);
  }
}

TEST_CASE("property: total duration equals the segment sum and survives round trip") {
  GCodeProgram p = parse_gcode(testing::small_print());
  auto segs = kinematics(p);
  double sum = 0.0;
  for (const auto &s : segs) {
    CHECK(s.duration > 0.0);
    sum += s.duration;
  }
  CHECK(total_duration(segs) == doctest::Approx(sum).epsilon(1e-12));
  CHECK(total_duration(kinematics(parse_gcode(serialize(p)))) == total_duration(segs));
}
