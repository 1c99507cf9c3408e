#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "printsig/corpus.hpp"
#include "printsig/error.hpp"
#include "printsig/gcode.hpp"
#include "printsig/tamper.hpp"
#include "support.hpp"

using namespace printsig;

namespace {

const char *kLayer =
    "; layer\n"
    "G1 Z0.2 F600\n"
    "G0 X10 Y10 F6000\n"
    "G1 X20 Y10 E0.33 F1500\n"
    "G1 X20 Y20 E0.33 F1500\n"
    "G1 X10 Y20 E0.33 F1500\n"
    "G1 X10 Y10 E0.33 F1500\n"
    "M84\n";

GCodeProgram layer() { return parse_gcode(kLayer); }

double duration(const GCodeProgram &p) { return total_duration(kinematics(p)); }

// Lines of `b` not equal to the same-index line of `a`.
std::size_t changed_lines(const GCodeProgram &a, const GCodeProgram &b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) n += a.commands[i].raw_text != b.commands[i].raw_text;
  return n;
}

}  // namespace

TEST_CASE("insert two G0 moves mid-layer adds two lines before the index") {
  GCodeProgram p = layer();
  InsertG0 spec{4, {{50, 50, 3000}, {0, 50, 3000}}};
  GCodeProgram t = apply_tamper(p, spec);
  REQUIRE(t.size() == p.size() + 2);
  CHECK(t.commands[4].raw_text == "G0 X50 Y50 F3000");
  CHECK(t.commands[5].raw_text == "G0 X0 Y50 F3000");
  for (std::size_t i = 0; i < 4; ++i) CHECK(t.commands[i] == p.commands[i]);
  for (std::size_t i = 4; i < p.size(); ++i) CHECK(t.commands[i + 2] == p.commands[i]);
  CHECK(duration(t) > duration(p));
  CHECK(apply_tamper(p, InsertG0{p.size(), {{1, 1, 100}}}).size() == p.size() + 1);
}

TEST_CASE("delete two G1 moves removes exactly those lines") {
  GCodeProgram p = layer();
  GCodeProgram t = apply_tamper(p, DeleteG1{4, 2});
  REQUIRE(t.size() == p.size() - 2);
  CHECK(t.commands[4] == p.commands[6]);
  CHECK_THROWS_AS(apply_tamper(p, DeleteG1{2, 1}), TamperError);  // a G0
  CHECK_THROWS_AS(apply_tamper(p, DeleteG1{7, 2}), TamperError);  // past the end
  CHECK_THROWS_AS(apply_tamper(p, DeleteG1{0, 1}), TamperError);  // a comment
}

TEST_CASE("halving the feedrate of two G1 lines turns F1500 into F750") {
  GCodeProgram p = layer();
  GCodeProgram t = apply_tamper(p, ChangeFeedrate{3, 2, 0.5});
  CHECK(*t.commands[3].params.get('F') == 750.0);
  CHECK(*t.commands[4].params.get('F') == 750.0);
  CHECK(*t.commands[5].params.get('F') == 1500.0);
  CHECK(changed_lines(p, t) == 2);
  CHECK(duration(t) > duration(p));
  CHECK_THROWS_AS(apply_tamper(p, ChangeFeedrate{3, 1, 0.0}), TamperError);
  CHECK(duration(apply_tamper(p, ChangeFeedrate{3, 2, 1.0})) == duration(p));
}

TEST_CASE("extend move edits the target coordinate literally") {
  GCodeProgram p = layer();
  GCodeProgram t = apply_tamper(p, ExtendMove{3, 'X', 10.0});
  CHECK(*t.commands[3].params.get('X') == 30.0);
  CHECK(changed_lines(p, t) == 1);
  CHECK(duration(t) > duration(p));
  CHECK_THROWS_AS(apply_tamper(p, ExtendMove{3, 'Z', 1.0}), TamperError);  // no Z word
  CHECK_THROWS_AS(apply_tamper(p, ExtendMove{3, 'E', 1.0}), TamperError);
}

TEST_CASE("reorder applies the permutation and keeps the rest") {
  GCodeProgram p = layer();
  GCodeProgram t = apply_tamper(p, Reorder{4, 3, {2, 1, 0}});
  CHECK(t.commands[4] == p.commands[6]);
  CHECK(t.commands[5] == p.commands[5]);
  CHECK(t.commands[6] == p.commands[4]);
  CHECK_THROWS_AS(apply_tamper(p, Reorder{4, 3, {0, 0, 1}}), TamperError);
  CHECK_THROWS_AS(apply_tamper(p, Reorder{4, 3, {0, 1}}), TamperError);
}

TEST_CASE("replacing G1 with G0 keeps durations and drops extrusion") {
  GCodeProgram p = layer();
  GCodeProgram t = apply_tamper(p, ReplaceG1WithG0{3, 2});
  CHECK(t.commands[3].kind == CommandKind::G0);
  CHECK_FALSE(t.commands[3].params.has('E'));
  CHECK(*t.commands[3].params.get('X') == 20.0);
  CHECK(*t.commands[3].params.get('F') == 1500.0);
  auto a = kinematics(p), b = kinematics(t);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].duration == b[i].duration);
    CHECK(a[i].end[kAxisX] == b[i].end[kAxisX]);
    CHECK(a[i].end[kAxisY] == b[i].end[kAxisY]);
  }
  CHECK(b[2].velocity[kAxisE] == 0.0);
  CHECK(total_duration(b) == total_duration(a));
}

TEST_CASE("out-of-range indices are rejected") {
  GCodeProgram p = layer();
  CHECK_THROWS_AS(apply_tamper(p, InsertG0{p.size() + 1, {{1, 1, 100}}}), TamperError);
  CHECK_THROWS_AS(apply_tamper(p, InsertG0{0, {}}), TamperError);
  CHECK_THROWS_AS(apply_tamper(p, ReplaceG1WithG0{100, 1}), TamperError);
  CHECK_THROWS_AS(apply_tamper(p, ChangeFeedrate{6, 3, 2.0}), TamperError);
  CHECK_THROWS_AS(apply_tamper(p, Reorder{6, 0, {}}), TamperError);
}

TEST_CASE("property: a tamper followed by its inverse restores kinematics") {
  GCodeProgram p = parse_gcode(testing::small_print());
  const std::size_t at = anchor_command(p);
  auto k0 = kinematics(p);
  auto same = [&](const GCodeProgram &q) {
    auto k = kinematics(q);
    REQUIRE(k.size() == k0.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      CHECK(k[i].duration == doctest::Approx(k0[i].duration).epsilon(1e-9));
      CHECK(k[i].end == k0[i].end);
    }
  };

  SUBCASE("insert then remove") {
    GCodeProgram t = apply_tamper(p, InsertG0{at, dummy_moves(p)});
    t.commands.erase(t.commands.begin() + static_cast<long>(at), t.commands.begin() + static_cast<long>(at) + 2);
    same(t);
  }
  SUBCASE("delete then restore") {
    GCodeProgram t = apply_tamper(p, DeleteG1{at, 1});
    t.commands.insert(t.commands.begin() + static_cast<long>(at), p.commands[at]);
    same(t);
  }
  SUBCASE("feedrate f then 1/f") {
    same(apply_tamper(apply_tamper(p, ChangeFeedrate{at, 2, 0.5}), ChangeFeedrate{at, 2, 2.0}));
  }
  SUBCASE("permutation then its inverse") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::size_t> perm(5);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<std::size_t> inv(5);
      for (std::size_t i = 0; i < 5; ++i) inv[perm[i]] = i;
      GCodeProgram t = apply_tamper(apply_tamper(p, Reorder{at, 5, perm}), Reorder{at, 5, inv});
      CHECK(t == p);
    }
  }
}

TEST_CASE("manifest lines round trip") {
  std::vector<TamperSpec> specs{
      InsertG0{120, {{10, 20, 3000}, {15.5, 25, 3000}}}, DeleteG1{130, 2}, ExtendMove{130, 'Y', 10},
      ChangeFeedrate{130, 2, 0.5}, Reorder{130, 3, {2, 1, 0}}, ReplaceG1WithG0{130, 2}};
  std::string text = "# corpus case\n";
  for (const auto &s : specs) text += to_manifest_line(s) + "\n";
  CHECK(parse_manifest(text) == specs);
  CHECK(to_manifest_line(DeleteG1{130, 2}) == "delete_g1 at=130 count=2");
  CHECK_THROWS_AS(parse_manifest("explode at=3"), TamperError);
  CHECK_THROWS_AS(parse_manifest("delete_g1 count=2"), TamperError);
  CHECK_THROWS_AS(parse_manifest("delete_g1 at=x"), TamperError);
}

TEST_CASE("graded extend family decreases in magnitude") {
  auto family = graded_extend(12, 'X');
  REQUIRE(family.size() == 3);
  CHECK(std::get<ExtendMove>(family[0]).delta_mm == 10.0);
  CHECK(std::get<ExtendMove>(family[1]).delta_mm == 5.0);
  CHECK(std::get<ExtendMove>(family[2]).delta_mm == 2.0);
  GCodeProgram p = parse_gcode(testing::small_print());
  std::size_t at = anchor_command(p);
  double prev = 1e9;
  for (const auto &spec : graded_extend(at, 'X')) {
    double d = duration(apply_tamper(p, spec));
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("corpus families target the middle layer") {
  CubeProgram cube = make_cube_gcode();
  GCodeProgram p = parse_gcode(cube.text);
  REQUIRE(cube.layers.size() == 40);
  CHECK(anchor_command(p) == cube.layers[20].perimeter);
  auto cases = tamper_families(p);
  REQUIRE(cases.size() == 11);
  CHECK(cases.front().name == "benign");
  CHECK(cases.front().specs.empty());
  for (const auto &c : cases) CHECK_NOTHROW(apply_all(p, c.specs));
  auto moves = dummy_moves(p);
  REQUIRE(moves.size() == 2);
  CHECK(moves[0].f == 3000.0);
  CHECK_THROWS_AS(anchor_command(parse_gcode("G0 X1 F100\n")), TamperError);
}
