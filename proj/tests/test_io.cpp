#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "cfk/cli.hpp"
#include "cfk/io.hpp"
#include "fixtures.hpp"

using namespace cfk;

static const char* kLhtDoc = R"({
  "field": {"p": 2},
  "generators": [
    {"name": "a", "gr_w": 0, "gr_z": -2},
    {"name": "b", "gr_w": -1, "gr_z": -1},
    {"name": "c", "gr_w": -2, "gr_z": 0}
  ],
  "differential": [
    {"from": "a", "to": "b", "coeff": -1},
    {"from": "c", "to": "b", "coeff": 1}
  ],
  "flip": [
    {"from": "a", "to": "c", "coeff": -1},
    {"from": "b", "to": "b", "coeff": 1},
    {"from": "c", "to": "a", "coeff": 1}
  ],
  "metadata": {"knot": "left-handed trefoil"}
})";

TEST_CASE("parsing the trefoil document") {
  ComplexDocument doc = parse_complex(kLhtDoc);
  CHECK(doc.complex.p == 2);
  REQUIRE(doc.complex.size() == 3);
  CHECK(doc.complex.gens[0].name == "a");
  CHECK(doc.complex.gens[0].gr == Bigrading(0, -2));
  CHECK(doc.complex.d.size() == 2);
  auto e = doc.complex.arrow_exponents(0, 1);
  REQUIRE(e);
  CHECK(*e == std::make_pair(0, 1));
  REQUIRE(doc.flip);
  CHECK(doc.flip->c.size() == 3);
  CHECK(doc.metadata["knot"] == "left-handed trefoil");
}

TEST_CASE("document round-trip") {
  ComplexDocument doc = parse_complex(kLhtDoc);
  CHECK(parse_complex(serialize_complex(doc)) == doc);
  // serialization itself is stable
  CHECK(serialize_complex(parse_complex(serialize_complex(doc))) == serialize_complex(doc));

  ComplexDocument plain;
  plain.complex = fixtures::fig8(3);
  CHECK(parse_complex(serialize_complex(plain)) == plain);
}

TEST_CASE("empty generator list gives the empty complex") {
  ComplexDocument doc = parse_complex(R"({"generators": []})");
  CHECK(doc.complex.size() == 0);
  CHECK(doc.complex.p == 2);
  CHECK(doc.complex.is_valid());
  CHECK_FALSE(doc.flip);
}

TEST_CASE("default field characteristic") {
  ComplexDocument doc = parse_complex(R"({"generators": []})", 5);
  CHECK(doc.complex.p == 5);
}

TEST_CASE("syntax errors carry line positions") {
  try {
    parse_complex("{\n  \"generators\": [\n  oops\n]}");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("schema violations") {
  CHECK_THROWS_AS(parse_complex("[1,2,3]"), ParseError);
  CHECK_THROWS_AS(parse_complex("{}"), ParseError);
  CHECK_THROWS_AS(parse_complex(R"({"field": {"p": 4}, "generators": []})"), ParseError);
  CHECK_THROWS_AS(parse_complex(R"({"generators": [{"name": "", "gr_w": 0, "gr_z": 0}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_complex(R"({"generators": [{"name": "x", "gr_w": 0}]})"), ParseError);
  CHECK_THROWS_AS(parse_complex(R"({"generators": [{"name": "x", "gr_w": "0", "gr_z": 0}]})"),
                  ParseError);
  // duplicate names and unknown arrow endpoints
  CHECK_THROWS_AS(parse_complex(R"({"generators": [
        {"name": "x", "gr_w": 0, "gr_z": 0}, {"name": "x", "gr_w": 2, "gr_z": 0}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_complex(R"({"generators": [{"name": "x", "gr_w": 0, "gr_z": 0}],
        "differential": [{"from": "x", "to": "y", "coeff": 1}]})"),
                  ParseError);
}

TEST_CASE("semantic violations keep their types") {
  // generator with gradings of different parity
  CHECK_THROWS_AS(parse_complex(R"({"generators": [{"name": "x", "gr_w": 1, "gr_z": 0}]})"),
                  ParityError);
  // arrow between generators with even Maslov difference
  CHECK_THROWS_AS(parse_complex(R"({"generators": [
        {"name": "a", "gr_w": 0, "gr_z": 0}, {"name": "b", "gr_w": 2, "gr_z": 0}],
        "differential": [{"from": "a", "to": "b", "coeff": 1}]})"),
                  ParityError);
  // d^2 != 0 over F_3 (the square of a box with all signs positive)
  CHECK_THROWS_AS(parse_complex(R"({"field": {"p": 3}, "generators": [
        {"name": "p", "gr_w": 0, "gr_z": 0}, {"name": "q", "gr_w": 1, "gr_z": -1},
        {"name": "r", "gr_w": -1, "gr_z": 1}, {"name": "s", "gr_w": 0, "gr_z": 0}],
        "differential": [
        {"from": "p", "to": "q", "coeff": 1}, {"from": "p", "to": "r", "coeff": 1},
        {"from": "q", "to": "s", "coeff": 1}, {"from": "r", "to": "s", "coeff": 1}]})"),
                  NotChainMap);
}

TEST_CASE("flip validation in documents") {
  // an entry that is not flip-filtered (negative U power)
  CHECK_THROWS_AS(parse_complex(R"({"generators": [
        {"name": "a", "gr_w": 0, "gr_z": 2}, {"name": "b", "gr_w": 0, "gr_z": -2}],
        "flip": [{"from": "a", "to": "b", "coeff": 1}]})"),
                  BadFlip);
  // a flip that fails to commute with the differential
  std::string nonchain = R"({
    "generators": [
      {"name": "a", "gr_w": 0, "gr_z": -2},
      {"name": "b", "gr_w": -1, "gr_z": -1},
      {"name": "c", "gr_w": -2, "gr_z": 0}
    ],
    "differential": [
      {"from": "a", "to": "b", "coeff": 1},
      {"from": "c", "to": "b", "coeff": 1}
    ],
    "flip": [{"from": "c", "to": "a", "coeff": 1}]
  })";
  CHECK_THROWS_AS(parse_complex(nonchain), NotChainMap);
  // an explicit empty flip array is the zero map, which is never an
  // isomorphism on a complex with homology
  std::string zeroflip = R"({
    "generators": [
      {"name": "a", "gr_w": 0, "gr_z": -2},
      {"name": "b", "gr_w": -1, "gr_z": -1},
      {"name": "c", "gr_w": -2, "gr_z": 0}
    ],
    "differential": [
      {"from": "a", "to": "b", "coeff": 1},
      {"from": "c", "to": "b", "coeff": 1}
    ],
    "flip": []
  })";
  CHECK_THROWS_AS(parse_complex(zeroflip), BadFlip);
}

TEST_CASE("flip that is a chain map but not a homology isomorphism") {
  // two parallel towers exchanged with a W twist: commutes with d = 0, but
  // the fold has determinant W and dies at W = 0
  std::string doc = R"({
    "generators": [
      {"name": "g", "gr_w": 0, "gr_z": 0},
      {"name": "h", "gr_w": 2, "gr_z": 0}
    ],
    "flip": [
      {"from": "g", "to": "h", "coeff": 1},
      {"from": "h", "to": "g", "coeff": 1}
    ]
  })";
  CHECK_THROWS_AS(parse_complex(doc), BadFlip);
}

TEST_CASE("module structure strings") {
  CHECK(module_structure(FWModule{0, {}}) == "0");
  CHECK(module_structure(FWModule{1, {}}) == "F[W]");
  CHECK(module_structure(FWModule{1, {1}}) == "F[W] ⊕ F[W]/W");
  CHECK(module_structure(FWModule{2, {1, 2}}) ==
        "F[W] ⊕ F[W] ⊕ F[W]/W ⊕ F[W]/W^2");
}

TEST_CASE("reduction transports the flip map") {
  // trefoil with an extra cancelling pair x -> y glued on in front, plus an
  // interaction arrow d(c) = Ub + Uy that the cancellation has to clear
  std::string doc = R"({
    "field": {"p": 3},
    "generators": [
      {"name": "x", "gr_w": 0, "gr_z": 0},
      {"name": "y", "gr_w": -1, "gr_z": -1},
      {"name": "a", "gr_w": 0, "gr_z": -2},
      {"name": "b", "gr_w": -1, "gr_z": -1},
      {"name": "c", "gr_w": -2, "gr_z": 0}
    ],
    "differential": [
      {"from": "x", "to": "y", "coeff": 1},
      {"from": "a", "to": "b", "coeff": -1},
      {"from": "c", "to": "b", "coeff": 1},
      {"from": "c", "to": "y", "coeff": 1}
    ],
    "flip": [
      {"from": "a", "to": "c", "coeff": -1},
      {"from": "b", "to": "b", "coeff": 1},
      {"from": "b", "to": "y", "coeff": 1},
      {"from": "c", "to": "a", "coeff": -1},
      {"from": "c", "to": "x", "coeff": 1}
    ]
  })";
  ComplexDocument parsed = parse_complex(doc);
  REQUIRE(parsed.flip);
  auto [red, psi] = reduce_with_flip(parsed.complex, *parsed.flip);
  CHECK(red.is_reduced());
  REQUIRE(red.size() == 3);
  CHECK(red.gens[0].name == "a");
  CHECK(red.gens[2].name == "c");
  // the interaction arrow dies with the pair and the trefoil survives intact
  BigradedComplex lht = fixtures::lht(3);
  CHECK(red.d == lht.d);
  CHECK(psi == fixtures::lht_flip(lht));
  // the transported flip is still a flip: chain map and homology isomorphism
  CHECK_NOTHROW(validate_flip(red, psi));
}

// --- the command line --------------------------------------------------------

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  int code = run_cli(std::move(args), in, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("cli validate") {
  CliResult ok = cli({"validate", "-"}, kLhtDoc);
  CHECK(ok.code == 0);
  CHECK(ok.out.find("3 generators") != std::string::npos);
  CHECK(ok.out.find("flip present") != std::string::npos);

  CliResult empty = cli({"validate", "-"}, R"({"generators": []})");
  CHECK(empty.code == 0);

  CliResult bad = cli({"--json", "validate", "-"}, R"({"generators": [oops]})");
  CHECK(bad.code == 1);
  json errj = json::parse(bad.err);
  CHECK(errj["error"]["type"] == "parse");

  CliResult jr = cli({"--json", "validate", "-"}, kLhtDoc);
  CHECK(jr.code == 0);
  json r = json::parse(jr.out);
  CHECK(r["valid"] == true);
  CHECK(r["generators"] == 3);
  CHECK(r["flip"] == true);
}

TEST_CASE("cli usage errors") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"surgery", "-"}).code == 2);  // --slope is required
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli surgery") {
  CliResult r = cli({"surgery", "--slope", "1", "-"}, kLhtDoc);
  CHECK(r.code == 0);
  CHECK(r.out.find("F[W] ⊕ F[W]/W") != std::string::npos);

  CliResult j = cli({"--json", "surgery", "--slope", "-2", "-"}, kLhtDoc);
  CHECK(j.code == 0);
  json parsed = json::parse(j.out);
  CHECK(parsed["slope"]["p"] == -2);
  CHECK(parsed["summands"].size() == 2);
  for (auto& s : parsed["summands"]) {
    CHECK(s["free_rank"] == 1);
    CHECK(s["torsion"].empty());
  }

  CliResult one = cli({"--json", "surgery", "--slope", "-2", "--spin-c", "1", "-"}, kLhtDoc);
  json po = json::parse(one.out);
  CHECK(po["summands"].size() == 1);
  CHECK(po["summands"][0]["spin_c"] == 1);

  // slope parsing and domain errors surface with exit code 1
  CHECK(cli({"surgery", "--slope", "x/y", "-"}, kLhtDoc).code == 1);
  CHECK(cli({"surgery", "--slope", "1/0", "-"}, kLhtDoc).code == 1);
  CHECK(cli({"surgery", "--slope", "0", "-"}, kLhtDoc).code == 1);
  CHECK(cli({"surgery", "--slope", "4/2", "-"}, kLhtDoc).code == 1);
  // a document without a flip cannot be fed to the cone
  CliResult noflip = cli({"surgery", "--slope", "1", "-"}, R"({"generators": []})");
  CHECK(noflip.code == 1);
  CHECK(noflip.err.find("flip") != std::string::npos);
}

TEST_CASE("cli dual-knot") {
  CliResult r = cli({"--json", "dual-knot", "--n", "1", "-"}, kLhtDoc);
  CHECK(r.code == 0);
  json parsed = json::parse(r.out);
  CHECK(parsed["n"] == 1);
  REQUIRE(parsed["summands"].size() == 1);
  const json& cj = parsed["summands"][0]["complex"];
  CHECK(cj["generators"].size() == 5);
  // the emitted summand is itself a valid document
  ComplexDocument round = parse_complex(cj.dump());
  CHECK(round.complex.is_valid());
  CHECK(round.complex.is_reduced());

  CliResult human = cli({"dual-knot", "--n", "-2", "-"}, kLhtDoc);
  CHECK(human.code == 0);
  CHECK(human.out.find("2 spin-c classes") != std::string::npos);
}

TEST_CASE("cli reduce") {
  // reduce on a reduced document is the identity up to reserialization
  CliResult r = cli({"reduce", "-"}, kLhtDoc);
  CHECK(r.code == 0);
  ComplexDocument doc = parse_complex(r.out);
  CHECK(doc == parse_complex(kLhtDoc));

  // stacking: validate the reduce output through the cli again
  CliResult again = cli({"validate", "-"}, r.out);
  CHECK(again.code == 0);
}

TEST_CASE("cli field default and truncation guard") {
  CliResult r = cli({"--field", "5", "reduce", "-"}, R"({"generators": []})");
  CHECK(r.code == 0);
  CHECK(parse_complex(r.out).complex.p == 5);

  CliResult t = cli({"--truncation", "1", "surgery", "--slope", "1", "-"}, kLhtDoc);
  CHECK(t.code == 1);
  CHECK(t.err.find("untruncated") != std::string::npos);
}
