#include <catch2/catch_amalgamated.hpp>

#include "cfk/complex.hpp"
#include "cfk/errors.hpp"
#include "cfk/homology.hpp"
#include "fixtures.hpp"

using namespace cfk;
using fixtures::make_complex;

TEST_CASE("trefoil complex basics") {
  BigradedComplex c = fixtures::lht(2);
  CHECK(c.size() == 3);
  CHECK(c.is_valid());
  CHECK(c.is_reduced());

  auto e = c.arrow_exponents(c.index_of("a"), c.index_of("b"));
  REQUIRE(e);
  CHECK(*e == std::make_pair(0, 1));
  e = c.arrow_exponents(c.index_of("c"), c.index_of("b"));
  REQUIRE(e);
  CHECK(*e == std::make_pair(1, 0));

  // a -> c has even Maslov difference, so no arrow can exist there
  CHECK_THROWS_AS(c.set_entry(c.index_of("a"), c.index_of("c"), FieldElem::one(2)), ParityError);
  CHECK_THROWS_AS(c.index_of("nope"), DomainError);
  CHECK(c.default_truncation() == 2);
}

TEST_CASE("validation catches broken differentials") {
  // the box complex with the sign dropped: d^2(p) = 2 UV s
  BigradedComplex c = make_complex(
      3, {{"p", 0, 0}, {"q", 1, -1}, {"r", -1, 1}, {"s", 0, 0}},
      {{"p", "q", 1}, {"p", "r", 1}, {"q", "s", 1}, {"r", "s", 1}});
  auto rep = c.validate();
  CHECK(rep.grading_violations.empty());
  REQUIRE_FALSE(rep.d2_failures.empty());
  CHECK_FALSE(c.is_valid());

  // same data over F_2: the sign is invisible and d^2 = 0
  BigradedComplex c2 = make_complex(
      2, {{"p", 0, 0}, {"q", 1, -1}, {"r", -1, 1}, {"s", 0, 0}},
      {{"p", "q", 1}, {"p", "r", 1}, {"q", "s", 1}, {"r", "s", 1}});
  CHECK(c2.is_valid());

  BigradedComplex dup(5);
  dup.gens.push_back({"x", Bigrading(0, 0)});
  dup.gens.push_back({"x", Bigrading(0, 0)});
  CHECK_FALSE(dup.validate().grading_violations.empty());
}

TEST_CASE("truncation kills high UV powers") {
  BigradedComplex c(5);
  c.gens.push_back({"x", Bigrading(0, 0)});
  c.gens.push_back({"y", Bigrading(1, 1)});
  c.truncation = 1;
  // the only possible arrow x -> y is UV, which dies in R_1
  CHECK_FALSE(c.arrow_exponents(0, 1).has_value());
  CHECK_THROWS_AS(c.set_entry(0, 1, FieldElem::one(5)), ParityError);
  c.truncation = 2;
  REQUIRE(c.arrow_exponents(0, 1).has_value());
  CHECK(*c.arrow_exponents(0, 1) == std::make_pair(1, 1));
  c.set_entry(0, 1, FieldElem::one(5));
  CHECK(c.is_valid());
}

TEST_CASE("reduction cancels unit arrows with corrections") {
  // d(a) = b + Ul, d(k) = Vb; cancelling (a, b) must create k -> l with -UV
  BigradedComplex c = make_complex(
      5, {{"a", 0, 0}, {"b", -1, -1}, {"k", 0, -2}, {"l", 1, -1}},
      {{"a", "b", 1}, {"a", "l", 1}, {"k", "b", 1}});
  CHECK(c.is_valid());
  CHECK_FALSE(c.is_reduced());

  BigradedComplex r = c.reduced();
  CHECK(r.is_reduced());
  CHECK(r.is_valid());
  REQUIRE(r.size() == 2);
  int k = r.index_of("k"), l = r.index_of("l");
  CHECK(r.entry(k, l).value() == 4);  // -1 mod 5
  REQUIRE(r.arrow_exponents(k, l));
  CHECK(*r.arrow_exponents(k, l) == std::make_pair(1, 1));

  // an already-reduced complex is returned unchanged
  BigradedComplex f = fixtures::fig8(3);
  CHECK(f.is_reduced());
  CHECK(f.reduced().size() == 5);
}

TEST_CASE("directional arrows and simplified bases") {
  BigradedComplex f = fixtures::fig8(2);
  int p = f.index_of("p"), q = f.index_of("q"), r = f.index_of("r"), s = f.index_of("s");
  CHECK(f.is_directional_arrow(p, q, Direction::horizontal));
  CHECK(f.is_directional_arrow(p, r, Direction::vertical));
  CHECK(f.is_directional_arrow(q, s, Direction::vertical));
  CHECK(f.is_directional_arrow(r, s, Direction::horizontal));
  CHECK(f.is_simplified(Direction::horizontal));
  CHECK(f.is_simplified(Direction::vertical));
}

TEST_CASE("simplify_basis merges parallel arrows") {
  // d(x) = V y1 + V y2: two vertical arrows sharing the tail x
  BigradedComplex c = make_complex(3, {{"x", 1, -1}, {"y1", 0, 0}, {"y2", 0, 0}},
                                   {{"x", "y1", 1}, {"x", "y2", 1}});
  CHECK_FALSE(c.is_simplified(Direction::vertical));
  auto before_v = homology_fw(directional_complex(c, Direction::vertical, false));
  auto before_h = homology_fw(directional_complex(c, Direction::horizontal, false));

  BasisLog log = c.simplify_basis(Direction::vertical);
  CHECK_FALSE(log.empty());
  CHECK(c.is_simplified(Direction::vertical));
  CHECK(c.is_valid());
  int arrows = 0;
  for (auto& [ij, v] : c.d) {
    (void)v;
    if (c.is_directional_arrow(ij.first, ij.second, Direction::vertical)) ++arrows;
  }
  CHECK(arrows == 1);
  CHECK(homology_fw(directional_complex(c, Direction::vertical, false)) == before_v);
  CHECK(homology_fw(directional_complex(c, Direction::horizontal, false)) == before_h);
}

TEST_CASE("simplify_basis requires reduced input") {
  BigradedComplex c = make_complex(2, {{"x", 0, 0}, {"y", -1, -1}}, {{"x", "y", 1}});
  CHECK_THROWS_AS(c.simplify_basis(Direction::vertical), DomainError);
}
