#include <catch2/catch_amalgamated.hpp>

#include "cfk/errors.hpp"
#include "cfk/field.hpp"
#include "cfk/grading.hpp"
#include "cfk/wpoly.hpp"

using namespace cfk;

TEST_CASE("prime field arithmetic") {
  FieldElem a(3, 5), b(4, 5);
  CHECK((a + b).value() == 2);
  CHECK((a * b).value() == 2);
  CHECK((a - b).value() == 4);
  CHECK((-b).value() == 1);
  CHECK(a.inv().value() == 2);
  CHECK((a / b).value() == (a * b.inv()).value());
  CHECK(FieldElem(7, 5).value() == 2);
  CHECK(FieldElem(-1, 5).value() == 4);

  FieldElem x(1, 2);
  CHECK((x + x).is_zero());
  CHECK(x.inv().is_one());

  CHECK_THROWS_AS(FieldElem::zero(5).inv(), DivisionByZero);
  CHECK_THROWS_AS(a / FieldElem::zero(5), DivisionByZero);
  CHECK_THROWS_AS(FieldElem(1, 2) + FieldElem(1, 3), InternalError);
}

TEST_CASE("W-power series arithmetic") {
  uint32_t p = 2;
  WPoly one = WPoly(FieldElem::one(p), 0);
  WPoly w = WPoly(FieldElem::one(p), 1);
  WPoly s = one + w;

  CHECK((s * s) == one + WPoly(FieldElem::one(p), 2));
  CHECK(s.valuation() == 0);
  CHECK(s.degree() == 1);
  CHECK((w * w * w).valuation() == 3);
  CHECK(one.is_unit());
  CHECK(s.is_unit() == false);  // units of F[W] are the nonzero constants
  CHECK(w.is_unit() == false);
  CHECK(w.is_monomial() == true);
  CHECK(s.is_monomial() == false);

  // division with remainder by a polynomial of positive valuation
  WPoly num = w * w * w + w;  // W^3 + W
  auto [q, r] = num.divmod(s);
  CHECK(q * s + r == num);
  CHECK((r.is_zero() || r.degree() < s.degree()));

  CHECK(s.mod_wn(1) == one);
  CHECK(s.shifted(FieldElem::one(p), 2) == w * w + w * w * w);

  CHECK_THROWS_AS(WPoly(FieldElem::one(p), -1), InternalError);
  CHECK_THROWS_AS(WPoly::zero(p).valuation(), InternalError);
}

TEST_CASE("coefficients over odd characteristic") {
  uint32_t p = 3;
  WPoly a(FieldElem(2, p), 0);
  WPoly b(FieldElem(2, p), 1);
  WPoly prod = (a + b) * (a + b);
  CHECK(prod.coeff(0).value() == 1);
  CHECK(prod.coeff(1).value() == 2);  // 2*2*2 = 8 = 2 mod 3
  CHECK(prod.coeff(2).value() == 1);
  CHECK((-b).coeff(1).value() == 1);
}

TEST_CASE("bigradings and forced exponents") {
  CHECK_THROWS_AS(Bigrading(0, 1), ParityError);
  Bigrading g(2, 0);
  CHECK(g.alexander() == 1);
  CHECK(g.maslov() == 2);

  // trefoil arrows: a(0,-2) -> b(-1,-1) is a V-arrow, c(-2,0) -> b is a U-arrow
  auto e1 = derive_exponents(Bigrading(0, -2), Bigrading(-1, -1));
  CHECK(e1.first == 0);
  CHECK(e1.second == 1);
  auto e2 = derive_exponents(Bigrading(-2, 0), Bigrading(-1, -1));
  CHECK(e2.first == 1);
  CHECK(e2.second == 0);
  // degree reasons forbid arrows between generators of equal parity offset
  CHECK_THROWS_AS(derive_exponents(Bigrading(0, 0), Bigrading(0, 0)), ParityError);

  int u = 0, v = 0;
  // flip entries may carry negative V-powers but never negative U-powers
  CHECK(flip_exponents(Bigrading(2, 0), Bigrading(0, 0), &u, &v));
  CHECK(u == 0);
  CHECK(v == -1);
  CHECK(!flip_exponents(Bigrading(0, 0), Bigrading(-2, -2), &u, &v));  // u = -1
  CHECK(!flip_exponents(Bigrading(0, 0), Bigrading(1, 1), &u, &v));    // parity
}
