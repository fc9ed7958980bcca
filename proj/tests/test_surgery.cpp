#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "cfk/surgery.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cfk;

static int total_hat(const std::map<long long, FWModule>& hf) {
  int t = 0;
  for (auto& [i, m] : hf) t += m.hat_rank();
  return t;
}

TEST_CASE("signed division helpers") {
  CHECK(floor_div(7, 2) == 3);
  CHECK(floor_div(-7, 2) == -4);
  CHECK(floor_div(7, -2) == -4);
  CHECK(floor_div(-7, -2) == 3);
  CHECK(floor_div(6, 3) == 2);
  CHECK(floor_div(-6, 3) == -2);
  CHECK(ceil_div(7, 2) == 4);
  CHECK(ceil_div(-7, 2) == -3);
  CHECK(ceil_div(7, -2) == -3);
  CHECK(ceil_div(-7, -2) == 4);
}

TEST_CASE("one-surgery cone on the left-handed trefoil") {
  for (uint32_t p : {2u, 3u, 5u}) {
    BigradedComplex c = fixtures::lht(p);
    FlipMap psi = fixtures::lht_flip(c);
    MappingCone cone =
        build_cone(trivial_complex(p), trivial_flip(p), c, psi, SurgerySpec{1, 1, 0, 0});
    // window N = 1 keeps a single Alexander slice and no B-copies at all
    REQUIRE(cone.x.size() == 3);
    CHECK(cone.n_min == 0);
    CHECK(cone.n_max == 0);
    CHECK(cone.x.d.size() == 2);
    CHECK(cone.x.d_squared_zero());
    CHECK(oracles::fw_degrees_ok(cone.x));
    // two W-arrows onto the middle generator
    int mid = -1;
    for (int k = 0; k < 3; ++k)
      if (cone.x.gens[k].name == "A0:o->b") mid = k;
    REQUIRE(mid >= 0);
    for (int k = 0; k < 3; ++k) {
      if (k == mid) continue;
      CHECK(cone.x.entry(k, mid).valuation() == 1);
    }
    FWModule h = homology_fw(cone.x);
    CHECK(h.free_rank == 1);
    CHECK(h.torsion == std::vector<int>{1});
  }
}

TEST_CASE("HF-minus of small surgeries") {
  BigradedComplex c = fixtures::lht(2);
  FlipMap psi = fixtures::lht_flip(c);
  auto hf = hf_minus_surgery(c, psi, 1, 1);
  REQUIRE(hf.size() == 1);
  CHECK(hf.at(0) == FWModule{1, {1}});

  // lens spaces from the unknot: one free tower per spin-c class
  BigradedComplex u = trivial_complex(2);
  FlipMap up = trivial_flip(2);
  for (long long p : {3LL, -3LL}) {
    auto lens = hf_minus_surgery(u, up, p, 1);
    REQUIRE(lens.size() == 3);
    for (auto& [i, m] : lens) CHECK(m == FWModule{1, {}});
  }
}

TEST_CASE("L-space slopes of the trefoils") {
  // the left-handed trefoil bounds L-spaces on the negative side,
  // the right-handed one on the positive side
  BigradedComplex l = fixtures::lht(2);
  FlipMap lp = fixtures::lht_flip(l);
  struct Slope {
    long long p, q;
  };
  for (Slope s : {Slope{-2, 1}, Slope{-4, 3}, Slope{-5, 2}}) {
    auto hf = hf_minus_surgery(l, lp, s.p, s.q);
    CHECK(total_hat(hf) == std::llabs(s.p));
    for (auto& [i, m] : hf) CHECK(m.torsion.empty());
  }
  BigradedComplex r = fixtures::rht(2);
  FlipMap rp = fixtures::rht_flip(r);
  for (Slope s : {Slope{2, 1}, Slope{4, 3}, Slope{5, 2}}) {
    auto hf = hf_minus_surgery(r, rp, s.p, s.q);
    CHECK(total_hat(hf) == s.p);
    for (auto& [i, m] : hf) CHECK(m.torsion.empty());
  }
  // +2 on the left-handed trefoil is not an L-space slope: rank 3, not 2
  CHECK(total_hat(hf_minus_surgery(l, lp, 2, 1)) == 3);
}

TEST_CASE("flip constant discrimination on the surgery dual knot") {
  BigradedComplex c = fixtures::surgery_dual(2);
  // filling -mu' + 2*lambda (slope -1/2 against the homological longitude)
  // gives back -1-surgery on the trefoil, an L-space; only the flip with
  // the extra V^{-1} term reproduces its rank-one homology
  {
    FlipMap psi = fixtures::surgery_dual_flip(c, 1);
    auto hf = hf_minus_surgery(c, psi, -1, 2);
    REQUIRE(hf.size() == 1);
    CHECK(hf.at(0) == FWModule{1, {}});
  }
  {
    FlipMap psi = fixtures::surgery_dual_flip(c, 0);
    auto hf = hf_minus_surgery(c, psi, -1, 2);
    REQUIRE(hf.size() == 1);
    CHECK(hf.at(0) == FWModule{1, {1}});
    // the W = 0 fiber picks up two extra classes from the torsion tower
    MappingCone cone = build_cone(trivial_complex(2), trivial_flip(2), c, psi,
                                  SurgerySpec{-1, 2, 0, 0});
    CHECK(oracles::hat_rank_mod_w(cone.x) == 3);
  }
  // at Seifert slope -4/3 the two flips agree: that filling is the L-space
  // S^3_4(trefoil) plus one tower, independent of the extra flip term
  for (int c1 : {1, 0}) {
    FlipMap psi = fixtures::surgery_dual_flip(c, c1);
    auto hf = hf_minus_surgery(c, psi, -4, 3);
    REQUIRE(hf.size() == 4);
    int free_total = 0, towers = 0;
    for (auto& [i, m] : hf) {
      free_total += m.free_rank;
      towers += static_cast<int>(m.torsion.size());
    }
    CHECK(free_total == 4);
    CHECK(towers == 1);
  }
}

TEST_CASE("cone homology does not depend on the truncation window") {
  BigradedComplex l = fixtures::lht(2);
  FlipMap lp = fixtures::lht_flip(l);
  for (long long i = 0; i < 4; ++i) {
    FWModule base;
    for (int N = 2; N <= 4; ++N) {
      MappingCone cone =
          build_cone(trivial_complex(2), trivial_flip(2), l, lp, SurgerySpec{-4, 3, i, N});
      CHECK(cone.x.d_squared_zero());
      FWModule h = homology_fw(cone.x);
      if (N == 2)
        base = h;
      else
        CHECK(h == base);
    }
  }
  BigradedComplex s = fixtures::surgery_dual(3);
  FlipMap sp = fixtures::surgery_dual_flip(s, 1);
  FWModule h2 = homology_fw(build_cone(trivial_complex(3), trivial_flip(3), s, sp,
                                       SurgerySpec{-4, 3, 1, 2})
                                .x);
  FWModule h3 = homology_fw(build_cone(trivial_complex(3), trivial_flip(3), s, sp,
                                       SurgerySpec{-4, 3, 1, 3})
                                .x);
  CHECK(h2 == h3);
}

TEST_CASE("hat theory reads off the W = 0 fiber") {
  BigradedComplex l = fixtures::lht(3);
  FlipMap lp = fixtures::lht_flip(l);
  for (long long i = 0; i < 4; ++i) {
    MappingCone cone =
        build_cone(trivial_complex(3), trivial_flip(3), l, lp, SurgerySpec{-4, 3, i, 0});
    CHECK(oracles::hat_rank_mod_w(cone.x) == homology_fw(cone.x).hat_rank());
  }
  MappingCone plus2 =
      build_cone(trivial_complex(3), trivial_flip(3), l, lp, SurgerySpec{2, 1, 1, 0});
  CHECK(oracles::hat_rank_mod_w(plus2.x) == homology_fw(plus2.x).hat_rank());
}

TEST_CASE("zero-slope pairing of trivial complexes") {
  // with one A and one B copy, v and h^Psi are both identities; away from
  // characteristic 2 their sum is invertible and the cone is acyclic
  for (uint32_t p : {3u, 5u}) {
    MappingCone cone = build_cone(trivial_complex(p), trivial_flip(p), trivial_complex(p),
                                  trivial_flip(p), SurgerySpec{0, 1, 0, 0});
    REQUIRE(cone.x.size() == 2);
    CHECK(homology_fw(cone.x) == FWModule{0, {}});
  }
  // over F_2 the two unit contributions cancel instead
  MappingCone cone2 = build_cone(trivial_complex(2), trivial_flip(2), trivial_complex(2),
                                 trivial_flip(2), SurgerySpec{0, 1, 0, 0});
  CHECK(homology_fw(cone2.x) == FWModule{2, {}});
}

TEST_CASE("surgery input validation") {
  BigradedComplex l = fixtures::lht(2);
  FlipMap lp = fixtures::lht_flip(l);
  CHECK_THROWS_AS(build_cone(trivial_complex(2), trivial_flip(2), l, lp, SurgerySpec{4, 2, 0, 0}),
                  DomainError);
  CHECK_THROWS_AS(build_cone(trivial_complex(2), trivial_flip(2), l, lp, SurgerySpec{1, 0, 0, 0}),
                  DomainError);
  CHECK_THROWS_AS(hf_minus_surgery(l, lp, 0, 1), DomainError);
  CHECK_THROWS_AS(dual_knot_complex(l, lp, 0), DomainError);

  // explicit window below the Alexander spread
  BigradedComplex wide(2);
  wide.gens.push_back({"x", Bigrading(0, -4)});
  FlipMap wp(2);
  wp.set_entry(0, 0, FieldElem::one(2));
  CHECK_THROWS_AS(
      build_cone(trivial_complex(2), trivial_flip(2), wide, wp, SurgerySpec{1, 1, 0, 1}),
      TruncationError);
  // window legal for the gradings but leaving no slice in range
  CHECK_THROWS_AS(build_cone(trivial_complex(2), trivial_flip(2), trivial_complex(2),
                             trivial_flip(2), SurgerySpec{5, 1, 2, 1}),
                  TruncationError);
}

TEST_CASE("dual knot of one-surgery on the left-handed trefoil") {
  for (uint32_t p : {2u, 3u, 5u}) {
    BigradedComplex c = fixtures::lht(p);
    FlipMap psi = fixtures::lht_flip(c);
    auto dual = dual_knot_complex(c, psi, 1);
    REQUIRE(dual.size() == 1);
    const BigradedComplex& d = dual.at(0);
    CHECK(d.is_valid());
    CHECK(d.is_reduced());
    REQUIRE(d.size() == 5);
    // both directional homologies recover HF^- of the ambient +1-surgery,
    // which has free rank 1 and a single torsion tower of length 1
    CHECK(homology_fw(directional_complex(d, Direction::vertical, false)) == FWModule{1, {1}});
    CHECK(homology_fw(directional_complex(d, Direction::horizontal, false)) == FWModule{1, {1}});

    BigradedComplex ref = fixtures::surgery_dual(p);
    CHECK(oracles::normalized_gradings(d) == oracles::normalized_gradings(ref));
    CHECK(oracles::complexes_equivalent(d, ref));
  }
}

TEST_CASE("dual knots of the unknot are cores of lens spaces") {
  BigradedComplex u = trivial_complex(2);
  FlipMap up = trivial_flip(2);
  for (long long n : {1LL, 2LL, -2LL, 3LL}) {
    auto dual = dual_knot_complex(u, up, n);
    REQUIRE(dual.size() == static_cast<size_t>(std::llabs(n)));
    for (auto& [i, d] : dual) {
      CHECK(d.size() == 1);
      CHECK(d.d.empty());
    }
  }
}

TEST_CASE("dual knot of one-surgery on the figure-eight knot") {
  BigradedComplex c = fixtures::fig8(2);
  FlipMap psi = fixtures::fig8_flip(c);
  auto dual = dual_knot_complex(c, psi, 1);
  REQUIRE(dual.size() == 1);
  const BigradedComplex& d = dual.at(0);
  CHECK(d.is_valid());
  CHECK(d.is_reduced());
  REQUIRE(d.size() == 5);
  CHECK(homology_fw(directional_complex(d, Direction::vertical, false)) == FWModule{1, {1}});
  CHECK(homology_fw(directional_complex(d, Direction::horizontal, false)) == FWModule{1, {1}});
  BigradedComplex ref = fixtures::fig8_dual(2);
  CHECK(oracles::normalized_gradings(d) == oracles::normalized_gradings(ref));
  CHECK(oracles::complexes_equivalent(d, ref));
}

TEST_CASE("filling the dual knot recovers the surgery") {
  struct Case {
    BigradedComplex c;
    FlipMap psi;
    long long n;
  };
  std::vector<Case> cases;
  {
    BigradedComplex l = fixtures::lht(2);
    FlipMap lp = fixtures::lht_flip(l);
    cases.push_back({l, lp, 1});
    cases.push_back({l, lp, -1});
    cases.push_back({l, lp, 2});
    BigradedComplex f = fixtures::fig8(2);
    cases.push_back({f, fixtures::fig8_flip(f), 1});
  }
  for (auto& kase : cases) {
    auto dual = dual_knot_complex(kase.c, kase.psi, kase.n);
    auto hf = hf_minus_surgery(kase.c, kase.psi, kase.n, 1);
    REQUIRE(dual.size() == hf.size());
    for (auto& [i, d] : dual) {
      FWModule filled = homology_fw(directional_complex(d, Direction::vertical, false));
      CHECK(filled == hf.at(i));
    }
  }
}
