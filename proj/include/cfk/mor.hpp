#pragma once

// Morphism complexes.  Mor(C1, C2) restricted to Alexander grading s is a
// free F[W]-complex on symbols
//   phi_ij = U^a V^b (x_i -> y_j),
//   a = max(A(y_j) - A(x_i) - s, 0),  b = max(s - A(y_j) + A(x_i), 0),
// graded by gr_w(y_j) - gr_w(x_i) - 2a, with the usual Hom differential
//   d(f) = d2 . f - (-1)^{|f|} f . d1.
// The same Hom differential on a pair of free F[W]-complexes is provided as
// mor_complex_fw; it is used to assemble surgery cones whose vertical and
// horizontal homologies are not free.

#include <cassert>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>

#include "cfk/complex.hpp"
#include "cfk/errors.hpp"
#include "cfk/flip.hpp"
#include "cfk/grading.hpp"
#include "cfk/homology.hpp"
#include "cfk/wpoly.hpp"

namespace cfk {

// One generator at bigrading (0, 0) with zero differential: the complex of
// the unknot.  Its flip map is the identity.
inline BigradedComplex trivial_complex(uint32_t p) {
  BigradedComplex c(p);
  c.gens.push_back({"o", Bigrading(0, 0)});
  return c;
}

inline FlipMap trivial_flip(uint32_t p) {
  FlipMap psi(p);
  psi.set_entry(0, 0, FieldElem::one(p));
  return psi;
}

namespace mordetail {

// U- and V-powers placed on the symbol x_i -> y_j at Alexander level s.
inline std::pair<int, int> symbol_powers(const BigradedComplex& c1, const BigradedComplex& c2,
                                         int i, int j, int s) {
  int diff = c2.gens[j].gr.alexander() - c1.gens[i].gr.alexander() - s;
  return {std::max(diff, 0), std::max(-diff, 0)};
}

}  // namespace mordetail

// Mor(C1, C2) at Alexander grading s.  Both complexes must be untruncated so
// that the result is an honest F[W]-complex.
inline FWComplex mor_complex(const BigradedComplex& c1, const BigradedComplex& c2, int s) {
  if (c1.p != c2.p) throw InternalError("Mor complex of complexes over different fields");
  if (c1.truncation || c2.truncation)
    throw InternalError("Mor complex of a truncated complex");

  const int n1 = c1.size(), n2 = c2.size();
  auto idx = [n2](int i, int j) { return i * n2 + j; };

  FWComplex out;
  out.p = c1.p;
  out.gens.reserve(static_cast<size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      auto [a, b] = mordetail::symbol_powers(c1, c2, i, j, s);
      (void)b;
      out.gens.push_back({c1.gens[i].name + "->" + c2.gens[j].name,
                          c2.gens[j].gr.gr_w - c1.gens[i].gr.gr_w - 2 * a});
    }

  // Post-composition with the differential of C2.
  for (auto& [jj2, v] : c2.d) {
    auto [j, j2] = jj2;
    auto exps = c2.arrow_exponents(j, j2);
    assert(exps);
    for (int i = 0; i < n1; ++i) {
      int a_ij = mordetail::symbol_powers(c1, c2, i, j, s).first;
      int a_ij2 = mordetail::symbol_powers(c1, c2, i, j2, s).first;
      int t = a_ij + exps->first - a_ij2;
      assert(t >= 0);
      out.add_entry(idx(i, j), idx(i, j2), WPoly(v, t));
    }
  }
  // Pre-composition with the differential of C1, with the Koszul sign.
  for (auto& [ki, v] : c1.d) {
    auto [k, i] = ki;
    auto exps = c1.arrow_exponents(k, i);
    assert(exps);
    for (int j = 0; j < n2; ++j) {
      int a_ij = mordetail::symbol_powers(c1, c2, i, j, s).first;
      int a_kj = mordetail::symbol_powers(c1, c2, k, j, s).first;
      int t = exps->first + a_ij - a_kj;
      assert(t >= 0);
      int gr_ij = out.gens[idx(i, j)].gr;
      FieldElem coeff = (((gr_ij % 2) + 2) % 2 == 0) ? -v : v;
      out.add_entry(idx(i, j), idx(k, j), WPoly(coeff, t));
    }
  }
  return out;
}

// Hom complex of two free F[W]-complexes: generators p_i -> q_j in grading
// gr(q_j) - gr(p_i), differential d(f) = dQ . f - (-1)^{|f|} f . dP.
inline FWComplex mor_complex_fw(const FWComplex& P, const FWComplex& Q) {
  if (P.p != Q.p) throw InternalError("Hom complex of complexes over different fields");
  const int n1 = P.size(), n2 = Q.size();
  auto idx = [n2](int i, int j) { return i * n2 + j; };

  FWComplex out;
  out.p = P.p;
  out.gens.reserve(static_cast<size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      out.gens.push_back({P.gens[i].name + "=>" + Q.gens[j].name, Q.gens[j].gr - P.gens[i].gr});

  for (auto& [jj2, w] : Q.d) {
    auto [j, j2] = jj2;
    for (int i = 0; i < n1; ++i) out.add_entry(idx(i, j), idx(i, j2), w);
  }
  for (auto& [ki, w] : P.d) {
    auto [k, i] = ki;
    for (int j = 0; j < n2; ++j) {
      int gr_ij = out.gens[idx(i, j)].gr;
      WPoly signed_w = (((gr_ij % 2) + 2) % 2 == 0) ? -w : w;
      out.add_entry(idx(i, j), idx(k, j), signed_w);
    }
  }
  return out;
}

}  // namespace cfk
