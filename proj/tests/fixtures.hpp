#pragma once

// Shared example complexes for the test suites: the trefoils, the
// figure-eight knot, and the two five-generator dual-knot complexes, each
// with its flip map.

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "cfk/complex.hpp"
#include "cfk/flip.hpp"

namespace fixtures {

using cfk::Bigrading;
using cfk::BigradedComplex;
using cfk::FieldElem;
using cfk::FlipMap;

struct GenSpec {
  std::string name;
  int gw, gz;
};
using ArrowSpec = std::tuple<std::string, std::string, int>;

inline BigradedComplex make_complex(uint32_t p, const std::vector<GenSpec>& gens,
                                    const std::vector<ArrowSpec>& arrows) {
  BigradedComplex c(p);
  std::map<std::string, int> ix;
  for (auto& g : gens) {
    ix[g.name] = c.size();
    c.gens.push_back({g.name, Bigrading(g.gw, g.gz)});
  }
  for (auto& [f, t, v] : arrows) c.set_entry(ix.at(f), ix.at(t), FieldElem(v, p));
  return c;
}

inline FlipMap make_flip(const BigradedComplex& c, const std::vector<ArrowSpec>& entries) {
  std::map<std::string, int> ix;
  for (int i = 0; i < c.size(); ++i) ix[c.gens[i].name] = i;
  FlipMap psi(c.p);
  for (auto& [f, t, v] : entries) psi.set_entry(ix.at(f), ix.at(t), FieldElem(v, c.p));
  return psi;
}

// Left-handed trefoil: d(a) = -Vb, d(c) = Ub; the flip swaps a and c.
inline BigradedComplex lht(uint32_t p) {
  return make_complex(p, {{"a", 0, -2}, {"b", -1, -1}, {"c", -2, 0}},
                      {{"a", "b", -1}, {"c", "b", 1}});
}
inline FlipMap lht_flip(const BigradedComplex& c) {
  return make_flip(c, {{"a", "c", -1}, {"b", "b", 1}, {"c", "a", -1}});
}

// Right-handed trefoil: d(b) = Ua + Vc.
inline BigradedComplex rht(uint32_t p) {
  return make_complex(p, {{"a", 0, -2}, {"b", -1, -1}, {"c", -2, 0}},
                      {{"b", "a", 1}, {"b", "c", 1}});
}
inline FlipMap rht_flip(const BigradedComplex& c) {
  return make_flip(c, {{"a", "c", 1}, {"b", "b", 1}, {"c", "a", 1}});
}

// Figure-eight knot: a box summand plus one free generator t.
inline BigradedComplex fig8(uint32_t p) {
  return make_complex(
      p, {{"t", 0, 0}, {"p", 0, 0}, {"q", 1, -1}, {"r", -1, 1}, {"s", 0, 0}},
      {{"p", "q", 1}, {"p", "r", 1}, {"q", "s", 1}, {"r", "s", -1}});
}
inline FlipMap fig8_flip(const BigradedComplex& c) { return make_flip(c, {{"t", "t", 1}}); }

// Dual knot of +1 surgery on the left-handed trefoil (a knot in the Poincare
// sphere): d(a) = Vb, d(e) = Ud.  The flip depends on a constant c1 that the
// complex alone does not determine; the geometrically correct value is 1.
inline BigradedComplex surgery_dual(uint32_t p) {
  return make_complex(p, {{"a", 2, 0}, {"b", 1, 1}, {"c", 0, 0}, {"d", 1, 1}, {"e", 0, 2}},
                      {{"a", "b", 1}, {"e", "d", 1}});
}
inline FlipMap surgery_dual_flip(const BigradedComplex& c, int c1) {
  FlipMap psi = make_flip(c, {{"a", "e", 1}, {"b", "d", 1}, {"c", "c", 1}});
  if (c1 != 0) {
    std::map<std::string, int> ix;
    for (int i = 0; i < c.size(); ++i) ix[c.gens[i].name] = i;
    psi.set_entry(ix.at("a"), ix.at("c"), FieldElem(c1, c.p));
  }
  return psi;
}

// Dual knot of +1 surgery on the figure-eight knot: same differential as
// surgery_dual but with a flat grading table.
inline BigradedComplex fig8_dual(uint32_t p) {
  return make_complex(p, {{"a", 1, -1}, {"b", 0, 0}, {"c", 0, 0}, {"d", 0, 0}, {"e", -1, 1}},
                      {{"a", "b", 1}, {"e", "d", 1}});
}
inline FlipMap fig8_dual_flip(const BigradedComplex& c) {
  return make_flip(c, {{"a", "e", 1}, {"b", "d", 1}, {"c", "c", 1}});
}

}  // namespace fixtures
