#pragma once

// Flip maps: skew module chain maps C -> C that exchange the roles of U and V
// (Psi(Ux) = V Psi(x)).  As with differentials, the monomial U^u V^v on an
// entry x_i -> y_j is forced by the bigradings,
//   u = (gr_w(y_j) - gr_z(x_i)) / 2,   v = (gr_z(y_j) - gr_w(x_i)) / 2,
// so only the field coefficient is stored.  Entries are legal when the parity
// matches and u >= 0 (v may be negative: flips live in the U-localization).

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cfk/complex.hpp"
#include "cfk/errors.hpp"
#include "cfk/field.hpp"
#include "cfk/grading.hpp"

namespace cfk {

struct FlipMap {
  uint32_t p = 2;
  // (source index, target index) -> coefficient; zero entries are absent.
  std::map<std::pair<int, int>, FieldElem> c;

  FlipMap() = default;
  explicit FlipMap(uint32_t p_) : p(p_) {}

  FieldElem entry(int i, int j) const {
    auto it = c.find({i, j});
    return it == c.end() ? FieldElem::zero(p) : it->second;
  }
  void set_entry(int i, int j, FieldElem v) {
    if (v.is_zero())
      c.erase({i, j});
    else
      c[{i, j}] = v;
  }
  void add_entry(int i, int j, FieldElem v) { set_entry(i, j, entry(i, j) + v); }
  bool is_zero() const { return c.empty(); }
  bool operator==(const FlipMap& o) const { return p == o.p && c == o.c; }
};

// Forced exponents of a flip entry, or nullopt when the entry must vanish
// (wrong parity, negative U-power, or killed by the truncation ideal).
inline std::optional<std::pair<int, int>> flip_entry_exponents(const BigradedComplex& c, int i,
                                                               int j) {
  int u = 0, v = 0;
  if (!flip_exponents(c.gens[i].gr, c.gens[j].gr, &u, &v)) return std::nullopt;
  if (c.truncation && u >= *c.truncation && v >= *c.truncation) return std::nullopt;
  return std::make_pair(u, v);
}

// Forced exponents of a flip-homotopy entry (skew maps of degree (+1,+1)).
inline std::optional<std::pair<int, int>> homotopy_entry_exponents(const BigradedComplex& c, int i,
                                                                   int j) {
  int dw = c.gens[j].gr.gr_w - c.gens[i].gr.gr_z;
  int dz = c.gens[j].gr.gr_z - c.gens[i].gr.gr_w;
  if (((dw % 2) + 2) % 2 == 0) return std::nullopt;
  int u = (dw - 1) / 2;
  int v = (dz - 1) / 2;
  if (u < 0) return std::nullopt;
  if (c.truncation && u >= *c.truncation && v >= *c.truncation) return std::nullopt;
  return std::make_pair(u, v);
}

// Both composites Psi@d and d@Psi of a degree-(0,0) skew map have entry
// exponents forced by the endpoints alone, so the chain map condition is a
// scalar identity per generator pair.
inline bool is_flip_chain_map(const BigradedComplex& c, const FlipMap& psi) {
  int n = c.size();
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      FieldElem lhs = FieldElem::zero(c.p);  // Psi after d
      FieldElem rhs = FieldElem::zero(c.p);  // d after Psi
      for (int j = 0; j < n; ++j) {
        lhs += c.entry(i, j) * psi.entry(j, k);
        rhs += psi.entry(i, j) * c.entry(j, k);
      }
      if (lhs == rhs) continue;
      if (c.truncation) {
        int dw = c.gens[k].gr.gr_w - c.gens[i].gr.gr_z;
        int dz = c.gens[k].gr.gr_z - c.gens[i].gr.gr_w;
        if (((dw % 2) + 2) % 2 == 1) {
          int a = (dw + 1) / 2, b = (dz + 1) / 2;
          if (a >= *c.truncation && b >= *c.truncation) continue;
        }
      }
      return false;
    }
  }
  return true;
}

inline void validate_flip(const BigradedComplex& c, const FlipMap& psi) {
  if (psi.p != c.p) throw InternalError("flip map over a different field than the complex");
  for (auto& [ij, v] : psi.c) {
    if (ij.first < 0 || ij.first >= c.size() || ij.second < 0 || ij.second >= c.size())
      throw Corrupt("flip entry references a generator out of range");
    if (v.is_zero()) throw Corrupt("stored zero flip coefficient");
    if (!flip_entry_exponents(c, ij.first, ij.second))
      throw BadFlip("flip entry " + c.gens[ij.first].name + " -> " + c.gens[ij.second].name +
                    " is not flip-filtered");
  }
  if (!is_flip_chain_map(c, psi))
    throw NotChainMap("flip map does not commute with the differential");
}

// Rewrites psi in the new basis after an elementary change of basis on c.
// Mirrors BigradedComplex::apply_change; the skew on U and V is absorbed by
// the forced exponents, so the coefficient bookkeeping is identical.
inline void apply_change_to_flip(const BigradedComplex& c, FlipMap& psi, const BasisChange& bc) {
  switch (bc.kind) {
    case BasisChange::Add: {
      if (bc.i == bc.j) throw InternalError("basis change with i == j");
      if (bc.c.is_zero()) return;
      std::vector<std::pair<int, FieldElem>> row;
      for (int l = 0; l < c.size(); ++l) {
        FieldElem v = psi.entry(bc.j, l);
        if (!v.is_zero()) row.push_back({l, v});
      }
      for (auto& [l, v] : row) {
        if (flip_entry_exponents(c, bc.i, l)) psi.add_entry(bc.i, l, bc.c * v);
      }
      std::vector<std::pair<int, FieldElem>> col;
      for (int k = 0; k < c.size(); ++k) {
        FieldElem v = psi.entry(k, bc.i);
        if (!v.is_zero()) col.push_back({k, v});
      }
      for (auto& [k, v] : col) {
        if (flip_entry_exponents(c, k, bc.j)) psi.add_entry(k, bc.j, -(bc.c * v));
      }
      break;
    }
    case BasisChange::Scale: {
      if (bc.c.is_zero()) throw InternalError("scaling by zero");
      for (int l = 0; l < c.size(); ++l) {
        FieldElem v = psi.entry(bc.i, l);
        if (!v.is_zero()) psi.set_entry(bc.i, l, v * bc.c.inv());
      }
      for (int k = 0; k < c.size(); ++k) {
        FieldElem v = psi.entry(k, bc.i);
        if (!v.is_zero()) psi.set_entry(k, bc.i, v * bc.c);
      }
      break;
    }
    case BasisChange::Swap: {
      auto rename = [&](int t) { return t == bc.i ? bc.j : t == bc.j ? bc.i : t; };
      std::map<std::pair<int, int>, FieldElem> out;
      for (auto& [ij, v] : psi.c) out[{rename(ij.first), rename(ij.second)}] = v;
      psi.c = std::move(out);
      break;
    }
  }
}

inline void replay_log_onto_flip(const BigradedComplex& c, FlipMap& psi, const BasisLog& log) {
  for (const auto& bc : log) apply_change_to_flip(c, psi, bc);
}

// Reduction that carries a flip map along.  Each cancellation of a unit
// arrow i -> j is performed as explicit basis changes -- clear the rest of
// column j against the pivot, then absorb the rest of row i into x_j -- so
// that the pair (x_i, x_j) splits off as a direct summand and dropping it is
// an honest projection for the flip as well.  Flip components that the
// filtration forbids in the new basis are discarded by the exponent guards
// in apply_change_to_flip, which is exactly the filtered quotient.
inline std::pair<BigradedComplex, FlipMap> reduce_with_flip(const BigradedComplex& c_in,
                                                            const FlipMap& psi_in) {
  BigradedComplex c(c_in);
  FlipMap psi(psi_in);
  for (;;) {
    int pi = -1, pj = -1;
    for (auto& [ij, coeff] : c.d) {
      auto e = c.arrow_exponents(ij.first, ij.second);
      if (e && e->first == 0 && e->second == 0) {
        pi = ij.first;
        pj = ij.second;
        break;
      }
    }
    if (pi < 0) break;
    FieldElem pivot = c.entry(pi, pj);
    for (int k = 0; k < c.size(); ++k) {
      if (k == pi || k == pj) continue;
      FieldElem ckj = c.entry(k, pj);
      if (ckj.is_zero()) continue;
      BasisChange bc{BasisChange::Add, k, pi, -(ckj / pivot)};
      c.apply_change(bc);
      apply_change_to_flip(c, psi, bc);
    }
    for (int l = 0; l < c.size(); ++l) {
      if (l == pi || l == pj) continue;
      FieldElem cil = c.entry(pi, l);
      if (cil.is_zero()) continue;
      BasisChange bc{BasisChange::Add, pj, l, cil / pivot};
      c.apply_change(bc);
      apply_change_to_flip(c, psi, bc);
    }
    // The pair is now split off; drop it from the complex and the flip.
    std::map<std::pair<int, int>, FieldElem> kept;
    auto re = [&](int k) { return k - (k > pi ? 1 : 0) - (k > pj ? 1 : 0); };
    for (auto& [ij, v] : psi.c)
      if (ij.first != pi && ij.first != pj && ij.second != pi && ij.second != pj)
        kept[{re(ij.first), re(ij.second)}] = v;
    psi.c = std::move(kept);
    c.erase_pair(pi, pj);
  }
  return {std::move(c), std::move(psi)};
}

// d@H + H@d for a skew homotopy H, as a coefficient matrix of flip shape.
inline FlipMap homotopy_boundary(const BigradedComplex& c, const FlipMap& h) {
  FlipMap out(c.p);
  for (auto& [kj, v] : h.c) {
    auto [k, j] = kj;
    for (int m = 0; m < c.size(); ++m) {
      FieldElem djm = c.entry(j, m);
      if (!djm.is_zero() && flip_entry_exponents(c, k, m)) out.add_entry(k, m, v * djm);
    }
  }
  for (int k = 0; k < c.size(); ++k) {
    for (int j = 0; j < c.size(); ++j) {
      FieldElem dkj = c.entry(k, j);
      if (dkj.is_zero()) continue;
      for (int m = 0; m < c.size(); ++m) {
        FieldElem hjm = h.entry(j, m);
        if (!hjm.is_zero() && flip_entry_exponents(c, k, m)) out.add_entry(k, m, dkj * hjm);
      }
    }
  }
  return out;
}

struct FlipNormalization {
  FlipMap psi;
  FlipMap homotopy;  // psi_out - psi_in = d @ homotopy + homotopy @ d
};

// Homotopes psi to vanish on every generator at the tail of a horizontal
// arrow.  For an arrow t -> h with coefficient q, the correcting homotopy is
// supported on h with H(h) = -q^{-1} V^{-a} psi(t); applying d@H + H@d then
// clears the row at t.  A cleared tail t' can only be re-contaminated through
// an arrow t' -> h, which in a horizontally simplified basis forces
// gr_z(t') < gr_z(t), so one pass in decreasing gr_z order suffices.
inline FlipNormalization normalize_flip(const BigradedComplex& c, const FlipMap& psi_in) {
  validate_flip(c, psi_in);
  if (!c.is_simplified(Direction::horizontal))
    throw InternalError("normalize_flip requires a horizontally simplified basis");

  struct HArrow {
    int tail, head;
    FieldElem coeff;
  };
  std::vector<HArrow> arrows;
  for (auto& [ij, v] : c.d) {
    auto e = c.arrow_exponents(ij.first, ij.second);
    if (e && e->second == 0 && e->first >= 1) arrows.push_back({ij.first, ij.second, v});
  }
  std::stable_sort(arrows.begin(), arrows.end(), [&](const HArrow& x, const HArrow& y) {
    return c.gens[x.tail].gr.gr_z > c.gens[y.tail].gr.gr_z;
  });

  FlipNormalization out;
  out.psi = psi_in;
  out.homotopy = FlipMap(c.p);
  for (const auto& ar : arrows) {
    std::vector<std::pair<int, FieldElem>> row;
    for (int j = 0; j < c.size(); ++j) {
      FieldElem v = out.psi.entry(ar.tail, j);
      if (!v.is_zero()) row.push_back({j, v});
    }
    if (row.empty()) continue;
    FieldElem inv = ar.coeff.inv();
    FlipMap hi(c.p);
    for (auto& [j, v] : row) {
      if (!homotopy_entry_exponents(c, ar.head, j))
        throw InternalError("flip normalization produced an illegal homotopy entry");
      hi.set_entry(ar.head, j, -(inv * v));
    }
    FlipMap delta = homotopy_boundary(c, hi);
    for (auto& [km, v] : delta.c) out.psi.add_entry(km.first, km.second, v);
    for (auto& [km, v] : hi.c) out.homotopy.add_entry(km.first, km.second, v);
  }
  for (const auto& ar : arrows)
    for (int j = 0; j < c.size(); ++j)
      if (!out.psi.entry(ar.tail, j).is_zero())
        throw InternalError("flip normalization failed to clear a horizontal tail");
  return out;
}

}  // namespace cfk
