#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cfk/complex.hpp"
#include "cfk/wpoly.hpp"

namespace cfk {

// Graded chain complex of free F[W]-modules.  `gr` is the grading that
// survives the directional specialization (gr_w after V = 1, gr_z after
// U = 1); W acts with degree -2.
struct FWGen {
  std::string name;
  int gr = 0;
};

struct FWComplex {
  uint32_t p = 2;
  std::vector<FWGen> gens;
  std::map<std::pair<int, int>, WPoly> d;  // (i,j): coeff of x_j in d(x_i)

  int size() const { return static_cast<int>(gens.size()); }

  WPoly entry(int i, int j) const {
    auto it = d.find({i, j});
    return it == d.end() ? WPoly::zero(p) : it->second;
  }
  void add_entry(int i, int j, const WPoly& w) {
    if (w.is_zero()) return;
    auto it = d.find({i, j});
    if (it == d.end()) {
      d[{i, j}] = w;
    } else {
      it->second += w;
      if (it->second.is_zero()) d.erase(it);
    }
  }

  bool d_squared_zero() const {
    for (int i = 0; i < size(); ++i)
      for (int k = 0; k < size(); ++k) {
        WPoly acc(p);
        for (int j = 0; j < size(); ++j) acc += entry(i, j) * entry(j, k);
        if (!acc.is_zero()) return false;
      }
    return true;
  }
};

// Finitely generated F[W]-module in canonical form.
struct FWModule {
  int free_rank = 0;
  std::vector<int> torsion;  // exponents k of F[W]/W^k summands, sorted

  void canonicalize() { std::sort(torsion.begin(), torsion.end()); }

  // Dimension of the W = 0 fiber: free rank plus one per torsion summand.
  int hat_rank() const { return free_rank + static_cast<int>(torsion.size()); }

  bool operator==(const FWModule& o) const {
    return free_rank == o.free_rank && torsion == o.torsion;
  }
  bool operator!=(const FWModule& o) const { return !(*this == o); }

  std::string str() const {
    std::ostringstream os;
    bool first = true;
    if (free_rank > 0) {
      os << "F[W]";
      if (free_rank > 1) os << "^" << free_rank;
      first = false;
    }
    for (int k : torsion) {
      if (!first) os << " + ";
      first = false;
      os << "F[W]/W";
      if (k > 1) os << "^" << k;
    }
    if (first) os << "0";
    return os.str();
  }
};

namespace detail {

using WMat = std::vector<std::vector<WPoly>>;

inline WMat wmat(int rows, int cols, uint32_t p) {
  return WMat(rows, std::vector<WPoly>(cols, WPoly::zero(p)));
}

// Column Hermite-style reduction over F[W]: in-place column operations make
// the matrix lower-echelon by rows; ops are mirrored onto `t` (so that if t
// starts as the identity, m_original * t = m_final).
inline void column_reduce(WMat& m, WMat& t) {
  if (m.empty()) return;
  int rows = static_cast<int>(m.size());
  int cols = static_cast<int>(m[0].size());
  int lead = 0;
  for (int r = 0; r < rows && lead < cols; ++r) {
    for (;;) {
      // Find the minimal-degree nonzero entry in row r among columns >= lead.
      int pc = -1;
      for (int c = lead; c < cols; ++c)
        if (!m[r][c].is_zero() && (pc < 0 || m[r][c].degree() < m[r][pc].degree())) pc = c;
      if (pc < 0) break;
      std::swap(m[0], m[0]);  // no-op placeholder for clarity
      for (int k = 0; k < rows; ++k) std::swap(m[k][lead], m[k][pc]);
      for (auto& row : t) std::swap(row[lead], row[pc]);
      bool again = false;
      for (int c = lead + 1; c < cols; ++c) {
        if (m[r][c].is_zero()) continue;
        auto [q, rem] = m[r][c].divmod(m[r][lead]);
        if (!q.is_zero()) {
          for (int k = 0; k < rows; ++k) m[k][c] -= q * m[k][lead];
          for (auto& row : t) row[c] -= q * row[lead];
        }
        if (!rem.is_zero()) again = true;
      }
      if (!again) break;
    }
    if (!m[r][lead].is_zero()) ++lead;
  }
}

// Smith normal form diagonal of m (destroys m).  Returns the nonzero
// diagonal entries with the divisibility chain enforced.
inline std::vector<WPoly> smith_diagonal(WMat m) {
  std::vector<WPoly> out;
  if (m.empty() || m[0].empty()) return out;
  int rows = static_cast<int>(m.size());
  int cols = static_cast<int>(m[0].size());
  int t = 0;
  while (true) {
    int pi = -1, pj = -1;
    for (int i = t; i < rows; ++i)
      for (int j = t; j < cols; ++j)
        if (!m[i][j].is_zero() && (pi < 0 || m[i][j].degree() < m[pi][pj].degree())) {
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    std::swap(m[pi], m[t]);
    for (int i = 0; i < rows; ++i) std::swap(m[i][pj], m[i][t]);
    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < rows; ++i) {
        if (m[i][t].is_zero()) continue;
        auto [q, rem] = m[i][t].divmod(m[t][t]);
        for (int j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
        if (!rem.is_zero()) {
          std::swap(m[i], m[t]);
          clean = false;
        }
      }
      for (int j = t + 1; j < cols; ++j) {
        if (m[t][j].is_zero()) continue;
        auto [q, rem] = m[t][j].divmod(m[t][t]);
        for (int i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
        if (!rem.is_zero()) {
          for (int i = t; i < rows; ++i) std::swap(m[i][j], m[i][t]);
          clean = false;
        }
      }
    }
    // Enforce the divisibility chain: the pivot must divide everything in
    // the remaining block.
    bool redo = false;
    for (int i = t + 1; i < rows && !redo; ++i)
      for (int j = t + 1; j < cols && !redo; ++j) {
        if (m[i][j].is_zero()) continue;
        auto [q, rem] = m[i][j].divmod(m[t][t]);
        if (!rem.is_zero()) {
          for (int k = t; k < cols; ++k) m[t][k] += m[i][k];
          redo = true;
        }
      }
    if (redo) continue;
    out.push_back(m[t][t]);
    ++t;
    if (t >= rows || t >= cols) break;
  }
  return out;
}

}  // namespace detail

// Structure decomposition of the homology of an F[W] chain complex.
// Exact over the PID F[W]: kernel basis via column reduction, image
// expressed in the kernel basis, Smith normal form for the quotient.
inline FWModule homology_fw(const FWComplex& c) {
  uint32_t p = c.p;
  int n = c.size();
  FWModule out;
  if (n == 0) return out;
  // M[j][i] = coefficient of x_j in d(x_i): columns are images of generators.
  detail::WMat m = detail::wmat(n, n, p);
  for (auto& [ij, w] : c.d) m[ij.second][ij.first] = w;
  detail::WMat t = detail::wmat(n, n, p);
  for (int i = 0; i < n; ++i) t[i][i] = WPoly::one(p);
  detail::WMat work = m;
  detail::column_reduce(work, t);
  // Kernel basis: columns of t where work's column vanished.
  std::vector<int> kcols;
  for (int cidx = 0; cidx < n; ++cidx) {
    bool zero = true;
    for (int r = 0; r < n; ++r)
      if (!work[r][cidx].is_zero()) zero = false;
    if (zero) kcols.push_back(cidx);
  }
  int kdim = static_cast<int>(kcols.size());
  int rank = n - kdim;
  // Express every image column in the kernel basis.  Stack [K | M] and
  // column-reduce K first; the expression falls out of solving K x = m_col,
  // done by re-running a reduction on the augmented matrix.
  detail::WMat kb = detail::wmat(n, kdim, p);
  for (int a = 0; a < kdim; ++a)
    for (int r = 0; r < n; ++r) kb[r][a] = t[r][kcols[a]];
  // Solve K X = M by column-reducing the augmented matrix [K | M] and
  // recording the operations; a column of M lies in the span exactly when it
  // reduces to zero, and the recorded combination gives -X.
  int aug = kdim + n;
  detail::WMat am = detail::wmat(n, aug, p);
  for (int r = 0; r < n; ++r) {
    for (int a = 0; a < kdim; ++a) am[r][a] = kb[r][a];
    for (int cidx = 0; cidx < n; ++cidx) am[r][kdim + cidx] = m[r][cidx];
  }
  detail::WMat at = detail::wmat(aug, aug, p);
  for (int i = 0; i < aug; ++i) at[i][i] = WPoly::one(p);
  detail::column_reduce(am, at);
  // Columns that are zero and involve the M block give relations; restricted
  // to the K block they express image elements in kernel coordinates.
  std::vector<std::vector<WPoly>> relations;
  for (int cidx = 0; cidx < aug; ++cidx) {
    bool zero = true;
    for (int r = 0; r < n; ++r)
      if (!am[r][cidx].is_zero()) zero = false;
    if (!zero) continue;
    std::vector<WPoly> rel(kdim, WPoly::zero(p));
    bool touches_m = false;
    for (int a = 0; a < kdim; ++a) rel[a] = at[a][cidx];
    for (int cc = kdim; cc < aug; ++cc)
      if (!at[cc][cidx].is_zero()) touches_m = true;
    if (touches_m) relations.push_back(std::move(rel));
    else {
      // Pure K-relation: kernel basis should be independent.
      for (auto& w : rel)
        if (!w.is_zero()) throw InternalError("kernel basis dependent");
    }
  }
  (void)rank;
  detail::WMat relm = detail::wmat(static_cast<int>(relations.size()), kdim, p);
  for (size_t i = 0; i < relations.size(); ++i)
    for (int a = 0; a < kdim; ++a) relm[i][a] = relations[i][a];
  std::vector<WPoly> divisors = detail::smith_diagonal(std::move(relm));
  int nontrivial = 0;
  for (auto& dv : divisors) {
    if (!dv.is_monomial())
      throw InternalError("non-monomial elementary divisor on a graded complex: " + dv.str());
    int k = dv.valuation();
    if (k > 0) out.torsion.push_back(k);
    ++nontrivial;
  }
  out.free_rank = kdim - nontrivial;
  out.canonicalize();
  return out;
}

// Gaussian cancellation of unit entries over F[W], with the homotopy
// equivalence tracked: pi maps old generators to surviving ones, iota maps
// surviving generators back.  Both are chain maps (checked in tests).
struct FWReduction {
  FWComplex complex;
  std::map<std::pair<int, int>, WPoly> pi;    // (old index, new index)
  std::map<std::pair<int, int>, WPoly> iota;  // (new index, old index)
};

inline FWReduction reduce_fw(const FWComplex& input) {
  uint32_t p = input.p;
  FWComplex c = input;
  int n0 = c.size();
  // pi: rows = original gens, cols = current gens.
  // iota: rows = current gens, cols = original gens.
  // Per cancellation of a unit arrow ci -> cj (coefficient u):
  //   P(x_l) = x_l, P(x_ci) = 0, P(x_cj) = -u^{-1} sum_m d(ci,m) x_m
  //   I(x_l) = x_l - u^{-1} d(l,cj) x_ci
  // and the tracked maps compose: pi <- P . pi, iota <- iota . I.
  detail::WMat pi = detail::wmat(n0, n0, p);
  detail::WMat iota = detail::wmat(n0, n0, p);
  for (int i = 0; i < n0; ++i) pi[i][i] = iota[i][i] = WPoly::one(p);

  for (;;) {
    int ci = -1, cj = -1;
    for (auto& [ij, w] : c.d)
      if (w.is_unit()) {
        ci = ij.first;
        cj = ij.second;
        break;
      }
    if (ci < 0) break;
    FieldElem inv = c.entry(ci, cj).coeff(0).inv();
    int n = c.size();
    for (int o = 0; o < n0; ++o) {
      WPoly via_j = pi[o][cj];
      if (!via_j.is_zero()) {
        for (int mIdx = 0; mIdx < n; ++mIdx) {
          if (mIdx == ci || mIdx == cj) continue;
          WPoly dm = c.entry(ci, mIdx);
          if (!dm.is_zero()) pi[o][mIdx] -= via_j * dm.shifted(inv, 0);
        }
      }
      pi[o][ci] = WPoly::zero(p);
      pi[o][cj] = WPoly::zero(p);
    }
    for (int l = 0; l < n; ++l) {
      if (l == ci || l == cj) continue;
      WPoly dl = c.entry(l, cj);
      if (dl.is_zero()) continue;
      for (int o = 0; o < n0; ++o)
        if (!iota[ci][o].is_zero()) iota[l][o] -= dl.shifted(inv, 0) * iota[ci][o];
    }
    // Cancel in the differential.
    std::vector<std::pair<int, WPoly>> into_j, from_i;
    for (int k = 0; k < n; ++k) {
      if (k == ci || k == cj) continue;
      WPoly a = c.entry(k, cj);
      if (!a.is_zero()) into_j.push_back({k, a});
      WPoly b = c.entry(ci, k);
      if (!b.is_zero()) from_i.push_back({k, b});
    }
    for (auto& [k, a] : into_j)
      for (auto& [l, b] : from_i) c.add_entry(k, l, -(a * b.shifted(inv, 0)));
    // Drop generators ci, cj from the complex and both tracked maps.
    std::vector<int> keep;
    for (int k = 0; k < n; ++k)
      if (k != ci && k != cj) keep.push_back(k);
    std::map<int, int> re;
    std::vector<FWGen> ng;
    for (size_t tdx = 0; tdx < keep.size(); ++tdx) {
      re[keep[tdx]] = static_cast<int>(tdx);
      ng.push_back(c.gens[keep[tdx]]);
    }
    std::map<std::pair<int, int>, WPoly> nd;
    for (auto& [ij, w] : c.d) {
      auto a = re.find(ij.first);
      auto b = re.find(ij.second);
      if (a != re.end() && b != re.end() && !w.is_zero()) nd[{a->second, b->second}] = w;
    }
    c.gens = std::move(ng);
    c.d = std::move(nd);
    detail::WMat npi = detail::wmat(n0, c.size(), p);
    detail::WMat niota = detail::wmat(c.size(), n0, p);
    for (int o = 0; o < n0; ++o)
      for (size_t tdx = 0; tdx < keep.size(); ++tdx) npi[o][tdx] = pi[o][keep[tdx]];
    for (size_t tdx = 0; tdx < keep.size(); ++tdx)
      for (int o = 0; o < n0; ++o) niota[tdx][o] = iota[keep[tdx]][o];
    pi = std::move(npi);
    iota = std::move(niota);
  }

  FWReduction out;
  out.complex = c;
  for (int o = 0; o < n0; ++o)
    for (int t2 = 0; t2 < c.size(); ++t2)
      if (!pi[o][t2].is_zero()) out.pi[{o, t2}] = pi[o][t2];
  for (int l = 0; l < c.size(); ++l)
    for (int o = 0; o < n0; ++o)
      if (!iota[l][o].is_zero()) out.iota[{l, o}] = iota[l][o];
  return out;
}

// Homology ranks per grading of a hat complex (all entries W-degree 0).
inline std::map<int, int> hat_graded_ranks(const FWComplex& c) {
  uint32_t p = c.p;
  int n = c.size();
  // Scalar matrix, grouped by grading.
  std::map<int, std::vector<int>> by_gr;
  for (int i = 0; i < n; ++i) by_gr[c.gens[i].gr].push_back(i);
  auto rank_block = [&](int gfrom) {
    // rank of d restricted to sources of grading gfrom (targets one lower).
    auto its = by_gr.find(gfrom);
    auto itt = by_gr.find(gfrom - 1);
    if (its == by_gr.end() || itt == by_gr.end()) return 0;
    const auto& src = its->second;
    const auto& tgt = itt->second;
    std::vector<std::vector<FieldElem>> mat(
        src.size(), std::vector<FieldElem>(tgt.size(), FieldElem::zero(p)));
    for (size_t a = 0; a < src.size(); ++a)
      for (size_t b = 0; b < tgt.size(); ++b) {
        WPoly w = c.entry(src[a], tgt[b]);
        if (!w.is_zero()) {
          if (w.degree() != 0) throw InternalError("hat complex with W entries");
          mat[a][b] = w.coeff(0);
        }
      }
    // Gaussian rank.
    int rank = 0;
    size_t rows = mat.size(), cols = tgt.size();
    size_t rr = 0;
    for (size_t cc = 0; cc < cols && rr < rows; ++cc) {
      size_t piv = rr;
      while (piv < rows && mat[piv][cc].is_zero()) ++piv;
      if (piv == rows) continue;
      std::swap(mat[piv], mat[rr]);
      FieldElem inv = mat[rr][cc].inv();
      for (size_t r2 = 0; r2 < rows; ++r2) {
        if (r2 == rr || mat[r2][cc].is_zero()) continue;
        FieldElem f = mat[r2][cc] * inv;
        for (size_t c2 = cc; c2 < cols; ++c2) mat[r2][c2] -= f * mat[rr][c2];
      }
      ++rr;
      ++rank;
    }
    return rank;
  };
  std::map<int, int> out;
  for (auto& [g, idxs] : by_gr) {
    int h = static_cast<int>(idxs.size()) - rank_block(g) - rank_block(g + 1);
    if (h != 0) out[g] = h;
  }
  return out;
}

// Specializes one of U, V to 1 (W becomes the other variable) and optionally
// the other variable to 0.  The vertical complex keeps gr_w, the horizontal
// complex keeps gr_z.  Hat complexes keep only the arrows whose collapsed
// exponent is zero, so all their entries have W-degree 0.
inline FWComplex directional_complex(const BigradedComplex& c, Direction dir, bool hat) {
  if (c.truncation)
    throw InternalError("directional complex of a truncated complex is not defined over F[W]");
  FWComplex out;
  out.p = c.p;
  for (const auto& g : c.gens)
    out.gens.push_back({g.name, dir == Direction::vertical ? g.gr.gr_w : g.gr.gr_z});
  for (auto& [ij, v] : c.d) {
    auto e = c.arrow_exponents(ij.first, ij.second);
    if (!e) throw Corrupt("differential entry with illegal exponents");
    auto [a, b] = *e;
    // W is the variable that was not set to 1; hat sets it to 0 as well.
    int w = dir == Direction::vertical ? a : b;
    if (hat && w != 0) continue;
    out.add_entry(ij.first, ij.second, WPoly(v, w));
  }
  return out;
}

}  // namespace cfk
