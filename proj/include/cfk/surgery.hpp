#pragma once

// Mapping cones computing HF^- of rational surgeries, and the dual-knot
// complex of the core of the surgery solid torus.
//
// The cone for slope p/q in the spin-c structure i is
//   X(i) = ( (+) A_n --v,h--> (+) B_n ),
// where A_n = Mor(C1, C2) restricted to Alexander grading s_n = floor((i+np)/q)
// and each B_n is the morphism complex of the reduced vertical complexes.  The
// map v is inclusion followed by the reduction projections; h is the same on
// the horizontal side, transported to the vertical side through the flip maps.
// Truncation: only the copies with |s_n| <= N - 1 are kept, together with the
// B's that receive from two A's (both ends receive from one).  For large N the
// discarded pieces are acyclic, so the homology is independent of the window.

#include <cassert>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfk/complex.hpp"
#include "cfk/errors.hpp"
#include "cfk/flip.hpp"
#include "cfk/grading.hpp"
#include "cfk/homology.hpp"
#include "cfk/mor.hpp"
#include "cfk/wpoly.hpp"

namespace cfk {

// Division rounding toward -infinity / +infinity regardless of signs.
inline long long floor_div(long long a, long long b) {
  assert(b != 0);
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
inline long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

struct SurgerySpec {
  long long p = 0;
  long long q = 1;       // q >= 1, gcd(|p|, q) = 1
  long long spin_c = 0;  // residue mod p; the Alexander slice s when p = 0
  int N = 0;             // truncation window, 0 = choose automatically
};

// Which copy of which summand a cone generator lives in.
struct ConeGen {
  bool is_b = false;
  long long n = 0;  // copy index
  int i = 0, j = 0; // generator pair (source, target) inside the Mor copy
};

struct MappingCone {
  FWComplex x;
  std::vector<ConeGen> info;  // parallel to x.gens
  long long n_min = 0, n_max = 0;
};

inline int genus_bound(const BigradedComplex& c) {
  int g = 0;
  for (auto& gen : c.gens) g = std::max(g, std::abs(gen.gr.alexander()));
  return g;
}

namespace surgdetail {

using Mat = std::vector<std::vector<WPoly>>;

inline WPoly poly_det(const Mat& m, uint32_t p) {
  size_t n = m.size();
  if (n == 0) return WPoly(FieldElem::one(p), 0);
  if (n == 1) return m[0][0];
  // Laplace along the first row; the matrices here have the size of the hat
  // homology of the input, so this stays tiny.
  WPoly acc(p);
  for (size_t j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    Mat sub;
    sub.reserve(n - 1);
    for (size_t r = 1; r < n; ++r) {
      std::vector<WPoly> row;
      row.reserve(n - 1);
      for (size_t cidx = 0; cidx < n; ++cidx)
        if (cidx != j) row.push_back(m[r][cidx]);
      sub.push_back(std::move(row));
    }
    WPoly term = m[0][j] * poly_det(sub, p);
    acc += (j % 2 == 0) ? term : -term;
  }
  return acc;
}

// Inverse of a square matrix over F[W] whose determinant is a unit.  The
// matrices inverted here are reductions of flip maps, which are invertible
// whenever the flip is an honest flip map, so a non-unit determinant means a
// corrupted input and is reported as an internal error.
inline Mat poly_inverse(const Mat& m, uint32_t p) {
  size_t n = m.size();
  WPoly det = poly_det(m, p);
  if (det.is_zero() || !det.is_unit())
    throw InternalError("reduced flip map is not invertible over F[W]");
  FieldElem dinv = det.coeff(0).inv();
  Mat inv(n, std::vector<WPoly>(n, WPoly(p)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Mat sub;
      sub.reserve(n - 1);
      for (size_t r = 0; r < n; ++r) {
        if (r == j) continue;
        std::vector<WPoly> row;
        row.reserve(n - 1);
        for (size_t cidx = 0; cidx < n; ++cidx)
          if (cidx != i) row.push_back(m[r][cidx]);
        sub.push_back(std::move(row));
      }
      WPoly cof = poly_det(sub, p);
      if ((i + j) % 2 == 1) cof = -cof;
      inv[i][j] = cof.shifted(dinv, 0);
    }
  return inv;
}

// The flip map compressed between the reduced horizontal and vertical
// complexes: pi_v . Psi . iota_h, as a matrix with rows indexed by the
// reduced horizontal generators.
inline Mat flip_between_reductions(const BigradedComplex& c, const FlipMap& psi,
                                   const FWReduction& rh, const FWReduction& rv) {
  Mat m(rh.complex.size(), std::vector<WPoly>(rv.complex.size(), WPoly(c.p)));
  for (auto& [gx, iw] : rh.iota) {
    int g = gx.first, x = gx.second;
    for (auto& [xy, coeff] : psi.c) {
      if (xy.first != x) continue;
      int y = xy.second;
      int u = 0, v = 0;
      if (!flip_exponents(c.gens[x].gr, c.gens[y].gr, &u, &v)) continue;
      for (auto& [yg2, pw] : rv.pi) {
        if (yg2.first != y) continue;
        m[g][yg2.second] += iw * WPoly(coeff, u) * pw;
      }
    }
  }
  return m;
}

// Adds per-summand grading offsets so that every entry has degree -1.  The
// summand graph of a truncated cone is a path, so consistent offsets exist;
// an inconsistency means a sign or exponent bug and is fatal.  Untruncated
// cones (p = 0) are genuinely not Z-graded when both v and h are present, so
// the caller disables the check and the offsets are best-effort.
inline void apply_summand_shifts(FWComplex& x, const std::vector<int>& node_of, int num_nodes,
                                 bool require_consistent) {
  struct Rel {
    int a, b;
    long long delta;
  };
  std::vector<Rel> rels;
  for (auto& [kl, w] : x.d) {
    auto [k, l] = kl;
    for (auto& [pow, coeff] : w.coeffs()) {
      (void)coeff;
      rels.push_back({node_of[k], node_of[l],
                      static_cast<long long>(x.gens[k].gr) - x.gens[l].gr - 1 + 2 * pow});
    }
  }
  std::vector<long long> shift(num_nodes, 0);
  std::vector<char> seen(num_nodes, 0);
  for (int seed = 0; seed < num_nodes; ++seed) {
    if (seen[seed]) continue;
    seen[seed] = 1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& r : rels) {
        if (seen[r.a] && !seen[r.b]) {
          shift[r.b] = shift[r.a] + r.delta;
          seen[r.b] = 1;
          changed = true;
        } else if (!seen[r.a] && seen[r.b]) {
          shift[r.a] = shift[r.b] - r.delta;
          seen[r.a] = 1;
          changed = true;
        } else if (seen[r.a] && seen[r.b] && require_consistent &&
                   shift[r.b] != shift[r.a] + r.delta) {
          throw InternalError("mapping cone entries are not compatibly graded");
        }
      }
    }
  }
  for (size_t k = 0; k < x.gens.size(); ++k)
    x.gens[k].gr += static_cast<int>(shift[node_of[k]]);
}

inline FieldElem parity_sign(int gr, uint32_t p) {
  return (((gr % 2) + 2) % 2 == 0) ? FieldElem::one(p) : -FieldElem::one(p);
}

}  // namespace surgdetail

// The truncated surgery cone for Mor(C1, C2) at slope p/q in spin-c class i.
inline MappingCone build_cone(const BigradedComplex& c1, const FlipMap& psi1,
                              const BigradedComplex& c2, const FlipMap& psi2,
                              const SurgerySpec& spec) {
  if (c1.p != c2.p) throw InternalError("surgery cone of complexes over different fields");
  if (c1.truncation || c2.truncation)
    throw InternalError("surgery cone requires untruncated inputs");
  if (spec.q < 1) throw DomainError("surgery slope must have q >= 1");
  if (std::gcd(std::llabs(spec.p), spec.q) != 1)
    throw DomainError("surgery slope p/q must be in lowest terms");
  validate_flip(c1, psi1);
  validate_flip(c2, psi2);

  const uint32_t p = c1.p;
  const long long i = spec.spin_c;
  const int g = genus_bound(c1) + genus_bound(c2);

  int N = spec.N;
  if (N == 0) {
    long long window = 1;
    if (spec.p != 0) window = ceil_div(ceil_div(std::llabs(spec.p), spec.q) + 1, 2);
    N = static_cast<int>(std::max<long long>({static_cast<long long>(g), window, 1}));
  } else if (N < std::max(g, 1)) {
    throw TruncationError("truncation window is smaller than the Alexander spread");
  }

  // Copy ranges.  A_n survives iff |s_n| <= N - 1; the B-range keeps exactly
  // the copies receiving both a v and an h ("inner" B's) plus, for negative
  // slopes, the two ends which receive one map each.
  long long n_min = 0, n_max = 0, b_lo = 0, b_hi = -1;
  bool v_all = false;
  if (spec.p > 0) {
    n_min = ceil_div(spec.q * (1 - N) - i, spec.p);
    n_max = floor_div(spec.q * N - 1 - i, spec.p);
    b_lo = n_min + 1;
    b_hi = n_max;
  } else if (spec.p < 0) {
    n_min = ceil_div(spec.q * N - 1 - i, spec.p);
    n_max = floor_div(spec.q * (1 - N) - i, spec.p);
    b_lo = n_min;
    b_hi = n_max + 1;
    v_all = true;
  } else {
    n_min = n_max = 0;
    b_lo = b_hi = 0;
    v_all = true;
  }
  if (spec.p != 0 && n_min > n_max)
    throw TruncationError("truncation window leaves no Alexander slice");

  auto slice = [&](long long n) {
    return spec.p == 0 ? i : floor_div(i + n * spec.p, spec.q);
  };

  // Shared reductions of the four directional complexes and the compressed
  // flip maps between them.
  FWReduction r1v = reduce_fw(directional_complex(c1, Direction::vertical, false));
  FWReduction r1h = reduce_fw(directional_complex(c1, Direction::horizontal, false));
  FWReduction r2v = reduce_fw(directional_complex(c2, Direction::vertical, false));
  FWReduction r2h = reduce_fw(directional_complex(c2, Direction::horizontal, false));
  if (r1v.complex.size() != r1h.complex.size())
    throw InternalError("flip source has mismatched directional homology ranks");
  surgdetail::Mat psibar1 = surgdetail::flip_between_reductions(c1, psi1, r1h, r1v);
  surgdetail::Mat psibar2 = surgdetail::flip_between_reductions(c2, psi2, r2h, r2v);
  surgdetail::Mat phi1 = surgdetail::poly_inverse(psibar1, p);

  const int nb1 = r1v.complex.size(), nb2 = r2v.complex.size();
  FWComplex bmor = mor_complex_fw(r1v.complex, r2v.complex);

  // Transported h-block factors: for a Mor generator x_i -> y_j the entry into
  // the B-pair (bp, bq) is L[i][bp] * W^beta_ij * R[j][bq], where
  //   L[i][bp] = sum_ph phi1[bp][ph] iota_h(ph -> x_i),
  //   R[j][bq] = sum_qh pi_h(y_j -> qh) psibar2[qh][bq].
  std::vector<std::vector<WPoly>> hL(c1.size(), std::vector<WPoly>(nb1, WPoly(p)));
  std::vector<std::vector<WPoly>> hR(c2.size(), std::vector<WPoly>(nb2, WPoly(p)));
  for (auto& [phx, iw] : r1h.iota) {
    int ph = phx.first, x = phx.second;
    for (int bp = 0; bp < nb1; ++bp) hL[x][bp] += phi1[bp][ph] * iw;
  }
  for (auto& [yqh, pw] : r2h.pi) {
    int y = yqh.first, qh = yqh.second;
    for (int bq = 0; bq < nb2; ++bq) hR[y][bq] += pw * psibar2[qh][bq];
  }

  // Assemble.
  MappingCone cone;
  cone.x.p = p;
  cone.n_min = n_min;
  cone.n_max = n_max;
  const int n1 = c1.size(), n2 = c2.size();
  std::map<long long, int> a_off, b_off;
  std::vector<int> node_of;
  int num_nodes = 0;

  std::vector<FWComplex> a_copies;
  for (long long n = n_min; n <= n_max; ++n) {
    FWComplex an = mor_complex(c1, c2, static_cast<int>(slice(n)));
    a_off[n] = cone.x.size();
    for (int k = 0; k < an.size(); ++k) {
      cone.x.gens.push_back({"A" + std::to_string(n) + ":" + an.gens[k].name, an.gens[k].gr});
      cone.info.push_back({false, n, k / n2, k % n2});
      node_of.push_back(num_nodes);
    }
    ++num_nodes;
    a_copies.push_back(std::move(an));
  }
  for (long long n = b_lo; n <= b_hi; ++n) {
    b_off[n] = cone.x.size();
    for (int k = 0; k < bmor.size(); ++k) {
      cone.x.gens.push_back(
          {"B" + std::to_string(n) + ":" + bmor.gens[k].name, bmor.gens[k].gr - 1});
      cone.info.push_back({true, n, k / nb2, k % nb2});
      node_of.push_back(num_nodes);
    }
    ++num_nodes;
  }

  // Internal differentials.
  for (long long n = n_min; n <= n_max; ++n) {
    const FWComplex& an = a_copies[static_cast<size_t>(n - n_min)];
    for (auto& [kl, w] : an.d) cone.x.add_entry(a_off[n] + kl.first, a_off[n] + kl.second, w);
  }
  for (long long n = b_lo; n <= b_hi; ++n)
    for (auto& [kl, w] : bmor.d) cone.x.add_entry(b_off[n] + kl.first, b_off[n] + kl.second, w);

  // v- and h-blocks, with the cone sign twist (-1)^{gr} on the source.
  for (long long n = n_min; n <= n_max; ++n) {
    const FWComplex& an = a_copies[static_cast<size_t>(n - n_min)];
    int s = static_cast<int>(slice(n));
    bool has_v = b_off.count(n) && (v_all || n >= n_min + 1);
    bool has_h = b_off.count(n + 1) || spec.p == 0;
    long long h_tgt = spec.p == 0 ? 0 : n + 1;
    for (int ii = 0; ii < n1; ++ii)
      for (int jj = 0; jj < n2; ++jj) {
        int src = a_off[n] + ii * n2 + jj;
        auto [alpha, beta] = mordetail::symbol_powers(c1, c2, ii, jj, s);
        FieldElem sgn = surgdetail::parity_sign(an.gens[ii * n2 + jj].gr, p);
        if (has_v) {
          for (auto& [bpx, iw] : r1v.iota) {
            if (bpx.second != ii) continue;
            for (auto& [ybq, pw] : r2v.pi) {
              if (ybq.first != jj) continue;
              WPoly w = (iw * pw).shifted(sgn, alpha);
              cone.x.add_entry(src, b_off[n] + bpx.first * nb2 + ybq.second, w);
            }
          }
        }
        if (has_h) {
          for (int bp = 0; bp < nb1; ++bp) {
            if (hL[ii][bp].is_zero()) continue;
            for (int bq = 0; bq < nb2; ++bq) {
              if (hR[jj][bq].is_zero()) continue;
              WPoly w = (hL[ii][bp] * hR[jj][bq]).shifted(sgn, beta);
              cone.x.add_entry(src, b_off[h_tgt] + bp * nb2 + bq, w);
            }
          }
        }
      }
  }

  surgdetail::apply_summand_shifts(cone.x, node_of, num_nodes, spec.p != 0);
  return cone;
}

// HF^- of p/q surgery along the knot described by (c, psi), one module per
// spin-c structure.  Requires p != 0; slope zero has no such decomposition and
// is exposed through build_cone per Alexander slice instead.
inline std::map<long long, FWModule> hf_minus_surgery(const BigradedComplex& c, const FlipMap& psi,
                                                      long long p, long long q, int N = 0) {
  if (p == 0) throw DomainError("zero surgery slope: build the cone per slice instead");
  std::map<long long, FWModule> out;
  for (long long i = 0; i < std::llabs(p); ++i) {
    SurgerySpec spec{p, q, i, N};
    MappingCone cone =
        build_cone(trivial_complex(c.p), trivial_flip(c.p), c, psi, spec);
    out[i] = homology_fw(cone.x);
  }
  return out;
}

// The knot Floer complex of the dual knot (the core of the surgery solid
// torus) in the n-surgery, one reduced complex per spin-c structure, with
// relative bigradings.  The cone is built from the unreduced vertical complex
// so that the second Alexander filtration (the level of the copy a generator
// sits in) is defined on the nose; the bigraded lift replaces each W-power by
// the U- and V-powers forced by that filtration, and only then is the complex
// reduced.
inline std::map<long long, BigradedComplex> dual_knot_complex(const BigradedComplex& c,
                                                              const FlipMap& psi, long long n) {
  if (n == 0) throw DomainError("dual knot requires a nonzero surgery coefficient");
  if (c.truncation) throw InternalError("dual knot complex of a truncated complex");
  validate_flip(c, psi);

  const uint32_t p = c.p;
  const int g = genus_bound(c);
  const int N =
      static_cast<int>(std::max<long long>({static_cast<long long>(g) + 1, std::llabs(n) / 2 + 1}));
  const int nc = c.size();
  FWComplex cv = directional_complex(c, Direction::vertical, false);

  std::map<long long, BigradedComplex> out;
  for (long long i = 0; i < std::llabs(n); ++i) {
    long long n_min, n_max, blo, bhi;
    bool v_all;
    if (n > 0) {
      n_min = ceil_div(1 - N - i, n);
      n_max = floor_div(N - 1 - i, n);
      blo = n_min + 1;
      bhi = n_max;
      v_all = false;
    } else {
      n_min = ceil_div(N - 1 - i, n);
      n_max = floor_div(1 - N - i, n);
      blo = n_min;
      bhi = n_max + 1;
      v_all = true;
    }
    if (n_min > n_max) throw TruncationError("truncation window leaves no Alexander slice");

    FWComplex cone;
    cone.p = p;
    std::vector<long long> level;  // second Alexander filtration per generator
    std::vector<int> node_of;
    int num_nodes = 0;
    std::map<long long, int> a_off, b_off;

    for (long long np = n_min; np <= n_max; ++np) {
      long long s = i + n * np;
      a_off[np] = cone.size();
      for (int x = 0; x < nc; ++x) {
        long long ax = c.gens[x].gr.alexander();
        int alpha = static_cast<int>(std::max<long long>(ax - s, 0));
        cone.gens.push_back(
            {"A" + std::to_string(np) + ":" + c.gens[x].name, c.gens[x].gr.gr_w - 2 * alpha});
        level.push_back(ax >= s ? np : np - 1);
        node_of.push_back(num_nodes);
      }
      ++num_nodes;
    }
    for (long long m = blo; m <= bhi; ++m) {
      b_off[m] = cone.size();
      for (int y = 0; y < nc; ++y) {
        cone.gens.push_back({"B" + std::to_string(m) + ":" + cv.gens[y].name, cv.gens[y].gr - 1});
        level.push_back(m - 1);
        node_of.push_back(num_nodes);
      }
      ++num_nodes;
    }

    for (long long np = n_min; np <= n_max; ++np) {
      long long s = i + n * np;
      auto alpha_of = [&](int x) {
        return static_cast<int>(std::max<long long>(c.gens[x].gr.alexander() - s, 0));
      };
      auto beta_of = [&](int x) {
        return static_cast<int>(std::max<long long>(s - c.gens[x].gr.alexander(), 0));
      };
      // Internal differential of the slice.
      for (auto& [xy, coeff] : c.d) {
        auto [x, y] = xy;
        auto exps = c.arrow_exponents(x, y);
        assert(exps);
        int t = alpha_of(x) + exps->first - alpha_of(y);
        assert(t >= 0);
        assert(t == beta_of(x) + exps->second - beta_of(y));
        cone.add_entry(a_off[np] + x, a_off[np] + y, WPoly(coeff, t));
      }
      bool has_v = b_off.count(np) && (v_all || np >= n_min + 1);
      bool has_h = b_off.count(np + 1);
      for (int x = 0; x < nc; ++x) {
        FieldElem sgn = surgdetail::parity_sign(cone.gens[a_off[np] + x].gr, p);
        if (has_v) cone.add_entry(a_off[np] + x, b_off[np] + x, WPoly(sgn, alpha_of(x)));
        if (has_h) {
          for (auto& [xy, coeff] : psi.c) {
            if (xy.first != x) continue;
            int u = 0, v = 0;
            if (!flip_exponents(c.gens[x].gr, c.gens[xy.second].gr, &u, &v)) continue;
            cone.add_entry(a_off[np] + x, b_off[np + 1] + xy.second,
                           WPoly(sgn * coeff, beta_of(x) + u));
          }
        }
      }
    }
    for (long long m = blo; m <= bhi; ++m)
      for (auto& [kl, w] : cv.d) cone.add_entry(b_off[m] + kl.first, b_off[m] + kl.second, w);

    surgdetail::apply_summand_shifts(cone, node_of, num_nodes, true);

    // Bigraded lift: gr_w is the cone grading, the second Alexander grading is
    // the copy level, and gr_z = gr_w - 2A.  Every W-power then matches the
    // U-power forced by the gradings, and the V-power is nonnegative.
    BigradedComplex lifted(p);
    for (int k = 0; k < cone.size(); ++k)
      lifted.gens.push_back(
          {cone.gens[k].name,
           Bigrading(cone.gens[k].gr, cone.gens[k].gr - 2 * static_cast<int>(level[k]))});
    for (auto& [kl, w] : cone.d) {
      assert(w.is_monomial());
      int t = w.valuation();
      auto exps = lifted.arrow_exponents(kl.first, kl.second);
      if (!exps || exps->first != t)
        throw InternalError("dual-knot lift does not match the forced exponents");
      lifted.set_entry(kl.first, kl.second, w.coeff(t));
    }
    out[i] = lifted.reduced();
  }
  return out;
}

}  // namespace cfk
