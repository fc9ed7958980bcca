#pragma once

#include <utility>
#include <vector>

#include "cfk/curve.hpp"
#include "cfk/errors.hpp"
#include "cfk/field.hpp"

namespace cfk {

// Rational canonical form machinery for local systems.  A local system is a
// conjugacy class of invertible matrices over F_p; its canonical shape is a
// direct sum of companion blocks of the invariant factors, and each block
// becomes one multiplicity-k component.

using Poly = std::vector<FieldElem>;  // little-endian, no trailing zeros
using Matrix = std::vector<std::vector<FieldElem>>;

namespace polyop {

inline void trim(Poly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly mul(const Poly& a, const Poly& b, uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, FieldElem::zero(p));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

inline Poly sub(Poly a, const Poly& b, uint32_t p) {
  if (a.size() < b.size()) a.resize(b.size(), FieldElem::zero(p));
  for (size_t i = 0; i < b.size(); ++i) a[i] = a[i] - b[i];
  trim(a);
  return a;
}

// a = q*b + r with deg r < deg b.
inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b, uint32_t p) {
  if (b.empty()) throw DivisionByZero();
  Poly q;
  FieldElem lead_inv = b.back().inv();
  while (deg(a) >= deg(b)) {
    int shift = deg(a) - deg(b);
    FieldElem c = a.back() * lead_inv;
    if (static_cast<int>(q.size()) < shift + 1)
      q.resize(shift + 1, FieldElem::zero(p));
    q[shift] += c;
    Poly t(shift, FieldElem::zero(p));
    t.insert(t.end(), b.begin(), b.end());
    for (auto& e : t) e = e * c;
    a = sub(a, t, p);
  }
  trim(q);
  return {q, a};
}

inline Poly monic(Poly a) {
  if (a.empty()) return a;
  FieldElem inv = a.back().inv();
  for (auto& e : a) e = e * inv;
  return a;
}

}  // namespace polyop

// Invariant factors of the F_p[t]-module defined by a square matrix, i.e.
// the nonconstant diagonal entries of the Smith normal form of tI - A,
// listed so each divides the next.  The conjugacy class of A is exactly
// this list.
inline std::vector<Poly> frobenius_invariant_factors(const Matrix& a,
                                                     uint32_t p) {
  int n = static_cast<int>(a.size());
  for (const auto& row : a)
    if (static_cast<int>(row.size()) != n)
      throw DomainError("invariant factors of a non-square matrix");

  // Entries of tI - A as polynomials.
  std::vector<std::vector<Poly>> m(n, std::vector<Poly>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Poly e;
      if (!a[i][j].is_zero()) e.push_back(-a[i][j]);
      if (i == j) {
        e.resize(2, FieldElem::zero(p));
        e[1] = FieldElem::one(p);
        polyop::trim(e);
      }
      m[i][j] = e;
    }

  auto degree_of = [](const Poly& q) {
    return q.empty() ? -1 : polyop::deg(q);
  };

  std::vector<Poly> factors;
  for (int k = 0; k < n; ++k) {
    // Pull the lowest-degree nonzero entry of the remaining block into the
    // pivot and sweep its row and column; restart whenever a division
    // leaves a remainder so degrees keep strictly dropping.
    bool again = true;
    while (again) {
      again = false;
      int bi = -1, bj = -1;
      for (int i = k; i < n; ++i)
        for (int j = k; j < n; ++j)
          if (!m[i][j].empty() &&
              (bi < 0 || degree_of(m[i][j]) < degree_of(m[bi][bj]))) {
            bi = i;
            bj = j;
          }
      if (bi < 0) break;  // block is zero
      std::swap(m[k], m[bi]);
      for (int i = k; i < n; ++i) std::swap(m[i][k], m[i][bj]);

      for (int i = k + 1; i < n; ++i) {
        if (m[i][k].empty()) continue;
        auto [q, r] = polyop::divmod(m[i][k], m[k][k], p);
        for (int j = k; j < n; ++j)
          m[i][j] = polyop::sub(m[i][j], polyop::mul(q, m[k][j], p), p);
        if (!r.empty()) again = true;
      }
      for (int j = k + 1; j < n; ++j) {
        if (m[k][j].empty()) continue;
        auto [q, r] = polyop::divmod(m[k][j], m[k][k], p);
        for (int i = k; i < n; ++i)
          m[i][j] = polyop::sub(m[i][j], polyop::mul(q, m[i][k], p), p);
        if (!r.empty()) again = true;
      }
    }
    if (m[k][k].empty()) continue;

    // Divisibility fix-up: the pivot must divide everything below-right.
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        if (m[i][j].empty()) continue;
        auto [q, r] = polyop::divmod(m[i][j], m[k][k], p);
        (void)q;
        if (!r.empty()) {
          // Fold the offending row into the pivot row and redo this pivot.
          for (int c = k; c < n; ++c)
            m[k][c] = polyop::sub(m[k][c],
                                  polyop::mul({-FieldElem::one(p)}, m[i][c], p),
                                  p);
          i = n;  // restart the sweep from the pivot step
          j = n;
          --k;
        }
      }
  }

  for (int k = 0; k < n; ++k)
    if (!m[k][k].empty() && polyop::deg(m[k][k]) >= 1)
      factors.push_back(polyop::monic(m[k][k]));
  return factors;
}

// Companion matrix of t^k - c[k-1] t^{k-1} - ... - c[0]: ones on the
// subdiagonal, the c-vector in the last column.
inline Matrix companion_matrix(const LocalSystem& sys, uint32_t p) {
  int k = sys.dim();
  Matrix m(k, std::vector<FieldElem>(k, FieldElem::zero(p)));
  for (int i = 0; i + 1 < k; ++i) m[i + 1][i] = FieldElem::one(p);
  for (int i = 0; i < k; ++i) m[i][k - 1] = sys.c[i];
  return m;
}

// Local system whose companion block has the given characteristic
// polynomial (monic, degree >= 1).
inline LocalSystem local_system_from_factor(const Poly& f, uint32_t p) {
  if (f.size() < 2) throw DomainError("constant invariant factor");
  LocalSystem sys;
  int k = polyop::deg(f);
  sys.c.reserve(k);
  for (int i = 0; i < k; ++i) {
    if (f[i].prime() != p) throw DomainError("factor over the wrong field");
    sys.c.push_back(-f[i]);
  }
  if (sys.c[0].is_zero())
    throw Corrupt("singular local system: constant term is zero");
  return sys;
}

}  // namespace cfk
