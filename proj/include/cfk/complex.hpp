#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cfk/field.hpp"
#include "cfk/grading.hpp"
#include "cfk/wpoly.hpp"

namespace cfk {

struct Generator {
  std::string name;
  Bigrading gr;
};

// An elementary basis change on a bigraded complex.
//   Add:   x_i -> x_i + c U^a V^b x_j   (exponents forced by the gradings)
//   Scale: x_i -> c x_i
//   Swap:  exchange x_i and x_j
// Logged so curve synthesis can replay the same changes onto a flip map.
struct BasisChange {
  enum Kind { Add, Scale, Swap } kind;
  int i = 0;
  int j = 0;
  FieldElem c;
};
using BasisLog = std::vector<BasisChange>;

enum class Direction { horizontal, vertical };

// Bigraded (pre)complex over F[U,V].  Differential entries are bare field
// elements; the U/V powers on an arrow i -> j are recomputed from the
// gradings whenever needed (storing them would only invite grading drift).
// With `truncation = n` the complex lives over R_n = F[U,V]/(UV)^n; entries
// whose forced exponents satisfy min(a,b) >= n are identically zero there
// and are never stored.
class BigradedComplex {
 public:
  uint32_t p = 2;
  std::vector<Generator> gens;
  std::map<std::pair<int, int>, FieldElem> d;
  std::optional<int> truncation;

  BigradedComplex() = default;
  explicit BigradedComplex(uint32_t prime) : p(prime) {}

  int size() const { return static_cast<int>(gens.size()); }

  int index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (gens[i].name == name) return i;
    throw DomainError("no generator named " + name);
  }

  const Bigrading& gr(int i) const { return gens[i].gr; }

  // Forced exponents of a (potential) arrow i -> j; nullopt when the parity
  // or positivity constraints forbid any arrow.
  std::optional<std::pair<int, int>> arrow_exponents(int i, int j) const {
    int dw = gr(j).gr_w - gr(i).gr_w;
    if (((dw % 2) + 2) % 2 == 0) return std::nullopt;
    auto [a, b] = derive_exponents(gr(i), gr(j));
    if (a < 0 || b < 0) return std::nullopt;
    if (truncation && std::min(a, b) >= *truncation) return std::nullopt;
    return std::make_pair(a, b);
  }

  FieldElem entry(int i, int j) const {
    auto it = d.find({i, j});
    return it == d.end() ? FieldElem::zero(p) : it->second;
  }

  void set_entry(int i, int j, const FieldElem& c) {
    if (c.is_zero()) {
      d.erase({i, j});
      return;
    }
    if (!arrow_exponents(i, j))
      throw ParityError("arrow " + gens[i].name + " -> " + gens[j].name +
                        " violates grading constraints");
    d[{i, j}] = c;
  }

  void add_entry(int i, int j, const FieldElem& c) { set_entry(i, j, entry(i, j) + c); }

  void add_arrow(const std::string& from, const std::string& to, const FieldElem& c) {
    add_entry(index_of(from), index_of(to), c);
  }

  // Suggested truncation order: bounds every exponent that can occur.
  int default_truncation() const {
    if (gens.empty()) return 1;
    int wmin = gens[0].gr.gr_w, wmax = wmin, zmin = gens[0].gr.gr_z, zmax = zmin;
    for (auto& g : gens) {
      wmin = std::min(wmin, g.gr.gr_w);
      wmax = std::max(wmax, g.gr.gr_w);
      zmin = std::min(zmin, g.gr.gr_z);
      zmax = std::max(zmax, g.gr.gr_z);
    }
    return std::max(wmax - wmin, zmax - zmin) / 2 + 1;
  }

  // The scalar coefficient of x_k in d^2(x_i).  All contributing two-step
  // paths share the same forced exponents, so d^2 = 0 is a per-pair scalar
  // condition.
  FieldElem d_squared_entry(int i, int k) const {
    FieldElem acc = FieldElem::zero(p);
    for (int j = 0; j < size(); ++j) {
      FieldElem c1 = entry(i, j), c2 = entry(j, k);
      if (!c1.is_zero() && !c2.is_zero()) acc += c1 * c2;
    }
    if (!acc.is_zero() && truncation) {
      // Over R_n the composite may be forced to zero even when the scalar
      // sum is not: every two-step path i -> k shares the same exponents.
      int a = (gr(k).gr_w - gr(i).gr_w + 2) / 2;
      int b = (gr(k).gr_z - gr(i).gr_z + 2) / 2;
      if (std::min(a, b) >= *truncation) return FieldElem::zero(p);
    }
    return acc;
  }

  struct Violation {
    std::string what;
    int i = -1, j = -1;
  };
  struct ValidationReport {
    std::vector<Violation> grading_violations;
    std::vector<Violation> d2_failures;
    bool ok() const { return grading_violations.empty() && d2_failures.empty(); }
  };

  ValidationReport validate() const {
    ValidationReport rep;
    std::set<std::string> names;
    for (auto& g : gens) {
      if (!names.insert(g.name).second)
        rep.grading_violations.push_back({"duplicate generator name " + g.name, -1, -1});
      if ((((g.gr.gr_w - g.gr.gr_z) % 2) + 2) % 2 != 0)
        rep.grading_violations.push_back({"gradings of " + g.name + " disagree mod 2", -1, -1});
    }
    for (auto& [ij, c] : d) {
      auto [i, j] = ij;
      if (c.is_zero()) {
        rep.grading_violations.push_back({"stored zero entry", i, j});
        continue;
      }
      int dw = gr(j).gr_w - gr(i).gr_w;
      if (((dw % 2) + 2) % 2 == 0) {
        rep.grading_violations.push_back(
            {"even Maslov difference on arrow " + gens[i].name + " -> " + gens[j].name, i, j});
        continue;
      }
      auto [a, b] = derive_exponents(gr(i), gr(j));
      if (a < 0 || b < 0)
        rep.grading_violations.push_back(
            {"negative exponent on arrow " + gens[i].name + " -> " + gens[j].name, i, j});
    }
    if (rep.grading_violations.empty()) {
      for (int i = 0; i < size(); ++i)
        for (int k = 0; k < size(); ++k) {
          FieldElem c = d_squared_entry(i, k);
          if (!c.is_zero())
            rep.d2_failures.push_back(
                {"d^2(" + gens[i].name + ") has coefficient " + std::to_string(c.value()) +
                     " on " + gens[k].name,
                 i, k});
        }
    }
    return rep;
  }

  bool is_valid() const { return validate().ok(); }

  // --- elementary basis changes --------------------------------------------

  // Exponents for the substitution x_i -> x_i + c U^a V^b x_j; legal only if
  // both are nonnegative integers (same-parity gradings).
  std::optional<std::pair<int, int>> change_exponents(int i, int j) const {
    int dw = gr(j).gr_w - gr(i).gr_w;
    int dz = gr(j).gr_z - gr(i).gr_z;
    if (((dw % 2) + 2) % 2 != 0) return std::nullopt;
    int a = dw / 2, b = dz / 2;
    if (a < 0 || b < 0) return std::nullopt;
    return std::make_pair(a, b);
  }

  void apply_change(const BasisChange& bc) {
    switch (bc.kind) {
      case BasisChange::Add: {
        if (bc.i == bc.j) throw InternalError("basis change with i == j");
        auto e = change_exponents(bc.i, bc.j);
        if (!e) throw InternalError("illegal basis change exponents");
        if (bc.c.is_zero()) return;
        // Row: d(x_i') = d(x_i) + c U^a V^b d(x_j).
        std::vector<std::pair<int, FieldElem>> row;
        for (int l = 0; l < size(); ++l) {
          FieldElem cjl = entry(bc.j, l);
          if (!cjl.is_zero()) row.push_back({l, cjl});
        }
        for (auto& [l, cjl] : row) {
          if (arrow_exponents(bc.i, l)) add_entry(bc.i, l, bc.c * cjl);
        }
        // Column: x_i = x_i' - c U^a V^b x_j inside every other differential.
        std::vector<std::pair<int, FieldElem>> col;
        for (int k = 0; k < size(); ++k) {
          FieldElem cki = entry(k, bc.i);
          if (!cki.is_zero()) col.push_back({k, cki});
        }
        for (auto& [k, cki] : col) {
          if (k == bc.i) continue;
          if (arrow_exponents(k, bc.j)) add_entry(k, bc.j, -(bc.c * cki));
        }
        break;
      }
      case BasisChange::Scale: {
        if (bc.c.is_zero()) throw InternalError("scaling by zero");
        for (int l = 0; l < size(); ++l) {
          FieldElem c = entry(bc.i, l);
          if (!c.is_zero()) d[{bc.i, l}] = c * bc.c.inv();
        }
        for (int k = 0; k < size(); ++k) {
          FieldElem c = entry(k, bc.i);
          if (!c.is_zero()) d[{k, bc.i}] = c * bc.c;
        }
        break;
      }
      case BasisChange::Swap: {
        std::map<std::pair<int, int>, FieldElem> nd;
        auto m = [&](int k) { return k == bc.i ? bc.j : (k == bc.j ? bc.i : k); };
        for (auto& [ij, c] : d) nd[{m(ij.first), m(ij.second)}] = c;
        std::swap(gens[bc.i], gens[bc.j]);
        d = std::move(nd);
        break;
      }
    }
  }

  // --- reduction ------------------------------------------------------------

  // Gaussian cancellation of arrows with forced exponents (0,0).  The result
  // is chain homotopy equivalent to the input and has a reduced basis.
  BigradedComplex reduced() const {
    BigradedComplex c(*this);
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
      c.cancel(pi, pj);
    }
    return c;
  }

  bool is_reduced() const {
    for (auto& [ij, coeff] : d) {
      auto e = arrow_exponents(ij.first, ij.second);
      if (e && e->first == 0 && e->second == 0) return false;
    }
    return true;
  }

  void cancel(int i, int j) {
    FieldElem cij = entry(i, j);
    if (cij.is_zero()) throw InternalError("cancelling a zero arrow");
    FieldElem inv = cij.inv();
    std::vector<std::pair<int, FieldElem>> into_j, from_i;
    for (int k = 0; k < size(); ++k) {
      if (k == i || k == j) continue;
      FieldElem ckj = entry(k, j);
      if (!ckj.is_zero()) into_j.push_back({k, ckj});
      FieldElem cil = entry(i, k);
      if (!cil.is_zero()) from_i.push_back({k, cil});
    }
    for (auto& [k, ckj] : into_j)
      for (auto& [l, cil] : from_i)
        if (arrow_exponents(k, l)) add_entry(k, l, -(ckj * inv * cil));
    erase_pair(i, j);
  }

  void erase_pair(int i, int j) {
    std::vector<int> keep;
    for (int k = 0; k < size(); ++k)
      if (k != i && k != j) keep.push_back(k);
    std::map<int, int> re;
    std::vector<Generator> ng;
    for (int t = 0; t < (int)keep.size(); ++t) {
      re[keep[t]] = t;
      ng.push_back(gens[keep[t]]);
    }
    std::map<std::pair<int, int>, FieldElem> nd;
    for (auto& [ij, c] : d) {
      auto a = re.find(ij.first);
      auto b = re.find(ij.second);
      if (a != re.end() && b != re.end()) nd[{a->second, b->second}] = c;
    }
    gens = std::move(ng);
    d = std::move(nd);
  }

  // --- simplified bases -----------------------------------------------------

  // Vertical arrows carry pure V powers (U exponent 0); horizontal ones pure
  // U powers.  A basis is simplified in a direction when the arrows of that
  // type form a partial matching on the generators.
  bool is_directional_arrow(int i, int j, Direction dir) const {
    auto e = arrow_exponents(i, j);
    if (!e || entry(i, j).is_zero()) return false;
    return dir == Direction::vertical ? (e->first == 0 && e->second >= 1)
                                      : (e->second == 0 && e->first >= 1);
  }

  bool is_simplified(Direction dir) const {
    std::map<int, int> heads, tails;
    for (auto& [ij, c] : d) {
      if (!is_directional_arrow(ij.first, ij.second, dir)) continue;
      if (++tails[ij.first] > 1) return false;
      if (++heads[ij.second] > 1) return false;
    }
    return true;
  }

  // Change basis so the chosen direction is simplified.  Repeatedly picks a
  // line (row or column of the directional matrix) holding two arrows and
  // clears the larger-power one against the minimal-power pivot of that
  // line; minimal pivots keep every elementary change legal (nonnegative
  // power difference, equal gr_w) and never recreate a unit arrow on a
  // reduced complex.  Runs to a fixed point.
  BasisLog simplify_basis(Direction dir) {
    if (!is_reduced()) throw DomainError("simplify_basis requires a reduced complex");
    BasisLog log;
    auto power = [&](int i, int j) {
      auto e = arrow_exponents(i, j);
      return dir == Direction::vertical ? e->second : e->first;
    };
    int guard = 0;
    for (;;) {
      if (++guard > 64 * (size() + 1) * (size() + 1))
        throw InternalError("simplify_basis failed to converge");
      // Look for a column (head) shared by two directional arrows, then for
      // a row (tail).  Clear one offender and restart the scan.
      int ci = -1, cj = -1, oi = -1, oj = -1;
      for (int j = 0; j < size() && ci < 0; ++j) {
        int besti = -1;
        for (int i = 0; i < size(); ++i) {
          if (!is_directional_arrow(i, j, dir)) continue;
          if (besti < 0 || power(i, j) < power(besti, j)) besti = i;
        }
        if (besti < 0) continue;
        for (int i = 0; i < size(); ++i) {
          if (i == besti || !is_directional_arrow(i, j, dir)) continue;
          ci = besti, cj = j, oi = i, oj = j;
          break;
        }
      }
      if (ci >= 0) {
        // x_oi -> x_oi - (c / pivot) V^t x_ci  clears the arrow oi -> cj.
        BasisChange bc{BasisChange::Add, oi, ci, -(entry(oi, oj) / entry(ci, cj))};
        apply_change(bc);
        log.push_back(bc);
        continue;
      }
      for (int i = 0; i < size() && ci < 0; ++i) {
        int bestj = -1;
        for (int j = 0; j < size(); ++j) {
          if (!is_directional_arrow(i, j, dir)) continue;
          if (bestj < 0 || power(i, j) < power(i, bestj)) bestj = j;
        }
        if (bestj < 0) continue;
        for (int j = 0; j < size(); ++j) {
          if (j == bestj || !is_directional_arrow(i, j, dir)) continue;
          ci = i, cj = bestj, oi = i, oj = j;
          break;
        }
      }
      if (ci < 0) break;
      // Fold the extra target into the pivot head: x_cj -> x_cj + (c/pivot) x_oj.
      BasisChange bc{BasisChange::Add, cj, oj, entry(oi, oj) / entry(ci, cj)};
      apply_change(bc);
      log.push_back(bc);
    }
    return log;
  }
};

}  // namespace cfk
