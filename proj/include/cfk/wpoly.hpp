#pragma once

#include <map>
#include <ostream>
#include <sstream>

#include "cfk/field.hpp"

namespace cfk {

// Polynomial in W over F_p, exponents >= 0, no zero coefficients stored.
// Everything downstream (arrow configurations, mapping cones, F[W]-module
// homology) works in this ring; W = UV once lifted back to two variables.
class WPoly {
 public:
  WPoly() : p_(2) {}
  explicit WPoly(uint32_t p) : p_(p) {}
  WPoly(const FieldElem& c, int wpow) : p_(c.prime()) {
    if (!c.is_zero()) {
      if (wpow < 0) throw InternalError("negative W exponent");
      c_[wpow] = c;
    }
  }

  static WPoly zero(uint32_t p) { return WPoly(p); }
  static WPoly one(uint32_t p) { return WPoly(FieldElem::one(p), 0); }

  uint32_t prime() const { return p_; }
  bool is_zero() const { return c_.empty(); }
  const std::map<int, FieldElem>& coeffs() const { return c_; }

  FieldElem coeff(int k) const {
    auto it = c_.find(k);
    return it == c_.end() ? FieldElem::zero(p_) : it->second;
  }

  // Lowest W-valuation; only meaningful on nonzero polynomials.
  int valuation() const {
    if (c_.empty()) throw InternalError("valuation of zero");
    return c_.begin()->first;
  }
  int degree() const {
    if (c_.empty()) throw InternalError("degree of zero");
    return c_.rbegin()->first;
  }

  WPoly operator+(const WPoly& o) const {
    WPoly r(*this);
    for (auto& [k, v] : o.c_) r.add_term(k, v);
    return r;
  }
  WPoly operator-(const WPoly& o) const {
    WPoly r(*this);
    for (auto& [k, v] : o.c_) r.add_term(k, -v);
    return r;
  }
  WPoly operator*(const WPoly& o) const {
    WPoly r(p_);
    for (auto& [k1, v1] : c_)
      for (auto& [k2, v2] : o.c_) r.add_term(k1 + k2, v1 * v2);
    return r;
  }
  WPoly operator-() const {
    WPoly r(p_);
    for (auto& [k, v] : c_) r.c_[k] = -v;
    return r;
  }
  WPoly& operator+=(const WPoly& o) { return *this = *this + o; }
  WPoly& operator-=(const WPoly& o) { return *this = *this - o; }
  WPoly& operator*=(const WPoly& o) { return *this = *this * o; }

  // Multiply by c * W^k.
  WPoly shifted(const FieldElem& c, int k) const {
    WPoly r(p_);
    for (auto& [e, v] : c_) r.add_term(e + k, v * c);
    return r;
  }

  // Truncate away W^n and higher (work in F[W]/W^n).
  WPoly mod_wn(int n) const {
    WPoly r(p_);
    for (auto& [e, v] : c_)
      if (e < n) r.c_[e] = v;
    return r;
  }

  void add_term(int k, const FieldElem& v) {
    if (v.is_zero()) return;
    if (k < 0) throw InternalError("negative W exponent");
    auto it = c_.find(k);
    if (it == c_.end()) {
      c_[k] = v;
    } else {
      it->second += v;
      if (it->second.is_zero()) c_.erase(it);
    }
  }

  bool operator==(const WPoly& o) const { return c_ == o.c_ && p_ == o.p_; }
  bool operator!=(const WPoly& o) const { return !(*this == o); }

  // Euclidean division: *this = q * b + r with r = 0 or deg r < deg b.
  std::pair<WPoly, WPoly> divmod(const WPoly& b) const {
    if (b.is_zero()) throw DivisionByZero();
    WPoly q(p_), r(*this);
    FieldElem lead = b.c_.rbegin()->second;
    int bd = b.degree();
    while (!r.is_zero() && r.degree() >= bd) {
      int k = r.degree() - bd;
      FieldElem c = r.c_.rbegin()->second / lead;
      q.add_term(k, c);
      r -= b.shifted(c, k);
    }
    return {q, r};
  }

  bool is_unit() const { return c_.size() == 1 && c_.begin()->first == 0; }
  bool is_monomial() const { return c_.size() == 1; }

  std::string str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, v] : c_) {
      if (!first) os << " + ";
      first = false;
      if (k == 0 || !v.is_one()) os << v.value();
      if (k > 0) {
        if (!v.is_one()) os << "*";
        os << "W";
        if (k > 1) os << "^" << k;
      }
    }
    return os.str();
  }
  friend std::ostream& operator<<(std::ostream& os, const WPoly& w) {
    return os << w.str();
  }

 private:
  std::map<int, FieldElem> c_;
  uint32_t p_;
};

}  // namespace cfk
