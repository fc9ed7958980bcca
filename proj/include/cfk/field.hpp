#pragma once

#include <cstdint>
#include <ostream>

#include "cfk/errors.hpp"

namespace cfk {

// Element of the prime field F_p, p >= 2.  The characteristic travels with
// the value so mixed-field bugs surface immediately instead of corrupting
// a computation silently.  All complexes in one computation share a p.
class FieldElem {
 public:
  FieldElem() : v_(0), p_(2) {}
  FieldElem(int64_t v, uint32_t p) : p_(p) {
    int64_t r = v % static_cast<int64_t>(p);
    if (r < 0) r += p;
    v_ = static_cast<uint32_t>(r);
  }

  static FieldElem zero(uint32_t p) { return FieldElem(0, p); }
  static FieldElem one(uint32_t p) { return FieldElem(1, p); }

  uint32_t value() const { return v_; }
  uint32_t prime() const { return p_; }
  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }

  FieldElem operator+(const FieldElem& o) const {
    check(o);
    return FieldElem((int64_t)v_ + o.v_, p_);
  }
  FieldElem operator-(const FieldElem& o) const {
    check(o);
    return FieldElem((int64_t)v_ - o.v_, p_);
  }
  FieldElem operator*(const FieldElem& o) const {
    check(o);
    return FieldElem((int64_t)v_ * o.v_, p_);
  }
  FieldElem operator-() const { return FieldElem(-(int64_t)v_, p_); }

  FieldElem inv() const {
    if (v_ == 0) throw DivisionByZero();
    // Fermat: p is prime so a^(p-2) = a^-1.
    uint64_t base = v_, acc = 1, e = p_ - 2;
    while (e) {
      if (e & 1) acc = acc * base % p_;
      base = base * base % p_;
      e >>= 1;
    }
    return FieldElem((int64_t)acc, p_);
  }
  FieldElem operator/(const FieldElem& o) const { return *this * o.inv(); }

  FieldElem& operator+=(const FieldElem& o) { return *this = *this + o; }
  FieldElem& operator-=(const FieldElem& o) { return *this = *this - o; }
  FieldElem& operator*=(const FieldElem& o) { return *this = *this * o; }

  bool operator==(const FieldElem& o) const { return v_ == o.v_ && p_ == o.p_; }
  bool operator!=(const FieldElem& o) const { return !(*this == o); }

  friend std::ostream& operator<<(std::ostream& os, const FieldElem& f) {
    return os << f.v_;
  }

 private:
  void check(const FieldElem& o) const {
    if (p_ != o.p_) throw InternalError("mixed field characteristics");
  }
  uint32_t v_;
  uint32_t p_;
};

enum class FieldOp { add, mul, inv, neg };

inline FieldElem field_ops(const FieldElem& a, const FieldElem& b, FieldOp op) {
  switch (op) {
    case FieldOp::add: return a + b;
    case FieldOp::mul: return a * b;
    case FieldOp::inv: return a.inv();
    case FieldOp::neg: return -a;
  }
  throw InternalError("bad FieldOp");
}

}  // namespace cfk
