#pragma once

#include <ostream>
#include <utility>

#include "cfk/errors.hpp"

namespace cfk {

// Bigrading (gr_w, gr_z).  gr_w is the Maslov grading; the Alexander grading
// A = (gr_w - gr_z)/2 must be an integer, i.e. the two gradings agree mod 2.
struct Bigrading {
  int gr_w = 0;
  int gr_z = 0;

  Bigrading() = default;
  Bigrading(int w, int z) : gr_w(w), gr_z(z) {
    if (((w - z) % 2 + 2) % 2 != 0)
      throw ParityError("gr_w and gr_z must agree mod 2");
  }

  int alexander() const { return (gr_w - gr_z) / 2; }
  int maslov() const { return gr_w; }

  bool operator==(const Bigrading& o) const {
    return gr_w == o.gr_w && gr_z == o.gr_z;
  }
  bool operator!=(const Bigrading& o) const { return !(*this == o); }

  friend std::ostream& operator<<(std::ostream& os, const Bigrading& g) {
    return os << "(" << g.gr_w << "," << g.gr_z << ")";
  }
};

// U/V exponents of a differential arrow src -> dst.  They are forced by the
// bigradings: the arrow contributes c U^a V^b dst to d(src) with
//   a = (gr_w(dst) - gr_w(src) + 1)/2,  b = (gr_z(dst) - gr_z(src) + 1)/2.
// An even Maslov difference cannot carry a differential arrow at all.
inline std::pair<int, int> derive_exponents(const Bigrading& src, const Bigrading& dst) {
  int dw = dst.gr_w - src.gr_w;
  int dz = dst.gr_z - src.gr_z;
  if (((dw % 2) + 2) % 2 == 0)
    throw ParityError("differential arrow requires odd Maslov grading change");
  return {(dw + 1) / 2, (dz + 1) / 2};
}

// U/V exponents of a flip-map entry x -> y.  Flip maps exchange the roles of
// U and V: the entry is c U^{(gr_w(y)-gr_z(x))/2} V^{(gr_z(y)-gr_w(x))/2} y.
// The U power must be a nonnegative integer (flip-filtered); the V power may
// be negative.  Returns false if the entry is not allowed.
inline bool flip_exponents(const Bigrading& x, const Bigrading& y, int* u, int* v) {
  int du = y.gr_w - x.gr_z;
  int dv = y.gr_z - x.gr_w;
  if (((du % 2) + 2) % 2 != 0) return false;
  if (du < 0) return false;
  *u = du / 2;
  *v = dv / 2;
  return true;
}

}  // namespace cfk
