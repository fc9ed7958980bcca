#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cfk/complex.hpp"
#include "cfk/curve.hpp"
#include "cfk/errors.hpp"
#include "cfk/flip.hpp"
#include "cfk/geometry.hpp"
#include "cfk/grading.hpp"
#include "cfk/wpoly.hpp"

namespace cfk {

// Disk counting over a realization.  One depth-first walker drives all three
// engines: it advances station to station along the curve, optionally turns
// at self-intersection points carrying bounding chain coefficients, and
// hands every closure candidate to an engine-specific acceptance test
// (rotation number +1, nonnegative covering multiplicities, marker counts
// matching the graded exponents).
//
// Orientation bookkeeping: a boundary is traversed either with the curve
// orientation or against it, and chain turns that would mix the two are
// skipped.  Boundaries running against the orientation contribute with an
// extra minus sign; the same convention applies to monogons, which is what
// makes the two teardrops of a plain figure-eight cancel over every field.

struct EngineLimits {
  long long budget = 1'000'000;  // station advances before giving up
  int max_extra_lifts = 4;       // cover window padding, in periods
};

struct BigonCounts {
  int bigons = 0;
  int monogons = 0;
  int flip_strips = 0;
  int skipped_sense = 0;  // chain turns skipped to keep the boundary sense
  int rejected = 0;       // closures failing rotation or multiplicity tests
};

struct CurveComplexResult {
  BigradedComplex complex;
  BigonCounts counts;
};

struct MCViolation {
  IntersectionId at;
  int smoothing = 0;  // which of the two corner resolutions absorbed the term
  WPoly total;
};

struct MCReport {
  bool passed = true;
  std::vector<MCViolation> violations;
  BigonCounts counts;
};

struct CurveFlipResult {
  BigradedComplex complex;
  FlipMap psi;
  BigonCounts counts;
};

namespace detail {

inline std::vector<Pt> coalesce_loop(const std::vector<Pt>& loop) {
  if (loop.size() < 3 || loop.front() != loop.back())
    throw InternalError("boundary loop is not closed");
  std::vector<Pt> tmp;
  for (const Pt& p : loop)
    if (tmp.empty() || tmp.back() != p) tmp.push_back(p);
  while (tmp.size() > 1 && tmp.front() == tmp.back()) tmp.pop_back();
  int n = static_cast<int>(tmp.size());
  if (n < 4) throw InternalError("degenerate boundary loop");
  std::vector<Pt> out;
  for (int i = 0; i < n; ++i) {
    const Pt& prev = tmp[(i + n - 1) % n];
    const Pt& cur = tmp[i];
    const Pt& nxt = tmp[(i + 1) % n];
    if (heading_of(prev, cur) != heading_of(cur, nxt)) out.push_back(cur);
  }
  if (out.size() < 4) throw InternalError("boundary loop with no corners");
  out.push_back(out.front());
  return out;
}

// Total quarter-turn count of a coalesced closed loop; +4 is a
// counterclockwise disk boundary.
inline int loop_rotation(const std::vector<Pt>& loop) {
  int n = static_cast<int>(loop.size()) - 1;
  int rot = 0;
  for (int i = 0; i < n; ++i) {
    const Pt& a = loop[(i + n - 1) % n];
    const Pt& b = loop[i];
    const Pt& c = loop[(i + 1) % n];
    rot += turn(heading_of(a, b), heading_of(b, c));
  }
  return rot;
}

// Sum of covering multiplicities over every marked point on the columns
// x = k*PX + coff (coff +2: w markers, -2: z markers, 0: flip markers).
inline long long marker_sum(const Realization& R, const std::vector<Pt>& loop,
                            long long coff) {
  long long minx = loop[0].x, maxx = minx, miny = loop[0].y, maxy = miny;
  for (const Pt& p : loop) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  long long total = 0;
  for (long long k = floor_div(minx - coff, R.PX); k * R.PX + coff <= maxx;
       ++k) {
    long long cx = k * R.PX + coff;
    if (cx <= minx || cx >= maxx) continue;
    for (long long mh : R.marker_heights) {
      if (mh <= miny || mh >= maxy) continue;
      total += winding_at(loop, Pt{cx, mh});
    }
  }
  return total;
}

class Walker {
 public:
  enum class Mode { bigon, monogon, flip };

  Walker(const Realization& R, const EngineLimits& lim, long long& budget,
         BigonCounts& counts)
      : R_(R), lim_(lim), budget_(budget), counts_(counts) {
    long long periods = 0;
    for (long long s : R.net_shift)
      periods += std::abs(s) / std::max<long long>(R.PX, 1);
    lift_window_ = (periods + lim_.max_extra_lifts) * R.PX;
  }

  Mode mode = Mode::bigon;

  // bigon closure data
  int root_gen = -1;
  Heading depart = Heading::east;
  std::map<std::pair<int, int>, FieldElem>* arrows = nullptr;

  // monogon closure data
  int root_cross = -1;
  int arr_comp = -1, arr_station = -1;
  long long arr_lift = 0;
  Heading arr_heading = Heading::east;
  std::map<std::pair<int, int>, WPoly>* chain_terms = nullptr;

  // flip closure data
  int flip_gen = -1;
  long long flip_close_x = 0;
  std::map<std::pair<int, int>, FieldElem>* strips = nullptr;

  void run(int comp, int station, int dir, bool sense) {
    trail_.clear();
    trail_.push_back(R_.stations[comp][station].pos);
    sense_ = sense;
    coeff_ = FieldElem::one(R_.curve->p);
    corner_w_ = 0;
    visited_.clear();
    step(comp, station, dir, 0);
  }

 private:
  const Realization& R_;
  const EngineLimits& lim_;
  long long& budget_;
  BigonCounts& counts_;
  long long lift_window_ = 0;

  std::vector<Pt> trail_;
  bool sense_ = true;
  FieldElem coeff_;
  long long corner_w_ = 0;
  std::map<std::tuple<int, int, int, long long>, int> visited_;

  Heading heading_now() const {
    int n = static_cast<int>(trail_.size());
    for (int i = n - 1; i > 0; --i)
      if (trail_[i] != trail_[i - 1]) return heading_of(trail_[i - 1], trail_[i]);
    throw InternalError("walker has no heading yet");
  }

  // Advance one span in direction dir from `station`, then process whatever
  // sits at the far end.  Returns silently at open-component ends.
  void step(int comp, int station, int dir, long long lift) {
    const auto& sts = R_.stations[comp];
    int N = static_cast<int>(sts.size());
    bool closed = R_.curve->components[comp].closed;
    int span, next;
    if (dir > 0) {
      if (!closed && station + 1 >= N) return;
      span = station;
      next = (station + 1) % N;
    } else {
      if (!closed && station == 0) return;
      span = (station - 1 + N) % N;
      next = span;
    }

    if (--budget_ < 0)
      throw AdmissibilityBudgetExceeded("disk count exceeded its budget");

    const std::vector<Pt>& pts = R_.span_pts(comp, span);
    long long shift = R_.span_shift(comp, span);
    long long nlift;
    size_t base = trail_.size();
    if (dir > 0) {
      for (size_t i = 1; i < pts.size(); ++i)
        trail_.push_back(pts[i] + Pt{lift, 0});
      nlift = lift + shift;
    } else {
      long long off = lift - shift;
      for (size_t i = pts.size() - 1; i-- > 0;)
        trail_.push_back(pts[i] + Pt{off, 0});
      nlift = off;
    }

    if (std::abs(nlift) <= lift_window_) {
      auto key = std::make_tuple(comp, next, dir, nlift);
      int& seen = visited_[key];
      if (seen < 2) {
        ++seen;
        process(comp, next, dir, nlift);
        --seen;
      }
    }
    trail_.resize(base);
  }

  void process(int comp, int station, int dir, long long lift) {
    const Station& st = R_.stations[comp][station];
    switch (st.kind) {
      case Station::Kind::generator:
        if (mode == Mode::bigon) try_close_bigon(st, lift);
        step(comp, station, dir, lift);
        break;
      case Station::Kind::crossing:
        if (mode == Mode::monogon) try_close_monogon(comp, station, lift);
        step(comp, station, dir, lift);
        try_turn(st, lift);
        break;
      case Station::Kind::basepoint: {
        FieldElem saved = coeff_;
        const FieldElem& w = R_.curve->components[comp].weight;
        coeff_ = coeff_ * (sense_ ? w : w.inv());
        step(comp, station, dir, lift);
        coeff_ = saved;
        break;
      }
      case Station::Kind::portal:
        if (mode == Mode::flip) try_close_flip(st, lift);
        step(comp, station, dir, lift);
        break;
      case Station::Kind::signpoint:
        coeff_ = -coeff_;
        step(comp, station, dir, lift);
        coeff_ = -coeff_;
        break;
    }
  }

  // Chain turn: jump to the other branch of a decorated crossing, turning
  // left.  Turns that would reverse the boundary sense are skipped.
  void try_turn(const Station& st, long long lift) {
    const CrossingInfo& c = R_.crossings[st.cross];
    if (c.b.is_zero()) return;
    Heading nh = ccw(heading_now());
    int m = 1 - st.branch;
    int oc = c.comp[m];
    int os = c.station[m];
    const Station& ost = R_.stations[oc][os];
    Heading eh =
        heading_of(R_.lines[oc][ost.edge], R_.lines[oc][ost.edge + 1]);
    int ndir;
    if (eh == nh) ndir = +1;
    else if (eh == opposite(nh)) ndir = -1;
    else throw InternalError("crossing branches are not transverse");
    if ((ndir > 0) != sense_) {
      ++counts_.skipped_sense;
      return;
    }
    long long nlift = st.pos.x + lift - ost.pos.x;
    FieldElem saved = coeff_;
    long long saved_w = corner_w_;
    coeff_ = coeff_ * (sense_ ? c.b : -c.b);
    corner_w_ += -static_cast<long long>(c.deg) / 2;
    step(oc, os, ndir, nlift);
    coeff_ = saved;
    corner_w_ = saved_w;
  }

  void try_close_bigon(const Station& st, long long lift) {
    const GeneratorInfo& X = R_.gens[root_gen];
    const GeneratorInfo& Y = R_.gens[st.gen];
    if (st.pos.x + lift != X.pos.x) return;
    if (st.gen == root_gen && lift == 0) return;  // came all the way around
    bool above = st.pos.y > X.pos.y;
    Heading arr = heading_now();
    bool ok = (depart == Heading::east && above && arr == Heading::west) ||
              (depart == Heading::west && !above && arr == Heading::east);
    if (!ok) return;

    std::vector<Pt> loop = trail_;
    loop.push_back(X.pos);  // close along the test line's column
    loop = coalesce_loop(loop);
    if (loop_rotation(loop) != 4) {
      ++counts_.rejected;
      return;
    }
    DiskCheck disk = analyze_disk(loop);
    if (!disk.nonnegative) {
      ++counts_.rejected;
      return;
    }

    long long a = marker_sum(R_, loop, +2) + corner_w_;
    long long b = marker_sum(R_, loop, -2) + corner_w_;
    if (((Y.gr.gr_w - X.gr.gr_w) % 2 + 2) % 2 == 0)
      throw InternalError("bigon between generators of even Maslov gap");
    auto [ea, eb] = derive_exponents(X.gr, Y.gr);
    if (a != ea || b != eb)
      throw InternalError("bigon marker count disagrees with the gradings");

    FieldElem total = sense_ ? coeff_ : -coeff_;
    auto key = std::make_pair(root_gen, st.gen);
    auto it = arrows->find(key);
    if (it == arrows->end()) arrows->emplace(key, total);
    else it->second = it->second + total;
    ++counts_.bigons;
  }

  void try_close_monogon(int comp, int station, long long lift) {
    if (comp != arr_comp || station != arr_station || lift != arr_lift)
      return;
    if (heading_now() != arr_heading) return;

    std::vector<Pt> loop = trail_;
    if (loop.front() != loop.back()) return;  // not back at the corner yet
    loop = coalesce_loop(loop);
    if (loop_rotation(loop) != 4) {
      ++counts_.rejected;
      return;
    }
    DiskCheck disk = analyze_disk(loop);
    if (!disk.nonnegative) {
      ++counts_.rejected;
      return;
    }

    long long nw = marker_sum(R_, loop, +2);
    long long nz = marker_sum(R_, loop, -2);
    if (nw != nz)
      throw InternalError("monogon marker counts are unbalanced");
    long long nt = nw + corner_w_;
    const CrossingInfo& c = R_.crossings[root_cross];
    if (nt != (static_cast<long long>(c.deg) + 2) / 2)
      throw InternalError("monogon weight disagrees with the corner degree");

    // The output corner of a monogon never contributes a sign: the boundary
    // cannot both follow and oppose the curve there.
    FieldElem total = coeff_;
    int cls =
        (arr_heading == Heading::north || arr_heading == Heading::south) ? 0
                                                                         : 1;
    auto key = std::make_pair(root_cross, cls);
    auto it = chain_terms->find(key);
    WPoly term(total, static_cast<int>(nt));
    if (it == chain_terms->end()) chain_terms->emplace(key, term);
    else it->second = it->second + term;
    ++counts_.monogons;
  }

  void try_close_flip(const Station& st, long long lift) {
    if (st.portal_sign != -1) return;
    if (st.pos.x + lift != flip_close_x) return;
    if (heading_now() != Heading::east) return;
    const GeneratorInfo& X = R_.gens[flip_gen];
    const GeneratorInfo& Y = R_.gens[st.portal_owner];

    long long cap = R_.max_y + 1;
    Pt q = trail_.back();
    std::vector<Pt> loop = trail_;
    loop.push_back(Pt{q.x, cap});
    loop.push_back(Pt{X.pos.x, cap});
    loop.push_back(X.pos);
    loop.push_back(trail_.front());
    loop = coalesce_loop(loop);
    if (loop_rotation(loop) != 4) {
      ++counts_.rejected;
      return;
    }
    DiskCheck disk = analyze_disk(loop);
    if (!disk.nonnegative) {
      ++counts_.rejected;
      return;
    }

    int u = 0, v = 0;
    if (!flip_exponents(X.gr, Y.gr, &u, &v))
      throw InternalError("flip strip between incompatible generators");
    long long ug = marker_sum(R_, loop, 0) + corner_w_;
    if (ug != u)
      throw InternalError("flip marker count disagrees with the gradings");

    FieldElem total = sense_ ? coeff_ : -coeff_;
    auto key = std::make_pair(flip_gen, st.portal_owner);
    auto it = strips->find(key);
    if (it == strips->end()) strips->emplace(key, total);
    else it->second = it->second + total;
    ++counts_.flip_strips;
  }
};

}  // namespace detail

// Builds the bigraded complex a decorated curve represents: one generator
// per crossing record, one differential entry per equivalence class of
// boundary-degenerate disks between the curve and the test line.
inline CurveComplexResult complex_from_curve(const DecoratedCurve& curve,
                                             const EngineLimits& limits = {}) {
  Realization R = realize_graded(curve);
  CurveComplexResult out;
  out.complex = BigradedComplex(curve.p);
  for (const GeneratorInfo& g : R.gens)
    out.complex.gens.push_back({g.name, g.gr});

  long long budget = limits.budget;
  std::map<std::pair<int, int>, FieldElem> arrows;
  detail::Walker walker(R, limits, budget, out.counts);
  walker.mode = detail::Walker::Mode::bigon;
  walker.arrows = &arrows;

  for (int gi = 0; gi < static_cast<int>(R.gens.size()); ++gi) {
    const GeneratorInfo& X = R.gens[gi];
    walker.root_gen = gi;
    for (Heading dep : {Heading::east, Heading::west}) {
      walker.depart = dep;
      int dir = (dep == Heading::east) == X.east ? +1 : -1;
      walker.run(X.comp, X.station, dir, dir > 0);
    }
  }

  for (const auto& [key, c] : arrows)
    if (!c.is_zero()) out.complex.add_entry(key.first, key.second, c);
  return out;
}

// Checks that the bounding chain satisfies the Maurer-Cartan equation: over
// every self-intersection point and either corner resolution, the signed
// weighted count of boundary monogons must vanish.
inline MCReport maurer_cartan_check(const DecoratedCurve& curve,
                                    const EngineLimits& limits = {}) {
  Realization R = realize_graded(curve);
  MCReport rep;

  long long budget = limits.budget;
  std::map<std::pair<int, int>, WPoly> terms;
  detail::Walker walker(R, limits, budget, rep.counts);
  walker.mode = detail::Walker::Mode::monogon;
  walker.chain_terms = &terms;

  // Quadrants as (arrive, depart) heading pairs; depart is always a left
  // turn off arrive.
  const std::pair<Heading, Heading> quadrants[4] = {
      {Heading::north, Heading::west},
      {Heading::south, Heading::east},
      {Heading::east, Heading::north},
      {Heading::west, Heading::south}};

  for (int qi = 0; qi < static_cast<int>(R.crossings.size()); ++qi) {
    const CrossingInfo& q = R.crossings[qi];
    walker.root_cross = qi;
    for (auto [arr, dep] : quadrants) {
      // The departing branch runs parallel to dep, the arriving one to arr.
      int dep_b = -1, arr_b = -1, dep_dir = 0;
      for (int b = 0; b < 2; ++b) {
        const Station& bst = R.stations[q.comp[b]][q.station[b]];
        Heading eh = heading_of(R.lines[q.comp[b]][bst.edge],
                                R.lines[q.comp[b]][bst.edge + 1]);
        if (eh == dep || eh == opposite(dep)) {
          dep_b = b;
          dep_dir = eh == dep ? +1 : -1;
        }
        if (eh == arr || eh == opposite(arr)) arr_b = b;
      }
      if (dep_b < 0 || arr_b < 0 || dep_b == arr_b)
        throw InternalError("crossing branches are not transverse");
      const Station& dst = R.stations[q.comp[dep_b]][q.station[dep_b]];
      const Station& ast = R.stations[q.comp[arr_b]][q.station[arr_b]];
      walker.arr_comp = q.comp[arr_b];
      walker.arr_station = q.station[arr_b];
      walker.arr_lift = dst.pos.x - ast.pos.x;
      walker.arr_heading = arr;
      walker.run(q.comp[dep_b], q.station[dep_b], dep_dir, dep_dir > 0);
    }
  }

  for (const auto& [key, poly] : terms)
    if (!poly.is_zero()) {
      rep.passed = false;
      rep.violations.push_back(
          {R.crossings[key.first].id, key.second, poly});
    }
  return rep;
}

// Counts the strips defining the flip isomorphism of a cylinder curve: each
// generator emits one strip eastward past the next test-line lift, and the
// resulting map conjugates the complex's U and V actions.
inline CurveFlipResult flip_from_curve(const DecoratedCurve& curve,
                                       const EngineLimits& limits = {}) {
  if (curve.surface != Surface::cylinder)
    throw DomainError("flip maps require a cylinder curve");
  Realization R = realize_graded(curve);

  CurveComplexResult base = complex_from_curve(curve, limits);
  CurveFlipResult out;
  out.complex = std::move(base.complex);
  out.counts = base.counts;

  long long budget = limits.budget;
  std::map<std::pair<int, int>, FieldElem> strips;
  detail::Walker walker(R, limits, budget, out.counts);
  walker.mode = detail::Walker::Mode::flip;
  walker.strips = &strips;

  for (int gi = 0; gi < static_cast<int>(R.gens.size()); ++gi) {
    const GeneratorInfo& X = R.gens[gi];
    int portal = -1;
    const auto& sts = R.stations[X.comp];
    for (int si = 0; si < static_cast<int>(sts.size()); ++si)
      if (sts[si].kind == Station::Kind::portal && sts[si].portal_sign == +1 &&
          sts[si].pos == X.pos + Pt{3, 0})
        portal = si;
    if (portal < 0) throw InternalError("generator without an exit portal");
    walker.flip_gen = gi;
    walker.flip_close_x = X.pos.x + R.PX - 3;
    int dir = X.east ? +1 : -1;
    walker.run(X.comp, portal, dir, dir > 0);
  }

  out.psi = FlipMap(curve.p);
  for (const auto& [key, raw] : strips) {
    if (raw.is_zero()) continue;
    const GeneratorInfo& X = R.gens[key.first];
    FieldElem v = (X.gr.gr_w % 2 + 2) % 2 == 0 ? raw : -raw;
    out.psi.set_entry(key.first, key.second, v);
  }
  return out;
}

}  // namespace cfk
