#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cfk/errors.hpp"
#include "cfk/field.hpp"
#include "cfk/grading.hpp"

namespace cfk {

// Decorated immersed multicurves in the marked strip or the marked cylinder,
// stored combinatorially: each component is a cyclic (or open) word of
// mu-crossing records, plus a local system, a basepoint weight, and a shared
// bounding chain supported on self-intersection points.  No coordinates live
// here; geometry.hpp synthesizes a concrete rectilinear representative on
// demand, and all counts (bigons, monogons, flip strips) are invariants of
// the word, not of the chosen representative.

enum class Surface { strip, cylinder };

enum class Side { left, right };

inline Side other(Side s) {
  return s == Side::left ? Side::right : Side::left;
}

// One transverse crossing of the curve with the vertical arc mu.
//
//   height  Alexander height of the crossing (the band it lives in).
//   slot    vertical position among all crossings sharing that band,
//           counted from the bottom; slots are globally unique per band so
//           that distinct crossings never collide.
//   exit    side of mu the curve continues toward after the crossing, so
//           eastbound strands exit right.  Exit parity is tied to gr_w
//           parity by the grading extension.
//   wrap    behaviour of the segment *following* this crossing: 0 for an
//           excursion that stays on the exit side and comes straight back,
//           +1 / -1 for a cylinder segment that travels once around the far
//           side eastward / westward.
//   name    generator label carried into the Floer complex.
struct CrossingRecord {
  int height = 0;
  int slot = 0;
  Side exit = Side::right;
  int wrap = 0;
  std::string name;

  auto key() const {
    return std::tie(height, slot, exit, wrap, name);
  }
  bool operator==(const CrossingRecord& o) const { return key() == o.key(); }
  bool operator<(const CrossingRecord& o) const { return key() < o.key(); }
};

// Endpoint bookkeeping for open components.  `order` ranks endpoints on
// their wall from the bottom up; validate_position checks the ranking
// against increasing tau_w.  The wall itself is derived from the word: a
// component whose first crossing exits right entered from the left wall,
// and the last crossing's exit side names the finishing wall.
struct OpenEnds {
  int start_order = 0;
  int finish_order = 0;
};

// Local system in rational canonical form: a single companion block whose
// characteristic polynomial is t^k - c[k-1] t^{k-1} - ... - c[1] t - c[0].
// Multiplicity-one components carry the trivial system {1}.  c[0] must be a
// unit or the system is singular (Corrupt).
struct LocalSystem {
  std::vector<FieldElem> c;

  int dim() const { return static_cast<int>(c.size()); }

  static LocalSystem trivial(uint32_t p) {
    return LocalSystem{{FieldElem::one(p)}};
  }
};

struct Component {
  std::vector<CrossingRecord> word;
  bool closed = true;
  OpenEnds ends;              // used only when !closed
  LocalSystem local_system;
  FieldElem weight;           // basepoint weight on the segment after word[0]
  std::optional<int> anchor2; // doubled tau_w at word[0]; default from exit

  Side entry_wall() const {
    if (word.empty()) throw DomainError("empty component word");
    return other(word.front().exit);
  }
  Side finish_wall() const {
    if (word.empty()) throw DomainError("empty component word");
    return word.back().exit;
  }
};

// Segments of a component, the keys the bounding chain hangs off.
// Closed component with n crossings: segment i runs word[i] -> word[i+1 mod n].
// Open component with n crossings: segment 0 is the entry tail into word[0],
// segment i (0 < i < n) runs word[i-1] -> word[i], segment n is the exit tail.
struct SegmentId {
  int component = 0;
  int index = 0;

  auto operator<=>(const SegmentId&) const = default;
};

// Unordered pair of segments meeting at a self-intersection point.  Two
// segments can cross at most once in the canonical representative, so the
// pair pins the point down.
struct IntersectionId {
  SegmentId a, b;

  IntersectionId() = default;
  IntersectionId(SegmentId x, SegmentId y) {
    if (y < x) std::swap(x, y);
    a = x;
    b = y;
  }

  auto operator<=>(const IntersectionId&) const = default;
};

// Marks a bounding chain as the restricted "local system type" shape that
// the hat-flavour synthesis produces: degree-zero points are then only
// allowed between parallel strands of a higher-multiplicity component.
enum class ChainType { general, local_system };

struct DecoratedCurve {
  uint32_t p = 2;
  Surface surface = Surface::strip;
  std::vector<Component> components;
  std::map<IntersectionId, FieldElem> bounding_chain;
  ChainType chain_type = ChainType::general;

  int segments_of(int ci) const {
    const Component& c = components.at(ci);
    int n = static_cast<int>(c.word.size());
    return c.closed ? n : n + 1;
  }
};

// Structural validation.  Throws DomainError on inconsistent words and
// Corrupt on degenerate decorations.  Geometric sanity (gradability, chain
// degrees) lives in geometry.hpp since it needs a realization.
inline void validate_curve(const DecoratedCurve& curve) {
  if (curve.components.empty())
    throw DomainError("curve has no components");

  // Band occupancy: slots must be globally unique per height.
  std::map<std::pair<int, int>, int> slot_seen;
  int min_h = 0, max_h = 0;
  bool first_h = true;

  for (size_t ci = 0; ci < curve.components.size(); ++ci) {
    const Component& comp = curve.components[ci];
    if (comp.word.empty())
      throw DomainError("component has an empty crossing word");
    if (curve.surface == Surface::cylinder && !comp.closed)
      throw DomainError("open component on the cylinder");

    if (comp.weight.prime() != curve.p ||
        std::any_of(comp.local_system.c.begin(), comp.local_system.c.end(),
                    [&](const FieldElem& e) { return e.prime() != curve.p; }))
      throw DomainError("decoration over the wrong field");
    if (comp.weight.is_zero())
      throw Corrupt("zero basepoint weight");
    if (comp.local_system.c.empty())
      throw Corrupt("empty local system");
    if (comp.local_system.c.front().is_zero())
      throw Corrupt("singular local system: constant term is zero");

    for (const CrossingRecord& r : comp.word) {
      if (first_h) {
        min_h = max_h = r.height;
        first_h = false;
      }
      min_h = std::min(min_h, r.height);
      max_h = std::max(max_h, r.height);
      if (r.slot < 0) throw DomainError("negative slot");
      auto key = std::make_pair(r.height, r.slot);
      if (slot_seen.count(key))
        throw DomainError("two crossings share a band slot");
      slot_seen[key] = 1;
    }
  }

  // A segment can only travel so far around the cylinder: its wrap count is
  // bounded by the grading spread, since each pass over the far side crosses
  // a grading arc.
  int spread = max_h - min_h + 2;

  for (size_t ci = 0; ci < curve.components.size(); ++ci) {
    const Component& comp = curve.components[ci];
    int n = static_cast<int>(comp.word.size());
    int pairs = comp.closed ? n : n - 1;
    for (int i = 0; i < pairs; ++i) {
      const CrossingRecord& cur = comp.word[i];
      const CrossingRecord& nxt = comp.word[(i + 1) % n];
      if (cur.wrap == 0) {
        // Excursion: out and back on one side, so directions alternate.
        if (nxt.exit == cur.exit)
          throw DomainError("excursion segment must reverse direction");
      } else {
        if (curve.surface == Surface::strip)
          throw DomainError("wrap segment on the strip");
        if (cur.wrap > 0 &&
            (cur.exit != Side::right || nxt.exit != Side::right))
          throw DomainError("eastward wrap needs eastbound crossings");
        if (cur.wrap < 0 && (cur.exit != Side::left || nxt.exit != Side::left))
          throw DomainError("westward wrap needs westbound crossings");
        if (std::abs(cur.wrap) > spread)
          throw DomainError("wrap count exceeds the grading spread");
      }
    }
    if (!comp.closed && comp.word.back().wrap != 0)
      throw DomainError("open component ends with a wrap segment");
  }

  // Wall order keys must be unique per wall on the strip.
  if (curve.surface == Surface::strip) {
    std::map<std::pair<int, int>, int> wall_seen;  // (side, order)
    for (const Component& comp : curve.components) {
      if (comp.closed) continue;
      auto add = [&](Side s, int ord) {
        auto key = std::make_pair(s == Side::left ? 0 : 1, ord);
        if (wall_seen.count(key))
          throw DomainError("two endpoints share a wall position");
        wall_seen[key] = 1;
      };
      add(comp.entry_wall(), comp.ends.start_order);
      add(comp.finish_wall(), comp.ends.finish_order);
    }
  }

  for (const auto& [id, coeff] : curve.bounding_chain) {
    if (coeff.prime() != curve.p)
      throw DomainError("bounding chain over the wrong field");
    if (coeff.is_zero())
      throw Corrupt("zero bounding chain coefficient");
    for (const SegmentId& s : {id.a, id.b}) {
      if (s.component < 0 ||
          s.component >= static_cast<int>(curve.components.size()))
        throw DomainError("bounding chain references a missing component");
      if (s.index < 0 || s.index >= curve.segments_of(s.component))
        throw DomainError("bounding chain references a missing segment");
    }
  }
}

// --- canonical form -------------------------------------------------------

namespace detail {

inline std::vector<CrossingRecord> rotated(const std::vector<CrossingRecord>& w,
                                           int r) {
  std::vector<CrossingRecord> out;
  out.reserve(w.size());
  for (size_t i = 0; i < w.size(); ++i)
    out.push_back(w[(r + i) % w.size()]);
  return out;
}

}  // namespace detail

// Canonical representative of a curve: every closed word is rotated so the
// lexicographically least record comes first (basepoints ride along, which
// is a logged isomorphism, not a different curve), components are sorted,
// and bounding chain keys are remapped through both moves.  Two curves
// related by rotation and reordering compare equal afterwards.
inline DecoratedCurve canonical(const DecoratedCurve& curve) {
  int nc = static_cast<int>(curve.components.size());

  // Best rotation per closed component.
  std::vector<int> rot(nc, 0);
  std::vector<Component> comps = curve.components;
  for (int ci = 0; ci < nc; ++ci) {
    Component& comp = comps[ci];
    if (!comp.closed) continue;
    int n = static_cast<int>(comp.word.size());
    int best = 0;
    for (int r = 1; r < n; ++r)
      if (detail::rotated(comp.word, r) < detail::rotated(comp.word, best))
        best = r;
    rot[ci] = best;
    comp.word = detail::rotated(comp.word, best);
    comp.anchor2.reset();  // anchors name a word slot; recompute after moves
  }

  // Sort components by their (rotated) words; open components keep their
  // wall data in the key so distinct arcs stay distinct.
  std::vector<int> perm(nc);
  for (int i = 0; i < nc; ++i) perm[i] = i;
  auto comp_key = [&](int i) {
    const Component& c = comps[i];
    return std::make_tuple(c.closed ? 0 : 1, c.word,
                           c.ends.start_order, c.ends.finish_order);
  };
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return comp_key(a) < comp_key(b); });
  std::vector<int> where(nc);
  for (int i = 0; i < nc; ++i) where[perm[i]] = i;

  DecoratedCurve out;
  out.p = curve.p;
  out.surface = curve.surface;
  out.chain_type = curve.chain_type;
  out.components.resize(nc);
  for (int i = 0; i < nc; ++i) out.components[where[i]] = comps[i];

  auto remap = [&](SegmentId s) {
    const Component& c = curve.components[s.component];
    int n = static_cast<int>(c.word.size());
    SegmentId r;
    r.component = where[s.component];
    r.index = c.closed ? (s.index - rot[s.component] % n + n) % n : s.index;
    return r;
  };
  for (const auto& [id, coeff] : curve.bounding_chain)
    out.bounding_chain[IntersectionId(remap(id.a), remap(id.b))] = coeff;
  return out;
}

inline bool same_canonical(const DecoratedCurve& a, const DecoratedCurve& b) {
  DecoratedCurve ca = canonical(a), cb = canonical(b);
  if (ca.p != cb.p || ca.surface != cb.surface) return false;
  if (ca.components.size() != cb.components.size()) return false;
  for (size_t i = 0; i < ca.components.size(); ++i) {
    const Component& x = ca.components[i];
    const Component& y = cb.components[i];
    if (x.word != y.word || x.closed != y.closed) return false;
    if (!x.closed && (x.ends.start_order != y.ends.start_order ||
                      x.ends.finish_order != y.ends.finish_order))
      return false;
    if (x.local_system.c != y.local_system.c || !(x.weight == y.weight))
      return false;
  }
  return ca.bounding_chain == cb.bounding_chain;
}

// --- train track states ---------------------------------------------------

// Intermediate objects for the curve synthesis pipeline: a set of oriented
// horizontal strands together with crossover arrow data in the middle
// region and matchings describing how strands pair off on either side.

struct Strand {
  int id = 0;
  std::string generator_name;
  int height = 0;
  Bigrading grading{0, 0};

  // Strand direction is forced by Maslov parity: even gr_w points right.
  Side orientation() const {
    int m = grading.gr_w % 2;
    return m == 0 ? Side::right : Side::left;
  }
};

struct ArrowEvent {
  enum class Kind { crossing, arrow, basepoint };
  Kind kind = Kind::crossing;
  int i = 0, j = 0;     // strand positions the event acts on
  FieldElem c;          // arrow / basepoint coefficient
  int m = 0;            // arrow weight exponent: the arrow carries c * W^m

  static ArrowEvent crossing(int i, int j) {
    ArrowEvent e;
    e.kind = Kind::crossing;
    e.i = i;
    e.j = j;
    return e;
  }
  static ArrowEvent arrow(int i, int j, const FieldElem& c, int m) {
    ArrowEvent e;
    e.kind = Kind::arrow;
    e.i = i;
    e.j = j;
    e.c = c;
    e.m = m;
    return e;
  }
  static ArrowEvent basepoint(int i, const FieldElem& c) {
    ArrowEvent e;
    e.kind = Kind::basepoint;
    e.i = i;
    e.c = c;
    return e;
  }
};

// Ordered event list acting on a bundle of parallel strands, read left to
// right.  The strand_ids list fixes which strands enter from the left.
struct ArrowConfig {
  std::vector<int> strand_ids;
  std::vector<ArrowEvent> events;
};

struct TrainTrackState {
  Surface surface = Surface::strip;
  uint32_t p = 2;
  std::vector<Strand> strands;
  std::map<int, ArrowConfig> middle;       // per height band
  std::vector<std::pair<int, int>> left_matching;
  std::vector<std::pair<int, int>> right_matching;
  std::map<int, ArrowConfig> f_region;     // cylinder only: far-side data
};

}  // namespace cfk
