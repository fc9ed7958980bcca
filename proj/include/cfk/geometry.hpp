#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cfk/curve.hpp"
#include "cfk/errors.hpp"
#include "cfk/grading.hpp"

namespace cfk {

// Concrete rectilinear representative of a decorated curve.  Everything is
// laid out on an even integer grid chosen so that no two features ever
// collide:
//
//   * mu and its cylinder lifts sit at x = k*PX, generators on those columns;
//   * marked-point columns sit at x = k*PX +- 2 (one marker of each kind per
//     band gap, at heights = S/2 mod S), flip portals at x = k*PX +- 3;
//   * excursions turn around at depth columns k*PX +- (4, 8, ...), cylinder
//     wrap segments run through far-zone channels, strip tails through wall
//     channels -- all bends at x, y = 0 mod 4.
//
// Bigon counts read winding numbers off this picture; the mod-4 discipline
// guarantees every ray-cast we ever do is degeneracy free.

struct Pt {
  long long x = 0, y = 0;

  bool operator==(const Pt& o) const { return x == o.x && y == o.y; }
  bool operator!=(const Pt& o) const { return !(*this == o); }
  auto operator<=>(const Pt&) const = default;
};

inline Pt operator+(Pt a, Pt b) { return {a.x + b.x, a.y + b.y}; }
inline Pt operator-(Pt a, Pt b) { return {a.x - b.x, a.y - b.y}; }

inline long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && (r < 0) != (b < 0)) ? q - 1 : q;
}

// Axis headings, counterclockwise order.  turn() is the signed quarter-turn
// count between consecutive polyline edges and is always +-1 at a bend.
enum class Heading { east = 0, north = 1, west = 2, south = 3 };

inline Heading heading_of(Pt from, Pt to) {
  if (from.y == to.y && to.x > from.x) return Heading::east;
  if (from.y == to.y && to.x < from.x) return Heading::west;
  if (from.x == to.x && to.y > from.y) return Heading::north;
  if (from.x == to.x && to.y < from.y) return Heading::south;
  throw InternalError("degenerate or diagonal polyline edge");
}

inline Heading opposite(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 2) % 4);
}

inline Heading ccw(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 1) % 4);
}

inline int turn(Heading from, Heading to) {
  int d = (static_cast<int>(to) - static_cast<int>(from) + 4) % 4;
  if (d == 0) return 0;
  if (d == 1) return 1;
  if (d == 3) return -1;
  throw InternalError("U-turn in polyline");
}

struct Station {
  enum class Kind { generator, crossing, basepoint, portal, signpoint };
  Kind kind = Kind::generator;
  Pt pos;              // native cover position on the owning polyline
  int edge = 0;        // polyline edge the station sits on
  long long toff = 0;  // L1 offset from the edge start, for ordering
  int gen = -1;        // generator table index
  int cross = -1;      // crossing table index
  int branch = -1;     // 0/1: which branch of that crossing
  int portal_sign = 0;    // +1 at x = k*PX + 3, -1 at x = k*PX - 3
  int portal_owner = -1;  // generator whose mu-run the portal sits on
  long long tau2_w = 0, tau2_z = 0;  // doubled tau, set by the grading pass
};

struct GeneratorInfo {
  int comp = 0;
  int word_index = 0;
  std::string name;
  Pt pos;  // native position: x = lift*PX, y = slot height
  long long lift = 0;
  bool east = true;
  int height = 0;
  int station = -1;  // index into stations[comp]
  Bigrading gr{0, 0};
};

struct CrossingInfo {
  IntersectionId id;
  Pt pos;  // cover position of branch 0
  int comp[2] = {0, 0};
  int station[2] = {-1, -1};
  int deg = 0;  // intersection degree (the even one of the floor pair)
  FieldElem b;  // bounding chain coefficient, zero if absent
};

class Realization {
 public:
  const DecoratedCurve* curve = nullptr;  // borrowed; keep the curve alive
  long long S = 12;     // band height
  long long PX = 0;     // horizontal period (also set for strips, for markers)
  long long wallx = 0;  // strip wall position
  std::vector<std::vector<Pt>> lines;          // polyline bend chains
  std::vector<long long> net_shift;            // x-shift closing each polyline
  std::vector<std::vector<Station>> stations;  // ordered along each polyline
  std::vector<GeneratorInfo> gens;             // sorted by descending height
  std::vector<CrossingInfo> crossings;
  std::vector<long long> marker_heights;  // y of every marker level in range
  long long min_y = 0, max_y = 0;
  // tau2_w at the two ends of each open component, for boundary diagnostics
  std::map<int, std::pair<long long, long long>> end_tau2;

  int gen_at(Pt native) const {
    auto it = gen_by_pos_.find(native);
    return it == gen_by_pos_.end() ? -1 : it->second;
  }

  // Forward geometry from station i to station i+1 (cyclically for closed
  // components, where the seam step shifts the lift by net_shift).
  const std::vector<Pt>& span_pts(int comp, int i) const {
    return span_pts_[comp][i];
  }
  long long span_shift(int comp, int i) const {
    bool seam = curve->components[comp].closed &&
                i + 1 == static_cast<int>(stations[comp].size());
    return seam ? net_shift[comp] : 0;
  }
  int span_count(int comp) const {
    return static_cast<int>(span_pts_[comp].size());
  }

  friend Realization realize(const DecoratedCurve&);

 private:
  std::map<Pt, int> gen_by_pos_;
  std::vector<std::vector<std::vector<Pt>>> span_pts_;
};

namespace detail {

// Tagged point stream used while assembling one component's polyline.
struct PathNode {
  Pt pt;
  int seg = 0;  // segment id of the piece leaving this node
  bool generator = false;
  int word_index = -1;
};

struct Bracket {
  long long y1, y2;  // foot heights, y1 < y2
  int comp, seg;     // segment the excursion realizes
  long long depth = 0;
};

// Interval nesting never ties: strictly contained brackets are strictly
// shorter, so sorting by length puts inner brackets at shallower depth and
// interleaved pairs cross exactly once whichever depths they get.
inline void assign_depths(std::vector<Bracket>& bs) {
  std::sort(bs.begin(), bs.end(), [](const Bracket& a, const Bracket& b) {
    return std::make_tuple(a.y2 - a.y1, a.y1, a.comp, a.seg) <
           std::make_tuple(b.y2 - b.y1, b.y1, b.comp, b.seg);
  });
  long long d = 4;
  for (auto& b : bs) {
    b.depth = d;
    d += 4;
  }
}

struct Wire {
  long long wy, ey;  // heights at the west / east edge of the far zone
  int comp, seg;
  bool eastbound;
  long long channel = -1;  // unset for level wires
};

// Channel order realizing the minimal crossing pattern: wires of the same
// kind (both rising or both falling) never cross, wires of opposite kinds
// cross iff their endpoints interleave, which no channel order can avoid.
inline void assign_channels(std::vector<Wire>& ws, long long base) {
  std::vector<Wire*> rising, falling;
  for (auto& w : ws) {
    if (w.ey > w.wy) rising.push_back(&w);
    else if (w.ey < w.wy) falling.push_back(&w);
  }
  std::sort(rising.begin(), rising.end(),
            [](const Wire* a, const Wire* b) { return a->ey > b->ey; });
  std::sort(falling.begin(), falling.end(),
            [](const Wire* a, const Wire* b) { return a->ey < b->ey; });
  long long c = base;
  for (Wire* w : rising) {
    w->channel = c;
    c += 4;
  }
  for (Wire* w : falling) {
    w->channel = c;
    c += 4;
  }
}

}  // namespace detail

inline Realization realize(const DecoratedCurve& curve) {
  validate_curve(curve);

  Realization R;
  R.curve = &curve;

  // --- band layout ---------------------------------------------------------
  std::map<int, std::vector<int>> band_slots;
  for (const Component& comp : curve.components)
    for (const CrossingRecord& r : comp.word)
      band_slots[r.height].push_back(r.slot);
  size_t mmax = 1;
  for (auto& [h, slots] : band_slots) {
    std::sort(slots.begin(), slots.end());
    mmax = std::max(mmax, slots.size());
  }
  // Band height: slots sit 4 apart around the band centre and must stay
  // clear of the markers at +-S/2; S = 4 mod 8 keeps markers at y = 2 mod 4.
  R.S = std::max<long long>(12, 8 * static_cast<long long>((mmax - 1) / 2) + 4);
  if (R.S % 8 != 4) R.S += 4;

  auto slot_y = [&](int height, int slot) -> long long {
    const auto& slots = band_slots[height];
    size_t m = slots.size();
    size_t k = std::lower_bound(slots.begin(), slots.end(), slot) -
               slots.begin();
    return static_cast<long long>(height) * R.S +
           4 * static_cast<long long>(k) -
           4 * static_cast<long long>((m - 1) / 2);
  };

  int nc = static_cast<int>(curve.components.size());

  // --- excursion brackets --------------------------------------------------
  std::vector<detail::Bracket> left_br, right_br;
  for (int ci = 0; ci < nc; ++ci) {
    const Component& comp = curve.components[ci];
    int n = static_cast<int>(comp.word.size());
    int pairs = comp.closed ? n : n - 1;
    for (int i = 0; i < pairs; ++i) {
      const CrossingRecord& cur = comp.word[i];
      if (cur.wrap != 0) continue;
      const CrossingRecord& nxt = comp.word[(i + 1) % n];
      long long ya = slot_y(cur.height, cur.slot);
      long long yb = slot_y(nxt.height, nxt.slot);
      detail::Bracket b{std::min(ya, yb), std::max(ya, yb), ci,
                        comp.closed ? i : i + 1, 0};
      (cur.exit == Side::left ? left_br : right_br).push_back(b);
    }
  }
  detail::assign_depths(left_br);
  detail::assign_depths(right_br);
  long long dmax = 4;
  for (auto& b : left_br) dmax = std::max(dmax, b.depth);
  for (auto& b : right_br) dmax = std::max(dmax, b.depth);

  auto bracket_depth = [&](Side side, int ci, int seg) -> long long {
    const auto& v = side == Side::left ? left_br : right_br;
    for (const auto& b : v)
      if (b.comp == ci && b.seg == seg) return b.depth;
    throw InternalError("missing excursion bracket");
  };

  // --- wrap wires / strip tails -------------------------------------------
  std::vector<detail::Wire> wires;
  long long tail_base_l = 0, tail_base_r = 0;
  long long fz = dmax + 8;  // west edge of the cylinder far zone

  if (curve.surface == Surface::cylinder) {
    for (int ci = 0; ci < nc; ++ci) {
      const Component& comp = curve.components[ci];
      int n = static_cast<int>(comp.word.size());
      for (int i = 0; i < n; ++i) {
        const CrossingRecord& cur = comp.word[i];
        if (cur.wrap == 0) continue;
        const CrossingRecord& nxt = comp.word[(i + 1) % n];
        long long ya = slot_y(cur.height, cur.slot);
        long long yb = slot_y(nxt.height, nxt.slot);
        detail::Wire w;
        w.eastbound = cur.wrap > 0;
        w.wy = w.eastbound ? ya : yb;
        w.ey = w.eastbound ? yb : ya;
        w.comp = ci;
        w.seg = i;
        wires.push_back(w);
      }
    }
    detail::assign_channels(wires, fz);
    long long nch = 0;
    for (auto& w : wires)
      if (w.channel >= 0) ++nch;
    R.PX = fz + 4 * std::max<long long>(nch, 1) + dmax + 8;
    if (R.PX % 4 != 0) R.PX += 4 - R.PX % 4;
  } else {
    long long nb_l = static_cast<long long>(left_br.size());
    long long nb_r = static_cast<long long>(right_br.size());
    tail_base_l = 4 * nb_l + 8;
    tail_base_r = 4 * nb_r + 8;
    long long tails_l = 0, tails_r = 0;
    for (const Component& comp : curve.components) {
      if (comp.closed) continue;
      (comp.entry_wall() == Side::left ? tails_l : tails_r) += 1;
      (comp.finish_wall() == Side::left ? tails_l : tails_r) += 1;
    }
    R.wallx =
        std::max(tail_base_l + 4 * tails_l, tail_base_r + 4 * tails_r) + 8;
    R.PX = 2 * R.wallx + 8;
    if (R.PX % 4 != 0) R.PX += 4 - R.PX % 4;
  }

  auto wire_of = [&](int ci, int seg) -> const detail::Wire& {
    for (const auto& w : wires)
      if (w.comp == ci && w.seg == seg) return w;
    throw InternalError("missing wrap wire");
  };

  // --- strip wall endpoints ------------------------------------------------
  // Wall heights follow the declared order from the bottom up, stacked at
  // least 4 apart and dodging other tails' generator heights so no two
  // horizontal legs ever overlap.
  std::map<std::pair<int, int>, long long> wall_y;        // (side, order) -> y
  std::map<std::pair<int, int>, long long> tail_channel;  // (side, order) -> x
  if (curve.surface == Surface::strip) {
    for (int side = 0; side < 2; ++side) {
      Side s = side == 0 ? Side::left : Side::right;
      std::vector<std::pair<int, long long>> ends;  // (order, wanted y)
      for (const Component& comp : curve.components) {
        if (comp.closed) continue;
        const CrossingRecord& a = comp.word.front();
        const CrossingRecord& z = comp.word.back();
        if (comp.entry_wall() == s)
          ends.push_back({comp.ends.start_order, slot_y(a.height, a.slot)});
        if (comp.finish_wall() == s)
          ends.push_back({comp.ends.finish_order, slot_y(z.height, z.slot)});
      }
      std::sort(ends.begin(), ends.end());
      long long base = side == 0 ? tail_base_l : tail_base_r;
      long long prev = 0;
      bool have_prev = false;
      for (size_t i = 0; i < ends.size(); ++i) {
        long long want = ends[i].second;
        long long y = have_prev ? std::max(want, prev + 4) : want;
        bool moved = true;
        while (moved) {
          moved = false;
          for (size_t j = 0; j < ends.size(); ++j)
            if (j != i && ends[j].second == y) {
              y += 4;
              moved = true;
            }
        }
        wall_y[{side, ends[i].first}] = y;
        tail_channel[{side, ends[i].first}] =
            base + 4 * static_cast<long long>(i);
        prev = y;
        have_prev = true;
      }
    }
  }

  // --- polylines -----------------------------------------------------------
  R.lines.resize(nc);
  R.net_shift.assign(nc, 0);
  std::vector<std::vector<detail::PathNode>> paths(nc);
  std::vector<std::vector<long long>> gen_lift(nc);

  for (int ci = 0; ci < nc; ++ci) {
    const Component& comp = curve.components[ci];
    int n = static_cast<int>(comp.word.size());
    auto& path = paths[ci];
    gen_lift[ci].assign(n, 0);

    long long lift = 0;
    auto gen_pt = [&](int i) {
      return Pt{gen_lift[ci][i] * R.PX,
                slot_y(comp.word[i].height, comp.word[i].slot)};
    };

    if (!comp.closed) {
      Side s = comp.entry_wall();
      long long sx = s == Side::left ? -1 : 1;
      int side_i = s == Side::left ? 0 : 1;
      long long wy = wall_y.at({side_i, comp.ends.start_order});
      long long ch = tail_channel.at({side_i, comp.ends.start_order});
      long long y0 = slot_y(comp.word[0].height, comp.word[0].slot);
      path.push_back({{sx * R.wallx, wy}, 0, false, -1});
      if (wy != y0) {
        path.push_back({{sx * ch, wy}, 0, false, -1});
        path.push_back({{sx * ch, y0}, 0, false, -1});
      }
    }

    for (int i = 0; i < n; ++i) {
      gen_lift[ci][i] = lift;
      int seg_out = comp.closed ? i : i + 1;
      path.push_back({gen_pt(i), seg_out, true, i});
      if (!comp.closed && i == n - 1) break;

      const CrossingRecord& cur = comp.word[i];
      const CrossingRecord& nxt = comp.word[(i + 1) % n];
      long long ya = gen_pt(i).y;
      long long yb = slot_y(nxt.height, nxt.slot);
      if (cur.wrap == 0) {
        long long sx = cur.exit == Side::left ? -1 : 1;
        long long d = bracket_depth(cur.exit, ci, seg_out);
        long long bx = lift * R.PX + sx * d;
        path.push_back({{bx, ya}, seg_out, false, -1});
        path.push_back({{bx, yb}, seg_out, false, -1});
      } else {
        const detail::Wire& w = wire_of(ci, i);
        long long k = cur.wrap > 0 ? lift : lift - 1;  // window west lift
        if (w.channel >= 0) {
          long long cx = k * R.PX + w.channel;
          path.push_back({{cx, ya}, seg_out, false, -1});
          path.push_back({{cx, yb}, seg_out, false, -1});
        }
        lift += cur.wrap;
      }
    }

    if (!comp.closed) {
      Side s = comp.finish_wall();
      long long sx = s == Side::left ? -1 : 1;
      int side_i = s == Side::left ? 0 : 1;
      long long wy = wall_y.at({side_i, comp.ends.finish_order});
      long long ch = tail_channel.at({side_i, comp.ends.finish_order});
      long long yz = path.back().pt.y;
      if (wy != yz) {
        path.push_back({{sx * ch, yz}, n, false, -1});
        path.push_back({{sx * ch, wy}, n, false, -1});
      }
      path.push_back({{sx * R.wallx, wy}, n, false, -1});
    } else {
      R.net_shift[ci] = lift * R.PX;
    }
  }

  // Rotate each closed path to start at a bend so polyline vertices never
  // land on generator columns.  A closed path with no bend at all is a level
  // circle; it keeps its generator but gets artificial seam points in the
  // far zone.
  std::vector<std::vector<detail::PathNode>> chains(nc);
  for (int ci = 0; ci < nc; ++ci) {
    const Component& comp = curve.components[ci];
    auto& path = paths[ci];
    if (!comp.closed) {
      chains[ci] = path;
      continue;
    }
    int L = static_cast<int>(path.size());
    Pt shift{R.net_shift[ci], 0};
    auto heading_out = [&](int i) {
      Pt b = path[(i + 1) % L].pt;
      if (i + 1 == L) b = b + shift;
      return heading_of(path[i].pt, b);
    };
    int b0 = -1;
    for (int i = 0; i < L; ++i) {
      Heading hin = (i == 0) ? heading_of(path[L - 1].pt, path[0].pt + shift)
                             : heading_of(path[i - 1].pt, path[i].pt);
      if (hin != heading_out(i)) {
        b0 = i;
        break;
      }
    }
    if (b0 < 0) {
      // Level circle: a single record wrapping once, running straight around.
      if (L != 1 || comp.word.size() != 1)
        throw InternalError("bend-free loop with more than one node");
      long long y = path[0].pt.y;
      long long d = R.net_shift[ci];
      long long glift = d > 0 ? 1 : 0;
      gen_lift[ci][0] = glift;
      detail::PathNode a{{fz, y}, 0, false, -1};
      detail::PathNode g{{glift * R.PX, y}, 0, true, 0};
      detail::PathNode b{{fz + d, y}, 0, false, -1};
      chains[ci] = {a, g, b};
      continue;
    }
    std::vector<detail::PathNode> rot;
    for (int i = 0; i < L; ++i) {
      detail::PathNode nd = path[(b0 + i) % L];
      if (b0 + i >= L) nd.pt = nd.pt + shift;
      rot.push_back(nd);
    }
    detail::PathNode close = rot.front();
    close.pt = close.pt + shift;
    rot.push_back(close);
    chains[ci] = rot;
  }

  // Coalesce collinear runs into edges; remember which segment each piece of
  // an edge belongs to and where generators sit mid-edge.
  struct GenMark {
    int ci, word_index;
    Pt pos;
    long long lift;
  };
  std::vector<GenMark> marks;
  // edge_cuts[ci][e] = (toff, segment-after) list; before the first cut the
  // edge belongs to edge_seg0[ci][e].
  std::vector<std::vector<std::vector<std::pair<long long, int>>>> edge_cuts(
      nc);
  std::vector<std::vector<int>> edge_seg0(nc);

  for (int ci = 0; ci < nc; ++ci) {
    auto& chain = chains[ci];
    auto& line = R.lines[ci];
    int L = static_cast<int>(chain.size());
    if (L < 2) throw InternalError("degenerate component path");
    line.push_back(chain[0].pt);
    edge_seg0[ci].push_back(chain[0].seg);
    edge_cuts[ci].push_back({});
    for (int i = 1; i < L; ++i) {
      const detail::PathNode& nd = chain[i];
      bool last = i == L - 1;
      bool bend = false;
      if (!last) {
        Heading hin = heading_of(chain[i - 1].pt, nd.pt);
        Heading hout = heading_of(nd.pt, chain[i + 1].pt);
        bend = hout != hin;
      }
      if (nd.generator) {
        if (bend) throw InternalError("generator at a bend");
        long long toff = std::abs(nd.pt.x - line.back().x) +
                         std::abs(nd.pt.y - line.back().y);
        edge_cuts[ci].back().push_back({toff, nd.seg});
        marks.push_back(
            {ci, nd.word_index, nd.pt, gen_lift[ci][nd.word_index]});
      }
      if (bend || last) {
        line.push_back(nd.pt);
        if (!last) {
          edge_seg0[ci].push_back(nd.seg);
          edge_cuts[ci].push_back({});
        }
      }
    }
  }

  auto segment_at = [&](int ci, int e, long long toff) -> int {
    int seg = edge_seg0[ci][e];
    for (auto& [t, s] : edge_cuts[ci][e])
      if (toff > t) seg = s;
    return seg;
  };

  // --- generator table -----------------------------------------------------
  std::sort(marks.begin(), marks.end(), [](const GenMark& a, const GenMark& b) {
    return std::make_tuple(-a.pos.y, a.ci, a.word_index) <
           std::make_tuple(-b.pos.y, b.ci, b.word_index);
  });
  for (size_t i = 0; i < marks.size(); ++i) {
    const GenMark& m = marks[i];
    const CrossingRecord& r = curve.components[m.ci].word[m.word_index];
    GeneratorInfo g;
    g.comp = m.ci;
    g.word_index = m.word_index;
    g.name = r.name.empty() ? "x" + std::to_string(i) : r.name;
    g.pos = m.pos;
    g.lift = m.lift;
    g.east = r.exit == Side::right;
    g.height = r.height;
    R.gens.push_back(g);
    R.gen_by_pos_[m.pos] = static_cast<int>(i);
  }
  {
    std::set<std::string> seen;
    for (auto& g : R.gens)
      if (!seen.insert(g.name).second)
        throw DomainError("duplicate generator name: " + g.name);
  }

  R.min_y = R.max_y = R.gens.empty() ? 0 : R.gens[0].pos.y;
  for (int ci = 0; ci < nc; ++ci)
    for (const Pt& p : R.lines[ci]) {
      R.min_y = std::min(R.min_y, p.y);
      R.max_y = std::max(R.max_y, p.y);
    }
  // Every marker whose arc could meet the curve: positive markers below
  // max_y, negative markers above min_y, with one band of slack.
  {
    long long lo = std::min<long long>(0, R.min_y) - R.S;
    long long hi = std::max<long long>(0, R.max_y) + R.S;
    for (long long k = floor_div(lo - R.S / 2, R.S); k * R.S + R.S / 2 <= hi;
         ++k)
      R.marker_heights.push_back(k * R.S + R.S / 2);
  }

  // --- crossings -----------------------------------------------------------
  long long total_wrap = 0;
  for (int ci = 0; ci < nc; ++ci)
    total_wrap += std::abs(R.net_shift[ci]) / std::max<long long>(R.PX, 1);
  long long K = curve.surface == Surface::cylinder ? total_wrap + 2 : 0;

  struct RawCross {
    Pt pos;  // intersection point in branch-a's native frame
    int ca, ea, cb, eb;
    long long shift;  // branch-b native pos = pos - (shift, 0)
  };
  std::vector<RawCross> raw;

  auto edge_pts = [&](int ci, int e) {
    return std::make_pair(R.lines[ci][e], R.lines[ci][e + 1]);
  };

  for (int ca = 0; ca < nc; ++ca) {
    int Ea = static_cast<int>(R.lines[ca].size()) - 1;
    for (int cb = ca; cb < nc; ++cb) {
      int Eb = static_cast<int>(R.lines[cb].size()) - 1;
      for (int ea = 0; ea < Ea; ++ea) {
        auto [a1, a2] = edge_pts(ca, ea);
        bool a_h = a1.y == a2.y;
        for (int eb = (ca == cb ? ea + 1 : 0); eb < Eb; ++eb) {
          auto [b1, b2] = edge_pts(cb, eb);
          bool b_h = b1.y == b2.y;
          for (long long k = -K; k <= K; ++k) {
            long long dx = k * R.PX;
            Pt c1{b1.x + dx, b1.y}, c2{b2.x + dx, b2.y};
            if (a_h == b_h) {
              // Parallel strands may never overlap; touching endpoints are
              // fine (cover translates of a full-period run share seams).
              if (a_h && a1.y == c1.y &&
                  std::max(std::min(a1.x, a2.x), std::min(c1.x, c2.x)) <
                      std::min(std::max(a1.x, a2.x), std::max(c1.x, c2.x)))
                throw InternalError("overlapping horizontal strands");
              if (!a_h && a1.x == c1.x &&
                  std::max(std::min(a1.y, a2.y), std::min(c1.y, c2.y)) <
                      std::min(std::max(a1.y, a2.y), std::max(c1.y, c2.y)))
                throw InternalError("overlapping vertical strands");
              continue;
            }
            const Pt& h1 = a_h ? a1 : c1;
            const Pt& h2 = a_h ? a2 : c2;
            const Pt& v1 = a_h ? c1 : a1;
            long long vy1 = std::min(v1.y, (a_h ? c2 : a2).y);
            long long vy2 = std::max(v1.y, (a_h ? c2 : a2).y);
            long long hx1 = std::min(h1.x, h2.x), hx2 = std::max(h1.x, h2.x);
            if (v1.x <= hx1 || v1.x >= hx2) continue;
            if (h1.y <= vy1 || h1.y >= vy2) continue;
            // The a-edge is never shifted, so the hit point is native for a
            // and sits dx east of b's native frame.
            raw.push_back({Pt{v1.x, h1.y}, ca, ea, cb, eb, dx});
          }
        }
      }
    }
  }

  // --- stations ------------------------------------------------------------
  R.stations.assign(nc, {});
  auto locate = [&](int ci, Pt p) -> std::pair<int, long long> {
    for (int e = 0; e + 1 < static_cast<int>(R.lines[ci].size()); ++e) {
      Pt a = R.lines[ci][e], b = R.lines[ci][e + 1];
      if (a.y == b.y && p.y == a.y && p.x > std::min(a.x, b.x) &&
          p.x < std::max(a.x, b.x))
        return {e, std::abs(p.x - a.x)};
      if (a.x == b.x && p.x == a.x && p.y > std::min(a.y, b.y) &&
          p.y < std::max(a.y, b.y))
        return {e, std::abs(p.y - a.y)};
    }
    throw InternalError("station off its polyline");
  };

  for (size_t gi = 0; gi < R.gens.size(); ++gi) {
    Station st;
    st.kind = Station::Kind::generator;
    st.pos = R.gens[gi].pos;
    std::tie(st.edge, st.toff) = locate(R.gens[gi].comp, st.pos);
    st.gen = static_cast<int>(gi);
    R.stations[R.gens[gi].comp].push_back(st);
  }

  for (const RawCross& rc : raw) {
    Pt pa = rc.pos;
    Pt pb = rc.pos - Pt{rc.shift, 0};
    auto off = [&](int ci, int e, Pt p) {
      return std::abs(p.x - R.lines[ci][e].x) +
             std::abs(p.y - R.lines[ci][e].y);
    };
    SegmentId sa{rc.ca, segment_at(rc.ca, rc.ea, off(rc.ca, rc.ea, pa))};
    SegmentId sb{rc.cb, segment_at(rc.cb, rc.eb, off(rc.cb, rc.eb, pb))};
    CrossingInfo info;
    info.id = IntersectionId(sa, sb);
    bool a_first = info.id.a == sa;  // branch 0 belongs to id.a
    info.comp[0] = a_first ? rc.ca : rc.cb;
    info.comp[1] = a_first ? rc.cb : rc.ca;
    Pt p0 = a_first ? pa : pb;
    Pt p1 = a_first ? pb : pa;
    info.pos = p0;
    auto coeff_it = curve.bounding_chain.find(info.id);
    info.b = coeff_it == curve.bounding_chain.end() ? FieldElem::zero(curve.p)
                                                    : coeff_it->second;
    for (const auto& existing : R.crossings)
      if (existing.id == info.id)
        throw InternalError("segment pair crosses twice");
    int idx = static_cast<int>(R.crossings.size());
    // The crossing point lies on both branches' edges, so locate() cannot
    // tell them apart; take the edge indices from the sweep instead.
    Station s0;
    s0.kind = Station::Kind::crossing;
    s0.pos = p0;
    s0.edge = a_first ? rc.ea : rc.eb;
    s0.toff = off(info.comp[0], s0.edge, p0);
    s0.cross = idx;
    s0.branch = 0;
    R.stations[info.comp[0]].push_back(s0);
    Station s1;
    s1.kind = Station::Kind::crossing;
    s1.pos = p1;
    s1.edge = a_first ? rc.eb : rc.ea;
    s1.toff = off(info.comp[1], s1.edge, p1);
    s1.cross = idx;
    s1.branch = 1;
    R.stations[info.comp[1]].push_back(s1);
    R.crossings.push_back(info);
  }

  for (const auto& [id, coeff] : curve.bounding_chain) {
    bool found = false;
    for (const auto& c : R.crossings)
      if (c.id == id) found = true;
    if (!found)
      throw DomainError("bounding chain entry at segments that do not cross");
  }

  // Basepoint stations, one unit along the first segment (weight-one
  // components carry no station at all).
  for (int ci = 0; ci < nc; ++ci) {
    const Component& comp = curve.components[ci];
    if (comp.weight.is_one()) continue;
    long long y0 = slot_y(comp.word[0].height, comp.word[0].slot);
    Station st;
    st.kind = Station::Kind::basepoint;
    if (comp.closed) {
      long long x0 = gen_lift[ci][0] * R.PX;
      st.pos = Pt{x0 + (comp.word[0].exit == Side::right ? 1 : -1), y0};
    } else {
      st.pos = Pt{comp.entry_wall() == Side::left ? -1 : 1, y0};
    }
    std::tie(st.edge, st.toff) = locate(ci, st.pos);
    R.stations[ci].push_back(st);
  }

  // Sign stations: every closed component carries exactly one, two units
  // behind its first generator (against the direction of travel).  Each
  // boundary pass over it negates a polygon's contribution; without this
  // twist the square of the differential picks up 2UV terms on closed
  // components such as the figure-eight pieces.
  for (int ci = 0; ci < nc; ++ci) {
    const Component& comp = curve.components[ci];
    if (!comp.closed) continue;
    Pt g0{0, 0};
    for (const auto& g : R.gens)
      if (g.comp == ci && g.word_index == 0) {
        g0 = g.pos;  // post-rotation position, may sit in the shifted tail
        break;
      }
    Station st;
    st.kind = Station::Kind::signpoint;
    st.pos = g0 - Pt{comp.word[0].exit == Side::right ? 2 : -2, 0};
    std::tie(st.edge, st.toff) = locate(ci, st.pos);
    R.stations[ci].push_back(st);
  }

  // Portal stations for flip strips: one on each side of every generator
  // column a horizontal run passes (cylinder only).
  if (curve.surface == Surface::cylinder) {
    for (int ci = 0; ci < nc; ++ci) {
      int E = static_cast<int>(R.lines[ci].size()) - 1;
      for (int e = 0; e < E; ++e) {
        Pt a = R.lines[ci][e], b = R.lines[ci][e + 1];
        if (a.y != b.y) continue;
        long long x1 = std::min(a.x, b.x), x2 = std::max(a.x, b.x);
        for (long long k = floor_div(x1 - 3, R.PX); k * R.PX <= x2 + 3; ++k)
          for (long long goff : {+3LL, -3LL}) {
            long long px = k * R.PX + goff;
            if (px <= x1 || px >= x2) continue;
            int owner = R.gen_at(Pt{k * R.PX, a.y});
            if (owner < 0)
              throw InternalError("portal without a generator on its run");
            Station st;
            st.kind = Station::Kind::portal;
            st.pos = Pt{px, a.y};
            st.edge = e;
            st.toff = std::abs(px - a.x);
            st.portal_sign = goff > 0 ? +1 : -1;
            st.portal_owner = owner;
            R.stations[ci].push_back(st);
          }
      }
    }
  }

  for (int ci = 0; ci < nc; ++ci) {
    auto& sts = R.stations[ci];
    std::sort(sts.begin(), sts.end(), [](const Station& a, const Station& b) {
      return std::make_tuple(a.edge, a.toff) < std::make_tuple(b.edge, b.toff);
    });
    for (size_t i = 0; i < sts.size(); ++i) {
      if (sts[i].kind == Station::Kind::generator)
        R.gens[sts[i].gen].station = static_cast<int>(i);
      if (sts[i].kind == Station::Kind::crossing)
        R.crossings[sts[i].cross].station[sts[i].branch] =
            static_cast<int>(i);
    }
  }

  // --- station-to-station geometry ----------------------------------------
  R.span_pts_.assign(nc, {});
  for (int ci = 0; ci < nc; ++ci) {
    const auto& sts = R.stations[ci];
    const auto& line = R.lines[ci];
    int N = static_cast<int>(sts.size());
    int E = static_cast<int>(line.size()) - 1;
    bool closed = curve.components[ci].closed;
    if (N == 0) throw InternalError("component with no stations");
    int spans = closed ? N : N - 1;
    for (int i = 0; i < spans; ++i) {
      const Station& s = sts[i];
      const Station& t = sts[(i + 1) % N];
      std::vector<Pt> pts;
      pts.push_back(s.pos);
      if (i + 1 < N) {
        for (int e = s.edge; e < t.edge; ++e) pts.push_back(line[e + 1]);
        pts.push_back(t.pos);
      } else {
        // Seam: out through the end of the polyline, back in through its
        // start shifted one net period over.
        Pt shift{R.net_shift[ci], 0};
        for (int e = s.edge; e < E; ++e) pts.push_back(line[e + 1]);
        for (int e = 0; e < t.edge; ++e) pts.push_back(line[e + 1] + shift);
        pts.push_back(t.pos + shift);
      }
      std::vector<Pt> clean;
      for (const Pt& p : pts)
        if (clean.empty() || clean.back() != p) clean.push_back(p);
      if (clean.size() < 2)
        throw InternalError("empty station span at (" +
                            std::to_string(s.pos.x) + "," +
                            std::to_string(s.pos.y) + ") kinds " +
                            std::to_string(static_cast<int>(s.kind)) + "/" +
                            std::to_string(static_cast<int>(t.kind)));
      R.span_pts_[ci].push_back(clean);
    }
  }

  return R;
}

// --- grading --------------------------------------------------------------

// Extends the grading over the realization: doubled tau values propagate
// along each polyline (quarter turns at bends, +-4 jumps at marked-point
// arcs), then get pinned by each component's anchor.  Fails with
// NotZGradable when a closed component's values do not return to themselves
// or the z-ladder detaches from the w-ladder at some generator.
inline void extend_grading(Realization& R) {
  const DecoratedCurve& curve = *R.curve;
  int nc = static_cast<int>(curve.components.size());

  // Marked-point arcs run straight up from positive markers and straight
  // down from negative ones; a horizontal move across a marker column picks
  // up one jump per arc it crosses.
  auto arc_jumps = [&](long long x1, long long x2, long long y, bool east,
                       long long col_off) -> long long {
    long long lo = std::min(x1, x2), hi = std::max(x1, x2);
    long long jumps = 0;
    for (long long k = floor_div(lo - col_off, R.PX);
         k * R.PX + col_off <= hi; ++k) {
      long long cx = k * R.PX + col_off;
      if (cx <= lo || cx >= hi) continue;
      for (long long mh : R.marker_heights) {
        bool crossed = mh > 0 ? y > mh : y < mh;
        if (crossed) jumps += (east ? 4 : -4) * (mh > 0 ? 1 : -1);
      }
    }
    return jumps;
  };

  for (int ci = 0; ci < nc; ++ci) {
    const Component& comp = curve.components[ci];
    const auto& line = R.lines[ci];
    auto& sts = R.stations[ci];
    int E = static_cast<int>(line.size()) - 1;

    // Walk the polyline once, recording relative doubled tau at stations.
    std::vector<long long> rel_w(sts.size()), rel_z(sts.size());
    long long w = 0, z = 0;
    Heading h = heading_of(line[0], line[1]);
    size_t si = 0;
    for (int e = 0; e < E; ++e) {
      Pt a = line[e], b = line[e + 1];
      if (e > 0) {
        Heading nh = heading_of(a, b);
        int t = turn(h, nh);
        w += t;
        z += t;
        h = nh;
      }
      std::vector<int> here;
      while (si < sts.size() && sts[si].edge == e) {
        here.push_back(static_cast<int>(si));
        ++si;
      }
      if (a.y == b.y) {
        bool east = b.x > a.x;
        long long prev_x = a.x;
        for (int idx : here) {
          long long sx = sts[idx].pos.x;
          w += arc_jumps(prev_x, sx, a.y, east, +2);
          z += arc_jumps(prev_x, sx, a.y, east, -2);
          rel_w[idx] = w;
          rel_z[idx] = z;
          prev_x = sx;
        }
        w += arc_jumps(prev_x, b.x, a.y, east, +2);
        z += arc_jumps(prev_x, b.x, a.y, east, -2);
      } else {
        for (int idx : here) {
          rel_w[idx] = w;
          rel_z[idx] = z;
        }
      }
    }

    if (comp.closed) {
      Heading h_end = heading_of(line[E - 1], line[E]);
      Heading h_start = heading_of(line[0], line[1]);
      long long closing = turn(h_end, h_start);
      if (w + closing != 0 || z + closing != 0)
        throw NotZGradable("component " + std::to_string(ci) +
                           " does not close up gradably");
    }

    // Pin to the anchor at word[0]'s generator.
    int anchor_station = -1;
    for (const auto& g : R.gens)
      if (g.comp == ci && g.word_index == 0) anchor_station = g.station;
    if (anchor_station < 0) throw InternalError("component without word[0]");
    long long anchor2 = comp.anchor2
                            ? *comp.anchor2
                            : (comp.word[0].exit == Side::right ? 0 : 2);
    long long want_code = comp.word[0].exit == Side::right ? 0 : 2;
    if (((anchor2 - want_code) % 4 + 4) % 4 != 0)
      throw DomainError("anchor parity conflicts with strand direction");
    long long base_w = anchor2 - rel_w[anchor_station];
    long long base_z = anchor2 +
                       4 * static_cast<long long>(comp.word[0].height) -
                       rel_z[anchor_station];

    for (size_t i = 0; i < sts.size(); ++i) {
      sts[i].tau2_w = rel_w[i] + base_w;
      sts[i].tau2_z = rel_z[i] + base_z;
    }
    R.end_tau2[ci] = {base_w, w + base_w};

    for (auto& g : R.gens) {
      if (g.comp != ci) continue;
      const Station& st = sts[g.station];
      if (st.tau2_w % 2 != 0 || st.tau2_z % 2 != 0)
        throw InternalError("odd doubled grading at a generator");
      if (st.tau2_z != st.tau2_w + 4 * static_cast<long long>(g.height))
        throw NotZGradable("z-grading detaches at generator " + g.name);
      g.gr = Bigrading{static_cast<int>(-st.tau2_w / 2),
                       static_cast<int>(-st.tau2_z / 2)};
      bool east_par = ((st.tau2_w % 4) + 4) % 4 == 0;
      if (east_par != g.east)
        throw NotZGradable("direction parity mismatch at " + g.name);
    }
  }

  // Intersection degrees: the doubled tau difference across the two branches
  // is odd; of the two integers flooring it, exactly one is even and that is
  // the degree (the other, -1 - deg, indexes the odd partner generator).
  for (auto& c : R.crossings) {
    const Station& s0 = R.stations[c.comp[0]][c.station[0]];
    const Station& s1 = R.stations[c.comp[1]][c.station[1]];
    auto even_deg = [](long long d2) -> long long {
      if (((d2 % 2) + 2) % 2 != 1)
        throw InternalError("even tau difference at a transverse crossing");
      long long e1 = (d2 - 1) / 2;
      long long e2 = (-d2 - 1) / 2;
      return e1 % 2 == 0 ? e1 : e2;
    };
    long long dw = even_deg(s1.tau2_w - s0.tau2_w);
    long long dz = even_deg(s1.tau2_z - s0.tau2_z);
    if (dw != dz) throw InternalError("w/z intersection degrees disagree");
    c.deg = static_cast<int>(dw);
  }

  for (const auto& c : R.crossings) {
    if (c.b.is_zero()) continue;
    if (c.deg > 0)
      throw DomainError("bounding chain at positive degree crossing");
    if (c.deg == 0 && curve.chain_type == ChainType::local_system) {
      // A local-system flavoured chain may only touch degree zero at the
      // crossing-region points of a higher-rank local system.
      bool higher = curve.components[c.comp[0]].local_system.dim() > 1 ||
                    curve.components[c.comp[1]].local_system.dim() > 1;
      if (!higher)
        throw DomainError(
            "degree-zero chain entry away from any local system");
    }
  }
}

inline Realization realize_graded(const DecoratedCurve& curve) {
  Realization R = realize(curve);
  extend_grading(R);
  return R;
}

// Per-generator gradings in word order, the public face of the grading
// extension.  The overload re-pins one component so the named crossing gets
// the requested tau_w.
struct CurveGrading {
  std::vector<std::vector<Bigrading>> at;  // [component][word index]

  const Bigrading& of(int comp, int idx) const { return at[comp][idx]; }
};

inline CurveGrading grading_extend(const DecoratedCurve& curve) {
  Realization R = realize_graded(curve);
  CurveGrading g;
  g.at.resize(curve.components.size());
  for (size_t ci = 0; ci < curve.components.size(); ++ci)
    g.at[ci].resize(curve.components[ci].word.size());
  for (const auto& gen : R.gens) g.at[gen.comp][gen.word_index] = gen.gr;
  return g;
}

inline CurveGrading grading_extend(const DecoratedCurve& curve, int comp,
                                   int word_index, int tau_w) {
  if (comp < 0 || comp >= static_cast<int>(curve.components.size()))
    throw DomainError("anchor on a missing component");
  if (word_index < 0 ||
      word_index >= static_cast<int>(curve.components[comp].word.size()))
    throw DomainError("anchor on a missing crossing record");
  CurveGrading base = grading_extend(curve);
  // The component translates rigidly under a different anchor, so shift the
  // stored anchor by however far the requested crossing has to move.
  const Bigrading& cur = base.of(comp, word_index);
  long long delta2 = 2LL * tau_w + 2LL * cur.gr_w;
  DecoratedCurve shifted = curve;
  long long a0 =
      shifted.components[comp].anchor2
          ? *shifted.components[comp].anchor2
          : (shifted.components[comp].word[0].exit == Side::right ? 0 : 2);
  shifted.components[comp].anchor2 = static_cast<int>(a0 + delta2);
  return grading_extend(shifted);
}

inline int intersection_degree(const DecoratedCurve& curve,
                               const IntersectionId& id) {
  Realization R = realize_graded(curve);
  for (const auto& c : R.crossings)
    if (c.id == id) return c.deg;
  throw DomainError("no intersection at that segment pair");
}

// --- position diagnostics --------------------------------------------------

struct PositionReport {
  std::vector<std::string> findings;

  bool ok() const { return findings.empty(); }
};

inline PositionReport validate_position(const DecoratedCurve& curve) {
  PositionReport rep;
  Realization R = realize_graded(curve);

  // Boundary endpoints must rise with tau_w along each wall.
  if (curve.surface == Surface::strip) {
    for (int side = 0; side < 2; ++side) {
      Side s = side == 0 ? Side::left : Side::right;
      std::vector<std::pair<int, long long>> ends;  // (order, tau2_w there)
      for (size_t ci = 0; ci < curve.components.size(); ++ci) {
        const Component& comp = curve.components[ci];
        if (comp.closed) continue;
        auto [t_start, t_finish] = R.end_tau2.at(static_cast<int>(ci));
        if (comp.entry_wall() == s)
          ends.push_back({comp.ends.start_order, t_start});
        if (comp.finish_wall() == s)
          ends.push_back({comp.ends.finish_order, t_finish});
      }
      std::sort(ends.begin(), ends.end());
      for (size_t i = 1; i < ends.size(); ++i)
        if (ends[i].second <= ends[i - 1].second)
          rep.findings.push_back(
              std::string("wall endpoints out of tau order on the ") +
              (side == 0 ? "left" : "right"));
    }
  }

  // Two closed components with the same cyclic word cobound an annulus.
  for (size_t i = 0; i < curve.components.size(); ++i)
    for (size_t j = i + 1; j < curve.components.size(); ++j) {
      const Component& a = curve.components[i];
      const Component& b = curve.components[j];
      if (!a.closed || !b.closed) continue;
      DecoratedCurve ca, cb;
      ca.p = cb.p = curve.p;
      ca.surface = cb.surface = curve.surface;
      ca.components = {a};
      cb.components = {b};
      if (canonical(ca).components[0].word == canonical(cb).components[0].word)
        rep.findings.push_back("components " + std::to_string(i) + " and " +
                               std::to_string(j) + " cobound an annulus");
    }
  return rep;
}

// --- winding and disk checks ----------------------------------------------

// Winding number of a rectilinear loop around a point off the loop: upward
// ray cast counting horizontal edges strictly spanning the column, westbound
// positive.
inline long long winding_at(const std::vector<Pt>& loop, Pt q) {
  long long w = 0;
  int L = static_cast<int>(loop.size());
  for (int i = 0; i + 1 < L; ++i) {
    const Pt& a = loop[i];
    const Pt& b = loop[i + 1];
    if (a.y != b.y) continue;
    if (a.y <= q.y) continue;
    long long x1 = std::min(a.x, b.x), x2 = std::max(a.x, b.x);
    if (q.x <= x1 || q.x >= x2) continue;
    w += b.x < a.x ? +1 : -1;
  }
  return w;
}

// Covering multiplicities of the subdivision a candidate boundary induces on
// its bounding box.  The candidate bounds an immersed disk iff every cell
// multiplicity is nonnegative; rotation number +1 is the walkers' business.
struct Arrangement {
  int vertices = 0, edges = 0, faces = 0;  // faces counts bounded cells only
  long long min_mult = 0, max_mult = 0;

  int euler() const { return vertices - edges + faces; }
};

struct DiskCheck {
  bool nonnegative = true;
  Arrangement arr;
};

inline DiskCheck analyze_disk(const std::vector<Pt>& loop) {
  DiskCheck out;
  std::vector<long long> xs, ys;
  for (const Pt& p : loop) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  if (nx < 2 || ny < 2) return out;
  out.arr.vertices = nx * ny;
  out.arr.edges = nx * (ny - 1) + ny * (nx - 1);
  out.arr.faces = (nx - 1) * (ny - 1);
  if (out.arr.euler() != 1)
    throw InternalError("arrangement Euler characteristic broke");
  // Doubled coordinates keep every cell midpoint integral yet off the grid.
  std::vector<Pt> loop2;
  loop2.reserve(loop.size());
  for (const Pt& p : loop) loop2.push_back({2 * p.x, 2 * p.y});
  bool any = false;
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j) {
      long long m =
          winding_at(loop2, Pt{xs[i] + xs[i + 1], ys[j] + ys[j + 1]});
      if (!any) {
        out.arr.min_mult = out.arr.max_mult = m;
        any = true;
      }
      out.arr.min_mult = std::min(out.arr.min_mult, m);
      out.arr.max_mult = std::max(out.arr.max_mult, m);
      if (m < 0) out.nonnegative = false;
    }
  return out;
}

}  // namespace cfk
