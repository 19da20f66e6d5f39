#pragma once

// Flat circle bundles over the 2-torus. The universal cover is R^2 with
// deck group Z^2; a lift x~ + g of a base point carries the fiber point
// rho(g)^{-1} v0 of the quasisection through the leaf (x~, v0).

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flatfoliate/convention.hpp"
#include "flatfoliate/error.hpp"
#include "flatfoliate/exactgeom.hpp"
#include "flatfoliate/localformula.hpp"
#include "flatfoliate/rational.hpp"
#include "flatfoliate/triangulations.hpp"

namespace flatfoliate {

using Vec2 = std::array<Rational, 2>;
using Lift = std::array<long, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(const Rational& s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline Rational cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }
inline Rational dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline Vec2 to_vec(const Lift& g) { return {Rational(g[0]), Rational(g[1])}; }

inline Integer floor_of(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}
inline Integer ceil_of(const Rational& q) {
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return c;
}

// ---------------------------------------------------------------------------
// Holonomy

struct Matrix2 {
  Rational a = 1, b = 0, c = 0, d = 1;  // [[a, b], [c, d]]

  static Matrix2 identity() { return {}; }

  Rational det() const { return a * d - b * c; }

  Matrix2 inverse() const {
    const Rational D = det();
    if (D == 0) throw Error(ErrorCode::NotSpecialLinear, "singular matrix");
    return {d / D, -b / D, -c / D, a / D};
  }

  Vec2 apply(const Vec2& v) const { return {a * v[0] + b * v[1], c * v[0] + d * v[1]}; }

  friend Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const Matrix2&, const Matrix2&) = default;

  Matrix2 pow(long e) const {
    Matrix2 base = e < 0 ? inverse() : *this;
    unsigned long k = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    Matrix2 out;
    while (k) {
      if (k & 1) out = out * base;
      base = base * base;
      k >>= 1;
    }
    return out;
  }
};

/// Commuting pair in SL(2, Q): images of the generators of pi_1(T^2) = Z^2.
class HolonomyPair {
 public:
  HolonomyPair(Matrix2 a, Matrix2 b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.det() != 1 || b_.det() != 1)
      throw Error(ErrorCode::NotSpecialLinear, "holonomy matrices need det = 1");
    if (a_ * b_ != b_ * a_)
      throw Error(ErrorCode::NonCommuting, "AB != BA");
  }

  const Matrix2& a() const noexcept { return a_; }
  const Matrix2& b() const noexcept { return b_; }

  /// A^i B^j.
  Matrix2 at(const Lift& g) const { return a_.pow(g[0]) * b_.pow(g[1]); }

  /// 3-4-5 and 5-12-13 rotations; their angles are independent mod pi, so
  /// every finite set of sheet rays is antipodally generic.
  static HolonomyPair rotations() {
    return {{Rational(3, 5), Rational(-4, 5), Rational(4, 5), Rational(3, 5)},
            {Rational(5, 13), Rational(-12, 13), Rational(12, 13), Rational(5, 13)}};
  }

  /// Diagonal pair: all sheet rays of a first-quadrant v0 stay in one open
  /// quadrant, so every index vanishes and the check is vacuous.
  static HolonomyPair diagonal() {
    return {{Rational(2), 0, 0, Rational(1, 2)}, {Rational(3), 0, 0, Rational(1, 3)}};
  }

  static HolonomyPair identity() { return {Matrix2::identity(), Matrix2::identity()}; }

 private:
  Matrix2 a_, b_;
};

inline Matrix2 holonomy_at(const HolonomyPair& pair, const Lift& g) { return pair.at(g); }

/// rho(g)^{-1} v0: the fiber point contributed by the lift x~ + g.
inline RayVector sheet_ray(const HolonomyPair& pair, const Lift& g, const Vec2& v0) {
  const Vec2 w = pair.at(g).inverse().apply(v0);
  return RayVector{w[0], w[1]};
}

// ---------------------------------------------------------------------------
// Quasisection region

struct Edge {
  Vec2 start, end;
  int family;  // 1: direction (1, eps1), 2: direction (eps2, 1)
  const char* name;
  Vec2 tangent() const { return end - start; }  // counterclockwise boundary
};

/// Closed parallelogram {s e1 + t e2 : s0 <= s <= s1, t0 <= t <= t1} with
/// e1 = (1, eps1), e2 = (eps2, 1), containing the Folner box [0, L]^2 with
/// skew margin delta.
struct QuasisectionRegion {
  int L = 0;
  int schedule_index = 0;
  Rational eps1, eps2, delta;
  Rational s0, s1, t0, t1;
  std::array<Vec2, 4> vertices;  // counterclockwise from s0 e1 + t0 e2
  Vec2 basepoint;

  Vec2 e1() const { return {Rational(1), eps1}; }
  Vec2 e2() const { return {eps2, Rational(1)}; }

  std::pair<Rational, Rational> skew(const Vec2& p) const {
    const Rational D = 1 - eps1 * eps2;
    return {(p[0] - eps2 * p[1]) / D, (p[1] - eps1 * p[0]) / D};
  }
  bool contains_closed(const Vec2& p) const {
    auto [s, t] = skew(p);
    return s0 <= s && s <= s1 && t0 <= t && t <= t1;
  }
  bool contains_open(const Vec2& p) const {
    auto [s, t] = skew(p);
    return s0 < s && s < s1 && t0 < t && t < t1;
  }

  std::array<Edge, 4> edges() const {
    return {Edge{vertices[0], vertices[1], 1, "bottom"},
            Edge{vertices[1], vertices[2], 2, "right"},
            Edge{vertices[2], vertices[3], 1, "top"},
            Edge{vertices[3], vertices[0], 2, "left"}};
  }

  std::array<Rational, 4> bbox() const {  // xmin, xmax, ymin, ymax
    std::array<Rational, 4> b{vertices[0][0], vertices[0][0], vertices[0][1], vertices[0][1]};
    for (const auto& v : vertices) {
      b[0] = std::min(b[0], v[0]);
      b[1] = std::max(b[1], v[0]);
      b[2] = std::min(b[2], v[1]);
      b[3] = std::max(b[3], v[1]);
    }
    return b;
  }
};

inline QuasisectionRegion make_region(int L, const Rational& eps1, const Rational& eps2,
                                      const Rational& delta, int schedule_index = 0) {
  if (L < 1) throw Error(ErrorCode::InvalidCounts, "L must be positive");
  QuasisectionRegion q;
  q.L = L;
  q.schedule_index = schedule_index;
  q.eps1 = eps1;
  q.eps2 = eps2;
  q.delta = delta;
  if (1 - eps1 * eps2 == 0)
    throw Error(ErrorCode::GenericityExhausted, "edge families are parallel");
  bool first = true;
  for (int cx : {0, L})
    for (int cy : {0, L}) {
      auto [s, t] = q.skew({Rational(cx), Rational(cy)});
      if (first) {
        q.s0 = q.s1 = s;
        q.t0 = q.t1 = t;
        first = false;
      }
      q.s0 = std::min(q.s0, s);
      q.s1 = std::max(q.s1, s);
      q.t0 = std::min(q.t0, t);
      q.t1 = std::max(q.t1, t);
    }
  q.s0 -= delta;
  q.s1 += delta;
  q.t0 -= delta;
  q.t1 += delta;
  auto at = [&](const Rational& s, const Rational& t) { return s * q.e1() + t * q.e2(); };
  q.vertices = {at(q.s0, q.t0), at(q.s1, q.t0), at(q.s1, q.t1), at(q.s0, q.t1)};
  q.basepoint = {Rational(1, 2), Rational(1, 2)};
  return q;
}

/// Shear schedule: eps1 = 1/(97 + 2 i), eps2 = 1/(101 + 4 i), delta = 1/101.
inline QuasisectionRegion scheduled_region(int L, int schedule_index) {
  return make_region(L, Rational(1, 97 + 2 * schedule_index),
                     Rational(1, 101 + 4 * schedule_index), Rational(1, 101),
                     schedule_index);
}

/// Geometric data of a double point of the projected boundary, before any
/// holonomy is attached.
struct RawCrossing {
  Vec2 position;  // x~ in [0,1)^2
  Lift h_lift, v_lift;
  std::size_t h_edge, v_edge;  // indices into region.edges()
};

struct CrossingScan {
  std::vector<RawCrossing> crossings;
  std::optional<std::string> defect;  // why the region is not generic
};

namespace detail {

inline Vec2 frac(const Vec2& p) {
  return {p[0] - Rational(floor_of(p[0])), p[1] - Rational(floor_of(p[1]))};
}
inline Lift floor_lift(const Vec2& p) {
  return {floor_of(p[0]).get_si(), floor_of(p[1]).get_si()};
}

// Range of integer translations d with E ∩ (F + d) possibly nonempty.
inline std::array<long, 4> translation_range(const QuasisectionRegion& q) {
  auto b = q.bbox();
  const Rational w = b[1] - b[0], h = b[3] - b[2];
  return {-ceil_of(w).get_si(), ceil_of(w).get_si(), -ceil_of(h).get_si(), ceil_of(h).get_si()};
}

inline bool in_open_unit(const Rational& u) { return 0 < u && u < 1; }
inline bool in_closed_unit(const Rational& u) { return 0 <= u && u <= 1; }

}  // namespace detail

/// All double points of pr(boundary of Q) on the torus, by exact
/// intersection of family-1 edges with Z^2-translates of family-2 edges.
/// Also audits the region: shears must differ, translates of same-family
/// edges must not overlap and no crossing may pass through a corner.
inline CrossingScan scan_boundary(const QuasisectionRegion& q) {
  CrossingScan scan;
  const auto edges = q.edges();
  const auto range = detail::translation_range(q);
  if (cross(q.e1(), q.e2()) == 0) {
    scan.defect = "edge families are parallel";
    return scan;
  }
  if (q.eps1 == q.eps2) {
    scan.defect = "equal shears eps1 = eps2 force translated edges to collide";
    return scan;
  }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (long dx = range[0]; dx <= range[1]; ++dx)
        for (long dy = range[2]; dy <= range[3]; ++dy) {
          const Edge& E = edges[i];
          const Edge& F = edges[j];
          const Vec2 d = to_vec({dx, dy});
          const Vec2 D1 = E.tangent(), D2 = F.tangent();
          const Vec2 delta = F.start + d - E.start;
          if (E.family == F.family) {
            if (i == j && dx == 0 && dy == 0) continue;
            if (cross(delta, D1) != 0) continue;  // parallel, not collinear
            const Rational len2 = dot(D1, D1);
            Rational a = dot(delta, D1) / len2, b = dot(delta + D2, D1) / len2;
            if (a > b) std::swap(a, b);
            if (b >= 0 && a <= 1) {
              scan.defect = std::string("edges ") + E.name + " and " + F.name +
                            " overlap after a lattice translation";
              return scan;
            }
            continue;
          }
          if (E.family != 1) continue;  // each unordered pair once: E horizontal
          const Rational den = cross(D1, D2);
          const Rational u = cross(delta, D2) / den;
          const Rational w = cross(delta, D1) / den;
          if (!detail::in_closed_unit(u) || !detail::in_closed_unit(w)) continue;
          if (!detail::in_open_unit(u) || !detail::in_open_unit(w)) {
            const bool shared_corner = dx == 0 && dy == 0;
            if (shared_corner) continue;  // adjacent edges meeting at their corner
            scan.defect = std::string("a corner lies on a translate of edge ") +
                          (detail::in_open_unit(u) ? E.name : F.name);
            return scan;
          }
          const Vec2 y_h = E.start + u * D1;
          RawCrossing c;
          c.position = detail::frac(y_h);
          c.h_lift = detail::floor_lift(y_h);
          c.v_lift = {c.h_lift[0] - dx, c.h_lift[1] - dy};
          c.h_edge = i;
          c.v_edge = j;
          scan.crossings.push_back(c);
        }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& c : scan.crossings)
    if (!seen.insert({c.position[0].get_str(), c.position[1].get_str()}).second) {
      scan.defect = "two crossings share a torus point";
      return scan;
    }
  std::sort(scan.crossings.begin(), scan.crossings.end(),
            [](const RawCrossing& a, const RawCrossing& b) {
              if (a.position[0] != b.position[0]) return a.position[0] < b.position[0];
              return a.position[1] < b.position[1];
            });
  return scan;
}

inline int retry_budget_default() { return 32; }

/// First region in the shear schedule, starting at `schedule_index`, whose
/// boundary passes the genericity audit.
inline QuasisectionRegion build_region(int L, int schedule_index = 0,
                                       int retry_budget = retry_budget_default()) {
  if (L < 2) throw Error(ErrorCode::InvalidCounts, "L must be >= 2");
  std::string last;
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    auto q = scheduled_region(L, schedule_index + attempt);
    auto scan = scan_boundary(q);
    if (!scan.defect) return q;
    last = *scan.defect;
  }
  throw Error(ErrorCode::GenericityExhausted,
              "region schedule exhausted after " + std::to_string(retry_budget) +
                  " attempts (" + last + ")");
}

// ---------------------------------------------------------------------------
// Crossings with fiber data

struct TorusCrossing {
  Vec2 position;
  Lift h_lift, v_lift;
  Vec2 h_tangent, v_tangent;
  RayVector h_ray, v_ray;
  std::vector<Lift> regular_lifts;
  CrossingConfiguration configuration;

  /// Same crossing with the roles of the two branches exchanged.
  TorusCrossing mirrored() const {
    TorusCrossing m = *this;
    std::swap(m.h_lift, m.v_lift);
    std::swap(m.h_tangent, m.v_tangent);
    std::swap(m.h_ray, m.v_ray);
    m.configuration = configuration.with_bordered_swapped(0, 1);
    return m;
  }
};

/// Lazily computed sheet rays per lift.
class SheetRays {
 public:
  SheetRays(const HolonomyPair& pair, Vec2 v0) : pair_(pair), v0_(std::move(v0)) {}
  const RayVector& operator()(const Lift& g) {
    auto it = cache_.find(g);
    if (it == cache_.end()) it = cache_.emplace(g, sheet_ray(pair_, g, v0_)).first;
    return it->second;
  }

 private:
  const HolonomyPair& pair_;
  Vec2 v0_;
  std::map<Lift, RayVector> cache_;
};

/// Lifts g with x~ + g in the open interior of Q.
inline std::vector<Lift> interior_lifts(const QuasisectionRegion& q, const Vec2& x) {
  auto b = q.bbox();
  std::vector<Lift> out;
  const long gx0 = ceil_of(b[0] - x[0]).get_si(), gx1 = floor_of(b[1] - x[0]).get_si();
  const long gy0 = ceil_of(b[2] - x[1]).get_si(), gy1 = floor_of(b[3] - x[1]).get_si();
  for (long gx = gx0; gx <= gx1; ++gx)
    for (long gy = gy0; gy <= gy1; ++gy)
      if (q.contains_open(x + to_vec({gx, gy}))) out.push_back({gx, gy});
  return out;
}

struct CrossingOptions {
  bool orient_bordered = kApplyOrientationSign;
};

/// Attaches fiber configurations to scanned crossings. Returns nullopt if
/// some configuration is not antipodally generic.
inline std::optional<std::vector<TorusCrossing>> attach_fibers(
    const QuasisectionRegion& q, std::span<const RawCrossing> raw,
    const HolonomyPair& pair, const Vec2& v0, const CrossingOptions& opt = {}) {
  SheetRays rays(pair, v0);
  const auto edges = q.edges();
  std::vector<TorusCrossing> out;
  out.reserve(raw.size());
  for (const auto& c : raw) {
    const Vec2 th = edges[c.h_edge].tangent(), tv = edges[c.v_edge].tangent();
    const RayVector& rh = rays(c.h_lift);
    const RayVector& rv = rays(c.v_lift);
    auto lifts = interior_lifts(q, c.position);
    std::vector<RayVector> regular;
    regular.reserve(lifts.size());
    for (const auto& g : lifts) regular.push_back(rays(g));
    // bordered order follows the orientation: det[t1, t2] > 0; without it,
    // the branches are taken in lift order
    const bool h_first = opt.orient_bordered ? cross(th, tv) > 0 : c.h_lift < c.v_lift;
    std::vector<RayVector> bordered = h_first ? std::vector<RayVector>{rh, rv}
                                              : std::vector<RayVector>{rv, rh};
    CrossingConfiguration cc(2, std::move(bordered), std::move(regular));
    if (!cc.is_generic()) return std::nullopt;
    out.push_back(TorusCrossing{c.position, c.h_lift, c.v_lift, th, tv, rh, rv,
                                std::move(lifts), std::move(cc)});
  }
  return out;
}

/// v0 schedule (1, 1/7), (1, 1/11), (1, 1/13), ...: second coordinate runs
/// over the reciprocals of the primes from 7 on.
inline Vec2 scheduled_v0(int attempt) {
  int found = -1;
  for (long p = 7;; ++p) {
    bool prime = true;
    for (long d = 2; d * d <= p; ++d)
      if (p % d == 0) prime = false;
    if (prime && ++found == attempt) return {Rational(1), Rational(1, p)};
  }
}

inline std::vector<TorusCrossing> boundary_crossings(const QuasisectionRegion& q,
                                                     const HolonomyPair& pair,
                                                     const Vec2& v0,
                                                     const CrossingOptions& opt = {}) {
  auto scan = scan_boundary(q);
  if (scan.defect) throw Error(ErrorCode::GenericityExhausted, *scan.defect);
  auto out = attach_fibers(q, scan.crossings, pair, v0, opt);
  if (!out)
    throw Error(ErrorCode::GenericityExhausted,
                "fiber configuration not antipodally generic");
  return std::move(*out);
}

// ---------------------------------------------------------------------------
// Euler estimate

struct EulerReport {
  Rational formula_value;
  Rational bound;
  std::int64_t crossings = 0;  // X
  std::int64_t k_min = 0;      // k
  std::int64_t k_max = 0;      // K
  std::int64_t n_inner = 0;    // N
  std::int64_t n_boundary = 0; // N^boundary
  Rational weight_sum;         // sum of vertex weights

  bool formula_is_integer() const { return is_integer(formula_value); }
};

namespace detail {

inline std::vector<Vec2> unit_square(const Lift& g) {
  const Vec2 o = to_vec(g);
  return {o, o + Vec2{1, 0}, o + Vec2{1, 1}, o + Vec2{0, 1}};
}

// Closed convex polygons (counterclockwise) intersect iff no edge normal
// of either one strictly separates them.
inline bool convex_polygons_intersect(std::span<const Vec2> a, std::span<const Vec2> b) {
  auto separated_along = [&](std::span<const Vec2> poly) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 e = poly[(i + 1) % poly.size()] - poly[i];
      const Vec2 normal{e[1], -e[0]};
      Rational amin = dot(normal, a[0]), amax = amin, bmin = dot(normal, b[0]), bmax = bmin;
      for (const auto& p : a) {
        amin = std::min(amin, dot(normal, p));
        amax = std::max(amax, dot(normal, p));
      }
      for (const auto& p : b) {
        bmin = std::min(bmin, dot(normal, p));
        bmax = std::max(bmax, dot(normal, p));
      }
      if (amax < bmin || bmax < amin) return true;
    }
    return false;
  };
  return !separated_along(a) && !separated_along(b);
}

}  // namespace detail

/// N = #{g : g F ⊆ Q} and N^boundary = #{g : g F meets Q, g F ⊄ Q} for the
/// closed unit square F.
inline std::pair<std::int64_t, std::int64_t> count_domains(const QuasisectionRegion& q) {
  auto b = q.bbox();
  const std::vector<Vec2> poly(q.vertices.begin(), q.vertices.end());
  std::int64_t inner = 0, boundary = 0;
  for (long gx = floor_of(b[0]).get_si() - 1; gx <= ceil_of(b[1]).get_si(); ++gx)
    for (long gy = floor_of(b[2]).get_si() - 1; gy <= ceil_of(b[3]).get_si(); ++gy) {
      const auto sq = detail::unit_square({gx, gy});
      const bool inside = std::all_of(sq.begin(), sq.end(),
                                      [&](const Vec2& p) { return q.contains_closed(p); });
      if (inside)
        ++inner;
      else if (detail::convex_polygons_intersect(sq, poly))
        ++boundary;
    }
  return {inner, boundary};
}

/// Extremes of the number of regular sheets over the torus. Every chamber
/// of the projected boundary touches a crossing or a corner, and the
/// chambers there carry k, k+1, k+2 sheets (crossing) or k, k+1 (corner).
inline std::pair<std::int64_t, std::int64_t> regular_sheet_extremes(
    const QuasisectionRegion& q, std::span<const TorusCrossing> crossings) {
  std::int64_t lo = -1, hi = -1;
  auto take = [&](std::int64_t a, std::int64_t b) {
    lo = lo < 0 ? a : std::min(lo, a);
    hi = hi < 0 ? b : std::max(hi, b);
  };
  for (const auto& c : crossings) {
    const auto k = static_cast<std::int64_t>(c.configuration.k());
    take(k, k + 2);
  }
  for (const auto& v : q.vertices) {
    const auto k = static_cast<std::int64_t>(interior_lifts(q, detail::frac(v)).size());
    take(k, k + 1);
  }
  return {lo, hi};
}

struct TorusOptions {
  int schedule_index = 0;
  int retry_budget = retry_budget_default();
  CrossingOptions crossing;
};

struct TorusRun {
  QuasisectionRegion region;
  Vec2 v0;
  std::vector<TorusCrossing> crossings;
  EulerReport report;
};

/// Region and v0 retries, crossing extraction, and the exact formula.
inline TorusRun run_torus(const HolonomyPair& pair, const Vec2& v0, int L,
                          const TorusOptions& opt = {}) {
  TorusRun run;
  run.region = build_region(L, opt.schedule_index, opt.retry_budget);
  auto scan = scan_boundary(run.region);
  bool done = false;
  for (int attempt = 0; attempt < opt.retry_budget && !done; ++attempt) {
    const Vec2 trial = attempt == 0 ? v0 : scheduled_v0(attempt);
    if (trial[0] == 0 && trial[1] == 0)
      throw Error(ErrorCode::ZeroVector, "v0 must be nonzero");
    auto crossings = attach_fibers(run.region, scan.crossings, pair, trial, opt.crossing);
    if (crossings) {
      run.v0 = trial;
      run.crossings = std::move(*crossings);
      done = true;
    }
  }
  if (!done)
    throw Error(ErrorCode::GenericityExhausted,
                "v0 schedule exhausted after " + std::to_string(opt.retry_budget) +
                    " attempts (fiber configurations never antipodally generic)");

  std::vector<CrossingConfiguration> configs;
  configs.reserve(run.crossings.size());
  for (const auto& c : run.crossings) configs.push_back(c.configuration);
  auto& r = run.report;
  r.weight_sum = 0;
  for (const auto& c : configs) r.weight_sum += vertex_weight(c);
  r.formula_value = r.weight_sum * 2;
  r.crossings = static_cast<std::int64_t>(configs.size());
  std::tie(r.k_min, r.k_max) = regular_sheet_extremes(run.region, run.crossings);
  r.bound = sullivan_bound(r.crossings, r.k_min, r.k_max, 2);
  std::tie(r.n_inner, r.n_boundary) = count_domains(run.region);
  return run;
}

inline EulerReport euler_estimate(const HolonomyPair& pair, const Vec2& v0, int L,
                                  const TorusOptions& opt = {}) {
  return run_torus(pair, v0, L, opt).report;
}

/// Expectations at the two vertices a crossing turns into, with the three
/// adjacent cells ordered counterclockwise around each vertex. First entry:
/// the chain that enters the h-branch first; second: the v-branch first.
/// Uses only the geometry of the crossing, never the bordered order.
inline std::pair<Rational, Rational> n2_geometric_vertex_expectations(
    const TorusCrossing& c) {
  const auto& regular = c.configuration.regular();
  const std::size_t k = regular.size();
  std::vector<RayVector> rays = regular;
  rays.push_back(c.h_ray);
  rays.push_back(c.v_ray);
  const std::size_t h_label = k, v_label = k + 1;

  // inward normals (interior to the left of the counterclockwise tangent)
  const Vec2 nh{-c.h_tangent[1], c.h_tangent[0]};
  const Vec2 nv{-c.v_tangent[1], c.v_tangent[0]};
  const Rational det = cross(nh, nv);
  if (det == 0) throw Error(ErrorCode::DegenerateConfiguration, "branches are parallel");
  const Vec2 u = Rational(1) / det * Vec2{nv[1], -nv[0]};  // u.nh = 1, u.nv = 0
  const Vec2 w = Rational(1) / det * Vec2{-nh[1], nh[0]};  // w.nh = 0, w.nv = 1

  struct Chamber {
    Vec2 point;
    std::vector<std::size_t> sheets;
  };
  auto chamber = [&](int sh, int sv) {
    Chamber ch{Rational(sh) * u + Rational(sv) * w, {}};
    for (std::size_t j = 0; j < k; ++j) ch.sheets.push_back(j);
    if (sh > 0) ch.sheets.push_back(h_label);
    if (sv > 0) ch.sheets.push_back(v_label);
    return ch;
  };
  auto expectation = [&](std::array<Chamber, 3> cells) {
    if (cross(cells[1].point - cells[0].point, cells[2].point - cells[0].point) < 0)
      std::swap(cells[1], cells[2]);
    Integer total = 0;
    std::size_t count = 0;
    std::array<RayVector, 3> t;
    for (auto a : cells[0].sheets)
      for (auto b : cells[1].sheets)
        for (auto d : cells[2].sheets) {
          ++count;
          if (a == b || b == d || a == d) continue;
          t = {rays[a], rays[b], rays[d]};
          total += configuration_index(t);
        }
    Rational e(total, Integer(static_cast<unsigned long>(count)));
    e.canonicalize();
    return e;
  };
  return {expectation({chamber(-1, -1), chamber(1, -1), chamber(1, 1)}),
          expectation({chamber(-1, -1), chamber(-1, 1), chamber(1, 1)})};
}

struct DecayRecord {
  int L = 0;
  EulerReport report;
};

inline std::vector<DecayRecord> decay_experiment(const HolonomyPair& pair, const Vec2& v0,
                                                 std::span<const int> L_list,
                                                 const TorusOptions& opt = {}) {
  for (std::size_t i = 1; i < L_list.size(); ++i)
    if (L_list[i] <= L_list[i - 1])
      throw Error(ErrorCode::InvalidCounts, "L list must be strictly ascending");
  std::vector<DecayRecord> out;
  for (int L : L_list) out.push_back({L, euler_estimate(pair, v0, L, opt)});
  return out;
}

// ---------------------------------------------------------------------------
// Dual complex of a grid on the torus

/// Number of lifts of x in the closed region.
inline std::int64_t covering_degree(const QuasisectionRegion& q, const Vec2& x) {
  auto b = q.bbox();
  std::int64_t count = 0;
  for (long gx = ceil_of(b[0] - x[0]).get_si(); gx <= floor_of(b[1] - x[0]).get_si(); ++gx)
    for (long gy = ceil_of(b[2] - x[1]).get_si(); gy <= floor_of(b[3] - x[1]).get_si(); ++gy)
      count += q.contains_closed(x + to_vec({gx, gy}));
  return count;
}

/// The m x m grid C on the torus, cell (a, b) indexed a + m b. Its dual is
/// a grid of squares, one per grid vertex, whose corners are the four
/// surrounding cells; nu = i + M deg with deg read at the cell centers.
inline std::vector<ProductCell> grid_dual_cells(const QuasisectionRegion& q, int m) {
  if (m < 3) throw Error(ErrorCode::InvalidCounts, "grid needs m >= 3");
  const std::int64_t M = static_cast<std::int64_t>(m) * m + 1;
  std::vector<DualCell> cells;
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a)
      cells.push_back({a + m * b, covering_degree(q, {ratio(2 * a + 1, 2 * m),
                                                      ratio(2 * b + 1, 2 * m)})});
  const auto nu = nu_numbering(cells, M);
  std::vector<ProductCell> out;
  for (int b = 0; b < m; ++b)
    for (int a = 0; a < m; ++a) {
      ProductCell sq{2, 0, {}, {}};
      for (std::size_t idx = 0; idx < 4; ++idx) {
        const int ca = (a - 1 + static_cast<int>(idx & 1) + m) % m;
        const int cb = (b - 1 + static_cast<int>(idx >> 1) + m) % m;
        sq.ids.push_back(ca + m * cb);
        sq.nu.push_back(nu[static_cast<std::size_t>(ca + m * cb)]);
      }
      out.push_back(std::move(sq));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Folner sets and Cayley balls in Z^D

template <std::size_t D>
using LatticePoint = std::array<long, D>;

template <std::size_t D>
using LatticeSet = std::set<LatticePoint<D>>;

template <std::size_t D>
LatticeSet<D> translate(const LatticeSet<D>& phi, const LatticePoint<D>& g) {
  LatticeSet<D> out;
  for (auto p : phi) {
    for (std::size_t i = 0; i < D; ++i) p[i] += g[i];
    out.insert(p);
  }
  return out;
}

/// |g Phi Δ Phi| / |Phi|.
template <std::size_t D>
Rational folner_ratio(const LatticeSet<D>& phi, const LatticePoint<D>& g) {
  if (phi.empty()) throw Error(ErrorCode::EmptySet, "Folner set must be nonempty");
  const auto moved = translate(phi, g);
  std::size_t common = 0;
  for (const auto& p : moved) common += phi.count(p);
  const std::size_t sym = moved.size() + phi.size() - 2 * common;
  Rational r(Integer(static_cast<unsigned long>(sym)),
             Integer(static_cast<unsigned long>(phi.size())));
  r.canonicalize();
  return r;
}

/// [0, L)^2 ∩ Z^2.
inline LatticeSet<2> folner_box(long L) {
  LatticeSet<2> box;
  for (long i = 0; i < L; ++i)
    for (long j = 0; j < L; ++j) box.insert({i, j});
  return box;
}

/// Elements of word length <= T. Generators are closed under inverses by
/// the caller's choice; the ball only walks the listed steps.
template <std::size_t D>
LatticeSet<D> cayley_ball(std::span<const LatticePoint<D>> generators, int T) {
  LatticeSet<D> ball{LatticePoint<D>{}};
  std::vector<LatticePoint<D>> frontier{LatticePoint<D>{}};
  for (int step = 0; step < T; ++step) {
    std::vector<LatticePoint<D>> next;
    for (const auto& p : frontier)
      for (const auto& g : generators) {
        auto q = p;
        for (std::size_t i = 0; i < D; ++i) q[i] += g[i];
        if (ball.insert(q).second) next.push_back(q);
      }
    frontier = std::move(next);
  }
  return ball;
}

/// {±e1, ±e2}: translates of the unit square sharing an edge with it.
inline std::vector<LatticePoint<2>> facet_generators() {
  return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
}

/// Every g != 0 whose translate of the closed unit square meets it.
inline std::vector<LatticePoint<2>> closed_adjacency_generators() {
  std::vector<LatticePoint<2>> g;
  for (long i = -1; i <= 1; ++i)
    for (long j = -1; j <= 1; ++j)
      if (i || j) g.push_back({i, j});
  return g;
}

/// Whether the closed unit square F lies in the interior of the union of
/// g F over the Cayley ball of radius T. A point p is interior to a union
/// of closed lattice squares iff every lattice square containing p belongs
/// to it; the corners, edge midpoints and center of F cover all cases.
inline bool check_neighborhood(int T, std::span<const LatticePoint<2>> generators) {
  if (T < 0) return false;
  const auto ball = cayley_ball<2>(generators, T);
  const Rational half(1, 2);
  for (const Rational& px : {Rational(0), half, Rational(1)})
    for (const Rational& py : {Rational(0), half, Rational(1)}) {
      auto candidates = [](const Rational& c) {
        std::vector<long> out{floor_of(c).get_si()};
        if (is_integer(c)) out.push_back(floor_of(c).get_si() - 1);
        return out;
      };
      for (long gx : candidates(px))
        for (long gy : candidates(py))
          if (!ball.count({gx, gy})) return false;
    }
  return true;
}

inline bool check_neighborhood(int T) {
  const auto gens = closed_adjacency_generators();
  return check_neighborhood(T, gens);
}

}  // namespace flatfoliate
