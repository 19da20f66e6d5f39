#pragma once

// Exact spherical geometry on rays: a point of S^{n-1} is a nonzero vector
// modulo positive scaling, stored as its primitive integer representative.
// Every predicate here is a determinant sign over the integers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "flatfoliate/error.hpp"
#include "flatfoliate/rational.hpp"

namespace flatfoliate {

/// Primitive integer coordinates with the same direction as `v`.
inline std::vector<Integer> canonical_coords(std::span<const Rational> v) {
  Integer lcm_den = 1;
  bool any_nonzero = false;
  for (const auto& c : v) {
    if (c != 0) any_nonzero = true;
    mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den_mpz_t());
  }
  if (!any_nonzero) throw Error(ErrorCode::ZeroVector, "all coordinates are 0");
  std::vector<Integer> out;
  out.reserve(v.size());
  Integer g = 0;
  for (const auto& c : v) {
    Integer scaled = c.get_num() * (lcm_den / c.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), scaled.get_mpz_t());
    out.push_back(std::move(scaled));
  }
  for (auto& c : out) c /= g;  // g > 0, so the direction is kept
  return out;
}

class RayVector {
 public:
  RayVector() = default;

  explicit RayVector(std::span<const Rational> coords)
      : coords_(canonical_coords(coords)) {
    if (coords_.size() < 2)
      throw Error(ErrorCode::DimensionMismatch, "rays need dimension >= 2");
  }

  RayVector(std::initializer_list<Rational> coords)
      : RayVector(std::span<const Rational>(coords.begin(), coords.size())) {}

  static RayVector from_integers(std::span<const Integer> coords) {
    std::vector<Rational> q(coords.begin(), coords.end());
    return RayVector(q);
  }

  std::size_t dim() const noexcept { return coords_.size(); }
  const std::vector<Integer>& coords() const noexcept { return coords_; }
  const Integer& operator[](std::size_t i) const { return coords_[i]; }

  std::vector<Rational> as_rationals() const {
    return {coords_.begin(), coords_.end()};
  }

  RayVector negated() const {
    RayVector r = *this;
    for (auto& c : r.coords_) c = -c;
    return r;
  }

  std::string str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < coords_.size(); ++i)
      os << (i ? ", " : "") << coords_[i].get_str();
    os << ')';
    return os.str();
  }

  // Equal iff one is a positive multiple of the other.
  friend bool operator==(const RayVector&, const RayVector&) = default;
  friend auto operator<=>(const RayVector& a, const RayVector& b) {
    return a.coords_ <=> b.coords_;
  }

 private:
  std::vector<Integer> coords_;
};

inline std::ostream& operator<<(std::ostream& os, const RayVector& r) {
  return os << r.str();
}

/// Identity: rays are stored canonically already.
inline RayVector canonicalize(const RayVector& v) { return v; }

/// Determinant of a square integer matrix (row-major), by Bareiss elimination.
inline Integer determinant(std::vector<Integer> m, std::size_t n) {
  if (n == 0) return 1;
  int swaps = 0;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k * n + k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p * n + k] == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
      ++swaps;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j];
        mpz_divexact(m[i * n + j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m[i * n + k] = 0;
    }
    prev = m[k * n + k];
  }
  Integer d = m[n * n - 1];
  return swaps % 2 ? Integer(-d) : d;
}

namespace detail {

inline std::size_t common_dim(std::span<const RayVector> vs) {
  if (vs.empty()) throw Error(ErrorCode::DimensionMismatch, "empty vector list");
  const std::size_t n = vs.front().dim();
  for (const auto& v : vs)
    if (v.dim() != n)
      throw Error(ErrorCode::DimensionMismatch, "mixed vector dimensions");
  return n;
}

// det of the matrix whose columns are vs[idx[0]], vs[idx[1]], ...
inline Integer column_det(std::span<const RayVector> vs,
                          std::span<const std::size_t> idx) {
  const std::size_t n = idx.size();
  if (n == 2) {
    const auto& a = vs[idx[0]];
    const auto& b = vs[idx[1]];
    return a[0] * b[1] - a[1] * b[0];
  }
  std::vector<Integer> m(n * n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r) m[r * n + c] = vs[idx[c]][r];
  return determinant(std::move(m), n);
}

}  // namespace detail

/// Sign of det[vs_1 | ... | vs_n]; invariant under positive column scaling.
inline int orientation_sign(std::span<const RayVector> vs) {
  const std::size_t n = detail::common_dim(vs);
  if (vs.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                "orientation_sign needs exactly n vectors in R^n");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return sign(detail::column_det(vs, idx));
}

/// lambda_i = (-1)^i det(tuple without entry i). These satisfy
/// sum_i lambda_i p_i = 0, so they are unnormalized barycentric
/// coordinates of the origin.
inline std::vector<Integer> signed_cofactors(std::span<const RayVector> tuple) {
  const std::size_t n = detail::common_dim(tuple);
  if (tuple.size() != n + 1)
    throw Error(ErrorCode::DimensionMismatch, "need n+1 rays in R^n");
  std::vector<Integer> lambda(n + 1);
  std::vector<std::size_t> idx(n);
  for (std::size_t drop = 0; drop <= n; ++drop) {
    for (std::size_t i = 0, j = 0; i <= n; ++i)
      if (i != drop) idx[j++] = i;
    Integer d = detail::column_det(tuple, idx);
    lambda[drop] = drop % 2 ? Integer(-d) : d;
  }
  return lambda;
}

enum class SpanVerdict { Interior, Exterior, Degenerate };

inline const char* to_string(SpanVerdict v) {
  switch (v) {
    case SpanVerdict::Interior: return "Interior";
    case SpanVerdict::Exterior: return "Exterior";
    case SpanVerdict::Degenerate: return "Degenerate";
  }
  return "?";
}

inline SpanVerdict verdict_from_cofactors(std::span<const Integer> lambda) {
  const int s0 = sign(lambda[0]);
  bool mixed = false;
  for (const auto& l : lambda) {
    const int s = sign(l);
    if (s == 0) return SpanVerdict::Degenerate;
    if (s != s0) mixed = true;
  }
  return mixed ? SpanVerdict::Exterior : SpanVerdict::Interior;
}

/// Whether the origin lies in the interior of the convex hull of the
/// normalized rays.
inline SpanVerdict spans_origin(std::span<const RayVector> tuple) {
  return verdict_from_cofactors(signed_cofactors(tuple));
}

inline bool has_repeated_ray(std::span<const RayVector> tuple) {
  for (std::size_t i = 0; i < tuple.size(); ++i)
    for (std::size_t j = i + 1; j < tuple.size(); ++j)
      if (tuple[i] == tuple[j]) return true;
  return false;
}

/// Degree of the geodesic filling of the boundary of the n-simplex spanned
/// by the ordered tuple: the common cofactor sign when the tuple spans the
/// origin, 0 otherwise. This equals sign det[p_2-p_1, ..., p_{n+1}-p_1] on
/// normalized representatives, since that determinant is sum_i lambda_i.
inline int configuration_index(std::span<const RayVector> tuple) {
  const auto lambda = signed_cofactors(tuple);
  if (has_repeated_ray(tuple)) return 0;
  switch (verdict_from_cofactors(lambda)) {
    case SpanVerdict::Interior: return sign(lambda[0]);
    case SpanVerdict::Exterior: return 0;
    case SpanVerdict::Degenerate: break;
  }
  std::ostringstream os;
  os << "vanishing cofactor in tuple";
  for (std::size_t i = 0; i < lambda.size(); ++i)
    if (lambda[i] == 0) os << " [det without entry " << i << " = 0]";
  for (const auto& p : tuple) os << ' ' << p;
  throw Error(ErrorCode::DegenerateConfiguration, os.str());
}

namespace detail {

// Direction modulo sign, used to detect parallel pairs in the plane.
inline std::pair<Integer, Integer> line_key(const RayVector& v) {
  if (v[0] < 0 || (v[0] == 0 && v[1] < 0)) return {-v[0], -v[1]};
  return {v[0], v[1]};
}

}  // namespace detail

/// Every n-subset of the list is linearly independent. This rules out
/// coinciding and antipodal pairs and keeps the origin off every affine
/// hull of n points.
inline bool is_antipodally_generic(std::span<const RayVector> points) {
  if (points.empty()) return true;
  const std::size_t n = detail::common_dim(points);
  if (points.size() < n) return true;
  if (n == 2) {
    // Two plane rays are dependent iff they span the same line.
    std::vector<std::pair<Integer, Integer>> keys;
    keys.reserve(points.size());
    for (const auto& p : points) keys.push_back(detail::line_key(p));
    std::sort(keys.begin(), keys.end());
    return std::adjacent_find(keys.begin(), keys.end()) == keys.end();
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  const std::size_t m = points.size();
  while (true) {
    if (detail::column_det(points, idx) == 0) return false;
    // next combination in lexicographic order
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == m - n + (i - 1)) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
}

namespace detail {

// Integer to double after dividing both by the same power of two.
inline std::pair<double, double> scaled_pair(const Integer& a, const Integer& b) {
  const std::size_t bits = std::max(mpz_sizeinbase(a.get_mpz_t(), 2),
                                    mpz_sizeinbase(b.get_mpz_t(), 2));
  if (bits <= 900) return {a.get_d(), b.get_d()};
  const mp_bitcnt_t shift = bits - 900;
  Integer sa, sb;
  mpz_tdiv_q_2exp(sa.get_mpz_t(), a.get_mpz_t(), shift);
  mpz_tdiv_q_2exp(sb.get_mpz_t(), b.get_mpz_t(), shift);
  return {sa.get_d(), sb.get_d()};
}

}  // namespace detail

/// Winding number about O of the closed loop of minor arcs through the
/// points, evaluated in floating point. Oracle only.
inline int winding_degree_2d(std::span<const RayVector> loop) {
  if (loop.size() < 3)
    throw Error(ErrorCode::DimensionMismatch, "loop needs at least 3 points");
  for (const auto& p : loop)
    if (p.dim() != 2)
      throw Error(ErrorCode::DimensionMismatch, "winding_degree_2d is planar");
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto& a = loop[i];
    const auto& b = loop[(i + 1) % loop.size()];
    Integer cross = a[0] * b[1] - a[1] * b[0];
    Integer dot = a[0] * b[0] + a[1] * b[1];
    if (cross == 0 && dot < 0)
      throw Error(ErrorCode::AntipodalPair,
                  "consecutive points " + a.str() + " and " + b.str());
    auto [c, d] = detail::scaled_pair(cross, dot);
    total += std::atan2(c, d);
  }
  const double turns = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6)
    throw Error(ErrorCode::DegenerateConfiguration,
                "winding sum is not within 1e-6 of an integer");
  return static_cast<int>(rounded);
}

/// Signed count of the faces of the boundary simplex whose open positive
/// cone contains the probe ray. Face i (entry i removed) carries the
/// boundary sign (-1)^i; its local degree is that sign times sign det(face).
inline int radial_filling_degree(std::span<const RayVector> tuple,
                                 const RayVector& probe) {
  const std::size_t n = detail::common_dim(tuple);
  if (tuple.size() != n + 1 || probe.dim() != n)
    throw Error(ErrorCode::DimensionMismatch, "need n+1 rays and a probe in R^n");
  int degree = 0;
  std::vector<RayVector> cols(n);
  for (std::size_t drop = 0; drop <= n; ++drop) {
    for (std::size_t i = 0, j = 0; i <= n; ++i)
      if (i != drop) cols[j++] = tuple[i];
    const int face_sign = orientation_sign(cols);
    if (face_sign == 0)
      throw Error(ErrorCode::DegenerateConfiguration,
                  "boundary face " + std::to_string(drop) + " is degenerate");
    // Cramer: probe = sum_j mu_j cols_j, sign(mu_j) = sign(det_j) * face_sign.
    bool inside = true, on_boundary = false;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<RayVector> replaced = cols;
      replaced[j] = probe;
      const int mu = orientation_sign(replaced) * face_sign;
      if (mu < 0) inside = false;
      if (mu == 0) on_boundary = true;
    }
    if (!inside) continue;
    if (on_boundary)
      throw Error(ErrorCode::NonGenericProbe,
                  "probe " + probe.str() + " meets a codimension-2 face");
    degree += (drop % 2 ? -1 : 1) * face_sign;
  }
  return degree;
}

/// Probe schedule (1,1,...,1), (1,2,4,...), (1,3,9,...), ...
inline RayVector scheduled_probe(std::size_t n, int attempt) {
  std::vector<Rational> c(n);
  Integer base = attempt + 1, power = 1;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = power;
    power *= base;
  }
  return RayVector(c);
}

inline int radial_filling_degree(std::span<const RayVector> tuple,
                                 int retry_budget = 32) {
  const std::size_t n = detail::common_dim(tuple);
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    try {
      return radial_filling_degree(tuple, scheduled_probe(n, attempt));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonGenericProbe) throw;
    }
  }
  throw Error(ErrorCode::NonGenericProbe, "probe schedule exhausted");
}

}  // namespace flatfoliate
