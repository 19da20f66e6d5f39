#pragma once

// Triangulations without new vertices: staircase triangulations of
// products of simplices, symmetric (Kuhn) triangulations of marked cubes,
// and the product cells Cube^k x Delta^s of a dual complex.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flatfoliate/error.hpp"
#include "flatfoliate/exactgeom.hpp"
#include "flatfoliate/rational.hpp"

namespace flatfoliate {

using Label = std::vector<int>;
using Simplex = std::vector<Label>;  // sorted, no repeats

inline std::string to_string(const Label& l) {
  std::string s = "(";
  for (std::size_t i = 0; i < l.size(); ++i) s += (i ? "," : "") + std::to_string(l[i]);
  return s + ")";
}

struct VertexInfo {
  std::optional<std::vector<Rational>> coords;
  std::optional<std::int64_t> nu;
  friend bool operator==(const VertexInfo&, const VertexInfo&) = default;
};

/// Vertices with optional data plus maximal simplices. Comparison looks at
/// the combinatorics only.
class SimplicialComplex {
 public:
  std::map<Label, VertexInfo> vertices;
  std::vector<Simplex> simplices;

  void add_vertex(const Label& v, VertexInfo info = {}) { vertices.emplace(v, std::move(info)); }

  void add_simplex(Simplex s) {
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error(ErrorCode::DegenerateConfiguration, "simplex lists a vertex twice");
    for (const auto& v : s) vertices.try_emplace(v);
    simplices.push_back(std::move(s));
  }

  void normalize() {
    std::sort(simplices.begin(), simplices.end());
    simplices.erase(std::unique(simplices.begin(), simplices.end()), simplices.end());
  }

  int dimension() const {
    int d = -1;
    for (const auto& s : simplices) d = std::max(d, static_cast<int>(s.size()) - 1);
    return d;
  }

  std::set<Label> vertex_set() const {
    std::set<Label> out;
    for (const auto& [v, info] : vertices) out.insert(v);
    return out;
  }

  /// Every face of every maximal simplex, once.
  std::set<Simplex> all_faces() const {
    std::set<Simplex> faces;
    for (const auto& s : simplices) {
      const std::size_t n = s.size();
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        Simplex f;
        for (std::size_t i = 0; i < n; ++i)
          if (mask >> i & 1) f.push_back(s[i]);
        faces.insert(std::move(f));
      }
    }
    return faces;
  }

  std::int64_t euler_characteristic() const {
    std::int64_t chi = 0;
    for (const auto& f : all_faces()) chi += (f.size() % 2 == 1) ? 1 : -1;
    return chi;
  }

  /// Each codimension-one face lies in exactly two maximal simplices and all
  /// maximal simplices have the same dimension.
  bool is_closed_pseudomanifold() const {
    const int d = dimension();
    std::map<Simplex, int> ridges;
    for (const auto& s : simplices) {
      if (static_cast<int>(s.size()) != d + 1) return false;
      for (std::size_t i = 0; i < s.size(); ++i) {
        Simplex r = s;
        r.erase(r.begin() + static_cast<long>(i));
        ++ridges[r];
      }
    }
    return std::all_of(ridges.begin(), ridges.end(), [](const auto& e) { return e.second == 2; });
  }

  friend bool operator==(const SimplicialComplex& a, const SimplicialComplex& b) {
    auto x = a, y = b;
    x.normalize();
    y.normalize();
    return x.vertex_set() == y.vertex_set() && x.simplices == y.simplices;
  }
};

// ---------------------------------------------------------------------------
// Cell shapes and faces

/// Cube^c x Delta^{d_1} x ... x Delta^{d_r}. A vertex label lists the c cube
/// bits followed by one vertex index per simplex factor.
struct CellShape {
  int cube_dim = 0;
  std::vector<int> simplex_dims;

  int dimension() const {
    return cube_dim + std::accumulate(simplex_dims.begin(), simplex_dims.end(), 0);
  }

  /// Volume of the standard realization: unit cube times corner simplices.
  Rational volume() const {
    Rational v = 1;
    for (int d : simplex_dims) v /= Rational(factorial(d));
    return v;
  }

  std::vector<Label> vertices() const {
    std::vector<Label> out{Label{}};
    auto extend = [&](int choices) {
      std::vector<Label> next;
      for (const auto& l : out)
        for (int c = 0; c < choices; ++c) {
          auto m = l;
          m.push_back(c);
          next.push_back(std::move(m));
        }
      out = std::move(next);
    };
    for (int i = 0; i < cube_dim; ++i) extend(2);
    for (int d : simplex_dims) extend(d + 1);
    return out;
  }

  bool is_vertex(const Label& l) const {
    if (l.size() != static_cast<std::size_t>(cube_dim) + simplex_dims.size()) return false;
    for (int i = 0; i < cube_dim; ++i)
      if (l[i] != 0 && l[i] != 1) return false;
    for (std::size_t f = 0; f < simplex_dims.size(); ++f)
      if (l[cube_dim + f] < 0 || l[cube_dim + f] > simplex_dims[f]) return false;
    return true;
  }

  /// Cube bits as coordinates; vertex j of Delta^d at e_j (j >= 1) or 0.
  std::vector<Rational> realize(const Label& l) const {
    std::vector<Rational> p;
    for (int i = 0; i < cube_dim; ++i) p.emplace_back(l[i]);
    for (std::size_t f = 0; f < simplex_dims.size(); ++f)
      for (int j = 1; j <= simplex_dims[f]; ++j) p.emplace_back(l[cube_dim + f] == j ? 1 : 0);
    return p;
  }

  /// Whether the labels all lie in one facet of the cell.
  bool on_boundary(std::span<const Label> ls) const {
    for (int i = 0; i < cube_dim; ++i)
      if (std::all_of(ls.begin(), ls.end(), [&](const Label& l) { return l[i] == ls[0][i]; }))
        return true;
    for (std::size_t f = 0; f < simplex_dims.size(); ++f) {
      if (simplex_dims[f] == 0) continue;
      std::set<int> used;
      for (const auto& l : ls) used.insert(l[cube_dim + f]);
      if (static_cast<int>(used.size()) <= simplex_dims[f]) return true;
    }
    return false;
  }
};

/// A face: each cube coordinate fixed to 0 or 1 or left free (-1), and a
/// nonempty vertex subset of every simplex factor.
struct FaceSpec {
  std::vector<int> cube;
  std::vector<std::vector<int>> simplex_vertices;

  int dimension() const {
    int d = static_cast<int>(std::count(cube.begin(), cube.end(), -1));
    for (const auto& s : simplex_vertices) d += static_cast<int>(s.size()) - 1;
    return d;
  }
};

inline void validate_face(const CellShape& shape, const FaceSpec& face) {
  if (face.cube.size() != static_cast<std::size_t>(shape.cube_dim) ||
      face.simplex_vertices.size() != shape.simplex_dims.size())
    throw Error(ErrorCode::NotAFace, "face does not match the cell shape");
  for (int c : face.cube)
    if (c < -1 || c > 1) throw Error(ErrorCode::NotAFace, "cube coordinate must be -1, 0 or 1");
  for (std::size_t f = 0; f < face.simplex_vertices.size(); ++f) {
    const auto& s = face.simplex_vertices[f];
    if (s.empty()) throw Error(ErrorCode::NotAFace, "empty simplex face");
    if (!std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error(ErrorCode::NotAFace, "simplex face vertices must be sorted and distinct");
    if (s.front() < 0 || s.back() > shape.simplex_dims[f])
      throw Error(ErrorCode::NotAFace, "simplex face vertex out of range");
  }
}

inline bool face_contains(const CellShape& shape, const FaceSpec& face, const Label& l) {
  for (int i = 0; i < shape.cube_dim; ++i)
    if (face.cube[i] != -1 && l[i] != face.cube[i]) return false;
  for (std::size_t f = 0; f < shape.simplex_dims.size(); ++f) {
    const auto& s = face.simplex_vertices[f];
    if (!std::binary_search(s.begin(), s.end(), l[shape.cube_dim + f])) return false;
  }
  return true;
}

/// The smallest face containing all the labels, if their set is exactly
/// the vertex set of that face.
inline std::optional<FaceSpec> face_spanned_by(const CellShape& shape, std::span<const Label> ls) {
  if (ls.empty()) return std::nullopt;
  FaceSpec face;
  for (int i = 0; i < shape.cube_dim; ++i) {
    const bool constant =
        std::all_of(ls.begin(), ls.end(), [&](const Label& l) { return l[i] == ls[0][i]; });
    face.cube.push_back(constant ? ls[0][i] : -1);
  }
  for (std::size_t f = 0; f < shape.simplex_dims.size(); ++f) {
    std::set<int> used;
    for (const auto& l : ls) used.insert(l[shape.cube_dim + f]);
    face.simplex_vertices.emplace_back(used.begin(), used.end());
  }
  std::size_t count = 0;
  for (const auto& v : shape.vertices()) count += face_contains(shape, face, v);
  const std::set<Label> distinct(ls.begin(), ls.end());
  if (distinct.size() != count) return std::nullopt;
  return face;
}

/// The triangulation induced on a face: intersections of maximal simplices
/// with the face that have full face dimension.
inline SimplicialComplex restrict_to_face(const SimplicialComplex& tri, const CellShape& shape,
                                          const FaceSpec& face) {
  validate_face(shape, face);
  const std::size_t want = static_cast<std::size_t>(face.dimension()) + 1;
  SimplicialComplex out;
  for (const auto& [v, info] : tri.vertices)
    if (face_contains(shape, face, v)) out.add_vertex(v, info);
  for (const auto& s : tri.simplices) {
    Simplex r;
    for (const auto& v : s)
      if (face_contains(shape, face, v)) r.push_back(v);
    if (r.size() == want) out.add_simplex(std::move(r));
  }
  out.normalize();
  return out;
}

// ---------------------------------------------------------------------------
// Staircase and Kuhn

/// Monotone lattice paths from (0, 0) to (k, m), as point sequences.
inline std::vector<std::vector<std::pair<int, int>>> monotone_paths(int k, int m) {
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::pair<int, int>> path{{0, 0}};
  auto walk = [&](auto&& self, int i, int j) -> void {
    if (i == k && j == m) {
      out.push_back(path);
      return;
    }
    if (i < k) {
      path.emplace_back(i + 1, j);
      self(self, i + 1, j);
      path.pop_back();
    }
    if (j < m) {
      path.emplace_back(i, j + 1);
      self(self, i, j + 1);
      path.pop_back();
    }
  };
  walk(walk, 0, 0);
  return out;
}

/// Delta^k x Delta^m with vertices labeled (i, j), one simplex per monotone path.
inline SimplicialComplex staircase_triangulation(int k, int m) {
  if (k < 0 || m < 0) throw Error(ErrorCode::InvalidCounts, "simplex dimensions must be >= 0");
  SimplicialComplex out;
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= m; ++j) out.add_vertex({i, j});
  for (const auto& path : monotone_paths(k, m)) {
    Simplex s;
    for (auto [i, j] : path) s.push_back({i, j});
    out.add_simplex(std::move(s));
  }
  out.normalize();
  return out;
}

inline CellShape staircase_shape(int k, int m) { return {0, {k, m}}; }

inline bool is_antipodal(const Label& a, const Label& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((a[i] != 0 && a[i] != 1) || a[i] + b[i] != 1) return false;
  return true;
}

/// Chains V0 = c_0, c_1, ..., c_n = V1 flipping one coordinate per step,
/// one per permutation of the coordinates.
inline std::vector<std::vector<Label>> kuhn_chains(const Label& v0) {
  const int n = static_cast<int>(v0.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<Label>> chains;
  do {
    std::vector<Label> chain{v0};
    for (int coord : order) {
      Label next = chain.back();
      next[coord] = 1 - next[coord];
      chain.push_back(std::move(next));
    }
    chains.push_back(std::move(chain));
  } while (std::next_permutation(order.begin(), order.end()));
  return chains;
}

/// Symmetric triangulation of Cube^n with the marked pair sent to 0...0 and
/// 1...1: the n! simplices x_{j1} <= ... <= x_{jn} after reflection.
inline SimplicialComplex kuhn_triangulation(int n, const Label& v0, const Label& v1) {
  if (n < 0) throw Error(ErrorCode::InvalidCounts, "cube dimension must be >= 0");
  if (static_cast<int>(v0.size()) != n || !is_antipodal(v0, v1))
    throw Error(ErrorCode::NotAntipodal, "marked vertices " + to_string(v0) + " and " +
                                             to_string(v1) + " are not antipodal");
  SimplicialComplex out;
  for (const auto& v : CellShape{n, {}}.vertices()) out.add_vertex(v);
  for (auto& chain : kuhn_chains(v0)) out.add_simplex(std::move(chain));
  out.normalize();
  return out;
}

inline SimplicialComplex kuhn_triangulation(int n) {
  return kuhn_triangulation(n, Label(n, 0), Label(n, 1));
}

// Face relabelings used by the coherence checks.
namespace detail {

inline SimplicialComplex relabel(const SimplicialComplex& tri, auto&& map) {
  SimplicialComplex out;
  for (const auto& [v, info] : tri.vertices) out.add_vertex(map(v), info);
  for (const auto& s : tri.simplices) {
    Simplex t;
    for (const auto& v : s) t.push_back(map(v));
    out.add_simplex(std::move(t));
  }
  out.normalize();
  return out;
}

}  // namespace detail

/// Staircase triangulation of F1 x F2 with the orders inherited from Delta^k
/// and Delta^m, written in the labels of Delta^k x Delta^m.
inline SimplicialComplex staircase_of_face(const FaceSpec& face) {
  const auto& f1 = face.simplex_vertices.at(0);
  const auto& f2 = face.simplex_vertices.at(1);
  auto base = staircase_triangulation(static_cast<int>(f1.size()) - 1,
                                      static_cast<int>(f2.size()) - 1);
  return detail::relabel(base, [&](const Label& l) { return Label{f1[l[0]], f2[l[1]]}; });
}

/// Kuhn triangulation of a cube face with the marks closest to v0 and v1.
inline SimplicialComplex kuhn_of_face(const Label& v0, const Label& v1, const FaceSpec& face) {
  std::vector<int> free;
  for (std::size_t i = 0; i < face.cube.size(); ++i)
    if (face.cube[i] == -1) free.push_back(static_cast<int>(i));
  Label w0, w1;
  for (int i : free) {
    w0.push_back(v0[i]);
    w1.push_back(v1[i]);
  }
  auto base = kuhn_triangulation(static_cast<int>(free.size()), w0, w1);
  return detail::relabel(base, [&](const Label& l) {
    Label full(face.cube.begin(), face.cube.end());
    for (std::size_t t = 0; t < free.size(); ++t) full[free[t]] = l[t];
    return full;
  });
}

// ---------------------------------------------------------------------------
// Realization audit

namespace detail {

// Gaussian elimination over Q; the columns are the matrix columns.
inline Rational rational_determinant(std::vector<std::vector<Rational>> cols) {
  const std::size_t n = cols.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && cols[pivot][c] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != c) {
      std::swap(cols[pivot], cols[c]);
      det = -det;
    }
    det *= cols[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Rational f = cols[r][c] / cols[c][c];
      if (f == 0) continue;
      for (std::size_t t = c; t < n; ++t) cols[r][t] -= f * cols[c][t];
    }
  }
  return det;
}

}  // namespace detail

struct RealizationAudit {
  Rational total_volume;
  Rational expected_volume;
  bool full_dimensional = true;
  bool ridges_ok = true;  // interior ridges separate their two simplices

  bool ok() const { return full_dimensional && ridges_ok && total_volume == expected_volume; }
};

/// Exact volumes and a ridge test on the standard realization. Together
/// they show the simplices tile the cell: every ridge is on the boundary or
/// shared by exactly two simplices lying on opposite sides of it.
inline RealizationAudit audit_realization(const SimplicialComplex& tri, const CellShape& shape) {
  RealizationAudit a;
  a.expected_volume = shape.volume();
  a.total_volume = 0;
  const int d = shape.dimension();
  const Rational d_fact(factorial(d));

  auto side = [&](const Simplex& ridge, const Label& apex) {
    const auto base = shape.realize(ridge[0]);
    std::vector<std::vector<Rational>> cols;
    for (std::size_t i = 1; i < ridge.size(); ++i) {
      auto p = shape.realize(ridge[i]);
      for (int t = 0; t < d; ++t) p[t] -= base[t];
      cols.push_back(std::move(p));
    }
    auto p = shape.realize(apex);
    for (int t = 0; t < d; ++t) p[t] -= base[t];
    cols.push_back(std::move(p));
    return sign(detail::rational_determinant(std::move(cols)));
  };

  std::map<Simplex, std::vector<std::pair<std::size_t, Label>>> ridges;
  for (std::size_t idx = 0; idx < tri.simplices.size(); ++idx) {
    const auto& s = tri.simplices[idx];
    if (static_cast<int>(s.size()) != d + 1) {
      a.full_dimensional = false;
      continue;
    }
    if (d == 0) {
      a.total_volume += 1;
      continue;
    }
    const auto base = shape.realize(s[0]);
    std::vector<std::vector<Rational>> cols;
    for (std::size_t i = 1; i < s.size(); ++i) {
      auto p = shape.realize(s[i]);
      for (int t = 0; t < d; ++t) p[t] -= base[t];
      cols.push_back(std::move(p));
    }
    const Rational det = detail::rational_determinant(std::move(cols));
    if (det == 0) a.full_dimensional = false;
    a.total_volume += abs(det) / d_fact;
    for (std::size_t i = 0; i < s.size(); ++i) {
      Simplex r = s;
      r.erase(r.begin() + static_cast<long>(i));
      ridges[r].emplace_back(idx, s[i]);
    }
  }
  for (const auto& [ridge, users] : ridges) {
    if (users.size() == 1) {
      if (!shape.on_boundary(ridge)) a.ridges_ok = false;
    } else if (users.size() == 2) {
      if (side(ridge, users[0].second) * side(ridge, users[1].second) >= 0) a.ridges_ok = false;
    } else {
      a.ridges_ok = false;
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// nu-numbering and product cells

struct DualCell {
  int cell_index = 0;       // i: the cell of C containing d
  std::int64_t degree = 0;  // deg(Q, d)
};

/// nu(d) = i + M deg(Q, d). M must exceed the number of cells of C, which
/// defaults to one more than the largest index seen.
inline std::vector<std::int64_t> nu_numbering(std::span<const DualCell> cells, std::int64_t M,
                                              std::optional<std::int64_t> c_cell_count = {}) {
  std::int64_t count = 0;
  for (const auto& c : cells) {
    if (c.cell_index < 0) throw Error(ErrorCode::InvalidCounts, "cell index must be >= 0");
    count = std::max<std::int64_t>(count, c.cell_index + 1);
  }
  if (c_cell_count) count = std::max(count, *c_cell_count);
  if (M <= count)
    throw Error(ErrorCode::MTooSmall,
                "M = " + std::to_string(M) + " must exceed the cell count " + std::to_string(count));
  std::vector<std::int64_t> nu;
  nu.reserve(cells.size());
  for (const auto& c : cells) nu.push_back(c.cell_index + M * c.degree);
  return nu;
}

/// Cube^k x Delta^s with nu on its vertices. Local vertex index of the label
/// (b_1, ..., b_k, j) is j 2^k + sum b_i 2^(i-1); `ids` names the vertices in
/// an ambient complex and defaults to the local index.
struct ProductCell {
  int cube_dim = 0;
  int simplex_dim = 0;
  std::vector<std::int64_t> nu;
  std::vector<std::int64_t> ids;

  CellShape shape() const { return {cube_dim, {simplex_dim}}; }
  std::size_t vertex_count() const {
    return (std::size_t{1} << cube_dim) * static_cast<std::size_t>(simplex_dim + 1);
  }
  std::size_t local_index(const Label& l) const {
    std::size_t idx = static_cast<std::size_t>(l[cube_dim]) << cube_dim;
    for (int i = 0; i < cube_dim; ++i) idx |= static_cast<std::size_t>(l[i]) << i;
    return idx;
  }
  Label local_label(std::size_t idx) const {
    Label l;
    for (int i = 0; i < cube_dim; ++i) l.push_back(static_cast<int>(idx >> i & 1));
    l.push_back(static_cast<int>(idx >> cube_dim));
    return l;
  }
  std::int64_t nu_at(const Label& l) const { return nu.at(local_index(l)); }
  std::int64_t id_at(const Label& l) const {
    return ids.empty() ? static_cast<std::int64_t>(local_index(l)) : ids.at(local_index(l));
  }

  void validate() const {
    if (cube_dim < 0 || simplex_dim < 0)
      throw Error(ErrorCode::InvalidCounts, "cell dimensions must be >= 0");
    if (nu.size() != vertex_count())
      throw Error(ErrorCode::InvalidCounts, "nu needs one value per vertex");
    if (!ids.empty() && ids.size() != vertex_count())
      throw Error(ErrorCode::InvalidCounts, "ids need one value per vertex");
  }
};

/// Marked pair of the cube factor (nu-min and nu-max) and the ascending-nu
/// order of the simplex factor.
struct ProductCellMarks {
  Label v0, v1;
  std::vector<int> simplex_order;
};

inline ProductCellMarks product_cell_marks(const ProductCell& cell) {
  cell.validate();
  const int k = cell.cube_dim, s = cell.simplex_dim;
  const auto cube_vertices = CellShape{k, {}}.vertices();
  ProductCellMarks marks;
  for (int j = 0; j <= s; ++j) {
    auto nu_of = [&](const Label& b) {
      Label l = b;
      l.push_back(j);
      return cell.nu_at(l);
    };
    const Label* lo = &cube_vertices[0];
    const Label* hi = &cube_vertices[0];
    for (const auto& b : cube_vertices) {
      if (nu_of(b) < nu_of(*lo)) lo = &b;
      if (nu_of(b) > nu_of(*hi)) hi = &b;
    }
    const auto lo_count = std::count_if(cube_vertices.begin(), cube_vertices.end(),
                                        [&](const Label& b) { return nu_of(b) == nu_of(*lo); });
    const auto hi_count = std::count_if(cube_vertices.begin(), cube_vertices.end(),
                                        [&](const Label& b) { return nu_of(b) == nu_of(*hi); });
    if (k > 0 && (lo_count != 1 || hi_count != 1))
      throw Error(ErrorCode::AmbiguousNu, "cubical face over simplex vertex " + std::to_string(j) +
                                              " has no unique nu extremes");
    if (k > 0 && !is_antipodal(*lo, *hi))
      throw Error(ErrorCode::AmbiguousNu, "nu extremes " + to_string(*lo) + ", " + to_string(*hi) +
                                              " are not antipodal");
    if (j == 0) {
      marks.v0 = *lo;
      marks.v1 = *hi;
    } else if (*lo != marks.v0 || *hi != marks.v1) {
      throw Error(ErrorCode::AmbiguousNu, "nu extremes depend on the simplex vertex");
    }
  }
  for (const auto& b : cube_vertices) {
    std::vector<int> order(s + 1);
    std::iota(order.begin(), order.end(), 0);
    auto nu_of = [&](int j) {
      Label l = b;
      l.push_back(j);
      return cell.nu_at(l);
    };
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return nu_of(x) < nu_of(y); });
    for (int t = 0; t < s; ++t)
      if (nu_of(order[t]) == nu_of(order[t + 1]))
        throw Error(ErrorCode::AmbiguousNu, "equal nu on the simplex factor over " + to_string(b));
    if (marks.simplex_order.empty())
      marks.simplex_order = order;
    else if (order != marks.simplex_order)
      throw Error(ErrorCode::AmbiguousNu, "simplex order depends on the cube vertex");
  }
  return marks;
}

/// Kuhn triangulation of the cube factor with the nu-marked pair, then a
/// staircase triangulation of every Delta^k x Delta^s it produces, using
/// the chain order on Delta^k and ascending nu on Delta^s.
inline SimplicialComplex triangulate_product_cell(const ProductCell& cell) {
  const auto marks = product_cell_marks(cell);
  const int k = cell.cube_dim, s = cell.simplex_dim;
  SimplicialComplex out;
  for (std::size_t idx = 0; idx < cell.vertex_count(); ++idx) {
    const Label l = cell.local_label(idx);
    out.add_vertex(l, VertexInfo{std::nullopt, cell.nu_at(l)});
  }
  const auto paths = monotone_paths(k, s);
  for (const auto& chain : kuhn_chains(marks.v0)) {
    for (const auto& path : paths) {
      Simplex simplex;
      std::set<std::int64_t> seen;
      for (auto [i, j] : path) {
        Label l = chain[i];
        l.push_back(marks.simplex_order[j]);
        if (!seen.insert(cell.nu_at(l)).second)
          throw Error(ErrorCode::AmbiguousNu, "equal nu inside a simplex at " + to_string(l));
        simplex.push_back(std::move(l));
      }
      out.add_simplex(std::move(simplex));
    }
  }
  out.normalize();
  return out;
}

/// The product cell a face of `cell` is, with inherited nu and ids.
inline ProductCell face_cell(const ProductCell& cell, const FaceSpec& face) {
  validate_face(cell.shape(), face);
  ProductCell f;
  std::vector<int> free;
  for (int i = 0; i < cell.cube_dim; ++i)
    if (face.cube[i] == -1) free.push_back(i);
  const auto& simplex = face.simplex_vertices[0];
  f.cube_dim = static_cast<int>(free.size());
  f.simplex_dim = static_cast<int>(simplex.size()) - 1;
  f.nu.resize(f.vertex_count());
  f.ids.resize(f.vertex_count());
  for (std::size_t idx = 0; idx < f.vertex_count(); ++idx) {
    const Label fl = f.local_label(idx);
    Label l(face.cube.begin(), face.cube.end());
    for (std::size_t t = 0; t < free.size(); ++t) l[free[t]] = fl[t];
    l.push_back(simplex[fl[f.cube_dim]]);
    f.nu[idx] = cell.nu_at(l);
    f.ids[idx] = cell.id_at(l);
  }
  return f;
}

namespace detail {

inline SimplicialComplex to_global(const SimplicialComplex& local, const ProductCell& cell) {
  return relabel(local, [&](const Label& l) { return Label{static_cast<int>(cell.id_at(l))}; });
}

}  // namespace detail

/// Union of the cell triangulations, after checking that any two cells
/// induce the same triangulation on the face they share.
inline SimplicialComplex assemble_triangulation(std::span<const ProductCell> cells) {
  std::vector<SimplicialComplex> local;
  std::map<std::int64_t, std::int64_t> nu_of_id;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    cell.validate();
    for (std::size_t idx = 0; idx < cell.vertex_count(); ++idx) {
      const Label l = cell.local_label(idx);
      auto [it, fresh] = nu_of_id.emplace(cell.id_at(l), cell.nu_at(l));
      if (!fresh && it->second != cell.nu_at(l))
        throw Error(ErrorCode::FaceMismatch,
                    "vertex " + std::to_string(it->first) + " carries two nu values");
    }
    local.push_back(triangulate_product_cell(cell));
  }

  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      std::map<std::int64_t, Label> in_a, in_b;
      for (std::size_t idx = 0; idx < cells[a].vertex_count(); ++idx) {
        const Label l = cells[a].local_label(idx);
        in_a[cells[a].id_at(l)] = l;
      }
      for (std::size_t idx = 0; idx < cells[b].vertex_count(); ++idx) {
        const Label l = cells[b].local_label(idx);
        in_b[cells[b].id_at(l)] = l;
      }
      std::vector<Label> la, lb;
      std::string ids;
      for (const auto& [id, l] : in_a)
        if (auto it = in_b.find(id); it != in_b.end()) {
          la.push_back(l);
          lb.push_back(it->second);
          ids += (ids.empty() ? "" : ",") + std::to_string(id);
        }
      if (la.empty()) continue;
      auto fa = face_spanned_by(cells[a].shape(), la);
      auto fb = face_spanned_by(cells[b].shape(), lb);
      if (!fa || !fb)
        throw Error(ErrorCode::NotAFace, "cells " + std::to_string(a) + " and " +
                                             std::to_string(b) + " meet in {" + ids +
                                             "}, which is not a common face");
      const auto ra = detail::to_global(restrict_to_face(local[a], cells[a].shape(), *fa), cells[a]);
      const auto rb = detail::to_global(restrict_to_face(local[b], cells[b].shape(), *fb), cells[b]);
      if (!(ra == rb))
        throw Error(ErrorCode::FaceMismatch, "cells " + std::to_string(a) + " and " +
                                                 std::to_string(b) +
                                                 " triangulate their common face {" + ids +
                                                 "} differently");
    }

  SimplicialComplex out;
  for (const auto& [id, nu] : nu_of_id)
    out.add_vertex({static_cast<int>(id)}, VertexInfo{std::nullopt, nu});
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (const auto& s : detail::to_global(local[c], cells[c]).simplices) out.add_simplex(s);
  out.normalize();
  return out;
}

}  // namespace flatfoliate
