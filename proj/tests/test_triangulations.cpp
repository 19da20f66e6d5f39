#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <optional>
#include <vector>

#include <gtest/gtest.h>

#include "flatfoliate/fixtures.hpp"
#include "flatfoliate/triangulations.hpp"

using namespace flatfoliate;

namespace {

// Barycentric coordinates of p in the simplex, or nullopt if degenerate.
std::optional<std::vector<Rational>> barycentric(const CellShape& shape, const Simplex& s,
                                                 const std::vector<Rational>& p) {
  const std::size_t d = p.size();
  std::vector<std::vector<Rational>> a(d + 1, std::vector<Rational>(d + 2));
  for (std::size_t j = 0; j <= d; ++j) {
    const auto v = shape.realize(s[j]);
    for (std::size_t i = 0; i < d; ++i) a[i][j] = v[i];
    a[d][j] = 1;
  }
  for (std::size_t i = 0; i < d; ++i) a[i][d + 1] = p[i];
  a[d][d + 1] = 1;
  for (std::size_t c = 0; c <= d; ++c) {
    std::size_t piv = c;
    while (piv <= d && a[piv][c] == 0) ++piv;
    if (piv > d) return std::nullopt;
    std::swap(a[piv], a[c]);
    for (std::size_t r = 0; r <= d; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t t = c; t <= d + 1; ++t) a[r][t] -= f * a[c][t];
    }
  }
  std::vector<Rational> x(d + 1);
  for (std::size_t i = 0; i <= d; ++i) x[i] = a[i][d + 1] / a[i][i];
  return x;
}

// A random point in the interior of the realized cell.
std::vector<Rational> random_interior_point(fixtures::Rng& rng, const CellShape& shape) {
  std::vector<Rational> p;
  for (int i = 0; i < shape.cube_dim; ++i) p.push_back(ratio(fixtures::uniform(rng, 1, 996), 997));
  for (int d : shape.simplex_dims) {
    std::vector<long> w(static_cast<std::size_t>(d) + 1);
    long total = 0;
    for (auto& x : w) total += x = fixtures::uniform(rng, 1, 1000);
    for (int j = 1; j <= d; ++j) p.push_back(ratio(w[static_cast<std::size_t>(j)], total));
  }
  return p;
}

// Point-location oracle: every sampled interior point lies in exactly one
// closed simplex (samples are generic with probability 1, and a point on a
// shared ridge would be counted twice, so we only count strict interiors
// and require at most one plus at least one closed hit).
void expect_tiles(const SimplicialComplex& tri, const CellShape& shape, std::uint64_t seed) {
  fixtures::Rng rng(seed);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = random_interior_point(rng, shape);
    int strict = 0, closed = 0;
    for (const auto& s : tri.simplices) {
      const auto b = barycentric(shape, s, p);
      ASSERT_TRUE(b) << "degenerate simplex";
      const bool nonneg = std::all_of(b->begin(), b->end(), [](const Rational& x) { return x >= 0; });
      const bool pos = std::all_of(b->begin(), b->end(), [](const Rational& x) { return x > 0; });
      closed += nonneg;
      strict += pos;
    }
    EXPECT_GE(closed, 1);
    EXPECT_LE(strict, 1);
  }
}

std::vector<FaceSpec> faces_of(const CellShape& shape) {
  std::vector<FaceSpec> out{FaceSpec{}};
  for (int i = 0; i < shape.cube_dim; ++i) {
    std::vector<FaceSpec> next;
    for (const auto& f : out)
      for (int c : {-1, 0, 1}) {
        auto g = f;
        g.cube.push_back(c);
        next.push_back(std::move(g));
      }
    out = std::move(next);
  }
  for (int d : shape.simplex_dims) {
    std::vector<FaceSpec> next;
    for (const auto& f : out)
      for (int mask = 1; mask < (1 << (d + 1)); ++mask) {
        auto g = f;
        g.simplex_vertices.emplace_back();
        for (int j = 0; j <= d; ++j)
          if (mask >> j & 1) g.simplex_vertices.back().push_back(j);
        next.push_back(std::move(g));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST(Staircase, Examples) {
  EXPECT_EQ(staircase_triangulation(1, 1).simplices.size(), 2u);
  EXPECT_EQ(staircase_triangulation(2, 1).simplices.size(), 3u);
  EXPECT_EQ(staircase_triangulation(3, 0).simplices.size(), 1u);
}

TEST(Staircase, CountsVolumesAndTiling) {
  for (int k = 0; k <= 4; ++k)
    for (int m = 0; m <= 4; ++m) {
      const auto tri = staircase_triangulation(k, m);
      EXPECT_EQ(Integer(static_cast<unsigned long>(tri.simplices.size())), binomial(k + m, k));
      EXPECT_EQ(tri.vertices.size(), static_cast<std::size_t>((k + 1) * (m + 1)));
      const auto audit = audit_realization(tri, staircase_shape(k, m));
      EXPECT_TRUE(audit.ok()) << k << "," << m;
      EXPECT_EQ(audit.total_volume, Rational(1) / Rational(factorial(k) * factorial(m)));
      if (k + m >= 1 && k + m <= 5) expect_tiles(tri, staircase_shape(k, m), 100 + 10 * k + m);
    }
}

TEST(Staircase, EverySimplexIsAMonotonePath) {
  const auto tri = staircase_triangulation(3, 2);
  for (const auto& s : tri.simplices) {
    std::vector<Label> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted.front(), (Label{0, 0}));
    EXPECT_EQ(sorted.back(), (Label{3, 2}));
    for (std::size_t i = 1; i < sorted.size(); ++i)
      EXPECT_EQ(sorted[i][0] - sorted[i - 1][0] + sorted[i][1] - sorted[i - 1][1], 1);
  }
}

TEST(Kuhn, Examples) {
  EXPECT_EQ(kuhn_triangulation(1).simplices.size(), 1u);
  EXPECT_EQ(kuhn_triangulation(2).simplices.size(), 2u);
  EXPECT_EQ(kuhn_triangulation(3).simplices.size(), 6u);
}

TEST(Kuhn, NonAntipodalMarksRejected) {
  try {
    kuhn_triangulation(3, {0, 0, 0}, {1, 1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAntipodal);
  }
}

TEST(Kuhn, CountsVolumesAndTiling) {
  for (int n = 1; n <= 5; ++n) {
    const auto tri = kuhn_triangulation(n);
    EXPECT_EQ(Integer(static_cast<unsigned long>(tri.simplices.size())), factorial(n));
    const CellShape cube{n, {}};
    for (const auto& s : tri.simplices) {
      const SimplicialComplex one = [&] {
        SimplicialComplex c;
        c.add_simplex(s);
        return c;
      }();
      EXPECT_EQ(audit_realization(one, cube).total_volume, Rational(1) / Rational(factorial(n)));
    }
    EXPECT_TRUE(audit_realization(tri, cube).ok());
    if (n <= 4) expect_tiles(tri, cube, 200 + n);
  }
}

TEST(Kuhn, MarkedPairIsInEverySimplex) {
  const Label v0{1, 0, 1, 0}, v1{0, 1, 0, 1};
  const auto tri = kuhn_triangulation(4, v0, v1);
  EXPECT_EQ(tri.simplices.size(), 24u);
  for (const auto& s : tri.simplices) {
    EXPECT_NE(std::find(s.begin(), s.end(), v0), s.end());
    EXPECT_NE(std::find(s.begin(), s.end(), v1), s.end());
  }
  EXPECT_TRUE(audit_realization(tri, CellShape{4, {}}).ok());
}

TEST(RestrictToFace, Examples) {
  const auto s21 = staircase_triangulation(2, 1);
  const FaceSpec f{{}, {{0, 1}, {0, 1}}};
  EXPECT_EQ(restrict_to_face(s21, staircase_shape(2, 1), f), staircase_triangulation(1, 1));

  const auto k3 = kuhn_triangulation(3);
  const FaceSpec top{{-1, -1, 1}, {}};
  const auto r = restrict_to_face(k3, CellShape{3, {}}, top);
  EXPECT_EQ(r.simplices.size(), 2u);
  EXPECT_EQ(r, kuhn_of_face({0, 0, 0}, {1, 1, 1}, top));

  const FaceSpec vertex{{0, 1, 1}, {}};
  const auto pt = restrict_to_face(k3, CellShape{3, {}}, vertex);
  ASSERT_EQ(pt.simplices.size(), 1u);
  EXPECT_EQ(pt.simplices[0], (Simplex{{0, 1, 1}}));
}

TEST(RestrictToFace, BadFaceRejected) {
  try {
    restrict_to_face(kuhn_triangulation(2), CellShape{2, {}}, FaceSpec{{0, 2}, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAFace);
  }
}

TEST(RestrictToFace, StaircaseCoherenceOnAllFaces) {
  for (int k = 0; k <= 4; ++k)
    for (int m = 0; m <= 4; ++m) {
      const auto shape = staircase_shape(k, m);
      const auto tri = staircase_triangulation(k, m);
      for (const auto& face : faces_of(shape))
        EXPECT_EQ(restrict_to_face(tri, shape, face), staircase_of_face(face));
    }
}

TEST(RestrictToFace, KuhnCoherenceOnAllFaces) {
  for (int n = 1; n <= 5; ++n) {
    const CellShape cube{n, {}};
    for (const auto& v0 : cube.vertices()) {
      Label v1 = v0;
      for (auto& b : v1) b = 1 - b;
      const auto tri = kuhn_triangulation(n, v0, v1);
      for (const auto& face : faces_of(cube))
        EXPECT_EQ(restrict_to_face(tri, cube, face), kuhn_of_face(v0, v1, face));
      if (n >= 4) break;
    }
  }
}

TEST(NuNumbering, Examples) {
  const std::vector<DualCell> a{{2, 3}};
  EXPECT_EQ(nu_numbering(a, 10), (std::vector<std::int64_t>{32}));
  const std::vector<DualCell> b{{0, 0}};
  EXPECT_EQ(nu_numbering(b, 10), (std::vector<std::int64_t>{0}));
  const std::vector<DualCell> c{{4, 5}, {4, 6}};
  const auto nu = nu_numbering(c, 10);
  EXPECT_EQ(nu[1] - nu[0], 10);
}

TEST(NuNumbering, MTooSmall) {
  const std::vector<DualCell> a{{9, 1}};
  try {
    nu_numbering(a, 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MTooSmall);
  }
  EXPECT_THROW(nu_numbering(std::vector<DualCell>{{1, 0}}, 5, 5), Error);
}

TEST(ProductCell, PureCubeIsKuhn) {
  ProductCell cell{3, 0, {}, {}};
  for (std::size_t idx = 0; idx < 8; ++idx)
    cell.nu.push_back(static_cast<std::int64_t>(std::popcount(idx)) * 10 + static_cast<std::int64_t>(idx));
  std::vector<Simplex> expected;
  for (auto s : kuhn_triangulation(3).simplices) {
    for (auto& l : s) l.push_back(0);
    std::sort(s.begin(), s.end());
    expected.push_back(s);
  }
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(triangulate_product_cell(cell).simplices, expected);
}

TEST(ProductCell, PureSimplexIsItself) {
  const ProductCell cell{0, 3, {5, 1, 7, 3}, {}};
  const auto tri = triangulate_product_cell(cell);
  ASSERT_EQ(tri.simplices.size(), 1u);
  EXPECT_EQ(tri.simplices[0].size(), 4u);
}

TEST(ProductCell, SegmentTimesSegmentMatchesStaircase) {
  // Labels (b, j); nu increases in both factors.
  const ProductCell cell{1, 1, {0, 1, 10, 11}, {}};
  const auto tri = triangulate_product_cell(cell);
  EXPECT_EQ(tri.simplices.size(), 2u);
  std::vector<Simplex> expected{{{0, 0}, {0, 1}, {1, 1}}, {{0, 0}, {1, 0}, {1, 1}}};
  EXPECT_EQ(tri.simplices, expected);
}

TEST(ProductCell, ConstantNuOnACubicalFaceIsAmbiguous) {
  const ProductCell cell{2, 0, {3, 3, 3, 3}, {}};
  try {
    triangulate_product_cell(cell);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbiguousNu);
  }
}

TEST(ProductCell, DistinctNuInsideEverySimplex) {
  fixtures::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = static_cast<int>(fixtures::uniform(rng, 0, 3));
    const int s = static_cast<int>(fixtures::uniform(rng, 0, 2));
    ProductCell cell{k, s, {}, {}};
    const std::int64_t M = 100;
    std::vector<std::int64_t> offset(static_cast<std::size_t>(s) + 1);
    for (auto& o : offset) o = fixtures::uniform(rng, 0, 9);
    const auto base = static_cast<std::size_t>(fixtures::uniform(rng, 0, (1 << k) - 1));
    for (std::size_t idx = 0; idx < cell.vertex_count(); ++idx) {
      const std::size_t b = idx & ((std::size_t{1} << k) - 1), j = idx >> k;
      cell.nu.push_back(offset[j] * 10 + static_cast<std::int64_t>(j) +
                        M * std::popcount(b ^ base));
    }
    std::sort(offset.begin(), offset.end());
    if (std::adjacent_find(offset.begin(), offset.end()) != offset.end()) continue;
    const auto tri = triangulate_product_cell(cell);
    EXPECT_TRUE(audit_realization(tri, cell.shape()).ok());
    for (const auto& simplex : tri.simplices) {
      std::vector<std::int64_t> nus;
      for (const auto& v : simplex) nus.push_back(cell.nu_at(v));
      std::sort(nus.begin(), nus.end());
      EXPECT_EQ(std::adjacent_find(nus.begin(), nus.end()), nus.end());
    }
  }
}

TEST(Assemble, TwoSquares) {
  const std::vector<ProductCell> cells{{2, 0, {0, 2, 1, 3}, {0, 1, 3, 4}},
                                       {1, 1, {2, 3, 4, 5}, {1, 4, 2, 5}}};
  const auto tri = assemble_triangulation(cells);
  EXPECT_EQ(tri.simplices.size(), 4u);
  EXPECT_EQ(tri.vertices.size(), 6u);
  EXPECT_EQ(tri.euler_characteristic(), 1);
  for (const auto& s : tri.simplices) {
    std::set<Label> distinct(s.begin(), s.end());
    EXPECT_EQ(distinct.size(), s.size());
  }
}

TEST(Assemble, CrossingDiagonalsOnASharedFace) {
  // Two 3-cubes glued along x = 1, vertices numbered x + 3y + 6z. On the
  // shared square the left cube's marks give the diagonal {1, 10}, the
  // right cube's give {4, 7}.
  auto id = [](int x, int y, int z) { return static_cast<std::int64_t>(x + 3 * y + 6 * z); };
  std::map<std::int64_t, std::int64_t> nu{
      {id(0, 0, 0), 0}, {id(1, 1, 0), 1}, {id(1, 0, 0), 2}, {id(1, 0, 1), 3},
      {id(0, 1, 0), 4}, {id(0, 0, 1), 5}, {id(0, 1, 1), 6}, {id(1, 1, 1), 7},
      {id(2, 0, 0), 8}, {id(2, 1, 0), 9}, {id(2, 1, 1), 10}, {id(2, 0, 1), 11}};
  std::vector<ProductCell> cells;
  for (int x0 : {0, 1}) {
    ProductCell c{3, 0, {}, {}};
    for (int idx = 0; idx < 8; ++idx) {
      const auto i = id(x0 + (idx & 1), idx >> 1 & 1, idx >> 2 & 1);
      c.ids.push_back(i);
      c.nu.push_back(nu.at(i));
    }
    cells.push_back(std::move(c));
  }
  for (const auto& c : cells) EXPECT_NO_THROW(triangulate_product_cell(c));
  try {
    assemble_triangulation(cells);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FaceMismatch);
  }
}

TEST(Assemble, ConflictingNuForOneVertex) {
  const std::vector<ProductCell> cells{{1, 0, {0, 1}, {0, 1}}, {1, 0, {2, 3}, {1, 2}}};
  try {
    assemble_triangulation(cells);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FaceMismatch);
  }
}

TEST(Assemble, CellsMeetingOutsideAFace) {
  // Opposite corners of one square listed as a shared "edge".
  const std::vector<ProductCell> cells{{2, 0, {0, 1, 2, 3}, {0, 1, 2, 3}},
                                       {2, 0, {0, 1, 2, 3}, {0, 4, 5, 3}}};
  try {
    assemble_triangulation(cells);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAFace);
  }
}

TEST(SimplicialComplex, RejectsRepeatedVertex) {
  SimplicialComplex c;
  EXPECT_THROW(c.add_simplex({{0}, {0}}), Error);
}
