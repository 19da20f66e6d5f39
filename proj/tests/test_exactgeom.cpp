#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <gtest/gtest.h>

#include "flatfoliate/exactgeom.hpp"
#include "flatfoliate/fixtures.hpp"

using namespace flatfoliate;

namespace {

RayVector R(std::initializer_list<Rational> c) { return RayVector(c); }

Rational q(long p, long d) { return ratio(p, d); }

// Solves A x = b over the rationals; nullopt when A is singular.
std::optional<std::vector<Rational>> solve(std::vector<std::vector<Rational>> a,
                                           std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

Rational rational_det(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

// Barycentric oracle: O is interior iff sum l_i p_i = 0, sum l_i = 1 has an
// all-positive solution; the index is then sign det[p_2 - p_1, ...].
int barycentric_index(const std::vector<RayVector>& t) {
  const std::size_t n = t.size() - 1;
  std::vector<std::vector<Rational>> a(n + 1, std::vector<Rational>(n + 1));
  std::vector<Rational> b(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= n; ++j) a[i][j] = Rational(t[j][i]);
  for (std::size_t j = 0; j <= n; ++j) a[n][j] = 1;
  b[n] = 1;
  const auto lambda = solve(a, b);
  if (!lambda) return 0;
  for (const auto& l : *lambda)
    if (l <= 0) return 0;
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i][j] = Rational(t[j + 1][i] - t[0][i]);
  return sign(rational_det(d));
}

// Angle oracle for the plane: the triple spans iff every cyclic gap is < pi;
// +1 when the tuple is listed counterclockwise.
int angle_index(const std::vector<RayVector>& t) {
  std::vector<double> ang;
  for (const auto& p : t) ang.push_back(std::atan2(p[1].get_d(), p[0].get_d()));
  std::vector<int> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return ang[a] < ang[b]; });
  for (int i = 0; i < 3; ++i) {
    double gap = ang[order[(i + 1) % 3]] - ang[order[i]];
    if (gap <= 0) gap += 2 * std::numbers::pi;
    if (gap >= std::numbers::pi) return 0;
  }
  const int rot = static_cast<int>(std::find(order.begin(), order.end(), 0) - order.begin());
  return order[(rot + 1) % 3] == 1 ? 1 : -1;
}

}  // namespace

TEST(RayVector, CanonicalizesByPositiveScaling) {
  EXPECT_EQ(R({q(2, 3), q(4, 3)}), R({1, 2}));
  EXPECT_EQ(R({1, 2}).str(), R({1, 2}).str());
  EXPECT_EQ(R({-2, -4}), R({-1, -2}));
  EXPECT_NE(R({-2, -4}), R({1, 2}));
  EXPECT_EQ(R({q(-6, 5), q(0, 1), q(9, 10)}), R({-4, 0, 3}));
}

TEST(RayVector, RejectsZeroVector) {
  try {
    R({0, 0});
    FAIL() << "zero vector accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVector);
  }
}

TEST(OrientationSign, Examples) {
  EXPECT_EQ(orientation_sign(std::vector{R({1, 0}), R({0, 1})}), 1);
  EXPECT_EQ(orientation_sign(std::vector{R({0, 1}), R({1, 0})}), -1);
  EXPECT_EQ(orientation_sign(std::vector{R({1, 0}), R({2, 0})}), 0);
}

TEST(OrientationSign, MatchesRationalEliminationOnRandomMatrices) {
  fixtures::Rng rng(11);
  for (std::size_t n = 2; n <= 5; ++n)
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<RayVector> cols;
      std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
      for (std::size_t j = 0; j < n; ++j) cols.push_back(fixtures::random_ray(rng, n, 3));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(cols[j][i]);
      EXPECT_EQ(orientation_sign(cols), sign(rational_det(a)));
    }
}

TEST(SpansOrigin, Examples) {
  EXPECT_EQ(spans_origin(std::vector{R({1, 0}), R({0, 1}), R({q(-3, 5), q(-4, 5)})}),
            SpanVerdict::Interior);
  EXPECT_EQ(spans_origin(std::vector{R({1, 0}), R({0, 1}), R({q(3, 5), q(4, 5)})}),
            SpanVerdict::Exterior);
  EXPECT_EQ(spans_origin(std::vector{R({1, 0}), R({1, 0}), R({0, 1})}),
            SpanVerdict::Degenerate);
}

TEST(SpansOrigin, BarycentricCoefficientsOfTheExample) {
  // lambda = (1/4, 1/3, 5/12) for ((1,0),(0,1),(-3/5,-4/5)).
  const auto lambda = solve({{1, 0, q(-3, 5)}, {0, 1, q(-4, 5)}, {1, 1, 1}}, {0, 0, 1});
  ASSERT_TRUE(lambda);
  EXPECT_EQ((*lambda)[0], q(1, 4));
  EXPECT_EQ((*lambda)[1], q(1, 3));
  EXPECT_EQ((*lambda)[2], q(5, 12));
}

TEST(ConfigurationIndex, Examples) {
  const RayVector a = R({1, 0}), b = R({q(-3, 5), q(4, 5)}), c = R({q(-3, 5), q(-4, 5)});
  EXPECT_EQ(configuration_index(std::vector{a, b, c}), 1);
  EXPECT_EQ(configuration_index(std::vector{b, a, c}), -1);
  EXPECT_EQ(configuration_index(std::vector{R({1, 0}), R({q(3, 5), q(4, 5)}),
                                            R({q(4, 5), q(3, 5)})}),
            0);
  EXPECT_EQ(configuration_index(std::vector{a, a, c}), 0);
}

TEST(ConfigurationIndex, DegenerateDistinctPointsThrow) {
  try {
    configuration_index(std::vector{R({1, 0}), R({-1, 0}), R({0, 1})});
    FAIL() << "degenerate tuple accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateConfiguration);
  }
}

TEST(ConfigurationIndex, AgreesWithBarycentricOracle) {
  fixtures::Rng rng(5);
  for (std::size_t n = 2; n <= 4; ++n)
    for (int trial = 0; trial < 150; ++trial) {
      const auto t = fixtures::random_generic_rays(rng, n, n + 1);
      EXPECT_EQ(configuration_index(t), barycentric_index(t));
    }
}

TEST(ConfigurationIndex, AgreesWithAngleOracleOnCircleTriples) {
  fixtures::Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const auto t = fixtures::random_generic_rays(rng, 2, 3);
    EXPECT_EQ(configuration_index(t), angle_index(t));
  }
}

TEST(ConfigurationIndex, AntisymmetricUnderEveryTransposition) {
  fixtures::Rng rng(7);
  for (std::size_t n = 2; n <= 4; ++n)
    for (int trial = 0; trial < 40; ++trial) {
      const auto t = fixtures::random_generic_rays(rng, n, n + 1);
      const int base = configuration_index(t);
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) {
          auto s = t;
          std::swap(s[i], s[j]);
          EXPECT_EQ(configuration_index(s), -base);
        }
    }
}

TEST(ConfigurationIndex, InvariantUnderPositiveScaling) {
  fixtures::Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = fixtures::random_generic_rays(rng, 3, 4);
    std::vector<RayVector> scaled;
    for (const auto& p : t) {
      const Rational f = ratio(fixtures::uniform(rng, 1, 50), fixtures::uniform(rng, 1, 50));
      std::vector<Rational> c;
      for (const auto& x : p.as_rationals()) c.push_back(x * f);
      scaled.emplace_back(std::span<const Rational>(c));
    }
    EXPECT_EQ(configuration_index(scaled), configuration_index(t));
  }
}

TEST(ConfigurationIndex, HemisphereTuplesVanish) {
  fixtures::Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RayVector> t;
    while (t.size() < 4) {
      auto r = fixtures::random_ray(rng, 3);
      if (r[2] > 0) t.push_back(r);
    }
    if (!is_antipodally_generic(t)) continue;
    EXPECT_EQ(configuration_index(t), 0);
  }
}

TEST(AntipodalGenericity, Examples) {
  EXPECT_TRUE(is_antipodally_generic(std::vector{R({1, 0}), R({0, 1}), R({q(-3, 5), q(-4, 5)})}));
  EXPECT_FALSE(is_antipodally_generic(std::vector{R({1, 0}), R({-1, 0})}));
  EXPECT_FALSE(is_antipodally_generic(std::vector{R({1, 0}), R({2, 0})}));
}

TEST(AntipodalGenericity, MatchesSubsetDeterminants) {
  fixtures::Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RayVector> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(fixtures::random_ray(rng, 3, 2));
    bool expected = true;
    for (std::size_t a = 0; a < 5; ++a)
      for (std::size_t b = a + 1; b < 5; ++b)
        for (std::size_t c = b + 1; c < 5; ++c)
          expected = expected && orientation_sign(std::vector{pts[a], pts[b], pts[c]}) != 0;
    EXPECT_EQ(is_antipodally_generic(pts), expected);
  }
}

TEST(WindingDegree, Examples) {
  EXPECT_EQ(winding_degree_2d(std::vector{R({1, 0}), R({q(-3, 5), q(4, 5)}), R({q(-3, 5), q(-4, 5)})}), 1);
  EXPECT_EQ(winding_degree_2d(std::vector{R({1, 0}), R({q(-3, 5), q(-4, 5)}), R({q(-3, 5), q(4, 5)})}), -1);
  EXPECT_EQ(winding_degree_2d(std::vector{R({1, 0}), R({q(3, 5), q(4, 5)}), R({q(4, 5), q(3, 5)})}), 0);
}

TEST(WindingDegree, DoubleLoopHasDegreeTwo) {
  std::vector<RayVector> loop;
  for (int lap = 0; lap < 2; ++lap)
    for (auto [p, d] : {std::pair{0L, 1L}, {1, 1}, {3, 1}, {-3, 1}, {-1, 1}})
      loop.push_back(fixtures::circle_point(p, d));
  EXPECT_EQ(winding_degree_2d(loop), 2);
}

TEST(WindingDegree, AntipodalStepThrows) {
  try {
    winding_degree_2d(std::vector{R({1, 0}), R({-1, 0}), R({0, 1})});
    FAIL() << "antipodal step accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AntipodalPair);
  }
}

TEST(RadialFilling, Examples) {
  const std::vector t{R({1, 0}), R({q(-3, 5), q(4, 5)}), R({q(-3, 5), q(-4, 5)})};
  EXPECT_EQ(radial_filling_degree(t, R({1, 1})), 1);
  EXPECT_EQ(radial_filling_degree(t, R({-1, -1})), 1);
  const std::vector h{R({1, 0}), R({q(3, 5), q(4, 5)}), R({q(4, 5), q(3, 5)})};
  EXPECT_EQ(radial_filling_degree(h, R({0, -1})), 0);
}

TEST(RadialFilling, NonGenericProbeIsReported) {
  const std::vector t{R({1, 0}), R({q(-3, 5), q(4, 5)}), R({q(-3, 5), q(-4, 5)})};
  try {
    radial_filling_degree(t, R({1, 0}));
    FAIL() << "probe on a face ray accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonGenericProbe);
  }
}

TEST(RadialFilling, ProbeIndependentAndEqualToIndex) {
  fixtures::Rng rng(12);
  for (std::size_t n = 2; n <= 4; ++n)
    for (int trial = 0; trial < 60; ++trial) {
      const auto t = fixtures::random_generic_rays(rng, n, n + 1);
      const int index = configuration_index(t);
      EXPECT_EQ(radial_filling_degree(t), index);
      for (int p = 0; p < 3; ++p) {
        const auto probe = fixtures::random_ray(rng, n, 40);
        try {
          EXPECT_EQ(radial_filling_degree(t, probe), index);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::NonGenericProbe);
        }
      }
    }
}
