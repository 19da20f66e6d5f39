#pragma once

// Deterministic pseudorandom inputs. Only raw mt19937_64 output is used, so
// the streams are identical on every standard library.

#include <cstdint>
#include <random>
#include <vector>

#include "flatfoliate/exactgeom.hpp"
#include "flatfoliate/localformula.hpp"
#include "flatfoliate/rational.hpp"

namespace flatfoliate::fixtures {

using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<long>(rng() % span);
}

/// The point ((q^2 - p^2), 2pq) / (q^2 + p^2) of the unit circle, i.e. the
/// rational parametrization at t = p/q.
inline RayVector circle_point(long p, long q) {
  return RayVector::from_integers(
      std::vector<Integer>{Integer(q * q - p * p), Integer(2 * p * q)});
}

inline RayVector random_circle_ray(Rng& rng) {
  return circle_point(uniform(rng, -60, 60), uniform(rng, 1, 60));
}

inline RayVector random_ray(Rng& rng, std::size_t n, long range = 9) {
  while (true) {
    std::vector<Integer> c;
    bool nonzero = false;
    for (std::size_t i = 0; i < n; ++i) {
      c.emplace_back(uniform(rng, -range, range));
      nonzero = nonzero || c.back() != 0;
    }
    if (nonzero) return RayVector::from_integers(c);
  }
}

inline std::vector<RayVector> random_generic_rays(Rng& rng, std::size_t n, std::size_t count) {
  while (true) {
    std::vector<RayVector> rays;
    for (std::size_t i = 0; i < count; ++i)
      rays.push_back(n == 2 ? random_circle_ray(rng) : random_ray(rng, n));
    if (is_antipodally_generic(rays)) return rays;
  }
}

inline CrossingConfiguration random_configuration(Rng& rng, int n, std::size_t k, std::size_t m) {
  auto rays = random_generic_rays(rng, static_cast<std::size_t>(n), k + m);
  std::vector<RayVector> regular(rays.begin(), rays.begin() + static_cast<long>(k));
  std::vector<RayVector> bordered(rays.begin() + static_cast<long>(k), rays.end());
  return {n, std::move(bordered), std::move(regular)};
}

/// Same branch structure with every ray moved by a small integer offset
/// after scaling by `scale`.
inline CrossingConfiguration perturbed(Rng& rng, const CrossingConfiguration& base, long scale,
                                       long noise) {
  auto move = [&](const RayVector& r) {
    std::vector<Integer> c;
    for (std::size_t i = 0; i < r.dim(); ++i) c.push_back(r[i] * scale + uniform(rng, -noise, noise));
    return RayVector::from_integers(c);
  };
  std::vector<RayVector> b, reg;
  for (const auto& r : base.bordered()) b.push_back(move(r));
  for (const auto& r : base.regular()) reg.push_back(move(r));
  return {base.n(), std::move(b), std::move(reg)};
}

/// N perturbed copies of a generic configuration whose union is generic.
inline std::vector<CrossingConfiguration> parallel_family(Rng& rng, int n, std::size_t k,
                                                          std::size_t big_n) {
  while (true) {
    const auto base = random_configuration(rng, n, k, static_cast<std::size_t>(n));
    std::vector<CrossingConfiguration> family;
    std::vector<RayVector> all;
    for (std::size_t j = 0; j < big_n; ++j) {
      family.push_back(perturbed(rng, base, 1000, 3));
      auto r = family.back().all_rays();
      all.insert(all.end(), r.begin(), r.end());
    }
    if (is_antipodally_generic(all)) return family;
  }
}

}  // namespace flatfoliate::fixtures
