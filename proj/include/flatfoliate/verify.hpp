#pragma once

// Invariant suites behind `flatfoliate verify`. Each check reports a name,
// a verdict and a short detail on failure.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "flatfoliate/exactgeom.hpp"
#include "flatfoliate/fixtures.hpp"
#include "flatfoliate/localformula.hpp"
#include "flatfoliate/toruslab.hpp"
#include "flatfoliate/triangulations.hpp"

namespace flatfoliate::verify {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = true;
  std::string detail;
};

class Recorder {
 public:
  explicit Recorder(std::string suite) : suite_(std::move(suite)) {}

  /// Runs body; a thrown Error counts as a failure of this check.
  void check(const std::string& name, const std::function<std::string()>& body) {
    CheckResult r{suite_, name, true, ""};
    try {
      r.detail = body();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    results_.push_back(std::move(r));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::string suite_;
  std::vector<CheckResult> results_;
};

inline std::string tuple_str(std::span<const RayVector> t) {
  std::string s;
  for (const auto& r : t) s += r.str();
  return s;
}

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> exactgeom_suite() {
  Recorder rec("exactgeom");
  fixtures::Rng rng(20240101);

  rec.check("antisymmetry", [&]() -> std::string {
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
      auto t = fixtures::random_generic_rays(rng, n, n + 1);
      const int base = configuration_index(t);
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) {
          auto s = t;
          std::swap(s[i], s[j]);
          if (configuration_index(s) != -base) return "transposition kept the index: " + tuple_str(t);
        }
    }
    return "";
  });

  rec.check("spanning equivalence", [&]() -> std::string {
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
      auto t = fixtures::random_generic_rays(rng, n, n + 1);
      if ((configuration_index(t) != 0) != (spans_origin(t) == SpanVerdict::Interior))
        return "index and verdict disagree: " + tuple_str(t);
    }
    return "";
  });

  rec.check("winding oracle, 1000 circle triples", [&]() -> std::string {
    int done = 0;
    while (done < 1000) {
      std::vector<RayVector> t{fixtures::random_circle_ray(rng), fixtures::random_circle_ray(rng),
                               fixtures::random_circle_ray(rng)};
      if (!is_antipodally_generic(t)) continue;
      ++done;
      if (configuration_index(t) != winding_degree_2d(t)) return "disagreement: " + tuple_str(t);
    }
    return "";
  });

  rec.check("radial filling oracle, n = 2, 3, 4", [&]() -> std::string {
    for (std::size_t n = 2; n <= 4; ++n)
      for (int trial = 0; trial < 100; ++trial) {
        auto t = fixtures::random_generic_rays(rng, n, n + 1);
        const int index = configuration_index(t);
        int probes = 0;
        for (int attempt = 0; attempt < 32 && probes < 3; ++attempt) {
          try {
            if (radial_filling_degree(t, fixtures::random_ray(rng, n)) != index)
              return "disagreement: " + tuple_str(t);
            ++probes;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::NonGenericProbe) throw;
          }
        }
        if (radial_filling_degree(t) != index) return "scheduled probe disagrees: " + tuple_str(t);
      }
    return "";
  });

  rec.check("scaling invariance", [&]() -> std::string {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
      auto t = fixtures::random_generic_rays(rng, n, n + 1);
      auto s = t;
      const std::size_t i = static_cast<std::size_t>(fixtures::uniform(rng, 0, static_cast<long>(n)));
      Rational factor(fixtures::uniform(rng, 1, 50), fixtures::uniform(rng, 1, 50));
      factor.canonicalize();
      auto coords = s[i].as_rationals();
      for (auto& c : coords) c *= factor;
      s[i] = RayVector(coords);
      if (spans_origin(s) != spans_origin(t) || configuration_index(s) != configuration_index(t) ||
          is_antipodally_generic(s) != is_antipodally_generic(t))
        return "positive rescaling changed an output: " + tuple_str(t);
    }
    return "";
  });

  rec.check("hemisphere law", [&]() -> std::string {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
      const auto ell = fixtures::random_ray(rng, n);
      std::vector<RayVector> t;
      while (t.size() < n + 1) {
        auto p = fixtures::random_ray(rng, n);
        Integer value = 0;
        for (std::size_t i = 0; i < n; ++i) value += ell[i] * p[i];
        if (value == 0) continue;
        t.push_back(value > 0 ? p : p.negated());
      }
      if (!is_antipodally_generic(t)) continue;
      if (configuration_index(t) != 0) return "open hemisphere with nonzero index: " + tuple_str(t);
    }
    return "";
  });

  return rec.take();
}

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> localformula_suite() {
  Recorder rec("localformula");
  fixtures::Rng rng(20240202);

  rec.check("aggregation identity over all chains", [&]() -> std::string {
    for (int trial = 0; trial < 120; ++trial) {
      const int n = 2 + trial % 2;
      const auto k = static_cast<std::size_t>(1 + (trial / 2) % 4);
      const auto cc = fixtures::random_configuration(rng, n, k, static_cast<std::size_t>(n));
      Rational sum = 0;
      for (const auto& sigma : all_permutations(n))
        sum += direct_vertex_expectation(ChamberChain::from_permutation(cc, sigma), cc);
      if (sum != Rational(factorial(n)) * vertex_weight(cc))
        return "chain sum " + to_string(sum) + " != n! weight, n = " + std::to_string(n);
    }
    return "";
  });

  rec.check("type-II vanishing", [&]() -> std::string {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + trial % 2;
      const auto m = static_cast<std::size_t>(trial % n);
      const auto k = static_cast<std::size_t>(1 + trial % 3);
      const auto cc = fixtures::random_configuration(rng, n, k, m);
      std::vector<std::optional<int>> steps(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < m; ++i) steps[(static_cast<std::size_t>(trial) + i) % steps.size()] = static_cast<int>(i);
      const auto chain = ChamberChain::from_additions(cc, steps);
      if (direct_vertex_expectation(chain, cc) != 0) return "nonzero type-II expectation";
    }
    return "";
  });

  rec.check("bound soundness", [&]() -> std::string {
    for (int trial = 0; trial < 60; ++trial) {
      const auto count = static_cast<std::size_t>(fixtures::uniform(rng, 1, 6));
      std::vector<CrossingConfiguration> list;
      std::int64_t lo = 0, hi = 0;
      for (std::size_t c = 0; c < count; ++c) {
        const auto k = static_cast<std::size_t>(fixtures::uniform(rng, 1, 4));
        list.push_back(fixtures::random_configuration(rng, 2, k, 2));
        lo = c ? std::min<std::int64_t>(lo, static_cast<std::int64_t>(k)) : static_cast<std::int64_t>(k);
        hi = std::max<std::int64_t>(hi, static_cast<std::int64_t>(k));
      }
      const Rational value = euler_number(list, 2);
      if (abs(value) > sullivan_bound(static_cast<std::int64_t>(count), lo, hi, 2))
        return "bound violated by " + to_string(value);
    }
    return "";
  });

  rec.check("repetition law and matching law", [&]() -> std::string {
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 2 + trial % 2;
      const auto k = static_cast<std::size_t>(2 + trial % 3);
      const auto cc = fixtures::random_configuration(rng, n, k, static_cast<std::size_t>(n));
      for (const auto& sigma : all_permutations(n)) {
        const auto audit = cancellation_audit(ChamberChain::from_permutation(cc, sigma), cc);
        if (!audit.verified()) return "cancellation audit failed";
      }
    }
    return "";
  });

  rec.check("parallel bound", [&]() -> std::string {
    for (int trial = 0; trial < 24; ++trial) {
      const int n = 2 + trial % 2;
      const auto k = static_cast<std::size_t>(1 + trial % 2);
      const auto big_n = static_cast<std::size_t>(n + 1 + (trial / 2) % 2);
      const auto family = fixtures::parallel_family(rng, n, k, big_n);
      for (const auto& sigma : all_permutations(n)) {
        const auto chain = ChamberChain::from_permutation(family[0], sigma);
        if (abs(parallel_vertex_expectation(family, chain)) > parallel_bound(k, n))
          return "parallel bound exceeded";
      }
    }
    return "";
  });

  return rec.take();
}

// ---------------------------------------------------------------------------

/// Two squares sharing an edge: a 2-cube and a segment x segment, vertices
/// of the 3 x 2 grid numbered x + 3y.
inline std::vector<ProductCell> two_square_cells() {
  return {ProductCell{2, 0, {0, 2, 1, 3}, {0, 1, 3, 4}},
          ProductCell{1, 1, {2, 3, 4, 5}, {1, 4, 2, 5}}};
}

/// Two 3-cubes sharing the face x = 1 whose nu extremes induce crossing
/// diagonals on it. Vertices numbered x + 3y + 6z.
inline std::vector<ProductCell> incompatible_cube_cells() {
  auto id = [](int x, int y, int z) { return static_cast<std::int64_t>(x + 3 * y + 6 * z); };
  std::map<std::int64_t, std::int64_t> nu{
      {id(0, 0, 0), 0}, {id(1, 1, 0), 1}, {id(1, 0, 0), 2}, {id(1, 0, 1), 3},
      {id(0, 1, 0), 4}, {id(0, 0, 1), 5}, {id(0, 1, 1), 6}, {id(1, 1, 1), 7},
      {id(2, 0, 0), 8}, {id(2, 1, 0), 9}, {id(2, 1, 1), 10}, {id(2, 0, 1), 11}};
  std::vector<ProductCell> cells;
  for (int x0 : {0, 1}) {
    ProductCell c{3, 0, {}, {}};
    for (std::size_t idx = 0; idx < 8; ++idx) {
      const auto i = id(x0 + static_cast<int>(idx & 1), static_cast<int>(idx >> 1 & 1),
                        static_cast<int>(idx >> 2 & 1));
      c.ids.push_back(i);
      c.nu.push_back(nu.at(i));
    }
    cells.push_back(std::move(c));
  }
  return cells;
}

/// Faces of a shape: all cube sign patterns times all nonempty subsets.
inline std::vector<FaceSpec> all_faces(const CellShape& shape) {
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
        std::vector<int> subset;
        for (int j = 0; j <= d; ++j)
          if (mask >> j & 1) subset.push_back(j);
        g.simplex_vertices.push_back(std::move(subset));
        next.push_back(std::move(g));
      }
    out = std::move(next);
  }
  return out;
}

/// nu(b, j) = i_j + M (d0 + |b xor V0|): the values a dual cell gets from
/// i + M deg, with the simplex vertices in distinct cells of C and the
/// degree growing by one per bordered sheet crossed.
inline ProductCell random_nu_cell(fixtures::Rng& rng, int k, int s) {
  ProductCell cell{k, s, {}, {}};
  const std::int64_t M = 1000;
  std::vector<std::int64_t> cell_index;
  while (static_cast<int>(cell_index.size()) < s + 1) {
    const auto i = fixtures::uniform(rng, 0, M - 1);
    if (std::find(cell_index.begin(), cell_index.end(), i) == cell_index.end()) cell_index.push_back(i);
  }
  const auto v0 = static_cast<std::size_t>(fixtures::uniform(rng, 0, (1L << k) - 1));
  const auto d0 = fixtures::uniform(rng, 0, 5);
  cell.nu.resize(cell.vertex_count());
  for (std::size_t idx = 0; idx < cell.vertex_count(); ++idx) {
    const std::size_t b = idx & ((std::size_t{1} << k) - 1);
    const auto flips = static_cast<std::int64_t>(std::popcount(b ^ v0));
    cell.nu[idx] = cell_index[idx >> k] + M * (d0 + flips);
  }
  return cell;
}

inline std::vector<CheckResult> triangulations_suite() {
  Recorder rec("triangulations");
  fixtures::Rng rng(20240303);

  rec.check("staircase counts and volumes, k, m <= 4", []() -> std::string {
    for (int k = 0; k <= 4; ++k)
      for (int m = 0; m <= 4; ++m) {
        const auto t = staircase_triangulation(k, m);
        if (Integer(static_cast<unsigned long>(t.simplices.size())) != binomial(k + m, k))
          return "wrong count for " + std::to_string(k) + "," + std::to_string(m);
        if (!audit_realization(t, staircase_shape(k, m)).ok())
          return "realization audit failed for " + std::to_string(k) + "," + std::to_string(m);
      }
    return "";
  });

  rec.check("Kuhn counts and volumes, n <= 5", []() -> std::string {
    for (int n = 1; n <= 5; ++n) {
      const auto t = kuhn_triangulation(n);
      if (Integer(static_cast<unsigned long>(t.simplices.size())) != factorial(n))
        return "wrong count for n = " + std::to_string(n);
      const CellShape shape{n, {}};
      for (const auto& s : t.simplices) {
        SimplicialComplex one;
        one.add_simplex(s);
        if (audit_realization(one, shape).total_volume != Rational(1, factorial(n).get_ui()))
          return "simplex volume is not 1/n!";
      }
      if (!audit_realization(t, shape).ok()) return "realization audit failed";
    }
    return "";
  });

  rec.check("staircase face coherence", []() -> std::string {
    for (int k = 0; k <= 4; ++k)
      for (int m = 0; m <= 4; ++m) {
        const auto shape = staircase_shape(k, m);
        const auto t = staircase_triangulation(k, m);
        for (const auto& f : all_faces(shape))
          if (!(restrict_to_face(t, shape, f) == staircase_of_face(f)))
            return "face of staircase(" + std::to_string(k) + "," + std::to_string(m) + ") differs";
      }
    return "";
  });

  rec.check("Kuhn face coherence", []() -> std::string {
    for (int n = 1; n <= 5; ++n) {
      const CellShape shape{n, {}};
      const auto faces = all_faces(shape);
      for (const auto& v0 : shape.vertices()) {
        if (n == 5 && v0[0] + v0[1] + v0[2] > 0) continue;  // a sample of marks
        Label v1 = v0;
        for (auto& b : v1) b = 1 - b;
        const auto t = kuhn_triangulation(n, v0, v1);
        for (const auto& f : faces)
          if (!(restrict_to_face(t, shape, f) == kuhn_of_face(v0, v1, f)))
            return "face of kuhn(" + std::to_string(n) + ") differs";
      }
    }
    return "";
  });

  rec.check("product cell coherence", [&]() -> std::string {
    for (int trial = 0; trial < 40; ++trial) {
      const int k = trial % 4;
      const int s = (trial / 4) % 3;
      const auto cell = random_nu_cell(rng, k, s);
      const auto t = triangulate_product_cell(cell);
      if (!audit_realization(t, cell.shape()).ok()) return "product cell audit failed";
      for (const auto& f : all_faces(cell.shape())) {
        const auto restricted = restrict_to_face(t, cell.shape(), f);
        const auto face = face_cell(cell, f);
        if (!(detail::to_global(restricted, cell) == detail::to_global(triangulate_product_cell(face), face)))
          return "face triangulation differs from the face's own triangulation";
      }
    }
    return "";
  });

  rec.check("two-square assembly", []() -> std::string {
    const auto cells = two_square_cells();
    const auto c = assemble_triangulation(cells);
    if (c.simplices.size() != 4 || c.vertices.size() != 6) return "expected 4 triangles on 6 vertices";
    return "";
  });

  rec.check("torus dual complex assembly", []() -> std::string {
    const auto cells = grid_dual_cells(build_region(2), 4);
    const auto c = assemble_triangulation(cells);
    if (c.vertices.size() != 16) return "new or missing vertices";
    if (c.euler_characteristic() != 0) return "Euler characteristic is not 0";
    if (!c.is_closed_pseudomanifold()) return "not a closed surface";
    return "";
  });

  rec.check("incompatible nu is rejected", []() -> std::string {
    try {
      const auto cells = incompatible_cube_cells();
      (void)assemble_triangulation(cells);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::FaceMismatch) return "";
      throw;
    }
    return "assembly accepted crossing diagonals";
  });

  return rec.take();
}

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> toruslab_suite(const CrossingOptions& convention = {}) {
  Recorder rec("toruslab");
  const auto pair = HolonomyPair::rotations();
  TorusOptions opt;
  opt.crossing = convention;

  std::vector<TorusRun> runs;
  rec.check("pipeline runs", [&]() -> std::string {
    for (int L = 2; L <= 8; ++L)
      for (int a = 0; a < (L <= 4 ? 3 : 1); ++a) runs.push_back(run_torus(pair, scheduled_v0(a), L, opt));
    return "";
  });

  rec.check("integrality", [&]() -> std::string {
    for (const auto& r : runs)
      if (!r.report.formula_is_integer())
        return "2 sum w = " + to_string(r.report.formula_value) + " at L = " + std::to_string(r.region.L);
    return "";
  });

  rec.check("exact vanishing", [&]() -> std::string {
    for (const auto& r : runs)
      if (r.report.formula_value != 0)
        return "formula value " + to_string(r.report.formula_value) + " at L = " + std::to_string(r.region.L);
    return "";
  });

  rec.check("bound soundness", [&]() -> std::string {
    for (const auto& r : runs)
      if (abs(r.report.formula_value) > r.report.bound) return "bound violated";
    return "";
  });

  rec.check("geometric arbitration", [&]() -> std::string {
    for (const auto& r : runs) {
      if (r.region.L > 3) continue;
      for (const auto& c : r.crossings) {
        auto [x, y] = n2_geometric_vertex_expectations(c);
        if (x + y != 2 * vertex_weight(c.configuration)) return "arbiter disagrees with the weight";
      }
    }
    return "";
  });

  rec.check("Folner decay", []() -> std::string {
    const auto box_step = LatticePoint<2>{1, 0};
    for (long L = 2; L <= 16; ++L) {
      if (folner_ratio<2>(folner_box(L), box_step) != ratio(2, L)) return "ratio is not 2/L";
      auto [inner, boundary] = count_domains(build_region(static_cast<int>(L)));
      if (inner != L * L) return "N != L^2";
      if (ratio(boundary, inner) > ratio(10, L)) return "N_boundary / N > 10 / L";
    }
    return "";
  });

  rec.check("holonomy homomorphism", [&]() -> std::string {
    fixtures::Rng rng(20240404);
    for (int trial = 0; trial < 100; ++trial) {
      Lift g{fixtures::uniform(rng, -6, 6), fixtures::uniform(rng, -6, 6)};
      Lift h{fixtures::uniform(rng, -6, 6), fixtures::uniform(rng, -6, 6)};
      if (pair.at(g) * pair.at(h) != pair.at({g[0] + h[0], g[1] + h[1]})) return "not multiplicative";
    }
    return "";
  });

  rec.check("crossing count scaling", []() -> std::string {
    std::size_t previous = 0;
    for (int L : {2, 4, 8, 16}) {
      const auto x = scan_boundary(build_region(L)).crossings.size();
      if (previous && x > 5 * previous) return "X(2L) > 5 X(L)";
      previous = x;
    }
    return "";
  });

  return rec.take();
}

}  // namespace flatfoliate::verify
