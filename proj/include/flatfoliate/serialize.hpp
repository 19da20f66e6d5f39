#pragma once

// JSON and CSV forms of the library's values. Rationals always travel as
// "p/q" strings.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "flatfoliate/error.hpp"
#include "flatfoliate/exactgeom.hpp"
#include "flatfoliate/localformula.hpp"
#include "flatfoliate/rational.hpp"
#include "flatfoliate/toruslab.hpp"
#include "flatfoliate/triangulations.hpp"

namespace flatfoliate::io {

using json = nlohmann::json;

inline constexpr const char* kConfigurationSchema = "flatfoliate.configuration/1";
inline constexpr const char* kCrossingsSchema = "flatfoliate.crossings/1";
inline constexpr const char* kExperimentSchema = "flatfoliate.experiment/1";
inline constexpr const char* kComplexSchema = "flatfoliate.complex/1";
inline constexpr const char* kCellsSchema = "flatfoliate.cells/1";

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline void check_schema(const json& j, const char* schema) {
  const auto& s = field(j, "schema");
  if (!s.is_string() || s.get<std::string>() != schema)
    fail(std::string("expected schema ") + schema);
}

inline std::int64_t as_int(const json& j, const char* what) {
  if (!j.is_number_integer()) fail(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

}  // namespace detail

inline json to_json(const Rational& q) { return to_string(q); }

inline Rational rational_from_json(const json& j) {
  if (!j.is_string()) detail::fail("rationals must be \"p/q\" strings");
  return parse_rational(j.get<std::string>());
}

inline json to_json(std::span<const Rational> v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_json(q));
  return a;
}

inline std::vector<Rational> rationals_from_json(const json& j) {
  if (!j.is_array()) detail::fail("vectors must be arrays");
  std::vector<Rational> out;
  for (const auto& e : j) out.push_back(rational_from_json(e));
  return out;
}

inline json to_json(const RayVector& r) { return to_json(r.as_rationals()); }

inline RayVector ray_from_json(const json& j) {
  auto v = rationals_from_json(j);
  return RayVector(v);
}

inline json rays_to_json(std::span<const RayVector> rays) {
  json a = json::array();
  for (const auto& r : rays) a.push_back(to_json(r));
  return a;
}

inline std::vector<RayVector> rays_from_json(const json& j) {
  if (!j.is_array()) detail::fail("ray lists must be arrays");
  std::vector<RayVector> out;
  for (const auto& e : j) out.push_back(ray_from_json(e));
  return out;
}

// ---------------------------------------------------------------------------
// Configuration files

/// Points of one configuration. As an ordered tuple it reads regular points
/// first, then bordered points.
struct ConfigurationFile {
  int n = 2;
  std::vector<RayVector> bordered;
  std::vector<RayVector> regular;

  std::vector<RayVector> tuple() const {
    std::vector<RayVector> t = regular;
    t.insert(t.end(), bordered.begin(), bordered.end());
    return t;
  }
  CrossingConfiguration crossing() const { return {n, bordered, regular}; }
  friend bool operator==(const ConfigurationFile&, const ConfigurationFile&) = default;
};

inline json to_json(const ConfigurationFile& c) {
  return {{"schema", kConfigurationSchema},
          {"n", c.n},
          {"bordered", rays_to_json(c.bordered)},
          {"regular", rays_to_json(c.regular)}};
}

inline ConfigurationFile configuration_from_json(const json& j) {
  detail::check_schema(j, kConfigurationSchema);
  ConfigurationFile c;
  c.n = static_cast<int>(detail::as_int(detail::field(j, "n"), "n"));
  c.bordered = rays_from_json(detail::field(j, "bordered"));
  c.regular = rays_from_json(detail::field(j, "regular"));
  for (const auto* list : {&c.bordered, &c.regular})
    for (const auto& r : *list)
      if (r.dim() != static_cast<std::size_t>(c.n))
        throw Error(ErrorCode::DimensionMismatch, "ray " + r.str() + " is not in R^" +
                                                      std::to_string(c.n));
  return c;
}

// ---------------------------------------------------------------------------
// Crossing lists

struct CrossingListFile {
  int n = 2;
  std::vector<CrossingConfiguration> crossings;
  std::optional<std::int64_t> k_min, k_max;  // extremes over the whole base, if known
};

inline json to_json(const CrossingListFile& f) {
  json list = json::array();
  for (std::size_t i = 0; i < f.crossings.size(); ++i)
    list.push_back({{"id", i},
                    {"bordered", rays_to_json(f.crossings[i].bordered())},
                    {"regular", rays_to_json(f.crossings[i].regular())}});
  json j{{"schema", kCrossingsSchema}, {"n", f.n}, {"crossings", list}};
  if (f.k_min) j["k_min"] = *f.k_min;
  if (f.k_max) j["k_max"] = *f.k_max;
  return j;
}

inline CrossingListFile crossings_from_json(const json& j) {
  detail::check_schema(j, kCrossingsSchema);
  CrossingListFile f;
  f.n = static_cast<int>(detail::as_int(detail::field(j, "n"), "n"));
  const auto& list = detail::field(j, "crossings");
  if (!list.is_array()) detail::fail("crossings must be an array");
  for (const auto& c : list)
    f.crossings.emplace_back(f.n, rays_from_json(detail::field(c, "bordered")),
                             rays_from_json(detail::field(c, "regular")));
  if (j.contains("k_min")) f.k_min = detail::as_int(j.at("k_min"), "k_min");
  if (j.contains("k_max")) f.k_max = detail::as_int(j.at("k_max"), "k_max");
  return f;
}

/// Crossings of a torus run, with their geometry for inspection.
inline json to_json(const TorusRun& run) {
  CrossingListFile f;
  for (const auto& c : run.crossings) f.crossings.push_back(c.configuration);
  f.k_min = run.report.k_min;
  f.k_max = run.report.k_max;
  json j = to_json(f);
  for (std::size_t i = 0; i < run.crossings.size(); ++i) {
    const auto& c = run.crossings[i];
    auto& e = j["crossings"][i];
    e["position"] = to_json(std::span<const Rational>(c.position));
    e["h_lift"] = {c.h_lift[0], c.h_lift[1]};
    e["v_lift"] = {c.v_lift[0], c.v_lift[1]};
  }
  j["L"] = run.region.L;
  j["schedule_index"] = run.region.schedule_index;
  j["v0"] = to_json(std::span<const Rational>(run.v0));
  return j;
}

// ---------------------------------------------------------------------------
// Experiment configuration

struct ExperimentConfig {
  Matrix2 a, b;
  Vec2 v0{Rational(1), Rational(1, 7)};
  std::vector<int> L;
  int schedule = 0;
  std::string output;

  HolonomyPair holonomy() const { return {a, b}; }

  static ExperimentConfig rotation_defaults() {
    auto p = HolonomyPair::rotations();
    return {p.a(), p.b(), {Rational(1), Rational(1, 7)}, {2, 4, 8}, 0, ""};
  }
};

inline json to_json(const Matrix2& m) {
  return {to_string(m.a), to_string(m.b), to_string(m.c), to_string(m.d)};
}

inline Matrix2 matrix_from_json(const json& j) {
  auto e = rationals_from_json(j);
  if (e.size() != 4) detail::fail("matrices need four entries a, b, c, d");
  return {e[0], e[1], e[2], e[3]};
}

inline json to_json(const ExperimentConfig& c) {
  return {{"schema", kExperimentSchema},
          {"holonomy", {{"A", to_json(c.a)}, {"B", to_json(c.b)}}},
          {"v0", to_json(std::span<const Rational>(c.v0))},
          {"L", c.L},
          {"schedule", c.schedule},
          {"output", c.output}};
}

/// Loads and validates: the holonomy must have det = 1 and commute.
inline ExperimentConfig experiment_from_json(const json& j) {
  detail::check_schema(j, kExperimentSchema);
  ExperimentConfig c;
  const auto& h = detail::field(j, "holonomy");
  c.a = matrix_from_json(detail::field(h, "A"));
  c.b = matrix_from_json(detail::field(h, "B"));
  auto v0 = rationals_from_json(detail::field(j, "v0"));
  if (v0.size() != 2) detail::fail("v0 needs two entries");
  c.v0 = {v0[0], v0[1]};
  const auto& L = detail::field(j, "L");
  if (!L.is_array()) detail::fail("L must be an array");
  for (const auto& e : L) c.L.push_back(static_cast<int>(detail::as_int(e, "L entries")));
  if (j.contains("schedule")) c.schedule = static_cast<int>(detail::as_int(j.at("schedule"), "schedule"));
  if (j.contains("output")) {
    if (!j.at("output").is_string()) detail::fail("output must be a string");
    c.output = j.at("output").get<std::string>();
  }
  (void)c.holonomy();
  return c;
}

// ---------------------------------------------------------------------------
// Complexes and cells

inline json to_json(const SimplicialComplex& c) {
  json vertices = json::array();
  for (const auto& [label, info] : c.vertices) {
    json v{{"label", label}};
    if (info.nu) v["nu"] = *info.nu;
    if (info.coords) v["coords"] = to_json(std::span<const Rational>(*info.coords));
    vertices.push_back(std::move(v));
  }
  json simplices = json::array();
  for (const auto& s : c.simplices) simplices.push_back(s);
  return {{"schema", kComplexSchema}, {"vertices", vertices}, {"simplices", simplices}};
}

inline Label label_from_json(const json& j) {
  if (!j.is_array()) detail::fail("labels must be integer arrays");
  Label l;
  for (const auto& e : j) l.push_back(static_cast<int>(detail::as_int(e, "label entries")));
  return l;
}

inline SimplicialComplex complex_from_json(const json& j) {
  detail::check_schema(j, kComplexSchema);
  SimplicialComplex c;
  for (const auto& v : detail::field(j, "vertices")) {
    VertexInfo info;
    if (v.contains("nu")) info.nu = detail::as_int(v.at("nu"), "nu");
    if (v.contains("coords")) info.coords = rationals_from_json(v.at("coords"));
    c.add_vertex(label_from_json(detail::field(v, "label")), std::move(info));
  }
  for (const auto& s : detail::field(j, "simplices")) {
    if (!s.is_array()) detail::fail("simplices must be arrays of labels");
    Simplex simplex;
    for (const auto& l : s) simplex.push_back(label_from_json(l));
    c.add_simplex(std::move(simplex));
  }
  c.normalize();
  return c;
}

inline json to_json(const ProductCell& cell) {
  json j{{"cube_dim", cell.cube_dim}, {"simplex_dim", cell.simplex_dim}, {"nu", cell.nu}};
  if (!cell.ids.empty()) j["ids"] = cell.ids;
  return j;
}

inline ProductCell cell_from_json(const json& j) {
  ProductCell cell;
  cell.cube_dim = static_cast<int>(detail::as_int(detail::field(j, "cube_dim"), "cube_dim"));
  cell.simplex_dim = static_cast<int>(detail::as_int(detail::field(j, "simplex_dim"), "simplex_dim"));
  for (const auto& e : detail::field(j, "nu")) cell.nu.push_back(detail::as_int(e, "nu"));
  if (j.contains("ids"))
    for (const auto& e : j.at("ids")) cell.ids.push_back(detail::as_int(e, "ids"));
  cell.validate();
  return cell;
}

inline json cells_to_json(std::span<const ProductCell> cells) {
  json list = json::array();
  for (const auto& c : cells) list.push_back(to_json(c));
  return {{"schema", kCellsSchema}, {"cells", list}};
}

inline std::vector<ProductCell> cells_from_json(const json& j) {
  detail::check_schema(j, kCellsSchema);
  std::vector<ProductCell> out;
  for (const auto& c : detail::field(j, "cells")) out.push_back(cell_from_json(c));
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kDecayHeader = "L,N,N_boundary,X,k_min,k_max,bound,formula_value";

inline void write_decay_csv(std::ostream& os, std::span<const DecayRecord> rows) {
  os << kDecayHeader << '\n';
  for (const auto& r : rows) {
    const auto& e = r.report;
    os << r.L << ',' << e.n_inner << ',' << e.n_boundary << ',' << e.crossings << ','
       << e.k_min << ',' << e.k_max << ',' << to_string(e.bound) << ','
       << to_string(e.formula_value) << '\n';
  }
}

}  // namespace flatfoliate::io
