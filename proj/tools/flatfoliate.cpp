// flatfoliate: command-line front end.
//
// Exit codes: 0 success, 1 malformed input, 2 degenerate or non-generic
// data, 3 failed invariant (verify).

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flatfoliate/exactgeom.hpp"
#include "flatfoliate/localformula.hpp"
#include "flatfoliate/serialize.hpp"
#include "flatfoliate/toruslab.hpp"
#include "flatfoliate/triangulations.hpp"
#include "flatfoliate/verify.hpp"

namespace {

using namespace flatfoliate;
using io::json;

constexpr int kMalformed = 1;
constexpr int kDegenerate = 2;
constexpr int kInvariantFailed = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateConfiguration:
    case ErrorCode::AntipodalPair:
    case ErrorCode::NonGenericProbe:
    case ErrorCode::AmbiguousNu:
    case ErrorCode::FaceMismatch:
    case ErrorCode::NotAFace:
    case ErrorCode::NotAntipodal:
    case ErrorCode::MTooSmall:
    case ErrorCode::GenericityExhausted:
      return kDegenerate;
    default:
      return kMalformed;
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

/// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << text;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad integer '" + item + "' in list");
    }
  }
  return out;
}

int retry_budget_from_env() {
  const char* env = std::getenv("FLATFOLIATE_RETRY_BUDGET");
  if (!env || !*env) return retry_budget_default();
  const auto v = parse_int_list(env);
  if (v.size() != 1 || v[0] < 1)
    throw Error(ErrorCode::ParseError, "FLATFOLIATE_RETRY_BUDGET must be a positive integer");
  return v[0];
}

// ---------------------------------------------------------------------------

int cmd_index(const std::string& input) {
  const auto file = io::configuration_from_json(read_json(input));
  const auto tuple = file.tuple();
  if (tuple.size() != static_cast<std::size_t>(file.n) + 1)
    throw Error(ErrorCode::InvalidCounts, "an index needs n+1 points, got " +
                                              std::to_string(tuple.size()));
  const int index = configuration_index(tuple);
  std::cout << (index > 0 ? "+1" : index < 0 ? "-1" : "0") << '\n';
  return 0;
}

int cmd_formula(const std::string& input) {
  const auto file = io::crossings_from_json(read_json(input));
  for (std::size_t i = 0; i < file.crossings.size(); ++i) {
    if (!file.crossings[i].is_type_one())
      throw Error(ErrorCode::TypeMismatch, "crossing " + std::to_string(i) + " is not type I");
    if (!file.crossings[i].is_generic())
      throw Error(ErrorCode::DegenerateConfiguration,
                  "crossing " + std::to_string(i) + " is not antipodally generic");
  }
  const Rational value = euler_number(file.crossings, file.n);
  Rational bound = 0;
  if (!file.crossings.empty()) {
    std::int64_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < file.crossings.size(); ++i) {
      const auto k = static_cast<std::int64_t>(file.crossings[i].k());
      lo = i ? std::min(lo, k) : k;
      hi = std::max(hi, k);
    }
    bound = sullivan_bound(static_cast<std::int64_t>(file.crossings.size()),
                           file.k_min.value_or(lo), file.k_max.value_or(hi), file.n);
  }
  std::cout << to_string(value) << '\n' << "bound " << to_string(bound) << '\n';
  if (!is_integer(value))
    std::cerr << "warning: formula value " << to_string(value)
              << " is not an integer; only synthetic crossing lists can do this\n";
  return 0;
}

json audit_json(const RealizationAudit& a) {
  return {{"total_volume", to_string(a.total_volume)},
          {"expected_volume", to_string(a.expected_volume)},
          {"full_dimensional", a.full_dimensional},
          {"ridges_ok", a.ridges_ok},
          {"ok", a.ok()}};
}

json complex_report(const SimplicialComplex& c, json audit) {
  json j = io::to_json(c);
  audit["simplex_count"] = c.simplices.size();
  audit["vertex_count"] = c.vertices.size();
  j["audit"] = std::move(audit);
  return j;
}

// ---------------------------------------------------------------------------

struct DecayOptions {
  std::string input, output, export_crossings;
  std::optional<std::string> L;
  int schedule = -1;
  bool vacuous = false;
};

int cmd_torus_decay(const DecayOptions& o) {
  auto config = o.input.empty() ? io::ExperimentConfig::rotation_defaults()
                                : io::experiment_from_json(read_json(o.input));
  if (o.vacuous) {
    const auto diag = HolonomyPair::diagonal();
    config.a = diag.a();
    config.b = diag.b();
  }
  if (o.L) config.L = parse_int_list(*o.L);
  else if (o.input.empty()) config.L = {2, 4, 8};
  if (o.schedule >= 0) config.schedule = o.schedule;
  const std::string output = o.output.empty() ? config.output : o.output;

  TorusOptions opt;
  opt.schedule_index = config.schedule;
  opt.retry_budget = retry_budget_from_env();
  const auto pair = config.holonomy();
  for (std::size_t i = 1; i < config.L.size(); ++i)
    if (config.L[i] <= config.L[i - 1])
      throw Error(ErrorCode::InvalidCounts, "L list must be strictly ascending");

  std::vector<DecayRecord> rows;
  for (std::size_t i = 0; i < config.L.size(); ++i) {
    auto run = run_torus(pair, config.v0, config.L[i], opt);
    if (i == 0 && !o.export_crossings.empty())
      emit(o.export_crossings, io::to_json(run).dump(2) + "\n");
    rows.push_back({config.L[i], run.report});
  }
  std::ostringstream csv;
  io::write_decay_csv(csv, rows);
  emit(output, csv.str());
  return 0;
}

int cmd_folner(const std::string& L_list, int max_T) {
  json rows = json::array();
  for (int L : parse_int_list(L_list)) {
    if (L < 2) throw Error(ErrorCode::InvalidCounts, "L must be >= 2");
    auto [inner, boundary] = count_domains(build_region(L, 0, retry_budget_from_env()));
    rows.push_back({{"L", L},
                    {"folner_ratio_e1", to_string(folner_ratio<2>(folner_box(L), {1, 0}))},
                    {"N", inner},
                    {"N_boundary", boundary}});
  }
  json balls = json::array(), neighborhood = json::array();
  const auto facets = facet_generators();
  for (int T = 0; T <= max_T; ++T) {
    balls.push_back(cayley_ball<2>(facets, T).size());
    neighborhood.push_back({{"T", T}, {"closed_adjacency", check_neighborhood(T)},
                            {"facet_generators", check_neighborhood(T, facets)}});
  }
  json out{{"boxes", rows}, {"cayley_ball_sizes", balls}, {"check_neighborhood", neighborhood}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_verify(const std::string& scope) {
  std::vector<verify::CheckResult> results;
  auto take = [&](std::vector<verify::CheckResult> r) {
    results.insert(results.end(), r.begin(), r.end());
  };
  const bool all = scope == "all";
  if (all || scope == "exactgeom") take(verify::exactgeom_suite());
  if (all || scope == "localformula") take(verify::localformula_suite());
  if (all || scope == "triangulations") take(verify::triangulations_suite());
  if (all || scope == "toruslab") take(verify::toruslab_suite());
  bool passed = true;
  json checks = json::array();
  for (const auto& r : results) {
    passed = passed && r.passed;
    json c{{"suite", r.suite}, {"name", r.name}, {"passed", r.passed}};
    if (!r.passed) c["detail"] = r.detail;
    checks.push_back(std::move(c));
  }
  json report{{"scope", scope}, {"passed", passed}, {"checks", checks}};
  std::cout << report.dump(2) << '\n';
  return passed ? 0 : kInvariantFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact local formula for Euler numbers of affinely foliated sphere bundles"};
  app.require_subcommand(1);

  std::string input, output;

  auto* index = app.add_subcommand("index", "Index of an ordered configuration (regular, then bordered)");
  index->add_option("--input", input, "configuration JSON")->required();

  auto* formula = app.add_subcommand("formula", "Local formula and bound over a crossing list");
  formula->add_option("--input", input, "crossing list JSON")->required();

  auto* tri = app.add_subcommand("triangulate", "Staircase, Kuhn, product-cell and assembled triangulations");
  tri->require_subcommand(1);
  tri->add_option("--output", output, "write JSON here instead of stdout");
  int k = 0, m = 0, n = 0;
  std::string marked;
  auto* stair = tri->add_subcommand("staircase", "Delta^k x Delta^m");
  stair->add_option("k", k)->required();
  stair->add_option("m", m)->required();
  auto* kuhn = tri->add_subcommand("kuhn", "Cube^n with a marked antipodal pair");
  kuhn->add_option("n", n)->required();
  kuhn->add_option("--marked", marked, "bits of the first marked vertex, e.g. 0,1,0");
  auto* product = tri->add_subcommand("product", "one Cube^k x Delta^s cell with nu");
  product->add_option("--input", input, "cells JSON (first cell is used)")->required();
  auto* assemble = tri->add_subcommand("assemble", "cells sharing faces");
  assemble->add_option("--input", input, "cells JSON")->required();

  DecayOptions decay;
  auto* torus = app.add_subcommand("torus-decay", "Euler estimates over Folner boxes on the torus");
  torus->add_option("--input", decay.input, "experiment JSON (defaults to the rotation pair)");
  torus->add_option("--output", decay.output, "CSV path (stdout if omitted)");
  torus->add_option("--L", decay.L, "comma-separated ascending box sizes");
  torus->add_option("--schedule", decay.schedule, "first shear schedule index");
  torus->add_flag("--vacuous", decay.vacuous, "diagonal holonomy: every index is 0");
  torus->add_option("--export-crossings", decay.export_crossings,
                    "write the crossings of the first L as a crossing list");

  std::string folner_L = "2,4,8,16";
  int max_T = 2;
  auto* folner = app.add_subcommand("folner", "Folner ratios, Cayley balls and the neighborhood lemma");
  folner->add_option("--L", folner_L, "comma-separated box sizes");
  folner->add_option("--T", max_T, "largest Cayley radius");

  std::string scope = "all";
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suites");
  verify_cmd->add_option("scope", scope, "exactgeom, localformula, triangulations, toruslab or all")
      ->check(CLI::IsMember({"exactgeom", "localformula", "triangulations", "toruslab", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kMalformed;
  }

  try {
    if (*index) return cmd_index(input);
    if (*formula) return cmd_formula(input);
    if (*tri) {
      json out;
      if (*stair) {
        const auto t = staircase_triangulation(k, m);
        out = complex_report(t, audit_json(audit_realization(t, staircase_shape(k, m))));
      } else if (*kuhn) {
        Label v0(static_cast<std::size_t>(std::max(n, 0)), 0);
        if (!marked.empty()) v0 = parse_int_list(marked);
        Label v1 = v0;
        for (auto& b : v1) b = 1 - b;
        const auto t = kuhn_triangulation(n, v0, v1);
        out = complex_report(t, audit_json(audit_realization(t, CellShape{n, {}})));
      } else if (*product) {
        const auto cells = io::cells_from_json(read_json(input));
        if (cells.empty()) throw Error(ErrorCode::ParseError, "no cells");
        const auto t = triangulate_product_cell(cells[0]);
        out = complex_report(t, audit_json(audit_realization(t, cells[0].shape())));
      } else {
        const auto cells = io::cells_from_json(read_json(input));
        const auto t = assemble_triangulation(cells);
        std::set<std::int64_t> input_ids;
        for (const auto& c : cells)
          for (std::size_t idx = 0; idx < c.vertex_count(); ++idx)
            input_ids.insert(c.id_at(c.local_label(idx)));
        bool same_vertices = input_ids.size() == t.vertices.size();
        for (const auto& [label, info] : t.vertices)
          same_vertices = same_vertices && input_ids.count(label[0]);
        out = complex_report(t, {{"faces_compatible", true},
                                 {"no_new_vertices", same_vertices},
                                 {"euler_characteristic", t.euler_characteristic()},
                                 {"closed_pseudomanifold", t.is_closed_pseudomanifold()}});
      }
      emit(output, out.dump(2) + "\n");
      return 0;
    }
    if (*torus) return cmd_torus_decay(decay);
    if (*folner) return cmd_folner(folner_L, max_T);
    if (*verify_cmd) return cmd_verify(scope);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMalformed;
  }
  return kMalformed;
}
