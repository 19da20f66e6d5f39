#include <sstream>

#include <gtest/gtest.h>

#include "flatfoliate/serialize.hpp"

using namespace flatfoliate;
using io::json;

namespace {

Rational q(long p, long d) { return ratio(p, d); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::EmptySet;
}

// Text round trip: serialize, dump, parse, load.
json reparse(const json& j) { return json::parse(j.dump()); }

}  // namespace

TEST(Rationals, TravelAsCanonicalStrings) {
  EXPECT_EQ(io::to_json(q(6, -4)), json("-3/2"));
  EXPECT_EQ(io::to_json(Rational(5)), json("5/1"));
  EXPECT_EQ(io::rational_from_json(json("4/6")), q(2, 3));
  EXPECT_EQ(code_of([] { io::rational_from_json(json(0.5)); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::rational_from_json(json("1/0")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::rational_from_json(json("x")); }), ErrorCode::ParseError);
}

TEST(Configuration, RoundTrip) {
  io::ConfigurationFile c;
  c.n = 2;
  c.bordered = {RayVector{q(-3, 5), q(4, 5)}, RayVector{q(-3, 5), q(-4, 5)}};
  c.regular = {RayVector{Rational(1), Rational(0)}, RayVector{q(5, 13), q(12, 13)}};
  const auto back = io::configuration_from_json(reparse(io::to_json(c)));
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.tuple().front(), c.regular.front());
  EXPECT_EQ(back.tuple().back(), c.bordered.back());
}

TEST(Configuration, MalformedInputs) {
  json good = io::to_json(io::ConfigurationFile{2, {RayVector{Rational(1), Rational(0)}}, {}});
  json wrong_schema = good;
  wrong_schema["schema"] = "flatfoliate.cells/1";
  EXPECT_EQ(code_of([&] { io::configuration_from_json(wrong_schema); }), ErrorCode::ParseError);
  json missing = good;
  missing.erase("regular");
  EXPECT_EQ(code_of([&] { io::configuration_from_json(missing); }), ErrorCode::ParseError);
  json bad_dim = good;
  bad_dim["bordered"] = json::array({json::array({"1", "0", "0"})});
  EXPECT_EQ(code_of([&] { io::configuration_from_json(bad_dim); }), ErrorCode::DimensionMismatch);
  json zero = good;
  zero["bordered"] = json::array({json::array({"0", "0"})});
  EXPECT_EQ(code_of([&] { io::configuration_from_json(zero); }), ErrorCode::ZeroVector);
  json bad_n = good;
  bad_n["n"] = "2";
  EXPECT_EQ(code_of([&] { io::configuration_from_json(bad_n); }), ErrorCode::ParseError);
}

TEST(Crossings, RoundTripKeepsValues) {
  const auto run = run_torus(HolonomyPair::rotations(), {Rational(1), q(1, 7)}, 2);
  const auto file = io::crossings_from_json(reparse(io::to_json(run)));
  ASSERT_EQ(file.crossings.size(), run.crossings.size());
  for (std::size_t i = 0; i < file.crossings.size(); ++i)
    EXPECT_EQ(file.crossings[i], run.crossings[i].configuration);
  EXPECT_EQ(file.k_min, run.report.k_min);
  EXPECT_EQ(file.k_max, run.report.k_max);
  EXPECT_EQ(euler_number(file.crossings, 2), run.report.formula_value);
}

TEST(Crossings, OptionalExtremesOmitted) {
  io::CrossingListFile f;
  const auto j = io::to_json(f);
  EXPECT_FALSE(j.contains("k_min"));
  const auto back = io::crossings_from_json(reparse(j));
  EXPECT_TRUE(back.crossings.empty());
  EXPECT_FALSE(back.k_max.has_value());
}

TEST(Experiment, RoundTrip) {
  auto c = io::ExperimentConfig::rotation_defaults();
  c.L = {2, 3, 5};
  c.schedule = 4;
  c.output = "decay.csv";
  c.v0 = {Rational(1), q(1, 11)};
  const auto back = io::experiment_from_json(reparse(io::to_json(c)));
  EXPECT_EQ(back.a, c.a);
  EXPECT_EQ(back.b, c.b);
  EXPECT_EQ(back.v0, c.v0);
  EXPECT_EQ(back.L, c.L);
  EXPECT_EQ(back.schedule, 4);
  EXPECT_EQ(back.output, "decay.csv");
}

TEST(Experiment, HolonomyValidated) {
  auto j = io::to_json(io::ExperimentConfig::rotation_defaults());
  j["holonomy"]["B"] = json::array({"1", "1", "0", "1"});
  EXPECT_EQ(code_of([&] { io::experiment_from_json(j); }), ErrorCode::NonCommuting);
  j["holonomy"]["B"] = json::array({"2", "0", "0", "1"});
  EXPECT_EQ(code_of([&] { io::experiment_from_json(j); }), ErrorCode::NotSpecialLinear);
  j["holonomy"]["B"] = json::array({"1", "0", "0"});
  EXPECT_EQ(code_of([&] { io::experiment_from_json(j); }), ErrorCode::ParseError);
}

TEST(Complex, RoundTrip) {
  for (const auto& c : {staircase_triangulation(2, 3), kuhn_triangulation(3)}) {
    const auto back = io::complex_from_json(reparse(io::to_json(c)));
    EXPECT_EQ(back, c);
  }
}

TEST(Cells, RoundTrip) {
  const auto region = build_region(2);
  const auto cells = grid_dual_cells(region, 3);
  const auto back = io::cells_from_json(reparse(io::cells_to_json(cells)));
  ASSERT_EQ(back.size(), cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    EXPECT_EQ(back[i].cube_dim, cells[i].cube_dim);
    EXPECT_EQ(back[i].simplex_dim, cells[i].simplex_dim);
    EXPECT_EQ(back[i].nu, cells[i].nu);
    EXPECT_EQ(back[i].ids, cells[i].ids);
  }
}

TEST(Cells, WrongVertexCountRejected) {
  json j{{"schema", io::kCellsSchema},
         {"cells", json::array({{{"cube_dim", 1}, {"simplex_dim", 1}, {"nu", {0, 1, 2}}}})}};
  EXPECT_EQ(code_of([&] { io::cells_from_json(j); }), ErrorCode::InvalidCounts);
}

TEST(Csv, HeaderAndRows) {
  const int Ls[] = {2, 3};
  const auto rows = decay_experiment(HolonomyPair::rotations(), {Rational(1), q(1, 7)}, Ls);
  std::ostringstream os;
  io::write_decay_csv(os, rows);
  EXPECT_EQ(os.str(),
            "L,N,N_boundary,X,k_min,k_max,bound,formula_value\n"
            "2,4,12,24,4,9,18/5,0/1\n"
            "3,9,16,48,9,16,256/165,0/1\n");
}
