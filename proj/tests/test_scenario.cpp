#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "molspin/errors.hpp"
#include "molspin/graph_io.hpp"
#include "molspin/scenario.hpp"

using namespace molspin;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("molspin_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

json pair_config() {
  return json::parse(R"({
    "pipeline": "pair",
    "separation": [0, 0, 1.0],
    "fields": [{"polarization": "x", "label": "2g", "detuning": 0.05, "rabi": 0.01}]
  })");
}

}  // namespace

TEST_CASE("pipeline names round trip") {
  for (auto p : {Pipeline::Potentials, Pipeline::Pair, Pipeline::Lattice, Pipeline::Spectrum,
                 Pipeline::Optimize})
    CHECK(parse_pipeline(pipeline_name(p)) == p);
  CHECK_THROWS_AS(parse_pipeline("bogus"), ValidationError);
}

TEST_CASE("strict parsing") {
  auto j = pair_config();
  CHECK_NOTHROW(parse_config(j));
  j["colour"] = "red";
  CHECK_THROWS_AS(parse_config(j), ValidationError);
  j = pair_config();
  j["fields"][0]["rabbi"] = 0.01;
  CHECK_THROWS_AS(parse_config(j), ValidationError);
  j = pair_config();
  j["fields"][0]["rabi"] = "large";
  CHECK_THROWS_AS(parse_config(j), ValidationError);
  j = pair_config();
  j["mode"] = "exact";
  CHECK_THROWS_AS(parse_config(j), ValidationError);
}

TEST_CASE("polarization forms") {
  auto j = pair_config();
  j["fields"][0]["polarization"] = {{"cartesian", {{0, 0}, {1, 0}, {0, 0}}}};
  auto c = parse_config(j);
  CHECK(std::abs(c.fields[0].pol.minus - Polarization::y().minus) < 1e-15);
  j["fields"][0]["polarization"] = {{"spherical", {{0, 0}, {1, 0}, {0, 0}}}};
  c = parse_config(j);
  CHECK(std::abs(c.fields[0].pol.zero - 1.0) < 1e-15);
}

TEST_CASE("field resolution") {
  auto c = parse_config(pair_config());
  const auto f = resolve_fields(c);
  const auto P = molecule_params(c);
  CHECK(f[0].photon_energy ==
        doctest::Approx(movre_pichler(1.0, P)[index_of(parse_label("2g"))].energy + 0.05));
  auto j = pair_config();
  j["fields"][0] = {{"polarization", "z"}, {"omega_minus_2B", 1.5}, {"rabi", 0.01}};
  CHECK(resolve_fields(parse_config(j))[0].photon_energy == doctest::Approx(2 * P.B + 1.5));
}

TEST_CASE("presets load and validate") {
  for (const char* name : {"fig2", "fig3", "fig4"}) {
    const auto c = load_preset(name);
    const auto rep = validate(c);
    CHECK_MESSAGE(rep.ok(), name);
  }
  CHECK_THROWS_AS(load_preset("nope"), ValidationError);
}

TEST_CASE("validation errors and warnings") {
  auto j = pair_config();
  j.erase("fields");
  CHECK_FALSE(validate(parse_config(j)).ok());
  j = pair_config();
  j["fields"][0]["detuning"] = 0.0;
  CHECK_FALSE(validate(parse_config(j)).ok());
  j = pair_config();
  j["fields"][0]["detuning"] = 0.05;
  j["fields"][0]["rabi"] = 0.02;
  CHECK_FALSE(validate(parse_config(j)).warnings.empty());
  j = json::parse(R"({"pipeline": "lattice", "mode": "gaussian",
    "geometry": {"kind": "square", "ell": 2, "b": 1.0, "z0": 0.7},
    "fields": [{"polarization": "z", "omega_minus_2B": 8.0, "rabi": 0.01}]})");
  CHECK_FALSE(validate(parse_config(j)).ok());
  j["geometry"]["ell"] = 4;
  j["geometry"]["z0"] = 0.0;
  j["pipeline"] = "spectrum";
  j["mode"] = "point_dipole";
  CHECK_FALSE(validate(parse_config(j)).ok());
}

TEST_CASE("pair pipeline writes a tensor agreeing with the oracle") {
  const auto dir = scratch_dir("pair");
  const auto res = run_scenario(parse_config(pair_config()), dir.string());
  CHECK(fs::exists(dir / "tensor.json"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(res.summary["oracle_max_rel_deviation"].get<double>() < 1e-10);
  const auto t = read_json(dir / "tensor.json");
  const auto E = matrix4_from_json(t["energies"]);
  CHECK(std::abs(E(3, 3)) > 10 * std::abs(E(1, 1)));
}

TEST_CASE("potentials pipeline") {
  const auto dir = scratch_dir("fig2");
  run_scenario(load_preset("fig2"), dir.string());
  std::ifstream in(dir / "potentials.csv");
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("r_over_r_gamma,", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 200);
}

TEST_CASE("lattice pipeline and graph round trip") {
  const auto dir = scratch_dir("fig4");
  const auto res = run_scenario(load_preset("fig4"), dir.string());
  for (const char* f : {"graph.json", "graph.dot", "edges.csv", "summary.json"})
    CHECK(fs::exists(dir / f));
  CHECK(res.summary["sites"].get<int>() == 12);
  CHECK(res.summary["patterns_match"].get<bool>());
  const SpinGraph g = spin_graph_from_json(read_json(dir / "graph.json"));
  const auto c = load_preset("fig4");
  const auto direct =
      assemble_spin_graph(build_geometry(*c.geometry), molecule_params(c), resolve_fields(c));
  REQUIRE(g.edges.size() == direct.edges.size());
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    CHECK(g.edges[k].i == direct.edges[k].i);
    CHECK(g.edges[k].block == direct.edges[k].block);
  }
  for (std::size_t k = 0; k < g.fields.size(); ++k) CHECK(g.fields[k] == direct.fields[k]);
}

TEST_CASE("spectrum pipeline on a small lattice") {
  auto j = json::parse(R"({"pipeline": "spectrum",
    "geometry": {"kind": "square", "ell": 2, "b": 0.70710678118654752},
    "spectrum": {"model_I": {"zeta": [0.0], "detuning": 1.88, "rabi": 0.01},
                 "scan": {"from": 1.85, "to": 1.9, "points": 3}}})");
  const auto dir = scratch_dir("spectrum");
  const auto res = run_scenario(parse_config(j), dir.string());
  CHECK(fs::exists(dir / "spectrum_zeta0.csv"));
  CHECK(fs::exists(dir / "magnetization.csv"));
  CHECK(res.summary["runs"][0]["sum_rule_max_rel_error"].get<double>() < 1e-6);
}

TEST_CASE("optimize pipeline") {
  auto j = json::parse(R"({"pipeline": "optimize",
    "fields": [{"polarization": "x", "label": "2g", "detuning": 0.05, "at_r": 1.0, "rabi": 0.008}],
    "optimize": {"targets": [{"name": "zz", "separation": [0, 0, 1.0], "channel": "zz",
                              "target": 0.0}],
                 "free": [{"field": 0, "kind": "rabi", "lower": 0.001, "upper": 0.02}]}})");
  const auto c0 = parse_config(j);
  const auto f = resolve_fields(c0);
  auto truth = f;
  truth[0].rabi = 0.01;
  const double target = edge_block({0, 0, 1.0}, molecule_params(c0), truth,
                                   AveragingMode::PointDipole, 0.0)(3, 3);
  j["optimize"]["targets"][0]["target"] = target;
  const auto dir = scratch_dir("optimize");
  run_scenario(parse_config(j), dir.string());
  const auto out = read_json(dir / "optimized_fields.json");
  CHECK(out.dump().find("rabi") != std::string::npos);
}

TEST_CASE("triad report on the bilayer") {
  const auto c = load_preset("fig4");
  const auto geom = build_geometry(*c.geometry);
  const auto g = assemble_spin_graph(geom, molecule_params(c), resolve_fields(c));
  const auto t = triad_report(g, geom.spacing);
  CHECK(t.J_z < 0);
  CHECK(t.patterns_match);
  CHECK(t.longest_range < 0.1);
  CHECK_THROWS_AS(triad_report(g, 0.3), ValidationError);
}

TEST_CASE("number formatting and CSV") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  const auto dir = scratch_dir("csv");
  write_csv((dir / "a.csv").string(), {"x", "y"}, {{1, 2.5}, {3, -4}});
  std::ifstream in(dir / "a.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "x,y\n1,2.5\n3,-4\n");
}
