#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "molspin/errors.hpp"
#include "molspin/optimize.hpp"

using namespace molspin;

namespace {

const MoleculeParams P = MoleculeParams::reduced(100);

FieldSpec z_field(const std::string& label, double detuning, double rabi) {
  return {Polarization::z(), photon_energy_for(parse_label(label), detuning, 1.0, P), rabi};
}

std::vector<FieldSpec> triad_fields() {
  return {z_field("1g(1/2)", -0.025, 0.01), z_field("0g-(1/2)", 0.025, 0.0025),
          z_field("2g(3/2)", 0.05, 0.01)};
}

ModelTargets forward_targets(const std::vector<FieldSpec>& fields) {
  ModelTargets t;
  const Eigen::Vector3d axes[3] = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                   Eigen::Vector3d::UnitZ()};
  const char* names[3] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k) {
    const double v = edge_block(axes[k], P, fields, AveragingMode::PointDipole, 0.0)(k + 1, k + 1);
    t.links.push_back({names[k], axes[k], k + 1, k + 1, v});
  }
  // x and y links are equivalent; the transverse channel on z links fixes the third amplitude.
  const double zx = edge_block(axes[2], P, fields, AveragingMode::PointDipole, 0.0)(1, 1);
  t.links.push_back({"z-transverse", axes[2], 1, 1, zx});
  return t;
}

}  // namespace

TEST_CASE("objective vanishes at the generating fields") {
  const auto f = triad_fields();
  const auto t = forward_targets(f);
  CHECK(coupling_objective(t, P, f, AveragingMode::PointDipole, 0.0) < 1e-28);
  auto g = f;
  g[0].rabi *= 1.1;
  CHECK(coupling_objective(t, P, g, AveragingMode::PointDipole, 0.0) > 1e-4);
  g[0].photon_energy = movre_pichler(1.0, P)[index_of(parse_label("1g(1/2)"))].energy;
  CHECK(std::isinf(coupling_objective(t, P, g, AveragingMode::PointDipole, 0.0)));
}

TEST_CASE("target validation") {
  ModelTargets t;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  t.links.push_back({"z", Eigen::Vector3d::UnitZ(), 3, 3, 0.0});
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  t.links[0].target = 1.0;
  t.links[0].a = 4;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
}

TEST_CASE("recovers perturbed amplitudes") {
  const auto truth = triad_fields();
  const auto targets = forward_targets(truth);
  const double signs[4][3] = {{1.2, 0.8, 1.2}, {0.8, 1.2, 0.8}, {1.2, 1.2, 0.8}, {0.8, 0.8, 1.2}};
  for (const auto& s : signs) {
    auto start = truth;
    std::vector<FreeParameter> free;
    for (int k = 0; k < 3; ++k) {
      start[k].rabi *= s[k];
      free.push_back({k, FreeKind::Rabi, 0.5 * truth[k].rabi, 1.5 * truth[k].rabi});
    }
    OptimizeOptions opt;
    opt.max_sweeps = 200;
    const auto res = optimize_fields(targets, P, start, free, opt);
    CHECK(res.residual < 1e-8);
    for (int k = 0; k < 3; ++k) CHECK(res.fields[k].rabi == doctest::Approx(truth[k].rabi).epsilon(1e-3));
    for (std::size_t h = 1; h < res.history.size(); ++h) CHECK(res.history[h] < res.history[h - 1]);
  }
}

TEST_CASE("photon energy as a free parameter") {
  const auto truth = triad_fields();
  ModelTargets t;
  t.links.push_back(forward_targets(truth).links[2]);
  auto start = truth;
  start[2].photon_energy += 0.01;
  const double e = truth[2].photon_energy;
  const auto res = optimize_fields(t, P, start, {{2, FreeKind::PhotonEnergy, e - 0.02, e + 0.02}});
  CHECK(res.residual < 1e-10);
}

TEST_CASE("deterministic for a fixed seed") {
  const auto truth = triad_fields();
  const auto targets = forward_targets(truth);
  auto start = truth;
  start[0].rabi *= 1.2;
  std::vector<FreeParameter> free = {{0, FreeKind::Rabi, 0.005, 0.015},
                                     {1, FreeKind::Rabi, 0.001, 0.004}};
  const auto a = optimize_fields(targets, P, start, free);
  const auto b = optimize_fields(targets, P, start, free);
  CHECK(a.residual == b.residual);
  CHECK(a.fields[0].rabi == b.fields[0].rabi);
}

TEST_CASE("argument errors and no improvement") {
  const auto truth = triad_fields();
  const auto targets = forward_targets(truth);
  CHECK_THROWS_AS(optimize_fields(targets, P, truth, {}), InvalidArgument);
  CHECK_THROWS_AS(optimize_fields(targets, P, truth, {{5, FreeKind::Rabi, 0, 1}}), InvalidArgument);
  CHECK_THROWS_AS(optimize_fields(targets, P, truth, {{0, FreeKind::Rabi, 1, 0}}), InvalidArgument);
  CHECK_THROWS_AS(optimize_fields(targets, P, truth, {{0, FreeKind::Rabi, -1, 1}}), InvalidArgument);
  // Already optimal: returns without sweeping.
  const auto done = optimize_fields(targets, P, truth, {{0, FreeKind::Rabi, 0.005, 0.015}});
  CHECK(done.sweeps == 0);
  // A parameter that does not enter the objective.
  ModelTargets z;
  z.links.push_back({"z", Eigen::Vector3d::UnitZ(), 3, 3, -1.0});
  std::vector<FieldSpec> one = {truth[0]};
  one.push_back(z_field("2g(3/2)", 0.05, 0.0));
  one[0].rabi = 0.0;
  CHECK_THROWS_AS(optimize_fields(z, P, one, {{1, FreeKind::PhotonEnergy, one[1].photon_energy - 0.01,
                                               one[1].photon_energy + 0.01}}),
                  NoImprovement);
}
