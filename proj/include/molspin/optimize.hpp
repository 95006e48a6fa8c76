#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molspin/lattice.hpp"

namespace molspin {

/// One link class: couplings on `separation` in channel (a, b) should equal `target`.
struct LinkTarget {
  std::string name;
  Eigen::Vector3d separation;
  int a = 3;
  int b = 3;
  double target = 0.0;
};

struct ModelTargets {
  std::vector<LinkTarget> links;
  void validate() const;
};

enum class FreeKind { PhotonEnergy, Rabi };

struct FreeParameter {
  int field = 0;
  FreeKind kind = FreeKind::Rabi;
  double lower = 0.0;
  double upper = 0.0;
};

struct OptimizeOptions {
  std::uint64_t seed = 1;
  int max_sweeps = 50;
  int scan_points = 21;
  int golden_steps = 60;
  double tolerance = 1e-12;  // on the objective
  AveragingMode mode = AveragingMode::PointDipole;
  double z0 = 0.0;
};

struct OptimizeResult {
  std::vector<FieldSpec> fields;
  double residual = 0.0;
  int sweeps = 0;
  std::vector<double> history;  // objective after each accepted sweep
};

/// Sum over link classes of ((achieved - target) / |target|)^2; +inf when a
/// field sits on a resonance.
double coupling_objective(const ModelTargets& targets, const MoleculeParams& params,
                          const std::vector<FieldSpec>& fields, AveragingMode mode, double z0);

/// Coordinate descent with a coarse scan plus golden-section refinement per
/// parameter inside its box.  Steps that hit a resonance are rejected.
OptimizeResult optimize_fields(const ModelTargets& targets, const MoleculeParams& params,
                               const std::vector<FieldSpec>& initial,
                               const std::vector<FreeParameter>& free,
                               const OptimizeOptions& options = {});

}  // namespace molspin
