#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "molspin/lattice.hpp"
#include "molspin/optimize.hpp"
#include "molspin/spinsolve.hpp"

namespace molspin {

enum class Pipeline { Potentials, Pair, Lattice, Spectrum, Optimize };

Pipeline parse_pipeline(const std::string& name);
std::string pipeline_name(Pipeline p);

struct MoleculeConfig {
  double gamma_MHz = 40.0;
  double B_over_gamma = 100.0;
};

/// Frequency given either as hbar omega_F - 2B or as a detuning from a
/// labelled level evaluated at separation at_r.  Energies in units of gamma.
struct FieldConfig {
  Polarization pol = Polarization::z();
  std::optional<double> omega_minus_2B;
  std::optional<ManifoldLabel> label;
  double detuning = 0.0;
  std::optional<double> at_r;
  double rabi = 0.0;
};

struct GeometryConfig {
  LatticeKind kind = LatticeKind::Square;
  int ell = 3;
  int rows = 2;
  int cols = 3;
  double b = 1.0;
  double z0 = 0.0;
  std::vector<Eigen::Vector3d> sites;
};

struct GridConfig {
  double r_min = 0.3;
  double r_max = 30.0;
  int points = 200;
};

struct ScanConfig {
  double from = 1.8;
  double to = 2.0;
  int points = 41;
};

struct ModelIConfig {
  std::vector<double> zeta{0.0};
  double detuning = 1.88;
  double rabi = 0.01;
};

struct CodeStateConfig {
  /// Empty: lowest eigenvector.  Otherwise (eigenstate index, amplitude) pairs.
  std::vector<std::pair<int, cplx>> amplitudes;
};

struct SpectrumConfig {
  double linewidth_over_J = 0.1;
  double probe_max_over_J = 3.0;
  int probe_points = 400;
  CodeStateConfig code_state;
  std::optional<ScanConfig> scan;
  std::optional<ModelIConfig> model_I;
};

struct TargetConfig {
  std::string name;
  Eigen::Vector3d separation;
  int a = 3, b = 3;
  double target = 0.0;  // units of gamma
};

struct OptimizeConfig {
  std::vector<TargetConfig> targets;
  std::vector<FreeParameter> free;  // photon-energy bounds as hbar omega - 2B
  std::uint64_t seed = 1;
  int max_sweeps = 50;
};

struct ScenarioConfig {
  std::string name;
  std::optional<Pipeline> pipeline;
  MoleculeConfig molecule;
  GridConfig grid;
  std::optional<Eigen::Vector3d> separation;
  std::optional<GeometryConfig> geometry;
  std::vector<FieldConfig> fields;
  AveragingMode mode = AveragingMode::PointDipole;
  std::optional<double> cutoff;
  std::optional<double> omega_osc_kHz;
  SpectrumConfig spectrum;
  std::optional<OptimizeConfig> optimize;
};

/// Strict parse: unknown keys and wrong types raise ValidationError.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
/// Shipped configuration by name (fig2, fig3, fig4).
ScenarioConfig load_preset(const std::string& name);
std::string preset_path(const std::string& name);

MoleculeParams molecule_params(const ScenarioConfig& c);
LatticeGeometry build_geometry(const GeometryConfig& g);
std::vector<FieldSpec> resolve_fields(const ScenarioConfig& c);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

/// Schema and physics lint; never writes files.
ValidationReport validate(const ScenarioConfig& c);

struct RunResult {
  std::vector<std::string> files;
  nlohmann::json summary;
  std::vector<std::string> warnings;
};

/// Runs the configured pipeline and writes its artifacts into out_dir.
RunResult run_scenario(const ScenarioConfig& c, const std::string& out_dir);

/// Bilayer report: nearest-neighbour couplings grouped by the axis of
/// their separation (x, y, z links) for an orthogonal-triad lattice.
struct TriadReport {
  double J_z = 0.0;
  double J_perp = 0.0;
  double off_pattern_xy = 0.0;  // largest off-pattern entry on x,y links / |J_z|
  double off_pattern_z = 0.0;
  double longest_range = 0.0;   // largest beyond-nearest-neighbour entry / |J_z|
  bool patterns_match = false;  // zz on z, xx on x, yy on y
};

TriadReport triad_report(const SpinGraph& graph, double b);

/// Exit codes used by the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitPole = 3;
inline constexpr int kExitTooLarge = 4;

}  // namespace molspin
