#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "molspin/effcoupling.hpp"

namespace molspin {

enum class LatticeKind { Square, StackedTriangular, Custom };

struct LatticeGeometry {
  LatticeKind kind = LatticeKind::Custom;
  std::vector<Eigen::Vector3d> sites;
  double spacing = 1.0;  // nearest-neighbour distance b
  double z0 = 0.0;
};

/// Square: site (i, j) at j b x + i b z, index i * ell + j.
LatticeGeometry square_lattice(int ell, double b, double z0 = 0.0);

/// Two triangular layers normal to (1,1,1): dimers at b (i u + j v) and that
/// point + b z, with u = (1,0,-1), v = (0,1,-1).  Every site has three
/// nearest neighbours along x, y and z.
LatticeGeometry stacked_triangular(int rows, int cols, double b, double z0 = 0.0);

enum class AveragingMode { PointDipole, Gaussian };

struct SpinEdge {
  int i = 0;
  int j = 0;
  Eigen::Vector3d separation = Eigen::Vector3d::Zero();  // sites[j] - sites[i]
  /// Energy coefficients of sigma^a_i sigma^b_j; entry (0,0) is always zero.
  Eigen::Matrix4d block = Eigen::Matrix4d::Zero();
};

/// Edge blocks plus per-site pseudo-fields.  The Hamiltonian is
///   sum_edges sum_{s,t>=1} block(s,t) sigma^s_i sigma^t_j + sum_sites h . sigma,
/// where h collects the block(0,s) and block(s,0) entries of incident edges.
struct SpinGraph {
  std::vector<Eigen::Vector3d> sites;
  std::vector<SpinEdge> edges;
  std::vector<Eigen::Vector3d> fields;

  int size() const { return static_cast<int>(sites.size()); }
  void accumulate_fields();
};

struct AssemblyOptions {
  AveragingMode mode = AveragingMode::PointDipole;
  std::optional<double> cutoff;  // all pairs when unset
  int threads = 0;               // 0: MOLSPIN_THREADS or 1
};

SpinGraph assemble_spin_graph(const LatticeGeometry& geom, const MoleculeParams& params,
                              const std::vector<FieldSpec>& fields,
                              const AssemblyOptions& options = {});

/// Coupling block for one separation summed over fields (no A00).
Eigen::Matrix4d edge_block(const Eigen::Vector3d& separation, const MoleculeParams& params,
                           const std::vector<FieldSpec>& fields, AveragingMode mode, double z0);

enum class RangeBucket { Strong, Weak, Negligible };  // >= 1e-2, >= 1e-3, below (of |J_z|)

struct EdgeClass {
  int edge = 0;
  double distance = 0.0;
  int a = 3, b = 3;           // dominant Pauli channel
  std::string label;          // "zz", "xy", ...
  double strength = 0.0;      // signed block(a, b)
  double off_pattern = 0.0;   // largest |block(s,t)| outside the dominant channel
  double magnitude = 0.0;     // largest |block(s,t)|
  RangeBucket bucket = RangeBucket::Negligible;
};

struct EdgeReport {
  double reference = 0.0;  // |J_z| used for the buckets
  std::vector<EdgeClass> edges;
};

/// Classifies every edge; reference defaults to the largest magnitude.
EdgeReport classify_edges(const SpinGraph& graph, std::optional<double> reference = {});

std::string bucket_name(RangeBucket b);

/// Edge list in DOT with colour by dominant channel and width by bucket.
std::string to_graphviz(const SpinGraph& graph, const EdgeReport& report);

/// J = rabi^2 < 1 / 8(hbar omega_F - 2B - gamma/2 - d^2/r^3) >.
double model_I_coupling(const FieldSpec& field, double b, const MoleculeParams& params,
                        AveragingMode mode = AveragingMode::PointDipole, double z0 = 0.0);

/// Field for model I: cos(zeta) y + sin(zeta) x polarization at hbar omega_F - 2B = detuning.
FieldSpec model_I_field(double zeta, double detuning, double rabi, const MoleculeParams& params);

struct ModelIIBalance {
  double residual = 0.0;  // rabi_1g C(1g,3,3) - rabi_1u C(1u,1,1)
  bool balanced = false;
  std::optional<double> J_perp;
  std::optional<double> J_z;
};

ModelIIBalance model_II_balance(const FieldSpec& field_1g, const FieldSpec& field_1u,
                                const std::optional<FieldSpec>& field_2g, double b,
                                const MoleculeParams& params,
                                AveragingMode mode = AveragingMode::PointDipole,
                                double z0 = 0.0, double rel_tol = 1e-6);

double kitaev_effective_strength(double J_perp, double J_z);

/// Label and detuning resolved against movre_pichler at separation r.
double photon_energy_for(const ManifoldLabel& label, double detuning, double r,
                         const MoleculeParams& params);

}  // namespace molspin
