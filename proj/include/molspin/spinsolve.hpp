#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "molspin/lattice.hpp"

namespace molspin {

inline constexpr int kMaxSpins = 14;

/// Dense 2^n Hamiltonian.  Bit i of a basis index is site i, 0 = up.
Eigen::MatrixXcd spin_hamiltonian(const SpinGraph& graph);

/// sigma^a on one site (a = 1, 2, 3) applied to a state vector.
Eigen::VectorXcd apply_pauli(const Eigen::VectorXcd& psi, int site, int a);

struct SpinSpectrum {
  int n = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  std::vector<int> ground;      // indices of the ground subspace
  double gap = 0.0;             // first level above the ground subspace
  double ground_splitting = 0.0;  // spread inside the ground subspace
  double width = 0.0;
};

/// Ground subspace: levels within ground_tol * spectral width of the minimum.
SpinSpectrum diagonalize(const SpinGraph& graph, double ground_tol = 1e-6);
SpinSpectrum diagonalize_matrix(const Eigen::MatrixXcd& H, int n, double ground_tol = 1e-6);

/// Restrict the ground subspace to its lowest `count` states.
void set_ground_count(SpinSpectrum& spectrum, int count);

/// delta^2 S^a = sum_sites sum_{G,G'} |<G'|sigma^a|G>|^2 / (2 n).
std::array<double, 3> rms_magnetization(const SpinSpectrum& spectrum);
std::array<double, 3> rms_magnetization(const Eigen::MatrixXcd& ground_basis, int n);

struct AbsorptionSpectrum {
  double linewidth = 0.0;
  double reference_energy = 0.0;  // <psi|H|psi>
  std::vector<double> omega;
  std::array<std::vector<double>, 3> chi;
  /// Lorentzian poles E_m - E_psi and weights |<m|S^a|psi>|^2 per polarization.
  std::vector<double> poles;
  std::array<std::vector<double>, 3> weights;

  double evaluate(int a, double omega) const;
};

/// chi^a(w) = Gamma^2 sum_m |<m|S^a|psi>|^2 / ((w - E_m + E_psi)^2 + Gamma^2),
/// S^a = sum_i sigma^a_i / n.
AbsorptionSpectrum absorption_spectrum(const SpinSpectrum& spectrum, const Eigen::VectorXcd& psi,
                                       double linewidth, const std::vector<double>& omega_grid);

std::vector<double> linear_grid(double lo, double hi, int points);

struct SumRuleCheck {
  std::array<double, 3> integral{};  // numerical integral of chi over the real line
  std::array<double, 3> expected{};  // pi Gamma <psi|(S^a)^2|psi>
  double max_rel_error = 0.0;
};

SumRuleCheck check_sum_rule(const AbsorptionSpectrum& spectrum, const Eigen::VectorXcd& psi,
                            int n);

struct KramersReport {
  bool applicable = false;
  bool passed = false;
  double max_pair_splitting = 0.0;  // relative to ||H||
  double min_pair_gap = 0.0;        // smallest gap between consecutive pairs, relative
  std::string note;
};

KramersReport kramers_check(const SpinSpectrum& spectrum, bool all_linear, double tol = 1e-8);

/// Conjugation of every edge block and pseudo-field by one global rotation.
SpinGraph rotate_graph(const SpinGraph& graph, const EulerAngles& angles);

/// Messages for couplings that are not small compared with hbar omega_osc.
std::vector<std::string> energy_scale_warnings(const SpinGraph& graph, double omega_osc,
                                               double ratio = 0.1);

}  // namespace molspin
