#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "molspin/molstruct.hpp"
#include "molspin/quadrature.hpp"
#include "molspin/wigner.hpp"

namespace molspin {

/// e_F = minus e_{-1} + zero e_0 + plus e_{+1}.
struct Polarization {
  cplx minus{0.0};
  cplx zero{1.0};
  cplx plus{0.0};

  static Polarization x();
  static Polarization y();
  static Polarization z();
  static Polarization from_cartesian(const Eigen::Vector3cd& e);

  Eigen::Vector3cd spherical() const { return {minus, zero, plus}; }
  static Polarization from_spherical(const Eigen::Vector3cd& v) { return {v(0), v(1), v(2)}; }
  Eigen::Vector3cd cartesian() const;
  double norm2() const { return std::norm(minus) + std::norm(zero) + std::norm(plus); }
  /// True when every component shares a common phase.
  bool is_linear(double tol = 1e-12) const;
};

struct FieldSpec {
  Polarization pol;
  double photon_energy = 0.0;  // hbar omega_F
  double rabi = 0.0;           // hbar |Omega|

  void validate() const;
};

/// H_eff = prefactor * sum_ab A_ab sigma^a (x) sigma^b, prefactor = hbar|Omega|/8.
struct CouplingTensor {
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  double prefactor = 0.0;

  /// prefactor * A, optionally with the scalar A00 channel cleared.
  Eigen::Matrix4d energies(bool with_scalar = false) const;
};

/// s(label) = rabi / (photon_energy - E(label)) in canonical label order.
std::array<double, kNumLevels> s_amplitudes(const std::vector<ManifoldLevel>& levels,
                                            const FieldSpec& field, double pole_tolerance,
                                            double separation = 0.0);

struct CCoefficients {
  // Y = 0 blocks in the order 0g+, 0g-, 0u+, 0u-.
  std::array<double, 4> c12{};    // K1^2 s(3/2) + K2^2 s(1/2)
  std::array<double, 4> c21{};    // K2^2 s(3/2) + K1^2 s(1/2)
  std::array<double, 4> cross{};  // K1 K2 [s(3/2) - s(1/2)]
  std::array<Eigen::Matrix3d, 2> one{Eigen::Matrix3d::Zero(), Eigen::Matrix3d::Zero()};
  double two_g = 0.0;
  double two_u = 0.0;

  static int zero_block(Parity p, Reflection m) {
    return (p == Parity::Gerade ? 0 : 2) + (m == Reflection::Plus ? 0 : 1);
  }
  /// C(0_p^m, j, k) for (j, k) = (1, 2) or (2, 1).
  double zero(Parity p, Reflection m, int j, int k) const;
  /// C(1_p, j, k), 1-based indices.
  double one_block(Parity p, int j, int k) const {
    return one[p == Parity::Gerade ? 0 : 1](j - 1, k - 1);
  }
};

CCoefficients c_coefficients(const std::vector<ManifoldLevel>& levels,
                             const std::array<double, kNumLevels>& s);

/// Closed-form tensor at separation r along the quantization axis.
CouplingTensor a_tensor(double r, const MoleculeParams& params, const FieldSpec& field);
CouplingTensor a_tensor(const std::vector<ManifoldLevel>& levels, const FieldSpec& field,
                        double pole_tolerance, double separation = 0.0);

/// Second-order effective Hamiltonian by explicit summation over the 24
/// eigenstates of the pair Hamiltonian.  The separation overload keeps the
/// quantization axis along lab z.
Eigen::Matrix4cd direct_effective_hamiltonian(double r, const MoleculeParams& params,
                                              const FieldSpec& field);
Eigen::Matrix4cd direct_effective_hamiltonian(const Eigen::Vector3d& separation,
                                              const MoleculeParams& params,
                                              const FieldSpec& field);

/// m_ab = Tr(sigma^a (x) sigma^b H) / 4.
Eigen::Matrix4cd pauli_decompose(const Eigen::Matrix4cd& H);
Eigen::Matrix4cd pauli_compose(const Eigen::Matrix4d& m);
CouplingTensor tensor_from_hamiltonian(const Eigen::Matrix4cd& H, double rabi);

/// Polarization components seen in the frame rotated by `angles`,
/// alpha' = D^1(R)^dagger alpha.
FieldSpec rotate_field(const FieldSpec& field, const EulerAngles& angles);

/// Tensor expressed in the rotated frame brought back to the unrotated one:
/// A -> (1 + R) A (1 + R)^T with R from the spin-1/2 Wigner matrix.
CouplingTensor rotate_tensor(const CouplingTensor& t, const EulerAngles& angles);
Eigen::Matrix4d rotate_tensor(const Eigen::Matrix4d& A, const EulerAngles& angles);

/// Closed-form tensor for an arbitrary lab separation, computed in the edge
/// frame and rotated back.
CouplingTensor lab_tensor(const Eigen::Vector3d& separation, const MoleculeParams& params,
                          const FieldSpec& field);

/// Isotropic Gaussian relative-coordinate density centred at delta_z along z
/// with per-axis variance 2 z0^2.
struct WavepacketGeometry {
  double delta_z = 1.0;
  double z0 = 0.05;

  void validate() const;
  double r_low() const;
  double r_high() const { return delta_z + 8.0 * z0; }
};

namespace detail {

// With t = 1 - cos(theta) the shell weight becomes
// r^2 exp(-(r - dz)^2 / 4 z0^2) exp(-kappa t) dt, kappa = r dz / 2 z0^2.
template <class T, class F>
T shell_integral(F& f, double r, const WavepacketGeometry& geom, const QuadratureOptions& opt) {
  const double z02 = geom.z0 * geom.z0;
  const double kappa = r * geom.delta_z / (2.0 * z02);
  const double t_max = std::min(2.0, 60.0 / kappa);
  const double w = r * r * std::exp(-(r - geom.delta_z) * (r - geom.delta_z) / (4.0 * z02));
  auto inner = [&](double t) { return T(std::exp(-kappa * t) * f(r, std::acos(1.0 - t))); };
  return T(w * integrate<T>(inner, 0.0, t_max, opt));
}

}  // namespace detail

/// <f>_rel over r in the truncated support and theta in [0, pi], normalized by
/// the truncated weight.  f(r, theta) may return any type with +, scalar *.
template <class T, class F>
T relative_average(F&& f, const WavepacketGeometry& geom, const QuadratureOptions& opt = {}) {
  geom.validate();
  auto one = [](double, double) { return 1.0; };
  const double norm = integrate<double>(
      [&](double r) { return detail::shell_integral<double>(one, r, geom, opt); }, geom.r_low(),
      geom.r_high(), opt);
  const T total = integrate<T>(
      [&](double r) { return detail::shell_integral<T>(f, r, geom, opt); }, geom.r_low(),
      geom.r_high(), opt);
  return T(total * (1.0 / norm));
}

/// Unnormalized radial marginal r^2 int dOmega |psi_rel|^2 up to a constant.
double radial_weight(double r, const WavepacketGeometry& geom);

/// Average of f(r) over the radial marginal, normalized on the truncated support.
template <class T, class F>
T radial_average(F&& f, const WavepacketGeometry& geom, const QuadratureOptions& opt = {}) {
  geom.validate();
  const double norm = integrate<double>([&](double r) { return radial_weight(r, geom); },
                                        geom.r_low(), geom.r_high(), opt);
  const T total = integrate<T>([&](double r) { return T(radial_weight(r, geom) * f(r)); },
                               geom.r_low(), geom.r_high(), opt);
  return T(total * (1.0 / norm));
}

/// Throws PoleInsideWavepacket if the photon energy crosses (or touches) an
/// excited level anywhere in the support.
void check_pole_free(const WavepacketGeometry& geom, const MoleculeParams& params,
                     const FieldSpec& field, int samples = 401);

/// Tensor averaged over the radial marginal with the separation held along
/// the edge axis.
CouplingTensor averaged_tensor(const WavepacketGeometry& geom, const MoleculeParams& params,
                               const FieldSpec& field);

/// p_perp(dz) / p_par(dz) from the sin^2 / cos^2 weighted angular integrals.
double anisotropy_ratio(const WavepacketGeometry& geom);

}  // namespace molspin
