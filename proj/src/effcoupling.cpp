#include "molspin/effcoupling.hpp"

#include <algorithm>
#include <cmath>

#include "molspin/errors.hpp"

namespace molspin {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

const std::array<Eigen::Matrix2cd, 4>& pauli4() {
  static const std::array<Eigen::Matrix2cd, 4> s = {
      Eigen::Matrix2cd::Identity(),
      (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(),
      (Eigen::Matrix2cd() << 0, cplx(0, -1), cplx(0, 1), 0).finished(),
      (Eigen::Matrix2cd() << 1, 0, 0, -1).finished()};
  return s;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

Eigen::Matrix4d symmetrize_upper(Eigen::Matrix4d A) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) A(i, j) = A(j, i);
  return A;
}

double pole_tolerance_for(const MoleculeParams& params) { return 1e-9 * params.gamma; }

}  // namespace

Polarization Polarization::x() { return {kInvSqrt2, 0.0, -kInvSqrt2}; }
Polarization Polarization::y() { return {cplx(0, kInvSqrt2), 0.0, cplx(0, kInvSqrt2)}; }
Polarization Polarization::z() { return {0.0, 1.0, 0.0}; }

Polarization Polarization::from_cartesian(const Eigen::Vector3cd& e) {
  const cplx i(0, 1);
  return {(e(0) + i * e(1)) * kInvSqrt2, e(2), -(e(0) - i * e(1)) * kInvSqrt2};
}

Eigen::Vector3cd Polarization::cartesian() const {
  const cplx i(0, 1);
  return {(minus - plus) * kInvSqrt2, -i * (minus + plus) * kInvSqrt2, zero};
}

bool Polarization::is_linear(double tol) const {
  const Eigen::Vector3cd e = cartesian();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (std::abs((e(a) * std::conj(e(b))).imag()) > tol) return false;
  return true;
}

void FieldSpec::validate() const {
  if (std::abs(pol.norm2() - 1.0) > 1e-12) {
    throw InvalidArgument("polarization must be normalized, |alpha|^2 = " +
                          std::to_string(pol.norm2()));
  }
  if (!(rabi >= 0.0) || !std::isfinite(rabi)) throw InvalidArgument("rabi must be >= 0");
  if (!std::isfinite(photon_energy)) throw InvalidArgument("photon energy must be finite");
}

Eigen::Matrix4d CouplingTensor::energies(bool with_scalar) const {
  Eigen::Matrix4d E = prefactor * A;
  if (!with_scalar) E(0, 0) = 0.0;
  return E;
}

std::array<double, kNumLevels> s_amplitudes(const std::vector<ManifoldLevel>& levels,
                                            const FieldSpec& field, double pole_tolerance,
                                            double separation) {
  if (levels.size() != kNumLevels) throw InvalidArgument("expected 16 manifold levels");
  std::array<double, kNumLevels> s{};
  if (field.rabi == 0.0) return s;
  for (int i = 0; i < kNumLevels; ++i) {
    const double detuning = field.photon_energy - levels[i].energy;
    if (std::abs(detuning) <= pole_tolerance) {
      throw ResonancePole(levels[i].label.name(), separation, detuning);
    }
    s[i] = field.rabi / detuning;
  }
  return s;
}

double CCoefficients::zero(Parity p, Reflection m, int j, int k) const {
  const int b = zero_block(p, m);
  if (j == 1 && k == 2) return c12[b];
  if (j == 2 && k == 1) return c21[b];
  throw InvalidArgument("C(0, j, k) is defined for (j, k) = (1, 2) or (2, 1)");
}

CCoefficients c_coefficients(const std::vector<ManifoldLevel>& levels,
                             const std::array<double, kNumLevels>& s) {
  CCoefficients c;
  for (int b = 0; b < 4; ++b) {
    const int half = 2 * b, three = 2 * b + 1;
    const double K1 = levels[three].eigvec_coeffs.at(0), K2 = levels[three].eigvec_coeffs.at(1);
    c.c12[b] = K1 * K1 * s[three] + K2 * K2 * s[half];
    c.c21[b] = K2 * K2 * s[three] + K1 * K1 * s[half];
    c.cross[b] = K1 * K2 * (s[three] - s[half]);
  }
  for (int pi = 0; pi < 2; ++pi) {
    const int base = pi == 0 ? 8 : 11;
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    for (int a = 0; a < 3; ++a) {
      const auto& k = levels[base + a].eigvec_coeffs;
      const Eigen::Vector3d v(k.at(0), k.at(1), k.at(2));
      M += s[base + a] * v * v.transpose();
    }
    c.one[pi] = M;
  }
  c.two_g = s[14];
  c.two_u = s[15];
  return c;
}

CouplingTensor a_tensor(const std::vector<ManifoldLevel>& levels, const FieldSpec& field,
                        double pole_tolerance, double separation) {
  field.validate();
  const auto s = s_amplitudes(levels, field, pole_tolerance, separation);
  const CCoefficients C = c_coefficients(levels, s);
  const auto G = Parity::Gerade, U = Parity::Ungerade;
  const auto P = Reflection::Plus, M = Reflection::Minus;

  const cplx am = field.pol.minus, a0 = field.pol.zero, ap = field.pol.plus;
  const double n0 = std::norm(a0), nt = std::norm(am) + std::norm(ap);
  const cplx pm = std::conj(ap) * am;
  const cplx p = std::conj(ap) * a0, m = std::conj(a0) * am;

  const double c0gm12 = C.zero(G, M, 1, 2), c0up12 = C.zero(U, P, 1, 2);
  const double c0gm21 = C.zero(G, M, 2, 1), c0gp21 = C.zero(G, P, 2, 1);
  const double c1g33 = C.one_block(G, 3, 3), c1u11 = C.one_block(U, 1, 1);
  const double c1g22 = C.one_block(G, 2, 2);
  const double c1g23 = std::sqrt(2.0) * C.one_block(G, 2, 3);
  const double d0gm = C.cross[CCoefficients::zero_block(G, M)];

  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  A(1, 1) = n0 * (c0gm12 - c0up12) + nt * (c1g33 - c1u11) + pm.real() * (c0gm21 - c0gp21);
  A(2, 2) = A(1, 1) - 2.0 * pm.real() * (c0gm21 - c0gp21);
  A(3, 3) = n0 * (2.0 * c1g22 - c0gm12 - c0up12) +
            nt * (C.two_g + 0.5 * c0gp21 + 0.5 * c0gm21 - c1u11 - c1g33);
  A(1, 2) = pm.imag() * (c0gm21 - c0gp21);
  A(1, 3) = (p - m).real() * (c1g23 - d0gm);
  A(2, 3) = (p - m).imag() * (c1g23 - d0gm);
  A(0, 1) = (p + m).real() * (c1g23 + d0gm);
  A(0, 2) = (p + m).imag() * (c1g23 + d0gm);
  A(0, 3) = (std::norm(ap) - std::norm(am)) * (C.two_g - 0.5 * c0gp21 - 0.5 * c0gm21);
  A(0, 0) = n0 * (2.0 * c1g22 + c0gm12 + c0up12) +
            nt * (C.two_g + 0.5 * c0gp21 + 0.5 * c0gm21 + c1u11 + c1g33);

  CouplingTensor t;
  t.A = symmetrize_upper(A);
  t.prefactor = field.rabi / 8.0;
  return t;
}

CouplingTensor a_tensor(double r, const MoleculeParams& params, const FieldSpec& field) {
  return a_tensor(movre_pichler(r, params), field, pole_tolerance_for(params), r);
}

Eigen::Matrix4cd direct_effective_hamiltonian(const Eigen::Vector3d& separation,
                                              const MoleculeParams& params,
                                              const FieldSpec& field) {
  field.validate();
  if (field.rabi == 0.0) return Eigen::Matrix4cd::Zero();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      pair_excitation_hamiltonian(separation, params));

  // In-phase excitation of either molecule (k_F . dz -> 0).
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(kPairDim, 4);
  const std::array<cplx, 3> alpha{field.pol.minus, field.pol.zero, field.pol.plus};
  for (int s1 : {1, -1})
    for (int s2 : {1, -1})
      for (int e = 0; e < 2; ++e)
        for (int q = -1; q <= 1; ++q)
          P(pair_basis_index({e, q, s1, s2}), ground_index(s1, s2)) += alpha[q + 1];

  const double detuning = field.photon_energy - 2.0 * params.B;
  const Eigen::MatrixXcd X = es.eigenvectors().adjoint() * P;
  Eigen::VectorXd inv(kPairDim);
  for (int k = 0; k < kPairDim; ++k) {
    const double den = detuning - es.eigenvalues()(k);
    if (std::abs(den) <= pole_tolerance_for(params)) {
      throw ResonancePole("pair eigenstate " + std::to_string(k), separation.norm(), den);
    }
    inv(k) = 1.0 / den;
  }
  const Eigen::Matrix4cd H =
      0.25 * field.rabi * field.rabi * (X.adjoint() * inv.asDiagonal() * X);
  return 0.5 * (H + H.adjoint());
}

Eigen::Matrix4cd direct_effective_hamiltonian(double r, const MoleculeParams& params,
                                              const FieldSpec& field) {
  return direct_effective_hamiltonian(Eigen::Vector3d(0, 0, r), params, field);
}

Eigen::Matrix4cd pauli_decompose(const Eigen::Matrix4cd& H) {
  const auto& s = pauli4();
  Eigen::Matrix4cd m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = 0.25 * (kron(s[a], s[b]) * H).trace();
  return m;
}

Eigen::Matrix4cd pauli_compose(const Eigen::Matrix4d& m) {
  const auto& s = pauli4();
  Eigen::Matrix4cd H = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (m(a, b) != 0.0) H += m(a, b) * kron(s[a], s[b]);
  return H;
}

CouplingTensor tensor_from_hamiltonian(const Eigen::Matrix4cd& H, double rabi) {
  CouplingTensor t;
  t.prefactor = rabi / 8.0;
  if (rabi > 0.0) t.A = pauli_decompose(H).real() / t.prefactor;
  return t;
}

FieldSpec rotate_field(const FieldSpec& field, const EulerAngles& angles) {
  FieldSpec out = field;
  out.pol = Polarization::from_spherical(wigner_D(2, angles).adjoint() * field.pol.spherical());
  return out;
}

Eigen::Matrix4d rotate_tensor(const Eigen::Matrix4d& A, const EulerAngles& angles) {
  Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
  M.block<3, 3>(1, 1) = spin_rotation_from_su2(su2_matrix(angles));
  return M * A * M.transpose();
}

CouplingTensor rotate_tensor(const CouplingTensor& t, const EulerAngles& angles) {
  return {rotate_tensor(t.A, angles), t.prefactor};
}

CouplingTensor lab_tensor(const Eigen::Vector3d& separation, const MoleculeParams& params,
                          const FieldSpec& field) {
  const EulerAngles angles = euler_for_axis(separation);
  return rotate_tensor(a_tensor(separation.norm(), params, rotate_field(field, angles)), angles);
}

void WavepacketGeometry::validate() const {
  if (!(z0 > 0) || !(delta_z > 0) || !std::isfinite(z0) || !std::isfinite(delta_z)) {
    throw InvalidArgument("wavepacket geometry needs z0 > 0 and delta_z > 0");
  }
  if (!(z0 / delta_z < 0.5)) {
    throw InvalidArgument("z0 / delta_z must be below 0.5");
  }
}

double WavepacketGeometry::r_low() const { return std::max(delta_z - 8.0 * z0, 1e-6 * delta_z); }

double radial_weight(double r, const WavepacketGeometry& geom) {
  const double z02 = geom.z0 * geom.z0;
  const double u = r - geom.delta_z;
  return r * std::exp(-u * u / (4.0 * z02)) * -std::expm1(-r * geom.delta_z / z02);
}

void check_pole_free(const WavepacketGeometry& geom, const MoleculeParams& params,
                     const FieldSpec& field, int samples) {
  geom.validate();
  if (field.rabi == 0.0) return;
  const double lo = geom.r_low(), hi = geom.r_high();
  std::array<double, kNumLevels> first{};
  for (int k = 0; k < samples; ++k) {
    const double r = lo + (hi - lo) * k / (samples - 1);
    const auto levels = movre_pichler(r, params);
    for (int i = 0; i < kNumLevels; ++i) {
      const double det = field.photon_energy - levels[i].energy;
      if (k == 0) first[i] = det;
      if (std::abs(det) <= pole_tolerance_for(params) || det * first[i] < 0) {
        throw PoleInsideWavepacket(levels[i].label.name(), lo, hi);
      }
    }
  }
}

CouplingTensor averaged_tensor(const WavepacketGeometry& geom, const MoleculeParams& params,
                               const FieldSpec& field) {
  check_pole_free(geom, params, field);
  CouplingTensor t;
  t.prefactor = field.rabi / 8.0;
  QuadratureOptions opt;
  opt.rel_tol = 1e-9;
  t.A = radial_average<Eigen::Matrix4d>([&](double r) { return a_tensor(r, params, field).A; },
                                        geom, opt);
  return t;
}

double anisotropy_ratio(const WavepacketGeometry& geom) {
  geom.validate();
  const double dz = geom.delta_z;
  const double kappa = dz * dz / (2.0 * geom.z0 * geom.z0);
  const double t_max = std::min(2.0, 60.0 / kappa);
  QuadratureOptions opt;
  opt.rel_tol = 1e-12;
  // sin^2 = t (2 - t), cos^2 = (1 - t)^2
  const double perp = integrate<double>(
      [&](double t) { return std::exp(-kappa * t) * t * (2.0 - t); }, 0.0, t_max, opt);
  const double par = integrate<double>(
      [&](double t) { return std::exp(-kappa * t) * (1.0 - t) * (1.0 - t); }, 0.0, t_max, opt);
  return perp / par;
}

}  // namespace molspin
