#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "molspin/effcoupling.hpp"
#include "molspin/errors.hpp"

using namespace molspin;

namespace {

const MoleculeParams P = MoleculeParams::reduced(100);

Eigen::Matrix4d oracle_tensor(const Eigen::Vector3d& sep, const FieldSpec& f) {
  return tensor_from_hamiltonian(direct_effective_hamiltonian(sep, P, f), f.rabi).A;
}

double max_off_diag_ratio(const Eigen::Matrix4d& A, int a, int b) {
  double other = 0;
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t)
      if (!(s == 0 && t == 0) && !((s == a && t == b) || (s == b && t == a)))
        other = std::max(other, std::abs(A(s, t)));
  return other / std::abs(A(a, b));
}

FieldSpec near(const std::string& label, double r, double detuning, Polarization pol) {
  return {pol, movre_pichler(r, P)[index_of(parse_label(label))].energy + detuning, 0.01};
}

}  // namespace

TEST_CASE("polarization presets and Cartesian conversion") {
  const auto x = Polarization::x();
  CHECK(x.minus == cplx(1 / std::sqrt(2.0)));
  CHECK(x.plus == cplx(-1 / std::sqrt(2.0)));
  const auto y = Polarization::from_cartesian(Eigen::Vector3cd(0, 1, 0));
  CHECK(std::abs(y.minus - Polarization::y().minus) < 1e-15);
  CHECK(std::abs(y.plus - Polarization::y().plus) < 1e-15);
  CHECK((x.cartesian() - Eigen::Vector3cd(1, 0, 0)).norm() < 1e-15);
  CHECK(x.is_linear());
  CHECK_FALSE(Polarization{0, 0, 1}.is_linear());
}

TEST_CASE("field validation") {
  FieldSpec f{Polarization{1, 1, 0}, 200, 0.01};
  CHECK_THROWS_AS(f.validate(), InvalidArgument);
  f.pol = Polarization::z();
  f.rabi = -1;
  CHECK_THROWS_AS(f.validate(), InvalidArgument);
}

TEST_CASE("s amplitudes") {
  const auto levels = movre_pichler(1.0, P);
  const int g = index_of(parse_label("2g"));
  FieldSpec f{Polarization::x(), levels[g].energy + 0.05, 0.01};
  auto s = s_amplitudes(levels, f, 1e-9);
  CHECK(s[g] == doctest::Approx(0.2));
  FieldSpec far = f;
  far.photon_energy = levels[g].energy - 0.05;
  CHECK(s_amplitudes(levels, far, 1e-9)[g] == doctest::Approx(-0.2));
  FieldSpec doubled = f;
  doubled.photon_energy = levels[g].energy + 0.1;
  const auto s2 = s_amplitudes(levels, doubled, 1e-9);
  for (int i = 0; i < kNumLevels; ++i) {
    const double d1 = f.photon_energy - levels[i].energy;
    const double d2 = doubled.photon_energy - levels[i].energy;
    CHECK(s2[i] * d2 == doctest::Approx(s[i] * d1));
  }
  f.rabi = 0;
  for (double v : s_amplitudes(levels, f, 1e-9)) CHECK(v == 0.0);
  FieldSpec pole{Polarization::z(), levels[3].energy, 0.01};
  CHECK_THROWS_AS(s_amplitudes(levels, pole, 1e-9), ResonancePole);
}

TEST_CASE("C coefficients") {
  const auto levels = movre_pichler(1.0, P);
  const int g = index_of(parse_label("2g"));
  FieldSpec f{Polarization::x(), levels[g].energy + 0.05, 0.01};
  const auto s = s_amplitudes(levels, f, 1e-9);
  const auto C = c_coefficients(levels, s);
  CHECK(C.two_g == s[g]);
  std::array<double, kNumLevels> zero{};
  const auto Z = c_coefficients(levels, zero);
  CHECK(Z.two_g == 0.0);
  CHECK(Z.one[0].norm() == 0.0);
  for (double v : Z.c12) CHECK(v == 0.0);
}

TEST_CASE("closed-form tensor equals the second-order oracle") {
  std::mt19937 rng(11);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 60; ++t) {
    const double r = 0.3 * std::pow(100.0, u(rng));
    Eigen::Vector3cd v(cplx(n(rng), n(rng)), cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
    v.normalize();
    const FieldSpec f{Polarization::from_spherical(v), 2 * P.B + 6 * u(rng) - 3, 0.02 * u(rng)};
    Eigen::Matrix4d A = a_tensor(r, P, f).A;
    Eigen::Matrix4d D = oracle_tensor({0, 0, r}, f);
    A(0, 0) = D(0, 0) = 0;
    CHECK((A - D).cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("scalar channel matches the oracle too") {
  const FieldSpec f{Polarization::from_cartesian(Eigen::Vector3cd(0.3, cplx(0, 0.5), 0.8).normalized()),
                    2 * P.B + 0.7, 0.01};
  CHECK(a_tensor(0.9, P, f).A(0, 0) == doctest::Approx(oracle_tensor({0, 0, 0.9}, f)(0, 0)));
}

TEST_CASE("oracle structure") {
  const FieldSpec f{Polarization::x(), 2 * P.B + 1.2, 0.01};
  const auto H = direct_effective_hamiltonian(0.8, P, f);
  CHECK((H - H.adjoint()).norm() < 1e-15);
  Eigen::Matrix4cd swap = Eigen::Matrix4cd::Zero();
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
  CHECK((swap * H * swap - H).norm() < 1e-12 * H.norm());
  FieldSpec off = f;
  off.rabi = 0;
  CHECK(direct_effective_hamiltonian(0.8, P, off).norm() == 0.0);
  CHECK(pauli_decompose(H).imag().cwiseAbs().maxCoeff() < 1e-12 * pauli_decompose(H).cwiseAbs().maxCoeff());
  CHECK((pauli_compose(pauli_decompose(H).real()) - H).norm() < 1e-12 * H.norm());
}

TEST_CASE("linear polarization has no pseudo-field") {
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  for (int t = 0; t < 10; ++t) {
    const Eigen::Vector3d e(n(rng), n(rng), n(rng));
    const FieldSpec f{Polarization::from_cartesian(e.normalized().cast<cplx>()), 2 * P.B + 0.4, 0.01};
    const auto A = a_tensor(0.8, P, f).A;
    CHECK(std::abs(A(0, 1)) + std::abs(A(0, 2)) + std::abs(A(0, 3)) < 1e-12 * A.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("x polarization near 2g gives sigma^z sigma^z") {
  const double r = 1.0;
  const auto f = near("2g", r, 0.02, Polarization::x());
  const auto A = a_tensor(r, P, f).A;
  CHECK(max_off_diag_ratio(A, 3, 3) < 0.1);
  auto below = f;
  below.photon_energy -= 0.04;
  CHECK(a_tensor(r, P, below).A(3, 3) * A(3, 3) < 0);
}

TEST_CASE("z polarization near 0u+ gives an isotropic pattern") {
  const double r = 1.0;
  const auto f = near("0u+(1/2)", r, 0.005, Polarization::z());
  const auto A = a_tensor(r, P, f).A;
  CHECK(A(1, 1) == doctest::Approx(A(2, 2)).epsilon(0.1));
  CHECK(A(1, 1) == doctest::Approx(A(3, 3)).epsilon(0.1));
}

TEST_CASE("linear scaling in rabi and inverse detuning far off resonance") {
  FieldSpec f{Polarization::z(), 2 * P.B + 40.0, 0.01};
  const auto A1 = a_tensor(1.0, P, f).A;
  f.rabi = 0.02;
  CHECK((a_tensor(1.0, P, f).A - 2 * A1).norm() < 1e-12 * A1.norm());
  f.rabi = 0.01;
  f.photon_energy = 2 * P.B + 80.0;
  CHECK((a_tensor(1.0, P, f).A - 0.5 * A1).norm() < 0.05 * A1.norm());
}

TEST_CASE("rotating fields and tensors") {
  const EulerAngles id{};
  const FieldSpec f{Polarization::x(), 2 * P.B + 1.1, 0.01};
  const auto A = a_tensor(0.9, P, f).A;
  CHECK((rotate_tensor(A, id) - A).norm() == 0.0);
  const auto g = rotate_field(f, id);
  CHECK(std::abs(g.pol.minus - f.pol.minus) < 1e-15);

  Eigen::Matrix4d heis = Eigen::Matrix4d::Zero();
  heis(1, 1) = heis(2, 2) = heis(3, 3) = 1.0;
  const EulerAngles a{0.3, 1.2, -2.0};
  CHECK((rotate_tensor(heis, a) - heis).norm() < 1e-14);

  Eigen::Matrix4d zz = Eigen::Matrix4d::Zero();
  zz(3, 3) = 1.0;
  Eigen::Matrix4d xx = Eigen::Matrix4d::Zero();
  xx(1, 1) = 1.0;
  CHECK((rotate_tensor(zz, {0.0, M_PI / 2, 0.0}) - xx).norm() < 1e-15);
}

TEST_CASE("lab tensor equals the lab-frame oracle") {
  std::mt19937 rng(8);
  std::normal_distribution<double> n;
  for (int t = 0; t < 20; ++t) {
    Eigen::Vector3d sep(n(rng), n(rng), n(rng));
    sep *= 1.1 / sep.norm();
    Eigen::Vector3cd v(cplx(n(rng), n(rng)), cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
    const FieldSpec f{Polarization::from_spherical(v.normalized()), 2 * P.B + 0.9, 0.01};
    Eigen::Matrix4d L = lab_tensor(sep, P, f).A, D = oracle_tensor(sep, f);
    CHECK((L - D).cwiseAbs().maxCoeff() < 1e-10 * L.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("relative-coordinate averages") {
  for (double ratio : {0.01, 0.05, 0.1}) {
    const WavepacketGeometry g{1.0, ratio};
    CHECK(relative_average<double>([](double, double) { return 1.0; }, g) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(relative_average<double>([](double r, double) { return r * r; }, g) ==
          doctest::Approx(1.0 + 6 * ratio * ratio).epsilon(1e-7));
  }
  const WavepacketGeometry tiny{2.0, 2e-3};
  auto f = [](double r, double th) { return std::cos(th) / (r * r * r); };
  CHECK(relative_average<double>(f, tiny) == doctest::Approx(1.0 / 8.0).epsilon(1e-5));

  double prev = INFINITY;
  for (double z0 : {0.08, 0.04, 0.02, 0.01, 0.005}) {
    const double err =
        std::abs(relative_average<double>([](double r, double) { return 1.0 / (r * r * r); },
                                          WavepacketGeometry{1.0, z0}) - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK_THROWS_AS(WavepacketGeometry({1.0, 0.6}).validate(), InvalidArgument);
}

TEST_CASE("radial marginal agrees with the full average") {
  const WavepacketGeometry g{1.0, 0.07};
  auto f = [](double r) { return 1.0 / (r * r * r); };
  CHECK(radial_average<double>(f, g) ==
        doctest::Approx(relative_average<double>([&](double r, double) { return f(r); }, g))
            .epsilon(1e-9));
}

TEST_CASE("anisotropy ratio") {
  CHECK(anisotropy_ratio({1.0, 0.05}) == doctest::Approx(1e-2).epsilon(0.2));
  CHECK(anisotropy_ratio({1.0, 0.1 / (2 * M_PI)}) == doctest::Approx(1e-3).epsilon(0.3));
  double prev = 0;
  for (double z = 0.01; z < 0.3; z += 0.01) {
    const double a = anisotropy_ratio({1.0, z});
    CHECK(a > prev);
    prev = a;
  }
}

TEST_CASE("pole inside the wavepacket is refused") {
  const double r = 1.0;
  const auto f = near("2g", r, 0.01, Polarization::x());
  CHECK_THROWS_AS(averaged_tensor({r, 0.05}, P, f), PoleInsideWavepacket);
  const FieldSpec safe{Polarization::x(), 2 * P.B + 8.0, 0.01};
  const auto avg = averaged_tensor({r, 0.01}, P, safe).A;
  const auto point = a_tensor(r, P, safe).A;
  CHECK((avg - point).norm() < 1e-2 * point.norm());
}
