#include "molspin/wigner.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "molspin/errors.hpp"

namespace molspin {

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

const std::array<Eigen::Matrix2cd, 3>& pauli() {
  static const std::array<Eigen::Matrix2cd, 3> s = {
      (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(),
      (Eigen::Matrix2cd() << 0, cplx(0, -1), cplx(0, 1), 0).finished(),
      (Eigen::Matrix2cd() << 1, 0, 0, -1).finished()};
  return s;
}

}  // namespace

double wigner_small_d(int two_j, int two_mp, int two_m, double beta) {
  if (two_j < 0 || std::abs(two_mp) > two_j || std::abs(two_m) > two_j ||
      (two_j - two_mp) % 2 != 0 || (two_j - two_m) % 2 != 0) {
    throw InvalidArgument("invalid angular momentum projection");
  }
  const int jpm = (two_j + two_m) / 2, jmm = (two_j - two_m) / 2;
  const int jpmp = (two_j + two_mp) / 2, jmmp = (two_j - two_mp) / 2;
  const int mpm = (two_mp - two_m) / 2;
  const double pre = std::sqrt(factorial(jpmp) * factorial(jmmp) * factorial(jpm) * factorial(jmm));
  const double c = std::cos(0.5 * beta), s = std::sin(0.5 * beta);
  // sum_k (-1)^{k+m'-m} c^{2j+m-m'-2k} s^{m'-m+2k} / [(j+m-k)! k! (j-m'-k)! (m'-m+k)!]
  double sum = 0.0;
  for (int k = std::max(0, -mpm); k <= std::min(jpm, jmmp); ++k) {
    const double den =
        factorial(jpm - k) * factorial(k) * factorial(jmmp - k) * factorial(mpm + k);
    const double sign = (mpm + k) % 2 == 0 ? 1.0 : -1.0;
    const int pc = two_j - mpm - 2 * k;
    const int ps = mpm + 2 * k;
    sum += sign * std::pow(c, pc) * std::pow(s, ps) / den;
  }
  return pre * sum;
}

Eigen::MatrixXcd wigner_D(int two_j, const EulerAngles& a) {
  const int n = two_j + 1;
  Eigen::MatrixXcd D(n, n);
  for (int i = 0; i < n; ++i) {
    const int two_mp = -two_j + 2 * i;
    for (int k = 0; k < n; ++k) {
      const int two_m = -two_j + 2 * k;
      const double phase = -0.5 * (two_mp * a.alpha + two_m * a.gamma);
      D(i, k) = std::polar(wigner_small_d(two_j, two_mp, two_m, a.beta), phase);
    }
  }
  return D;
}

Eigen::Matrix3d rotation_matrix(const EulerAngles& a) {
  using Eigen::AngleAxisd;
  using Eigen::Vector3d;
  return (AngleAxisd(a.alpha, Vector3d::UnitZ()) * AngleAxisd(a.beta, Vector3d::UnitY()) *
          AngleAxisd(a.gamma, Vector3d::UnitZ()))
      .toRotationMatrix();
}

Eigen::Matrix2cd su2_matrix(const EulerAngles& a) {
  const Eigen::MatrixXcd D = wigner_D(1, a);  // ascending: (down, up)
  Eigen::Matrix2cd U;
  U << D(1, 1), D(1, 0), D(0, 1), D(0, 0);
  return U;
}

Eigen::Matrix3d spin_rotation_from_su2(const Eigen::Matrix2cd& U) {
  const auto& s = pauli();
  Eigen::Matrix3d R;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) R(a, b) = 0.5 * (s[a] * U * s[b] * U.adjoint()).trace().real();
  return R;
}

EulerAngles euler_for_axis(const Eigen::Vector3d& n) {
  const double norm = n.norm();
  if (!(norm > 0)) throw InvalidArgument("axis must be nonzero");
  const Eigen::Vector3d u = n / norm;
  EulerAngles a;
  a.beta = std::acos(std::clamp(u.z(), -1.0, 1.0));
  a.alpha = (std::abs(u.x()) < 1e-15 && std::abs(u.y()) < 1e-15) ? 0.0 : std::atan2(u.y(), u.x());
  a.gamma = 0.0;
  return a;
}

}  // namespace molspin
