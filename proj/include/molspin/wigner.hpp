#pragma once

#include <Eigen/Dense>

#include "molspin/molstruct.hpp"

namespace molspin {

/// Active z-y-z rotation R = Rz(alpha) Ry(beta) Rz(gamma).
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// d^j_{m'm}(beta); all angular momenta passed doubled so half-integers work.
double wigner_small_d(int two_j, int two_mp, int two_m, double beta);

/// D^j_{m'm} = exp(-i m' alpha) d^j_{m'm}(beta) exp(-i m gamma), rows and
/// columns in ascending m.
Eigen::MatrixXcd wigner_D(int two_j, const EulerAngles& angles);

Eigen::Matrix3d rotation_matrix(const EulerAngles& angles);

/// Spin-1/2 representation in (up, down) order.
Eigen::Matrix2cd su2_matrix(const EulerAngles& angles);

/// R_ab = Tr(sigma_a U sigma_b U^dagger) / 2.
Eigen::Matrix3d spin_rotation_from_su2(const Eigen::Matrix2cd& U);

/// Angles of a rotation taking z onto the unit vector n (gamma = 0).
EulerAngles euler_for_axis(const Eigen::Vector3d& n);

}  // namespace molspin
