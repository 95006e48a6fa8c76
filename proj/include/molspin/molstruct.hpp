#pragma once

#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace molspin {

using cplx = std::complex<double>;

/// Rigid-rotor molecule with spin-rotation coupling, H_m = B N^2 + gamma N.S,
/// and permanent dipole d (d^2/r^3 is an energy).
struct MoleculeParams {
  double B = 100.0;
  double gamma = 1.0;
  double d = 0.70710678118654752440;

  /// gamma = 1, r_gamma = 1: energies in units of gamma, lengths in r_gamma.
  static MoleculeParams reduced(double B_over_gamma);

  /// Separation where d^2/r^3 = gamma/2.
  double r_gamma() const;
  double dipolar_energy(double r) const { return d * d / (r * r * r); }

  void validate() const;
};

struct SingleMoleculeLevels {
  double ground;           // E(N=0, J=1/2)
  double excited_half;     // E(N=1, J=1/2) = 2B - gamma
  double excited_3half;    // E(N=1, J=3/2) = 2B + gamma/2
};

SingleMoleculeLevels single_molecule_levels(const MoleculeParams& params);

/// One state of the N1 + N2 = 1 manifold.  Spins are stored as 2*m_s = +-1.
struct PairBasisState {
  int excited;  // 0: molecule 1 carries the rotational quantum, 1: molecule 2
  int mN;       // projection of the excited rotor, -1..1
  int spin1;
  int spin2;

  int Y2() const { return 2 * mN + spin1 + spin2; }  // 2 * (M_N + M_S)
};

inline constexpr int kPairDim = 24;
inline constexpr int kNumLevels = 16;

const std::array<PairBasisState, kPairDim>& pair_basis();
int pair_basis_index(const PairBasisState& s);

/// Ground spin states ordered (up,up), (up,down), (down,up), (down,down);
/// molecule 1 is the more significant factor of sigma_1 (x) sigma_2.
inline int ground_index(int spin1, int spin2) { return (spin1 > 0 ? 0 : 2) + (spin2 > 0 ? 0 : 1); }

/// H_in on the 24-state manifold with the quantization axis along the
/// intermolecular separation.  Includes the 2B offset.
Eigen::MatrixXcd pair_internal_hamiltonian(double r, const MoleculeParams& params);

/// Same operator with the quantization axis fixed along the lab z axis and the
/// separation pointing along an arbitrary direction.
Eigen::MatrixXcd pair_internal_hamiltonian(const Eigen::Vector3d& separation,
                                           const MoleculeParams& params);

/// H_in - 2B.  Better conditioned for the resolvent than the full operator.
Eigen::MatrixXcd pair_excitation_hamiltonian(const Eigen::Vector3d& separation,
                                             const MoleculeParams& params);

enum class Parity { Gerade, Ungerade };
enum class Reflection { None, Plus, Minus };
enum class Asymptote { Half, ThreeHalf };

inline int sign_of(Parity p) { return p == Parity::Gerade ? 1 : -1; }

/// |Y|_sigma^{+-}(J) with an extra branch index separating the two
/// 1_sigma(3/2) curves (ascending energy).
struct ManifoldLabel {
  int Y = 0;
  Parity parity = Parity::Gerade;
  Reflection reflection = Reflection::None;
  Asymptote J = Asymptote::Half;
  int branch = 0;

  std::string name() const;
  int degeneracy() const { return Y == 0 ? 1 : 2; }
  bool operator==(const ManifoldLabel&) const = default;
};

/// Parses "0g+(1/2)", "1u(3/2)#2", "2g(3/2)" and the shorthand "2g".
ManifoldLabel parse_label(std::string_view text);

/// The 16 labels in canonical order; index_of() inverts it.
const std::array<ManifoldLabel, kNumLevels>& canonical_labels();
int index_of(const ManifoldLabel& label);

struct ManifoldLevel {
  ManifoldLabel label;
  double energy = 0.0;  // absolute, includes 2B
  double shift = 0.0;   // energy - 2B
  std::vector<double> eigvec_coeffs;
};

/// Movre-Pichler potentials at separation r, canonical label order.
std::vector<ManifoldLevel> movre_pichler(double r, const MoleculeParams& params);

/// The Y = +1 3x3 block (without the 2B offset) in units of energy.
Eigen::Matrix3d one_block_matrix(Parity parity, double r, const MoleculeParams& params);

/// Potential curves on a radial grid with labels carried by eigenvector
/// overlap continuity, starting from the largest separation.
struct PotentialCurves {
  std::vector<double> r;
  std::vector<std::array<double, kNumLevels>> shift;  // E - 2B per canonical label
};

PotentialCurves potential_curves(const std::vector<double>& r_grid, const MoleculeParams& params);

/// For each canonical label with Y = 1, the block-ordering index obtained by
/// following eigenvector overlaps down from r_grid.front() to r.  Used to
/// check that in-block energy ordering equals adiabatic continuation.
std::array<int, 3> adiabatic_one_block_order(Parity parity, const std::vector<double>& r_grid,
                                             const MoleculeParams& params);

struct VanDerWaalsShift {
  double scalar = 0.0;          // -d^4 / (2 B r^6)
  Eigen::Matrix4d spin_part;    // scalar * (gamma/4B)^2 (1 + 4 S1.S2/3 - 2 S1z S2z)
};

VanDerWaalsShift vdw_ground_shift(double r, const MoleculeParams& params);

}  // namespace molspin
