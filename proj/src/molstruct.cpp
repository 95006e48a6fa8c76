#include "molspin/molstruct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "molspin/errors.hpp"

namespace molspin {

namespace {

void require_positive_separation(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw InvalidArgument("separation must be positive and finite, got " + std::to_string(r));
  }
}

// Spherical unit vectors e_q (Condon-Shortley), q = -1, 0, 1 at index q + 1.
std::array<Eigen::Vector3cd, 3> spherical_unit_vectors() {
  const double h = 1.0 / std::sqrt(2.0);
  std::array<Eigen::Vector3cd, 3> e;
  e[0] = Eigen::Vector3cd(cplx(h, 0), cplx(0, -h), 0);   // e_{-1} = (x - i y)/sqrt2
  e[1] = Eigen::Vector3cd(0, 0, 1);                      // e_0 = z
  e[2] = Eigen::Vector3cd(cplx(-h, 0), cplx(0, -h), 0);  // e_{+1} = -(x + i y)/sqrt2
  return e;
}

// Gauge: first component with |v_i| above round-off made positive.
template <class Vec>
void fix_gauge(Vec& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

std::string asymptote_name(Asymptote J) { return J == Asymptote::Half ? "1/2" : "3/2"; }

}  // namespace

MoleculeParams MoleculeParams::reduced(double B_over_gamma) {
  MoleculeParams p;
  p.B = B_over_gamma;
  p.gamma = 1.0;
  p.d = std::sqrt(0.5);
  p.validate();
  return p;
}

double MoleculeParams::r_gamma() const { return std::cbrt(2.0 * d * d / gamma); }

void MoleculeParams::validate() const {
  if (!(B > 0) || !(gamma > 0) || !(d > 0) || !std::isfinite(B) || !std::isfinite(gamma) ||
      !std::isfinite(d)) {
    throw InvalidArgument("molecule parameters B, gamma, d must be positive and finite");
  }
}

SingleMoleculeLevels single_molecule_levels(const MoleculeParams& params) {
  // N.S = [J(J+1) - N(N+1) - S(S+1)] / 2 for N = 1, S = 1/2.
  return {0.0, 2.0 * params.B - params.gamma, 2.0 * params.B + 0.5 * params.gamma};
}

const std::array<PairBasisState, kPairDim>& pair_basis() {
  static const std::array<PairBasisState, kPairDim> basis = [] {
    std::array<PairBasisState, kPairDim> b{};
    int k = 0;
    for (int e = 0; e < 2; ++e)
      for (int q = -1; q <= 1; ++q)
        for (int s1 : {1, -1})
          for (int s2 : {1, -1}) b[k++] = {e, q, s1, s2};
    return b;
  }();
  return basis;
}

int pair_basis_index(const PairBasisState& s) {
  return s.excited * 12 + (s.mN + 1) * 4 + (s.spin1 > 0 ? 0 : 2) + (s.spin2 > 0 ? 0 : 1);
}

Eigen::MatrixXcd pair_excitation_hamiltonian(const Eigen::Vector3d& separation,
                                             const MoleculeParams& params) {
  params.validate();
  const double r = separation.norm();
  require_positive_separation(r);
  const Eigen::Vector3d n = separation / r;

  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(kPairDim, kPairDim);
  const auto& basis = pair_basis();

  // gamma N.S on the excited rotor and its own spin.
  for (int i = 0; i < kPairDim; ++i) {
    const PairBasisState s = basis[i];
    const int own = s.excited == 0 ? s.spin1 : s.spin2;
    H(i, i) += params.gamma * 0.5 * s.mN * own;
    auto with_own_spin = [&](int mN, int spin) {
      PairBasisState t = s;
      t.mN = mN;
      (t.excited == 0 ? t.spin1 : t.spin2) = spin;
      return pair_basis_index(t);
    };
    if (own > 0 && s.mN < 1) {  // N+ S-
      const double amp = std::sqrt(2.0 - s.mN * (s.mN + 1));
      H(with_own_spin(s.mN + 1, -1), i) += params.gamma * 0.5 * amp;
    }
    if (own < 0 && s.mN > -1) {  // N- S+
      const double amp = std::sqrt(2.0 - s.mN * (s.mN - 1));
      H(with_own_spin(s.mN - 1, 1), i) += params.gamma * 0.5 * amp;
    }
  }

  // Resonant exchange of the rotational quantum,
  // <1q|_1 <00|_2 V |00>_1 |1q'>_2 = (d^2/r^3) e_q^* . (1 - 3 n n) . e_q'.
  const auto e = spherical_unit_vectors();
  const Eigen::Matrix3d T = Eigen::Matrix3d::Identity() - 3.0 * n * n.transpose();
  const double x = params.dipolar_energy(r);
  for (int q = -1; q <= 1; ++q) {
    for (int qp = -1; qp <= 1; ++qp) {
      const cplx amp = x * e[q + 1].dot(T.cast<cplx>() * e[qp + 1]);
      if (std::abs(amp) == 0.0) continue;
      for (int s1 : {1, -1}) {
        for (int s2 : {1, -1}) {
          const int i = pair_basis_index({0, q, s1, s2});
          const int j = pair_basis_index({1, qp, s1, s2});
          H(i, j) += amp;
          H(j, i) += std::conj(amp);
        }
      }
    }
  }
  return H;
}

Eigen::MatrixXcd pair_internal_hamiltonian(const Eigen::Vector3d& separation,
                                           const MoleculeParams& params) {
  Eigen::MatrixXcd H = pair_excitation_hamiltonian(separation, params);
  H.diagonal().array() += 2.0 * params.B;
  return H;
}

Eigen::MatrixXcd pair_internal_hamiltonian(double r, const MoleculeParams& params) {
  require_positive_separation(r);
  return pair_internal_hamiltonian(Eigen::Vector3d(0, 0, r), params);
}

std::string ManifoldLabel::name() const {
  std::string s = std::to_string(Y);
  s += parity == Parity::Gerade ? 'g' : 'u';
  if (reflection == Reflection::Plus) s += '+';
  if (reflection == Reflection::Minus) s += '-';
  s += "(" + asymptote_name(J) + ")";
  if (Y == 1 && J == Asymptote::ThreeHalf) s += "#" + std::to_string(branch + 1);
  return s;
}

const std::array<ManifoldLabel, kNumLevels>& canonical_labels() {
  static const std::array<ManifoldLabel, kNumLevels> labels = [] {
    std::array<ManifoldLabel, kNumLevels> l{};
    int k = 0;
    for (Parity p : {Parity::Gerade, Parity::Ungerade})
      for (Reflection m : {Reflection::Plus, Reflection::Minus})
        for (Asymptote J : {Asymptote::Half, Asymptote::ThreeHalf}) l[k++] = {0, p, m, J, 0};
    for (Parity p : {Parity::Gerade, Parity::Ungerade}) {
      l[k++] = {1, p, Reflection::None, Asymptote::Half, 0};
      l[k++] = {1, p, Reflection::None, Asymptote::ThreeHalf, 0};
      l[k++] = {1, p, Reflection::None, Asymptote::ThreeHalf, 1};
    }
    for (Parity p : {Parity::Gerade, Parity::Ungerade})
      l[k++] = {2, p, Reflection::None, Asymptote::ThreeHalf, 0};
    return l;
  }();
  return labels;
}

int index_of(const ManifoldLabel& label) {
  const auto& all = canonical_labels();
  for (int i = 0; i < kNumLevels; ++i)
    if (all[i] == label) return i;
  throw InvalidArgument("not a manifold label: " + label.name());
}

ManifoldLabel parse_label(std::string_view text) {
  std::string t(text);
  t.erase(std::remove_if(t.begin(), t.end(), [](char c) { return c == '_' || c == ' '; }),
          t.end());
  if (t == "2g") t = "2g(3/2)";
  if (t == "2u") t = "2u(3/2)";
  for (const auto& l : canonical_labels()) {
    if (l.name() == t) return l;
  }
  throw InvalidArgument("unknown manifold label '" + std::string(text) + "'");
}

Eigen::Matrix3d one_block_matrix(Parity parity, double r, const MoleculeParams& params) {
  require_positive_separation(r);
  const double s = sign_of(parity);
  const double x = params.dipolar_energy(r) / params.gamma;
  Eigen::Matrix3d M;
  M << -2 * s * x, 1, -1,
       1, -4 * s * x, 1,
       -1, 1, 2 * s * x;
  return 0.5 * params.gamma * M;
}

std::vector<ManifoldLevel> movre_pichler(double r, const MoleculeParams& params) {
  require_positive_separation(r);
  params.validate();
  const double g = params.gamma;
  const double x = params.dipolar_energy(r) / g;
  const double twoB = 2.0 * params.B;

  std::vector<ManifoldLevel> levels(kNumLevels);
  const auto& labels = canonical_labels();
  for (int i = 0; i < kNumLevels; ++i) levels[i].label = labels[i];

  auto set = [&](int idx, double shift, std::vector<double> k) {
    levels[idx].shift = shift;
    levels[idx].energy = twoB + shift;
    levels[idx].eigvec_coeffs = std::move(k);
  };

  int idx = 0;
  for (Parity p : {Parity::Gerade, Parity::Ungerade}) {
    const double s = sign_of(p);
    // 0^+ : centre 3 s x/2 - 1/4, half-gap sqrt((s x/2 + 1/4)^2 + 1/2)
    // 0^- : centre -s x/2 - 1/4, half-gap sqrt((-3 s x/2 + 1/4)^2 + 1/2)
    for (Reflection m : {Reflection::Plus, Reflection::Minus}) {
      const bool plus = m == Reflection::Plus;
      const double centre = plus ? 1.5 * s * x - 0.25 : -0.5 * s * x - 0.25;
      const double half = plus ? 0.5 * s * x + 0.25 : -1.5 * s * x + 0.25;
      const double root = std::sqrt(half * half + 0.5);
      const double angle = std::atan2(std::sqrt(2.0), plus ? 0.5 + s * x : 0.5 - 3.0 * s * x);
      const double c = std::cos(0.5 * angle), sn = std::sin(0.5 * angle);
      set(idx++, g * (centre - root), {sn, -c});  // J = 1/2
      set(idx++, g * (centre + root), {c, sn});   // J = 3/2
    }
  }
  for (Parity p : {Parity::Gerade, Parity::Ungerade}) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(one_block_matrix(p, r, params));
    for (int a = 0; a < 3; ++a) {
      Eigen::Vector3d v = es.eigenvectors().col(a);
      fix_gauge(v);
      set(idx++, es.eigenvalues()(a), {v(0), v(1), v(2)});
    }
  }
  for (Parity p : {Parity::Gerade, Parity::Ungerade}) {
    set(idx++, 0.5 * g + sign_of(p) * params.dipolar_energy(r), {});
  }
  return levels;
}

std::array<int, 3> adiabatic_one_block_order(Parity parity, const std::vector<double>& r_grid,
                                             const MoleculeParams& params) {
  if (r_grid.empty()) throw InvalidArgument("empty radial grid");
  std::vector<double> rs = r_grid;
  std::sort(rs.begin(), rs.end(), std::greater<>());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(one_block_matrix(parity, rs.front(), params));
  Eigen::Matrix3d tracked = es.eigenvectors();  // column a follows label a
  std::array<int, 3> order{0, 1, 2};
  for (std::size_t k = 1; k < rs.size(); ++k) {
    es.compute(one_block_matrix(parity, rs[k], params));
    const Eigen::Matrix3d overlap = (tracked.transpose() * es.eigenvectors()).cwiseAbs();
    std::array<int, 3> next{-1, -1, -1};
    std::array<bool, 3> taken{false, false, false};
    for (int a = 0; a < 3; ++a) {
      int best = -1;
      for (int b = 0; b < 3; ++b)
        if (!taken[b] && (best < 0 || overlap(a, b) > overlap(a, best))) best = b;
      next[a] = best;
      taken[best] = true;
    }
    Eigen::Matrix3d updated;
    for (int a = 0; a < 3; ++a) {
      Eigen::Vector3d v = es.eigenvectors().col(next[a]);
      if (v.dot(tracked.col(a)) < 0) v = -v;
      updated.col(a) = v;
      order[a] = next[a];
    }
    tracked = updated;
  }
  return order;
}

PotentialCurves potential_curves(const std::vector<double>& r_grid, const MoleculeParams& params) {
  PotentialCurves out;
  out.r = r_grid;
  out.shift.resize(r_grid.size());

  // Y = 0 and |Y| = 2 closed forms carry their labels by construction; the
  // 3x3 blocks are followed by overlap continuity from the largest r.
  std::vector<std::size_t> order(r_grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return r_grid[a] > r_grid[b]; });

  std::array<Eigen::Matrix3d, 2> tracked;
  bool started = false;
  for (std::size_t k : order) {
    const auto levels = movre_pichler(r_grid[k], params);
    for (int i = 0; i < kNumLevels; ++i) out.shift[k][i] = levels[i].shift;
    for (int pi = 0; pi < 2; ++pi) {
      const Parity p = pi == 0 ? Parity::Gerade : Parity::Ungerade;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(one_block_matrix(p, r_grid[k], params));
      const int base = index_of({1, p, Reflection::None, Asymptote::Half, 0});
      if (!started) {
        tracked[pi] = es.eigenvectors();
        continue;
      }
      const Eigen::Matrix3d overlap = (tracked[pi].transpose() * es.eigenvectors()).cwiseAbs();
      std::array<bool, 3> taken{false, false, false};
      Eigen::Matrix3d updated;
      for (int a = 0; a < 3; ++a) {
        int best = -1;
        for (int b = 0; b < 3; ++b)
          if (!taken[b] && (best < 0 || overlap(a, b) > overlap(a, best))) best = b;
        taken[best] = true;
        Eigen::Vector3d v = es.eigenvectors().col(best);
        if (v.dot(tracked[pi].col(a)) < 0) v = -v;
        updated.col(a) = v;
        out.shift[k][base + a] = es.eigenvalues()(best);
      }
      tracked[pi] = updated;
    }
    started = true;
  }
  return out;
}

VanDerWaalsShift vdw_ground_shift(double r, const MoleculeParams& params) {
  require_positive_separation(r);
  params.validate();
  VanDerWaalsShift out;
  const double d2 = params.d * params.d;
  out.scalar = -(d2 * d2) / (2.0 * params.B * std::pow(r, 6));

  const Eigen::Matrix2cd sx = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  const Eigen::Matrix2cd sy = (Eigen::Matrix2cd() << 0, cplx(0, -1), cplx(0, 1), 0).finished();
  const Eigen::Matrix2cd sz = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd k;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
  };
  // S = sigma / 2
  const Eigen::Matrix4cd s1s2 = 0.25 * (kron(sx, sx) + kron(sy, sy) + kron(sz, sz));
  const Eigen::Matrix4cd sz1sz2 = 0.25 * kron(sz, sz);
  const Eigen::Matrix4cd op =
      Eigen::Matrix4cd::Identity() + (4.0 / 3.0) * s1s2 - 2.0 * sz1sz2;
  const double ratio = params.gamma / (4.0 * params.B);
  out.spin_part = out.scalar * ratio * ratio * op.real();
  return out;
}

}  // namespace molspin
