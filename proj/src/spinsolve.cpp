#include "molspin/spinsolve.hpp"

#include <algorithm>
#include <cmath>

#include "molspin/errors.hpp"
#include "molspin/quadrature.hpp"

namespace molspin {

namespace {

void require_size(int n) {
  if (n < 1) throw InvalidArgument("spin graph is empty");
  if (n > kMaxSpins) {
    throw TooLarge(std::to_string(n) + " spins exceeds the dense solver cap of " +
                   std::to_string(kMaxSpins));
  }
}

// sigma^a |bit>: returns the flipped-bit flag and the phase.
inline cplx pauli_phase(int a, int bit) {
  switch (a) {
    case 1: return 1.0;
    case 2: return bit == 0 ? cplx(0, 1) : cplx(0, -1);
    case 3: return bit == 0 ? 1.0 : -1.0;
    default: return 1.0;
  }
}

inline bool pauli_flips(int a) { return a == 1 || a == 2; }

Eigen::VectorXcd total_spin(const Eigen::VectorXcd& psi, int n, int a) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (int i = 0; i < n; ++i) out += apply_pauli(psi, i, a);
  return out / static_cast<double>(n);
}

}  // namespace

Eigen::VectorXcd apply_pauli(const Eigen::VectorXcd& psi, int site, int a) {
  Eigen::VectorXcd out(psi.size());
  const long mask = 1L << site;
  for (long k = 0; k < psi.size(); ++k) {
    const int bit = (k & mask) ? 1 : 0;
    const long row = pauli_flips(a) ? (k ^ mask) : k;
    out(row) = pauli_phase(a, bit) * psi(k);
  }
  return out;
}

Eigen::MatrixXcd spin_hamiltonian(const SpinGraph& graph) {
  const int n = graph.size();
  require_size(n);
  const long dim = 1L << n;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);

  auto add_term = [&](cplx c, int i, int a, int j, int b) {
    const long mi = 1L << i, mj = j >= 0 ? 1L << j : 0;
    for (long k = 0; k < dim; ++k) {
      long row = k;
      cplx phase = c * pauli_phase(a, (k & mi) ? 1 : 0);
      if (pauli_flips(a)) row ^= mi;
      if (j >= 0) {
        phase *= pauli_phase(b, (k & mj) ? 1 : 0);
        if (pauli_flips(b)) row ^= mj;
      }
      H(row, k) += phase;
    }
  };
  for (const auto& e : graph.edges)
    for (int s = 1; s < 4; ++s)
      for (int t = 1; t < 4; ++t)
        if (e.block(s, t) != 0.0) add_term(e.block(s, t), e.i, s, e.j, t);
  for (int i = 0; i < n && i < static_cast<int>(graph.fields.size()); ++i)
    for (int s = 1; s < 4; ++s)
      if (graph.fields[i](s - 1) != 0.0) add_term(graph.fields[i](s - 1), i, s, -1, 0);
  return H;
}

SpinSpectrum diagonalize_matrix(const Eigen::MatrixXcd& H, int n, double ground_tol) {
  SpinSpectrum sp;
  sp.n = n;
  if (H.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.real());
    if (es.info() != Eigen::Success) throw Error("eigensolver failed");
    sp.eigenvalues = es.eigenvalues();
    sp.eigenvectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success) throw Error("eigensolver failed");
    sp.eigenvalues = es.eigenvalues();
    sp.eigenvectors = es.eigenvectors();
  }
  const double e0 = sp.eigenvalues(0);
  sp.width = sp.eigenvalues(sp.eigenvalues.size() - 1) - e0;
  const double tol = ground_tol * std::max(sp.width, 1e-300);
  for (int k = 0; k < sp.eigenvalues.size(); ++k)
    if (sp.eigenvalues(k) - e0 <= tol) sp.ground.push_back(k);
  set_ground_count(sp, static_cast<int>(sp.ground.size()));
  return sp;
}

SpinSpectrum diagonalize(const SpinGraph& graph, double ground_tol) {
  return diagonalize_matrix(spin_hamiltonian(graph), graph.size(), ground_tol);
}

void set_ground_count(SpinSpectrum& sp, int count) {
  const int dim = static_cast<int>(sp.eigenvalues.size());
  if (count < 1 || count > dim) throw InvalidArgument("invalid ground subspace size");
  sp.ground.resize(count);
  for (int k = 0; k < count; ++k) sp.ground[k] = k;
  sp.ground_splitting = sp.eigenvalues(count - 1) - sp.eigenvalues(0);
  sp.gap = count < dim ? sp.eigenvalues(count) - sp.eigenvalues(count - 1) : 0.0;
}

std::array<double, 3> rms_magnetization(const Eigen::MatrixXcd& G, int n) {
  std::array<double, 3> out{};
  for (int a = 1; a <= 3; ++a) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::MatrixXcd applied(G.rows(), G.cols());
      for (int c = 0; c < G.cols(); ++c) applied.col(c) = apply_pauli(G.col(c), i, a);
      sum += (G.adjoint() * applied).cwiseAbs2().sum();
    }
    out[a - 1] = sum / (2.0 * n);
  }
  return out;
}

std::array<double, 3> rms_magnetization(const SpinSpectrum& sp) {
  Eigen::MatrixXcd G(sp.eigenvectors.rows(), sp.ground.size());
  for (std::size_t c = 0; c < sp.ground.size(); ++c) G.col(c) = sp.eigenvectors.col(sp.ground[c]);
  return rms_magnetization(G, sp.n);
}

double AbsorptionSpectrum::evaluate(int a, double w) const {
  const double g2 = linewidth * linewidth;
  double chi = 0.0;
  for (std::size_t m = 0; m < poles.size(); ++m) {
    const double x = w - poles[m];
    chi += weights[a][m] * g2 / (x * x + g2);
  }
  return chi;
}

AbsorptionSpectrum absorption_spectrum(const SpinSpectrum& sp, const Eigen::VectorXcd& psi,
                                       double linewidth, const std::vector<double>& grid) {
  if (!(linewidth > 0)) throw InvalidArgument("linewidth must be positive");
  if (psi.size() != sp.eigenvectors.rows()) throw InvalidArgument("state dimension mismatch");
  if (std::abs(psi.squaredNorm() - 1.0) > 1e-10) throw InvalidArgument("state must be normalized");

  AbsorptionSpectrum out;
  out.linewidth = linewidth;
  out.omega = grid;
  const Eigen::VectorXcd c = sp.eigenvectors.adjoint() * psi;
  out.reference_energy = (c.cwiseAbs2().array() * sp.eigenvalues.array()).sum();
  out.poles.resize(sp.eigenvalues.size());
  for (int m = 0; m < sp.eigenvalues.size(); ++m)
    out.poles[m] = sp.eigenvalues(m) - out.reference_energy;
  for (int a = 0; a < 3; ++a) {
    const Eigen::VectorXcd amp = sp.eigenvectors.adjoint() * total_spin(psi, sp.n, a + 1);
    out.weights[a].resize(amp.size());
    for (int m = 0; m < amp.size(); ++m) out.weights[a][m] = std::norm(amp(m));
    out.chi[a].resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out.chi[a][k] = out.evaluate(a, grid[k]);
  }
  return out;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 2) throw InvalidArgument("grid needs at least two points");
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k) g[k] = lo + (hi - lo) * k / (points - 1);
  return g;
}

SumRuleCheck check_sum_rule(const AbsorptionSpectrum& spec, const Eigen::VectorXcd& psi, int n) {
  SumRuleCheck out;
  const double G = spec.linewidth;
  for (int a = 0; a < 3; ++a) {
    // Breakpoints at the significant poles; the tails use w = edge +- G tan(phi).
    std::vector<double> pts;
    double total_weight = 0.0;
    for (std::size_t m = 0; m < spec.poles.size(); ++m) total_weight += spec.weights[a][m];
    for (std::size_t m = 0; m < spec.poles.size(); ++m)
      if (spec.weights[a][m] > 1e-14 * total_weight) pts.push_back(spec.poles[m]);
    if (pts.empty()) pts.push_back(0.0);
    std::sort(pts.begin(), pts.end());
    std::vector<double> knots{pts.front()};
    for (double p : pts)
      if (p - knots.back() > G) knots.push_back(p);
    if (pts.back() > knots.back()) knots.push_back(pts.back());

    QuadratureOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-16 * std::max(total_weight, 1e-300) * G;
    opt.max_panels = 20000;
    auto chi = [&](double w) { return spec.evaluate(a, w); };
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
      integral += integrate<double>(chi, knots[k], knots[k + 1], opt);
    const double lo = knots.front(), hi = knots.back();
    auto tail = [&](double edge, double sign) {
      return integrate<double>(
          [&](double phi) {
            const double t = std::tan(phi), c = std::cos(phi);
            return chi(edge + sign * G * t) * G / (c * c);
          },
          0.0, 0.5 * M_PI, opt);
    };
    integral += tail(lo, -1.0) + tail(hi, 1.0);
    out.integral[a] = integral;

    const Eigen::VectorXcd s1 = total_spin(psi, n, a + 1);
    const Eigen::VectorXcd s2 = total_spin(s1, n, a + 1);
    out.expected[a] = M_PI * G * psi.dot(s2).real();
    const double scale = std::max(std::abs(out.expected[a]), 1e-300);
    out.max_rel_error = std::max(out.max_rel_error, std::abs(integral - out.expected[a]) / scale);
  }
  return out;
}

KramersReport kramers_check(const SpinSpectrum& sp, bool all_linear, double tol) {
  KramersReport r;
  if (sp.n % 2 == 0) {
    r.note = "skipped: even number of spins";
    return r;
  }
  if (!all_linear) {
    r.note = "skipped: a driving field is not linearly polarized";
    return r;
  }
  r.applicable = true;
  const auto& E = sp.eigenvalues;
  const double norm = std::max(std::abs(E(0)), std::abs(E(E.size() - 1)));
  const double scale = norm > 0 ? norm : 1.0;
  r.min_pair_gap = E.size() > 2 ? INFINITY : 0.0;
  for (int k = 0; k + 1 < E.size(); k += 2) {
    r.max_pair_splitting = std::max(r.max_pair_splitting, (E(k + 1) - E(k)) / scale);
    if (k + 2 < E.size()) r.min_pair_gap = std::min(r.min_pair_gap, (E(k + 2) - E(k + 1)) / scale);
  }
  r.passed = r.max_pair_splitting <= tol;
  r.note = r.passed ? "every level at least doubly degenerate"
                    : "pairing violated: time reversal broken or a level is non-degenerate";
  return r;
}

SpinGraph rotate_graph(const SpinGraph& graph, const EulerAngles& angles) {
  SpinGraph out = graph;
  const Eigen::Matrix3d R = spin_rotation_from_su2(su2_matrix(angles));
  for (auto& e : out.edges) e.block = rotate_tensor(e.block, angles);
  for (auto& f : out.fields) f = R * f;
  return out;
}

std::vector<std::string> energy_scale_warnings(const SpinGraph& graph, double omega_osc,
                                               double ratio) {
  std::vector<std::string> out;
  for (const auto& e : graph.edges) {
    const double mag = e.block.block<3, 3>(1, 1).cwiseAbs().maxCoeff();
    if (mag > ratio * omega_osc) {
      out.push_back("coupling " + std::to_string(mag) + " on edge (" + std::to_string(e.i) +
                    ", " + std::to_string(e.j) + ") is not small compared with hbar omega_osc = " +
                    std::to_string(omega_osc));
    }
  }
  return out;
}

}  // namespace molspin
