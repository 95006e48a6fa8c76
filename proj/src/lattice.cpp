#include "molspin/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include "molspin/errors.hpp"

namespace molspin {

namespace {

int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MOLSPIN_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

std::string edge_name(int i, int j) {
  return "edge (" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

const char* kAxis = "1xyz";

}  // namespace

LatticeGeometry square_lattice(int ell, double b, double z0) {
  if (ell < 2) throw InvalidArgument("square lattice needs ell >= 2");
  if (!(b > 0)) throw InvalidArgument("lattice spacing must be positive");
  LatticeGeometry g;
  g.kind = LatticeKind::Square;
  g.spacing = b;
  g.z0 = z0;
  for (int i = 0; i < ell; ++i)
    for (int j = 0; j < ell; ++j) g.sites.emplace_back(j * b, 0.0, i * b);
  return g;
}

LatticeGeometry stacked_triangular(int rows, int cols, double b, double z0) {
  if (rows < 1 || cols < 1 || rows * cols < 2) {
    throw InvalidArgument("stacked triangular lattice needs at least two dimers");
  }
  if (!(b > 0)) throw InvalidArgument("lattice spacing must be positive");
  LatticeGeometry g;
  g.kind = LatticeKind::StackedTriangular;
  g.spacing = b;
  g.z0 = z0;
  const Eigen::Vector3d u(1, 0, -1), v(0, 1, -1), z(0, 0, 1);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const Eigen::Vector3d p = b * (i * u + j * v);
      g.sites.push_back(p);
      g.sites.push_back(p + b * z);
    }
  }
  return g;
}

void SpinGraph::accumulate_fields() {
  fields.assign(sites.size(), Eigen::Vector3d::Zero());
  for (const auto& e : edges) {
    for (int s = 1; s < 4; ++s) {
      fields[e.i](s - 1) += e.block(s, 0);
      fields[e.j](s - 1) += e.block(0, s);
    }
  }
}

Eigen::Matrix4d edge_block(const Eigen::Vector3d& separation, const MoleculeParams& params,
                           const std::vector<FieldSpec>& fields, AveragingMode mode, double z0) {
  Eigen::Matrix4d block = Eigen::Matrix4d::Zero();
  const EulerAngles angles = euler_for_axis(separation);
  for (const auto& f : fields) {
    if (mode == AveragingMode::PointDipole) {
      block += lab_tensor(separation, params, f).energies();
    } else {
      const WavepacketGeometry wp{separation.norm(), z0};
      const CouplingTensor t = averaged_tensor(wp, params, rotate_field(f, angles));
      block += rotate_tensor(t, angles).energies();
    }
  }
  block(0, 0) = 0.0;
  return block;
}

SpinGraph assemble_spin_graph(const LatticeGeometry& geom, const MoleculeParams& params,
                              const std::vector<FieldSpec>& fields,
                              const AssemblyOptions& options) {
  params.validate();
  for (const auto& f : fields) f.validate();
  if (options.mode == AveragingMode::Gaussian && !(geom.z0 > 0)) {
    throw InvalidArgument("gaussian averaging needs z0 > 0");
  }

  SpinGraph graph;
  graph.sites = geom.sites;
  const int n = graph.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::Vector3d sep = geom.sites[j] - geom.sites[i];
      if (sep.norm() < 1e-12) throw InvalidArgument("coincident sites " + edge_name(i, j));
      if (options.cutoff && sep.norm() > *options.cutoff * (1 + 1e-12)) continue;
      graph.edges.push_back({i, j, sep, Eigen::Matrix4d::Zero()});
    }
  }
  if (fields.empty()) {
    graph.accumulate_fields();
    return graph;
  }

  const int workers = std::min<int>(thread_count(options.threads),
                                    std::max<int>(1, static_cast<int>(graph.edges.size())));
  std::vector<std::exception_ptr> errors(graph.edges.size());
  auto work = [&](int w) {
    for (std::size_t k = w; k < graph.edges.size(); k += workers) {
      auto& e = graph.edges[k];
      try {
        e.block = edge_block(e.separation, params, fields, options.mode, geom.z0);
      } catch (const ResonancePole& p) {
        errors[k] = std::make_exception_ptr(ResonancePole(
            p.label() + " on " + edge_name(e.i, e.j), p.separation(), p.detuning()));
      } catch (const PoleInsideWavepacket& p) {
        errors[k] = std::make_exception_ptr(PoleInsideWavepacket(
            p.label() + " on " + edge_name(e.i, e.j), e.separation.norm() - 8 * geom.z0,
            e.separation.norm() + 8 * geom.z0));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  graph.accumulate_fields();
  return graph;
}

std::string bucket_name(RangeBucket b) {
  switch (b) {
    case RangeBucket::Strong: return "strong";
    case RangeBucket::Weak: return "weak";
    default: return "negligible";
  }
}

EdgeReport classify_edges(const SpinGraph& graph, std::optional<double> reference) {
  EdgeReport report;
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const auto& e = graph.edges[k];
    EdgeClass c;
    c.edge = static_cast<int>(k);
    c.distance = e.separation.norm();
    for (int s = 1; s < 4; ++s) {
      for (int t = 1; t < 4; ++t) {
        if (std::abs(e.block(s, t)) > c.magnitude) {
          c.magnitude = std::abs(e.block(s, t));
          c.a = s;
          c.b = t;
        }
      }
    }
    c.strength = e.block(c.a, c.b);
    c.label = std::string{kAxis[c.a], kAxis[c.b]};
    for (int s = 1; s < 4; ++s)
      for (int t = 1; t < 4; ++t)
        if (!(s == c.a && t == c.b) && !(s == c.b && t == c.a))
          c.off_pattern = std::max(c.off_pattern, std::abs(e.block(s, t)));
    report.edges.push_back(c);
  }
  if (reference) {
    report.reference = std::abs(*reference);
  } else {
    for (const auto& c : report.edges) report.reference = std::max(report.reference, c.magnitude);
  }
  for (auto& c : report.edges) {
    const double rel = report.reference > 0 ? c.magnitude / report.reference : 0.0;
    c.bucket = rel >= 1e-2 ? RangeBucket::Strong
             : rel >= 1e-3 ? RangeBucket::Weak
                           : RangeBucket::Negligible;
  }
  return report;
}

std::string to_graphviz(const SpinGraph& graph, const EdgeReport& report) {
  std::ostringstream out;
  out.precision(12);
  out << "graph spins {\n";
  for (int i = 0; i < graph.size(); ++i) {
    const auto& p = graph.sites[i];
    out << "  " << i << " [pos=\"" << p.x() << "," << p.y() << "," << p.z() << "\"];\n";
  }
  for (const auto& c : report.edges) {
    const auto& e = graph.edges[c.edge];
    const char* colour = c.label == "zz" ? "blue" : c.label == "yy" ? "red"
                       : c.label == "xx" ? "green" : "black";
    const char* style = c.bucket == RangeBucket::Strong ? "solid"
                      : c.bucket == RangeBucket::Weak   ? "dashed" : "invis";
    out << "  " << e.i << " -- " << e.j << " [color=" << colour << ", style=" << style
        << ", label=\"" << c.label << " " << c.strength << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

double model_I_coupling(const FieldSpec& field, double b, const MoleculeParams& params,
                        AveragingMode mode, double z0) {
  field.validate();
  const double tol = 1e-9 * params.gamma;
  auto integrand = [&](double r) {
    const double det = field.photon_energy - 2.0 * params.B - 0.5 * params.gamma -
                       params.dipolar_energy(r);
    if (std::abs(det) <= tol) throw ResonancePole("2g(3/2)", r, det);
    return field.rabi * field.rabi / (8.0 * det);
  };
  if (mode == AveragingMode::PointDipole) return integrand(b);
  const WavepacketGeometry wp{b, z0};
  wp.validate();
  const double lo = field.photon_energy - 2.0 * params.B - 0.5 * params.gamma -
                    params.dipolar_energy(wp.r_low());
  const double hi = field.photon_energy - 2.0 * params.B - 0.5 * params.gamma -
                    params.dipolar_energy(wp.r_high());
  if (lo * hi <= 0) throw PoleInsideWavepacket("2g(3/2)", wp.r_low(), wp.r_high());
  return radial_average<double>(integrand, wp);
}

FieldSpec model_I_field(double zeta, double detuning, double rabi, const MoleculeParams& params) {
  const Eigen::Vector3cd e(std::sin(zeta), std::cos(zeta), 0.0);
  return {Polarization::from_cartesian(e), 2.0 * params.B + detuning, rabi};
}

ModelIIBalance model_II_balance(const FieldSpec& field_1g, const FieldSpec& field_1u,
                                const std::optional<FieldSpec>& field_2g, double b,
                                const MoleculeParams& params, AveragingMode mode, double z0,
                                double rel_tol) {
  const double tol = 1e-9 * params.gamma;
  auto coefficients = [&](double r, const FieldSpec& f) {
    const auto levels = movre_pichler(r, params);
    return c_coefficients(levels, s_amplitudes(levels, f, tol, r));
  };
  // (residual, C(1g,2,2) term, C(1g,3,3) term, C(2g) term) at one separation.
  auto terms = [&](double r) {
    const CCoefficients g = coefficients(r, field_1g);
    const CCoefficients u = coefficients(r, field_1u);
    Eigen::Vector4d v;
    v(0) = field_1g.rabi * g.one_block(Parity::Gerade, 3, 3) -
           field_1u.rabi * u.one_block(Parity::Ungerade, 1, 1);
    v(1) = field_1g.rabi * g.one_block(Parity::Gerade, 2, 2);
    v(2) = field_1g.rabi * g.one_block(Parity::Gerade, 3, 3);
    v(3) = field_2g ? field_2g->rabi * coefficients(r, *field_2g).two_g : 0.0;
    return v;
  };
  Eigen::Vector4d avg;
  if (mode == AveragingMode::PointDipole) {
    avg = terms(b);
  } else {
    const WavepacketGeometry wp{b, z0};
    check_pole_free(wp, params, field_1g);
    check_pole_free(wp, params, field_1u);
    if (field_2g) check_pole_free(wp, params, *field_2g);
    avg = radial_average<Eigen::Vector4d>(terms, wp);
  }
  ModelIIBalance out;
  out.residual = avg(0);
  out.balanced = std::abs(avg(0)) <= rel_tol * std::max(std::abs(avg(1)), std::abs(avg(2)));
  if (out.balanced) {
    out.J_z = avg(1) / 4.0;
    out.J_perp = -avg(2) / 4.0 + avg(3) / 8.0;
  }
  return out;
}

double kitaev_effective_strength(double J_perp, double J_z) {
  if (!(J_z != 0.0) || !(std::abs(J_perp / J_z) < 1.0)) {
    throw InvalidArgument("kitaev_effective_strength needs |J_perp / J_z| < 1");
  }
  const double ratio = J_perp / J_z;
  return -std::pow(ratio, 4) * std::abs(J_z) / 16.0;
}

double photon_energy_for(const ManifoldLabel& label, double detuning, double r,
                         const MoleculeParams& params) {
  return movre_pichler(r, params)[index_of(label)].energy + detuning;
}

}  // namespace molspin
