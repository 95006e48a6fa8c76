#include "molspin/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "molspin/errors.hpp"
#include "molspin/graph_io.hpp"

namespace molspin {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + "." + key + ": missing or wrong type");
  }
}

template <class T>
void read(const json& j, const std::string& key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

cplx complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ValidationError(where + ": complex numbers are written as x or [re, im]");
}

Eigen::Vector3d vector_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ValidationError(where + ": expected [x, y, z]");
  for (const auto& v : j)
    if (!v.is_number()) throw ValidationError(where + ": expected numbers");
  return vector3_from_json(j);
}

Polarization parse_polarization(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "x") return Polarization::x();
    if (s == "y") return Polarization::y();
    if (s == "z") return Polarization::z();
    throw ValidationError(where + ": polarization must be x, y, z or an object");
  }
  check_keys(j, {"cartesian", "spherical"}, where);
  if (j.size() != 1) throw ValidationError(where + ": give exactly one of cartesian, spherical");
  const bool cart = j.contains("cartesian");
  const json& v = cart ? j["cartesian"] : j["spherical"];
  if (!v.is_array() || v.size() != 3) throw ValidationError(where + ": expected three components");
  Eigen::Vector3cd e;
  for (int k = 0; k < 3; ++k) e(k) = complex_from_json(v[k], where);
  if (!(e.norm() > 0)) throw ValidationError(where + ": polarization is zero");
  e.normalize();
  return cart ? Polarization::from_cartesian(e) : Polarization::from_spherical(e);
}

std::pair<int, int> parse_channel(const std::string& s, const std::string& where) {
  const std::string axes = "1xyz";
  if (s.size() != 2 || axes.find(s[0]) == std::string::npos ||
      axes.find(s[1]) == std::string::npos) {
    throw ValidationError(where + ": channel must be two of 1, x, y, z (e.g. \"zz\")");
  }
  return {static_cast<int>(axes.find(s[0])), static_cast<int>(axes.find(s[1]))};
}

FieldConfig parse_field(const json& j, const std::string& where) {
  check_keys(j, {"polarization", "omega_minus_2B", "label", "detuning", "at_r", "rabi"}, where);
  FieldConfig f;
  if (j.contains("polarization")) f.pol = parse_polarization(j["polarization"], where);
  f.rabi = get<double>(j, "rabi", where);
  if (j.contains("omega_minus_2B")) f.omega_minus_2B = get<double>(j, "omega_minus_2B", where);
  if (j.contains("label")) {
    try {
      f.label = parse_label(get<std::string>(j, "label", where));
    } catch (const InvalidArgument& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  read(j, "detuning", f.detuning, where);
  if (j.contains("at_r")) f.at_r = get<double>(j, "at_r", where);
  if (f.omega_minus_2B.has_value() == f.label.has_value()) {
    throw ValidationError(where + ": give exactly one of omega_minus_2B or label");
  }
  if (f.omega_minus_2B && j.contains("detuning")) {
    throw ValidationError(where + ": detuning only applies with label");
  }
  return f;
}

GeometryConfig parse_geometry(const json& j) {
  const std::string where = "geometry";
  check_keys(j, {"kind", "ell", "rows", "cols", "b", "z0", "sites"}, where);
  GeometryConfig g;
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "square") {
    g.kind = LatticeKind::Square;
  } else if (kind == "stacked_triangular") {
    g.kind = LatticeKind::StackedTriangular;
  } else if (kind == "custom") {
    g.kind = LatticeKind::Custom;
  } else {
    throw ValidationError("geometry.kind must be square, stacked_triangular or custom");
  }
  read(j, "ell", g.ell, where);
  read(j, "rows", g.rows, where);
  read(j, "cols", g.cols, where);
  read(j, "b", g.b, where);
  read(j, "z0", g.z0, where);
  if (j.contains("sites")) {
    if (g.kind != LatticeKind::Custom) throw ValidationError("geometry.sites needs kind custom");
    for (const auto& s : j["sites"]) g.sites.push_back(vector_from(s, "geometry.sites"));
  }
  return g;
}

SpectrumConfig parse_spectrum(const json& j) {
  const std::string where = "spectrum";
  check_keys(j, {"linewidth_over_J", "probe_max_over_J", "probe_points", "code_state", "scan",
                 "model_I"},
             where);
  SpectrumConfig s;
  read(j, "linewidth_over_J", s.linewidth_over_J, where);
  read(j, "probe_max_over_J", s.probe_max_over_J, where);
  read(j, "probe_points", s.probe_points, where);
  if (j.contains("code_state")) {
    const json& c = j["code_state"];
    if (c.is_string()) {
      if (c.get<std::string>() != "lowest") {
        throw ValidationError("spectrum.code_state must be \"lowest\" or an amplitude list");
      }
    } else {
      if (!c.is_array() || c.empty()) throw ValidationError("spectrum.code_state: empty list");
      for (const auto& a : c) {
        if (!a.is_array() || a.size() != 2 || !a[0].is_number_integer()) {
          throw ValidationError("spectrum.code_state entries are [eigenstate, amplitude]");
        }
        s.code_state.amplitudes.emplace_back(a[0].get<int>(),
                                             complex_from_json(a[1], "spectrum.code_state"));
      }
    }
  }
  if (j.contains("scan")) {
    const json& c = j["scan"];
    check_keys(c, {"from", "to", "points"}, "spectrum.scan");
    ScanConfig sc;
    read(c, "from", sc.from, "spectrum.scan");
    read(c, "to", sc.to, "spectrum.scan");
    read(c, "points", sc.points, "spectrum.scan");
    s.scan = sc;
  }
  if (j.contains("model_I")) {
    const json& c = j["model_I"];
    check_keys(c, {"zeta", "detuning", "rabi"}, "spectrum.model_I");
    ModelIConfig m;
    read(c, "zeta", m.zeta, "spectrum.model_I");
    read(c, "detuning", m.detuning, "spectrum.model_I");
    read(c, "rabi", m.rabi, "spectrum.model_I");
    s.model_I = m;
  }
  return s;
}

OptimizeConfig parse_optimize(const json& j) {
  const std::string where = "optimize";
  check_keys(j, {"targets", "free", "seed", "max_sweeps"}, where);
  OptimizeConfig o;
  for (const auto& t : j.at("targets")) {
    check_keys(t, {"name", "separation", "channel", "target"}, "optimize.targets");
    TargetConfig tc;
    read(t, "name", tc.name, "optimize.targets");
    tc.separation = vector_from(t.at("separation"), "optimize.targets.separation");
    std::tie(tc.a, tc.b) = parse_channel(get<std::string>(t, "channel", "optimize.targets"),
                                         "optimize.targets");
    tc.target = get<double>(t, "target", "optimize.targets");
    o.targets.push_back(tc);
  }
  for (const auto& f : j.at("free")) {
    check_keys(f, {"field", "kind", "lower", "upper"}, "optimize.free");
    FreeParameter p;
    p.field = get<int>(f, "field", "optimize.free");
    const auto kind = get<std::string>(f, "kind", "optimize.free");
    if (kind == "rabi") {
      p.kind = FreeKind::Rabi;
    } else if (kind == "omega_minus_2B") {
      p.kind = FreeKind::PhotonEnergy;
    } else {
      throw ValidationError("optimize.free.kind must be rabi or omega_minus_2B");
    }
    p.lower = get<double>(f, "lower", "optimize.free");
    p.upper = get<double>(f, "upper", "optimize.free");
    o.free.push_back(p);
  }
  read(j, "seed", o.seed, where);
  read(j, "max_sweeps", o.max_sweeps, where);
  return o;
}

double kHz(double energy, const ScenarioConfig& c) { return energy * c.molecule.gamma_MHz * 1e3; }

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

double default_r(const ScenarioConfig& c) {
  if (c.geometry) return c.geometry->b;
  if (c.separation) return c.separation->norm();
  return 1.0;
}

Eigen::VectorXcd code_state(const SpinSpectrum& sp, const CodeStateConfig& cs) {
  if (cs.amplitudes.empty()) return sp.eigenvectors.col(0);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(sp.eigenvectors.rows());
  for (const auto& [k, amp] : cs.amplitudes) {
    if (k < 0 || k >= sp.eigenvectors.cols()) throw ValidationError("code_state index out of range");
    psi += amp * sp.eigenvectors.col(k);
  }
  if (!(psi.norm() > 0)) throw ValidationError("code_state is the zero vector");
  return psi.normalized();
}

json spectrum_summary(const SpinSpectrum& sp, double J) {
  json s;
  s["ground_states"] = sp.ground.size();
  s["ground_splitting_over_J"] = sp.ground_splitting / std::abs(J);
  s["gap_over_J"] = sp.gap / std::abs(J);
  const auto m = rms_magnetization(sp);
  s["d2S"] = {m[0], m[1], m[2]};
  return s;
}

// First inelastic peak: smallest pole above linewidth/2 carrying weight.
double first_inelastic(const AbsorptionSpectrum& ab, int a) {
  double total = 0.0;
  for (double w : ab.weights[a]) total += w;
  double best = INFINITY;
  for (std::size_t m = 0; m < ab.poles.size(); ++m)
    if (ab.poles[m] > 0.5 * ab.linewidth && ab.weights[a][m] > 1e-6 * total)
      best = std::min(best, ab.poles[m]);
  return best;
}

RunResult run_potentials(const ScenarioConfig& c, const std::string& out) {
  const auto params = molecule_params(c);
  std::vector<double> r(c.grid.points);
  for (int k = 0; k < c.grid.points; ++k) {
    r[k] = c.grid.r_min *
           std::pow(c.grid.r_max / c.grid.r_min, static_cast<double>(k) / (c.grid.points - 1));
  }
  const auto curves = potential_curves(r, params);
  std::vector<std::string> header{"r_over_r_gamma"};
  for (const auto& l : canonical_labels()) header.push_back(l.name());
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < r.size(); ++k) {
    std::vector<double> row{r[k]};
    for (double v : curves.shift[k]) row.push_back(v / params.gamma);
    rows.push_back(row);
  }
  RunResult res;
  const auto path = join(out, "potentials.csv");
  write_csv(path, header, rows);
  res.files.push_back(path);
  res.summary = {{"pipeline", "potentials"}, {"points", r.size()}, {"columns", header.size()}};
  return res;
}

RunResult run_pair(const ScenarioConfig& c, const std::string& out) {
  const auto params = molecule_params(c);
  const auto fields = resolve_fields(c);
  const Eigen::Vector3d sep = c.separation.value_or(Eigen::Vector3d(0, 0, default_r(c)));
  json j;
  j["separation"] = to_json(sep);
  j["fields"] = json::array();
  Eigen::Matrix4d total = Eigen::Matrix4d::Zero(), direct = Eigen::Matrix4d::Zero();
  for (const auto& f : fields) {
    CouplingTensor t;
    if (c.mode == AveragingMode::PointDipole) {
      t = lab_tensor(sep, params, f);
      const CouplingTensor d =
          tensor_from_hamiltonian(direct_effective_hamiltonian(sep, params, f), f.rabi);
      direct += d.energies();
    } else {
      const EulerAngles ang = euler_for_axis(sep);
      t = rotate_tensor(averaged_tensor({sep.norm(), c.geometry ? c.geometry->z0 : 0.0}, params,
                                        rotate_field(f, ang)),
                        ang);
    }
    total += t.energies();
    j["fields"].push_back(to_json(t));
  }
  j["energies"] = to_json(Eigen::MatrixXd(total));
  RunResult res;
  res.summary = {{"pipeline", "pair"}, {"fields", fields.size()}};
  if (c.mode == AveragingMode::PointDipole) {
    j["direct_energies"] = to_json(Eigen::MatrixXd(direct));
    const double scale = std::max(total.cwiseAbs().maxCoeff(), 1e-300);
    res.summary["oracle_max_rel_deviation"] = (total - direct).cwiseAbs().maxCoeff() / scale;
  }
  const auto path = join(out, "tensor.json");
  write_text(path, j.dump(2) + "\n");
  res.files.push_back(path);
  return res;
}

AssemblyOptions assembly_options(const ScenarioConfig& c) {
  AssemblyOptions o;
  o.mode = c.mode;
  o.cutoff = c.cutoff;
  return o;
}

RunResult run_lattice(const ScenarioConfig& c, const std::string& out) {
  const auto params = molecule_params(c);
  const auto geom = build_geometry(*c.geometry);
  const auto fields = resolve_fields(c);
  const SpinGraph graph = assemble_spin_graph(geom, params, fields, assembly_options(c));

  RunResult res;
  res.summary = {{"pipeline", "lattice"}, {"sites", graph.size()}, {"edges", graph.edges.size()}};
  std::optional<double> reference;
  if (geom.kind == LatticeKind::StackedTriangular) {
    const TriadReport t = triad_report(graph, geom.spacing);
    reference = t.J_z;
    const double ratio = t.J_perp / t.J_z;
    res.summary["J_z_kHz"] = kHz(t.J_z, c);
    res.summary["J_perp_kHz"] = kHz(t.J_perp, c);
    res.summary["J_perp_over_J_z"] = ratio;
    res.summary["off_pattern_xy_over_J_z"] = t.off_pattern_xy;
    res.summary["off_pattern_z_over_J_z"] = t.off_pattern_z;
    res.summary["longest_range_over_J_z"] = t.longest_range;
    res.summary["patterns_match"] = t.patterns_match;
    if (std::abs(ratio) < 1.0) {
      res.summary["J_eff_Hz"] = 1e3 * kHz(kitaev_effective_strength(t.J_perp, t.J_z), c);
    }
  }
  const EdgeReport report = classify_edges(graph, reference);
  int counts[3] = {0, 0, 0};
  std::vector<std::vector<double>> rows;
  for (const auto& e : report.edges) {
    counts[static_cast<int>(e.bucket)]++;
    const auto& edge = graph.edges[e.edge];
    rows.push_back({static_cast<double>(edge.i), static_cast<double>(edge.j), e.distance,
                    static_cast<double>(e.a), static_cast<double>(e.b), e.strength,
                    e.off_pattern, static_cast<double>(static_cast<int>(e.bucket))});
  }
  res.summary["buckets"] = {{"strong", counts[0]}, {"weak", counts[1]}, {"negligible", counts[2]}};
  if (c.omega_osc_kHz) {
    res.warnings = energy_scale_warnings(graph, *c.omega_osc_kHz / (c.molecule.gamma_MHz * 1e3));
  }

  const auto gpath = join(out, "graph.json");
  write_text(gpath, to_json(graph, report).dump(1) + "\n");
  const auto dpath = join(out, "graph.dot");
  write_text(dpath, to_graphviz(graph, report));
  const auto cpath = join(out, "edges.csv");
  write_csv(cpath, {"i", "j", "distance", "a", "b", "strength", "off_pattern", "bucket"}, rows);
  res.files = {gpath, dpath, cpath};
  return res;
}

RunResult run_spectrum(const ScenarioConfig& c, const std::string& out) {
  const auto params = molecule_params(c);
  const auto geom = build_geometry(*c.geometry);
  const auto& sc = c.spectrum;
  RunResult res;
  res.summary = {{"pipeline", "spectrum"}};

  auto write_spectrum = [&](const SpinGraph& graph, double J, const std::string& file,
                            bool linear) {
    const SpinSpectrum sp = diagonalize(graph);
    const Eigen::VectorXcd psi = code_state(sp, sc.code_state);
    const double G = sc.linewidth_over_J * std::abs(J);
    const auto grid = linear_grid(0.0, sc.probe_max_over_J * std::abs(J), sc.probe_points);
    const AbsorptionSpectrum ab = absorption_spectrum(sp, psi, G, grid);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < grid.size(); ++k)
      rows.push_back({grid[k] / std::abs(J), ab.chi[0][k], ab.chi[1][k], ab.chi[2][k]});
    const auto path = join(out, file);
    write_csv(path, {"omega_probe_over_J", "chi_x", "chi_y", "chi_z"}, rows);
    res.files.push_back(path);
    json s = spectrum_summary(sp, J);
    s["file"] = file;
    s["J"] = J;
    s["J_kHz"] = kHz(J, c);
    s["sum_rule_max_rel_error"] = check_sum_rule(ab, psi, sp.n).max_rel_error;
    s["elastic_peak"] = {ab.evaluate(0, 0.0), ab.evaluate(1, 0.0), ab.evaluate(2, 0.0)};
    s["first_inelastic_over_J"] = {first_inelastic(ab, 0) / std::abs(J),
                                   first_inelastic(ab, 1) / std::abs(J),
                                   first_inelastic(ab, 2) / std::abs(J)};
    const KramersReport kr = kramers_check(sp, linear);
    s["kramers"] = {{"applicable", kr.applicable}, {"passed", kr.passed},
                    {"max_pair_splitting", kr.max_pair_splitting}, {"note", kr.note}};
    return s;
  };

  if (sc.model_I) {
    const auto& m = *sc.model_I;
    res.summary["runs"] = json::array();
    for (std::size_t k = 0; k < m.zeta.size(); ++k) {
      const FieldSpec f = model_I_field(m.zeta[k], m.detuning, m.rabi, params);
      const SpinGraph graph = assemble_spin_graph(geom, params, {f}, assembly_options(c));
      const double J = model_I_coupling(f, geom.spacing, params, c.mode, geom.z0);
      json s = write_spectrum(graph, J, "spectrum_zeta" + std::to_string(k) + ".csv", true);
      s["zeta"] = m.zeta[k];
      res.summary["runs"].push_back(s);
    }
    if (sc.scan) {
      std::vector<std::vector<double>> rows;
      for (int k = 0; k < sc.scan->points; ++k) {
        const double det =
            sc.scan->from + (sc.scan->to - sc.scan->from) * k / std::max(1, sc.scan->points - 1);
        const FieldSpec f = model_I_field(m.zeta.front(), det, m.rabi, params);
        const SpinSpectrum sp =
            diagonalize(assemble_spin_graph(geom, params, {f}, assembly_options(c)));
        const auto d2 = rms_magnetization(sp);
        const double J = model_I_coupling(f, geom.spacing, params, c.mode, geom.z0);
        rows.push_back({det, d2[0], d2[1], d2[2], static_cast<double>(sp.ground.size()),
                        sp.gap / std::abs(J)});
      }
      const auto path = join(out, "magnetization.csv");
      write_csv(path, {"detuning_over_gamma", "d2S_x", "d2S_y", "d2S_z", "ground_states",
                       "gap_over_J"},
                rows);
      res.files.push_back(path);
    }
  } else {
    const auto fields = resolve_fields(c);
    const SpinGraph graph = assemble_spin_graph(geom, params, fields, assembly_options(c));
    double J = 0.0;
    for (const auto& e : graph.edges) J = std::max(J, e.block.block<3, 3>(1, 1).cwiseAbs().maxCoeff());
    if (!(J > 0)) throw ValidationError("spectrum: assembled graph has no couplings");
    bool linear = true;
    for (const auto& f : fields) linear = linear && f.pol.is_linear();
    res.summary["runs"] = json::array({write_spectrum(graph, J, "spectrum.csv", linear)});
  }
  return res;
}

RunResult run_optimize(const ScenarioConfig& c, const std::string& out) {
  const auto params = molecule_params(c);
  const auto fields = resolve_fields(c);
  const auto& oc = *c.optimize;
  ModelTargets targets;
  for (const auto& t : oc.targets) targets.links.push_back({t.name, t.separation, t.a, t.b, t.target});
  std::vector<FreeParameter> free = oc.free;
  for (auto& p : free) {
    if (p.kind == FreeKind::PhotonEnergy) {
      p.lower += 2.0 * params.B;
      p.upper += 2.0 * params.B;
    }
  }
  OptimizeOptions opt;
  opt.seed = oc.seed;
  opt.max_sweeps = oc.max_sweeps;
  opt.mode = c.mode;
  opt.z0 = c.geometry ? c.geometry->z0 : 0.0;
  const OptimizeResult r = optimize_fields(targets, params, fields, free, opt);

  json jf = json::array();
  for (const auto& f : r.fields) {
    json pol = json::array({json::array({f.pol.minus.real(), f.pol.minus.imag()}),
                            json::array({f.pol.zero.real(), f.pol.zero.imag()}),
                            json::array({f.pol.plus.real(), f.pol.plus.imag()})});
    json entry;
    entry["omega_minus_2B"] = f.photon_energy - 2.0 * params.B;
    entry["rabi"] = f.rabi;
    entry["polarization"] = {{"spherical", pol}};
    jf.push_back(entry);
  }
  RunResult res;
  const auto path = join(out, "optimized_fields.json");
  write_text(path, json{{"fields", jf}, {"residual", r.residual}, {"history", r.history}}.dump(2) +
                       "\n");
  res.files.push_back(path);
  res.summary = {{"pipeline", "optimize"}, {"residual", r.residual}, {"sweeps", r.sweeps}};
  return res;
}

}  // namespace

Pipeline parse_pipeline(const std::string& name) {
  if (name == "potentials") return Pipeline::Potentials;
  if (name == "pair") return Pipeline::Pair;
  if (name == "lattice") return Pipeline::Lattice;
  if (name == "spectrum") return Pipeline::Spectrum;
  if (name == "optimize") return Pipeline::Optimize;
  throw ValidationError("unknown pipeline '" + name + "'");
}

std::string pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::Potentials: return "potentials";
    case Pipeline::Pair: return "pair";
    case Pipeline::Lattice: return "lattice";
    case Pipeline::Spectrum: return "spectrum";
    default: return "optimize";
  }
}

ScenarioConfig parse_config(const json& j) {
  check_keys(j, {"name", "pipeline", "molecule", "grid", "separation", "geometry", "fields", "mode",
                 "cutoff", "omega_osc_kHz", "spectrum", "optimize"},
             "config");
  ScenarioConfig c;
  read(j, "name", c.name, "config");
  if (j.contains("pipeline")) c.pipeline = parse_pipeline(get<std::string>(j, "pipeline", "config"));
  if (j.contains("molecule")) {
    check_keys(j["molecule"], {"gamma_MHz", "B_over_gamma"}, "molecule");
    read(j["molecule"], "gamma_MHz", c.molecule.gamma_MHz, "molecule");
    read(j["molecule"], "B_over_gamma", c.molecule.B_over_gamma, "molecule");
  }
  if (j.contains("grid")) {
    check_keys(j["grid"], {"r_min", "r_max", "points"}, "grid");
    read(j["grid"], "r_min", c.grid.r_min, "grid");
    read(j["grid"], "r_max", c.grid.r_max, "grid");
    read(j["grid"], "points", c.grid.points, "grid");
  }
  if (j.contains("separation")) {
    const json& s = j["separation"];
    c.separation = s.is_number() ? Eigen::Vector3d(0, 0, s.get<double>())
                                 : vector_from(s, "separation");
  }
  if (j.contains("geometry")) c.geometry = parse_geometry(j["geometry"]);
  if (j.contains("fields")) {
    if (!j["fields"].is_array()) throw ValidationError("fields: expected a list");
    for (std::size_t k = 0; k < j["fields"].size(); ++k)
      c.fields.push_back(parse_field(j["fields"][k], "fields[" + std::to_string(k) + "]"));
  }
  if (j.contains("mode")) {
    const auto m = get<std::string>(j, "mode", "config");
    if (m == "point_dipole") {
      c.mode = AveragingMode::PointDipole;
    } else if (m == "gaussian") {
      c.mode = AveragingMode::Gaussian;
    } else {
      throw ValidationError("mode must be point_dipole or gaussian");
    }
  }
  if (j.contains("cutoff") && !j["cutoff"].is_null()) c.cutoff = get<double>(j, "cutoff", "config");
  if (j.contains("omega_osc_kHz")) c.omega_osc_kHz = get<double>(j, "omega_osc_kHz", "config");
  if (j.contains("spectrum")) c.spectrum = parse_spectrum(j["spectrum"]);
  if (j.contains("optimize")) c.optimize = parse_optimize(j["optimize"]);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return parse_config(j);
}

std::string preset_path(const std::string& name) {
  std::string dir = MOLSPIN_PRESET_DIR;
  if (const char* env = std::getenv("MOLSPIN_PRESETS")) dir = env;
  return join(dir, name + ".json");
}

ScenarioConfig load_preset(const std::string& name) {
  const auto path = preset_path(name);
  if (!std::filesystem::exists(path)) throw ValidationError("unknown preset '" + name + "'");
  return load_config(path);
}

MoleculeParams molecule_params(const ScenarioConfig& c) {
  if (!(c.molecule.gamma_MHz > 0) || !(c.molecule.B_over_gamma > 0)) {
    throw ValidationError("molecule: gamma_MHz and B_over_gamma must be positive");
  }
  return MoleculeParams::reduced(c.molecule.B_over_gamma);
}

LatticeGeometry build_geometry(const GeometryConfig& g) {
  try {
    switch (g.kind) {
      case LatticeKind::Square: return square_lattice(g.ell, g.b, g.z0);
      case LatticeKind::StackedTriangular: return stacked_triangular(g.rows, g.cols, g.b, g.z0);
      default: {
        if (g.sites.size() < 2) throw ValidationError("custom geometry needs at least two sites");
        LatticeGeometry out;
        out.kind = LatticeKind::Custom;
        out.sites = g.sites;
        out.spacing = g.b;
        out.z0 = g.z0;
        return out;
      }
    }
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string("geometry: ") + e.what());
  }
}

std::vector<FieldSpec> resolve_fields(const ScenarioConfig& c) {
  const auto params = molecule_params(c);
  std::vector<FieldSpec> out;
  for (const auto& f : c.fields) {
    FieldSpec s;
    s.pol = f.pol;
    s.rabi = f.rabi;
    s.photon_energy = f.omega_minus_2B
                          ? 2.0 * params.B + *f.omega_minus_2B
                          : photon_energy_for(*f.label, f.detuning, f.at_r.value_or(default_r(c)),
                                              params);
    out.push_back(s);
  }
  return out;
}

ValidationReport validate(const ScenarioConfig& c) {
  ValidationReport rep;
  auto error = [&](const std::string& m) { rep.errors.push_back(m); };
  auto warn = [&](const std::string& m) { rep.warnings.push_back(m); };
  if (!c.pipeline) error("no pipeline selected");
  try {
    molecule_params(c);
  } catch (const Error& e) {
    error(e.what());
    return rep;
  }
  for (std::size_t k = 0; k < c.fields.size(); ++k) {
    const auto& f = c.fields[k];
    if (!(f.rabi >= 0)) error("fields[" + std::to_string(k) + "]: rabi must be >= 0");
    if (f.at_r && !(*f.at_r > 0)) error("fields[" + std::to_string(k) + "]: at_r must be positive");
  }
  const Pipeline p = c.pipeline.value_or(Pipeline::Potentials);
  if (p == Pipeline::Potentials) {
    if (!(c.grid.r_min > 0) || !(c.grid.r_max > c.grid.r_min) || c.grid.points < 2) {
      error("grid: need 0 < r_min < r_max and at least two points");
    }
  }
  const bool needs_fields = p == Pipeline::Pair || p == Pipeline::Lattice ||
                            p == Pipeline::Optimize ||
                            (p == Pipeline::Spectrum && !c.spectrum.model_I);
  if (needs_fields && c.fields.empty()) error("pipeline " + pipeline_name(p) + " needs fields");
  if ((p == Pipeline::Lattice || p == Pipeline::Spectrum) && !c.geometry) {
    error("pipeline " + pipeline_name(p) + " needs a geometry");
  }
  if (p == Pipeline::Optimize && !c.optimize) error("pipeline optimize needs an optimize block");
  if (p == Pipeline::Spectrum) {
    if (!(c.spectrum.linewidth_over_J > 0) || !(c.spectrum.probe_max_over_J > 0) ||
        c.spectrum.probe_points < 2) {
      error("spectrum: linewidth, probe range and points must be positive");
    }
    if (c.spectrum.model_I && c.geometry && c.geometry->kind != LatticeKind::Square) {
      error("spectrum.model_I needs a square geometry");
    }
  }
  LatticeGeometry geom;
  bool have_geom = false;
  if (c.geometry) {
    try {
      geom = build_geometry(*c.geometry);
      have_geom = true;
      if (geom.sites.size() > static_cast<std::size_t>(kMaxSpins) && p == Pipeline::Spectrum) {
        error("spectrum: " + std::to_string(geom.sites.size()) + " spins exceeds the solver cap");
      }
    } catch (const Error& e) {
      error(e.what());
    }
  }
  if (c.mode == AveragingMode::Gaussian) {
    const double z0 = c.geometry ? c.geometry->z0 : 0.0;
    const double dz = default_r(c);
    if (!(z0 > 0)) {
      error("gaussian mode needs geometry.z0 > 0");
    } else if (!(z0 / dz < 0.5)) {
      error("z0 / delta_z = " + std::to_string(z0 / dz) + " is outside the validity regime");
    } else if (z0 / dz >= 0.1) {
      warn("z0 / delta_z = " + std::to_string(z0 / dz) + " is large; anisotropy corrections grow");
    }
  }
  if (!rep.ok()) return rep;

  // Pole proximity at every distinct pair distance (or the pair separation).
  std::vector<Eigen::Vector3d> seps;
  if (p == Pipeline::Pair) seps.push_back(c.separation.value_or(Eigen::Vector3d(0, 0, default_r(c))));
  if (have_geom && (p == Pipeline::Lattice || p == Pipeline::Spectrum)) {
    for (std::size_t i = 0; i < geom.sites.size(); ++i)
      for (std::size_t j = i + 1; j < geom.sites.size(); ++j) {
        const Eigen::Vector3d s = geom.sites[j] - geom.sites[i];
        if (c.cutoff && s.norm() > *c.cutoff * (1 + 1e-12)) continue;
        seps.push_back(s);
      }
  }
  try {
    const auto params = molecule_params(c);
    std::vector<FieldSpec> fields = resolve_fields(c);
    if (p == Pipeline::Spectrum && c.spectrum.model_I) {
      for (double z : c.spectrum.model_I->zeta)
        fields.push_back(model_I_field(z, c.spectrum.model_I->detuning, c.spectrum.model_I->rabi,
                                       params));
    }
    std::vector<double> distances;
    for (const auto& s : seps) {
      const double r = s.norm();
      bool seen = false;
      for (double d : distances) seen = seen || std::abs(d - r) < 1e-12 * r;
      if (!seen) distances.push_back(r);
    }
    for (double r : distances) {
      const auto levels = movre_pichler(r, params);
      for (std::size_t k = 0; k < fields.size(); ++k) {
        for (const auto& l : levels) {
          const double det = fields[k].photon_energy - l.energy;
          const std::string where = "field " + std::to_string(k) + " vs " + l.label.name() +
                                    " at r = " + format_number(r);
          if (c.mode == AveragingMode::PointDipole && std::abs(det) <= 1e-9 * params.gamma) {
            error("resonance pole: " + where);
          } else if (std::abs(det) < 10.0 * fields[k].rabi) {
            warn("detuning " + format_number(det) + " is within 10 rabi of " + where);
          }
        }
        if (c.mode == AveragingMode::Gaussian) {
          try {
            check_pole_free({r, c.geometry ? c.geometry->z0 : 0.0}, params, fields[k]);
          } catch (const PoleInsideWavepacket& e) {
            error("field " + std::to_string(k) + ": " + e.what());
          }
        }
      }
    }
  } catch (const Error& e) {
    error(e.what());
  }
  return rep;
}

RunResult run_scenario(const ScenarioConfig& c, const std::string& out_dir) {
  const ValidationReport rep = validate(c);
  if (!rep.ok()) throw ValidationError(rep.errors.front());
  std::filesystem::create_directories(out_dir);
  RunResult res;
  switch (*c.pipeline) {
    case Pipeline::Potentials: res = run_potentials(c, out_dir); break;
    case Pipeline::Pair: res = run_pair(c, out_dir); break;
    case Pipeline::Lattice: res = run_lattice(c, out_dir); break;
    case Pipeline::Spectrum: res = run_spectrum(c, out_dir); break;
    case Pipeline::Optimize: res = run_optimize(c, out_dir); break;
  }
  res.warnings.insert(res.warnings.begin(), rep.warnings.begin(), rep.warnings.end());
  if (!c.name.empty()) res.summary["name"] = c.name;
  const auto path = join(out_dir, "summary.json");
  write_text(path, res.summary.dump(2) + "\n");
  res.files.push_back(path);
  return res;
}

TriadReport triad_report(const SpinGraph& graph, double b) {
  TriadReport t;
  double jz = 0, jp = 0;
  int nz = 0, np = 0;
  t.patterns_match = true;
  std::vector<std::pair<const SpinEdge*, int>> nn;
  for (const auto& e : graph.edges) {
    const double r = e.separation.norm();
    if (std::abs(r - b) > 1e-9 * b) continue;
    Eigen::Index axis;
    e.separation.cwiseAbs().maxCoeff(&axis);
    nn.emplace_back(&e, static_cast<int>(axis) + 1);
    if (axis == 2) {
      jz += e.block(3, 3);
      ++nz;
    } else if (axis == 0) {
      jp += e.block(1, 1);
      ++np;
    }
  }
  if (nz == 0 || np == 0) throw ValidationError("lattice has no x and z nearest-neighbour links");
  t.J_z = jz / nz;
  t.J_perp = jp / np;
  for (const auto& [e, axis] : nn) {
    double off = 0.0, on = std::abs(e->block(axis, axis));
    for (int s = 1; s < 4; ++s)
      for (int u = 1; u < 4; ++u)
        if (!(s == axis && u == axis)) {
          off = std::max(off, std::abs(e->block(s, u)));
          if (std::abs(e->block(s, u)) > on) t.patterns_match = false;
        }
    const double rel = off / std::abs(t.J_z);
    if (axis == 3) {
      t.off_pattern_z = std::max(t.off_pattern_z, rel);
    } else {
      t.off_pattern_xy = std::max(t.off_pattern_xy, rel);
    }
  }
  for (const auto& e : graph.edges) {
    if (std::abs(e.separation.norm() - b) <= 1e-9 * b) continue;
    t.longest_range = std::max(t.longest_range,
                               e.block.block<3, 3>(1, 1).cwiseAbs().maxCoeff() / std::abs(t.J_z));
  }
  return t;
}

}  // namespace molspin
