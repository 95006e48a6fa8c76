#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "molspin/errors.hpp"
#include "molspin/lattice.hpp"

using namespace molspin;

namespace {

const MoleculeParams P = MoleculeParams::reduced(100);

FieldSpec z_field(const std::string& label, double detuning, double rabi, double r = 1.0) {
  return {Polarization::z(), photon_energy_for(parse_label(label), detuning, r, P), rabi};
}

}  // namespace

TEST_CASE("square lattice geometry") {
  const auto g = square_lattice(3, 0.5);
  REQUIRE(g.sites.size() == 9);
  CHECK(g.sites[4].isApprox(Eigen::Vector3d(0.5, 0, 0.5)));
  CHECK(g.sites[2].isApprox(Eigen::Vector3d(1.0, 0, 0)));
  CHECK(g.sites[3].isApprox(Eigen::Vector3d(0, 0, 0.5)));
  CHECK_THROWS_AS(square_lattice(1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(square_lattice(3, 0.0), InvalidArgument);
}

TEST_CASE("stacked triangular bilayer: nearest neighbours form an orthogonal triad") {
  const auto g = stacked_triangular(2, 3, 1.0);
  REQUIRE(g.sites.size() == 12);
  std::set<int> axes;
  int nn = 0;
  for (std::size_t i = 0; i < g.sites.size(); ++i)
    for (std::size_t j = i + 1; j < g.sites.size(); ++j) {
      const Eigen::Vector3d d = g.sites[j] - g.sites[i];
      CHECK(d.norm() > 1.0 - 1e-12);
      if (std::abs(d.norm() - 1.0) < 1e-12) {
        ++nn;
        Eigen::Index a;
        CHECK(d.cwiseAbs().maxCoeff(&a) == doctest::Approx(1.0));
        axes.insert(static_cast<int>(a));
      }
    }
  CHECK(axes.size() == 3);
  // 6 z-links, 3 x-links and 4 y-links.
  CHECK(nn == 13);
}

TEST_CASE("edge blocks are symmetric and carry no scalar") {
  const auto g = square_lattice(3, 1.0);
  const FieldSpec f{Polarization::from_cartesian(Eigen::Vector3cd(0.6, cplx(0, 0.8), 0)),
                    2 * P.B + 1.5, 0.01};
  const auto graph = assemble_spin_graph(g, P, {f});
  CHECK(graph.edges.size() == 36);
  for (const auto& e : graph.edges) {
    CHECK(e.block(0, 0) == 0.0);
    CHECK((e.block - e.block.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  }
  double h = 0;
  for (const auto& v : graph.fields) h = std::max(h, v.norm());
  CHECK(h > 0);
}

TEST_CASE("linear polarization leaves no pseudo-field") {
  const auto graph = assemble_spin_graph(square_lattice(3, 1.0), P, {model_I_field(0.3, 1.6, 0.01, P)});
  for (const auto& v : graph.fields) CHECK(v.norm() < 1e-15);
}

TEST_CASE("cutoff, empty field list and threading") {
  const auto g = square_lattice(3, 1.0);
  const FieldSpec f = model_I_field(0.0, 1.6, 0.01, P);
  CHECK(assemble_spin_graph(g, P, {f}, {AveragingMode::PointDipole, 1.0, 1}).edges.size() == 12);
  const auto none = assemble_spin_graph(g, P, {});
  for (const auto& e : none.edges) CHECK(e.block.norm() == 0.0);
  const auto one = assemble_spin_graph(g, P, {f}, {AveragingMode::PointDipole, {}, 1});
  const auto four = assemble_spin_graph(g, P, {f}, {AveragingMode::PointDipole, {}, 4});
  for (std::size_t k = 0; k < one.edges.size(); ++k) CHECK(one.edges[k].block == four.edges[k].block);
}

TEST_CASE("fields add") {
  const auto g = square_lattice(2, 1.0);
  const FieldSpec a = z_field("1g(1/2)", -0.05, 0.01), b = model_I_field(0, 1.7, 0.01, P);
  const auto ga = assemble_spin_graph(g, P, {a}), gb = assemble_spin_graph(g, P, {b});
  const auto both = assemble_spin_graph(g, P, {a, b});
  for (std::size_t k = 0; k < both.edges.size(); ++k)
    CHECK((both.edges[k].block - ga.edges[k].block - gb.edges[k].block).norm() <
          1e-15 * both.edges[k].block.norm());
}

TEST_CASE("resonance errors name the edge") {
  const auto g = square_lattice(2, 1.0);
  const FieldSpec f{Polarization::x(), movre_pichler(1.0, P)[index_of(parse_label("2g"))].energy, 0.01};
  try {
    assemble_spin_graph(g, P, {f});
    FAIL("expected a resonance");
  } catch (const ResonancePole& e) {
    CHECK(std::string(e.what()).find("edge (") != std::string::npos);
  }
  CHECK_THROWS_AS(assemble_spin_graph(g, P, {f}, {AveragingMode::Gaussian, {}, 1}), InvalidArgument);
}

TEST_CASE("model I coupling") {
  const double b = 1 / std::sqrt(2.0);
  const FieldSpec f = model_I_field(0.0, 1.88, 0.01, P);
  const FieldSpec far = model_I_field(0.0, 3.0, 0.01, P);
  const double det = 1.88 - 0.5 - std::sqrt(2.0);
  CHECK(model_I_coupling(f, b, P) == doctest::Approx(1e-4 / (8 * det)));
  CHECK(model_I_coupling(model_I_field(0, 2.0, 0.01, P), b, P) > 0);
  CHECK(model_I_coupling(f, b, P) < 0);
  const WavepacketGeometry wp{b, 0.01};
  const double avg = model_I_coupling(far, b, P, AveragingMode::Gaussian, 0.01);
  const double oracle = radial_average<double>(
      [&](double r) { return 1e-4 / (8 * (3.0 - 0.5 - P.dipolar_energy(r))); }, wp);
  CHECK(avg == doctest::Approx(oracle).epsilon(1e-9));
  CHECK_THROWS_AS(model_I_coupling(model_I_field(0, 0.5 + std::sqrt(2.0), 0.01, P), b, P), ResonancePole);
  CHECK_THROWS_AS(model_I_coupling(model_I_field(0, 1.9142, 0.01, P), b, P, AveragingMode::Gaussian, 0.02),
                  PoleInsideWavepacket);
}

TEST_CASE("model I field") {
  const auto f0 = model_I_field(0, 1.88, 0.01, P);
  CHECK((f0.pol.cartesian() - Eigen::Vector3cd(0, 1, 0)).norm() < 1e-15);
  CHECK(f0.photon_energy == doctest::Approx(2 * P.B + 1.88));
  const auto f1 = model_I_field(M_PI / 2, 1.88, 0.01, P);
  CHECK((f1.pol.cartesian() - Eigen::Vector3cd(1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("model II balance") {
  const FieldSpec g = z_field("1g(1/2)", -0.025, 0.01);
  const FieldSpec two = z_field("2g(3/2)", 0.05, 0.01);
  auto residual = [&](double rabi_u) {
    return model_II_balance(g, z_field("1u(1/2)", -0.025, rabi_u), two, 1.0, P).residual;
  };
  double lo = 1e-4, hi = 0.05;
  REQUIRE(residual(lo) * residual(hi) < 0);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (residual(lo) * residual(mid) <= 0 ? hi : lo) = mid;
  }
  const auto bal = model_II_balance(g, z_field("1u(1/2)", -0.025, lo), two, 1.0, P);
  CHECK(bal.balanced);
  REQUIRE(bal.J_z);
  REQUIRE(bal.J_perp);
  const auto levels = movre_pichler(1.0, P);
  const auto s = s_amplitudes(levels, g, 1e-9);
  const auto C = c_coefficients(levels, s);
  CHECK(*bal.J_z == doctest::Approx(0.01 * C.one_block(Parity::Gerade, 2, 2) / 4));

  const auto off = model_II_balance(g, z_field("1u(1/2)", -0.025, 0.5 * lo), two, 1.0, P);
  CHECK_FALSE(off.balanced);
  CHECK_FALSE(off.J_z);
}

TEST_CASE("Kitaev effective strength") {
  CHECK(kitaev_effective_strength(40.0, -100.0) == doctest::Approx(-0.16));
  CHECK(kitaev_effective_strength(-40.0, -100.0) == kitaev_effective_strength(40.0, -100.0));
  CHECK(kitaev_effective_strength(0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(kitaev_effective_strength(1.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(kitaev_effective_strength(1.0, 0.0), InvalidArgument);
}

TEST_CASE("edge classification and buckets") {
  const auto g = stacked_triangular(2, 3, 1.0);
  const auto graph = assemble_spin_graph(
      g, P, {z_field("1g(1/2)", -0.025, 0.01), z_field("0g-(1/2)", 0.025, 0.0025),
             z_field("2g(3/2)", 0.05, 0.01)});
  const auto rep = classify_edges(graph);
  REQUIRE(rep.edges.size() == graph.edges.size());
  int strong = 0;
  for (const auto& c : rep.edges) {
    CHECK(c.magnitude <= rep.reference);
    CHECK(c.off_pattern <= c.magnitude);
    if (c.bucket == RangeBucket::Strong) ++strong;
    if (std::abs(c.distance - 1.0) < 1e-12) CHECK(c.bucket == RangeBucket::Strong);
  }
  CHECK(strong >= 13);
  const auto fixed = classify_edges(graph, 1e9);
  for (const auto& c : fixed.edges) CHECK(c.bucket == RangeBucket::Negligible);
  const std::string dot = to_graphviz(graph, rep);
  CHECK(dot.rfind("graph spins {", 0) == 0);
  CHECK(dot.find("color=blue") != std::string::npos);
  CHECK(bucket_name(RangeBucket::Weak) == "weak");
}

TEST_CASE("photon energy from a label") {
  const auto lv = movre_pichler(0.8, P);
  CHECK(photon_energy_for(parse_label("0g-(1/2)"), 0.1, 0.8, P) ==
        doctest::Approx(lv[index_of(parse_label("0g-(1/2)"))].energy + 0.1));
}
