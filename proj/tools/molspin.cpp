#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "molspin/errors.hpp"
#include "molspin/scenario.hpp"

namespace {

struct Options {
  std::string preset;
  std::string config;
  std::string out = "out";
};

molspin::ScenarioConfig load(const Options& o, const std::string& command) {
  if (o.preset.empty() == o.config.empty()) {
    throw molspin::ValidationError("give exactly one of --preset or --config");
  }
  molspin::ScenarioConfig c =
      o.preset.empty() ? molspin::load_config(o.config) : molspin::load_preset(o.preset);
  if (command != "validate") {
    const auto p = molspin::parse_pipeline(command);
    if (c.pipeline && *c.pipeline != p) {
      throw molspin::ValidationError("config pipeline '" + molspin::pipeline_name(*c.pipeline) +
                                     "' does not match subcommand '" + command + "'");
    }
    c.pipeline = p;
  }
  return c;
}

int run(const Options& o, const std::string& command) {
  try {
    const auto c = load(o, command);
    if (command == "validate") {
      const auto rep = molspin::validate(c);
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& e : rep.errors) std::cerr << "error: " << e << "\n";
      if (!rep.ok()) return molspin::kExitValidation;
      std::cout << "ok\n";
      return molspin::kExitOk;
    }
    const auto res = molspin::run_scenario(c, o.out);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << res.summary.dump(2) << "\n";
    return molspin::kExitOk;
  } catch (const molspin::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return molspin::kExitValidation;
  } catch (const molspin::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return molspin::kExitValidation;
  } catch (const molspin::ResonancePole& e) {
    std::cerr << e.what() << "\n";
    return molspin::kExitPole;
  } catch (const molspin::PoleInsideWavepacket& e) {
    std::cerr << e.what() << "\n";
    return molspin::kExitPole;
  } catch (const molspin::TooLarge& e) {
    std::cerr << e.what() << "\n";
    return molspin::kExitTooLarge;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return molspin::kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective spin models of microwave-dressed polar molecules"};
  app.require_subcommand(1);
  Options o;
  std::string chosen;
  const std::pair<const char*, const char*> commands[] = {
      {"potentials", "Excited-state potential curves on a radial grid"},
      {"pair", "Coupling tensor for one pair separation"},
      {"lattice", "Spin graph for a lattice and a field set"},
      {"spectrum", "Exact diagonalization, magnetization and absorption spectra"},
      {"optimize", "Fit field amplitudes and frequencies to target couplings"},
      {"validate", "Check a scenario without writing files"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--preset", o.preset, "Shipped scenario (fig2, fig3, fig4)");
    sub->add_option("--config", o.config, "Scenario JSON file");
    if (std::string(name) != "validate") {
      sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    }
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI11_PARSE(app, argc, argv);
  return run(o, chosen);
}
