#include "molspin/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "molspin/errors.hpp"

namespace molspin {

namespace {

double& slot(std::vector<FieldSpec>& fields, const FreeParameter& p) {
  auto& f = fields.at(p.field);
  return p.kind == FreeKind::Rabi ? f.rabi : f.photon_energy;
}

}  // namespace

void ModelTargets::validate() const {
  if (links.empty()) throw InvalidArgument("no link targets");
  for (const auto& l : links) {
    if (!std::isfinite(l.target) || l.target == 0.0) {
      throw InvalidArgument("link target '" + l.name + "' must be finite and nonzero");
    }
    if (l.a < 0 || l.a > 3 || l.b < 0 || l.b > 3) {
      throw InvalidArgument("link target '" + l.name + "' has an invalid channel");
    }
    if (!(l.separation.norm() > 0)) throw InvalidArgument("link '" + l.name + "' has no length");
  }
}

double coupling_objective(const ModelTargets& targets, const MoleculeParams& params,
                          const std::vector<FieldSpec>& fields, AveragingMode mode, double z0) {
  double sum = 0.0;
  try {
    for (const auto& l : targets.links) {
      const Eigen::Matrix4d block = edge_block(l.separation, params, fields, mode, z0);
      const double rel = (block(l.a, l.b) - l.target) / std::abs(l.target);
      sum += rel * rel;
    }
  } catch (const ResonancePole&) {
    return std::numeric_limits<double>::infinity();
  } catch (const PoleInsideWavepacket&) {
    return std::numeric_limits<double>::infinity();
  }
  return sum;
}

OptimizeResult optimize_fields(const ModelTargets& targets, const MoleculeParams& params,
                               const std::vector<FieldSpec>& initial,
                               const std::vector<FreeParameter>& free,
                               const OptimizeOptions& options) {
  targets.validate();
  if (free.empty()) throw InvalidArgument("optimizer needs at least one free parameter");
  for (const auto& p : free) {
    if (p.field < 0 || p.field >= static_cast<int>(initial.size())) {
      throw InvalidArgument("free parameter refers to a missing field");
    }
    if (!(p.lower < p.upper)) throw InvalidArgument("free parameter box is empty");
    if (p.kind == FreeKind::Rabi && p.lower < 0) throw InvalidArgument("rabi bound below zero");
  }

  OptimizeResult res;
  res.fields = initial;
  for (const auto& p : free) {
    double& v = slot(res.fields, p);
    v = std::clamp(v, p.lower, p.upper);
  }
  auto objective = [&](const std::vector<FieldSpec>& f) {
    return coupling_objective(targets, params, f, options.mode, options.z0);
  };
  res.residual = objective(res.fields);
  if (res.residual <= options.tolerance) return res;

  std::vector<int> order(free.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    std::shuffle(order.begin(), order.end(), rng);
    const double before = res.residual;
    for (int idx : order) {
      const FreeParameter& p = free[idx];
      std::vector<FieldSpec> trial = res.fields;
      double& v = slot(trial, p);
      auto eval = [&](double x) {
        v = x;
        return objective(trial);
      };
      // Coarse scan for a bracket, then golden section inside it.
      const int m = std::max(3, options.scan_points);
      int best_k = -1;
      double best = std::numeric_limits<double>::infinity();
      std::vector<double> xs(m);
      for (int k = 0; k < m; ++k) {
        xs[k] = p.lower + (p.upper - p.lower) * k / (m - 1);
        const double f = eval(xs[k]);
        if (f < best) {
          best = f;
          best_k = k;
        }
      }
      double current = slot(res.fields, p);
      double best_x = current;
      double best_f = res.residual;
      if (best_k >= 0) {
        double a = xs[std::max(0, best_k - 1)], b = xs[std::min(m - 1, best_k + 1)];
        double c = b - phi * (b - a), d = a + phi * (b - a);
        double fc = eval(c), fd = eval(d);
        for (int it = 0; it < options.golden_steps; ++it) {
          if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - phi * (b - a);
            fc = eval(c);
          } else {
            a = c; c = d; fc = fd;
            d = a + phi * (b - a);
            fd = eval(d);
          }
        }
        const double candidates[] = {xs[best_k], c, d};
        const double values[] = {best, fc, fd};
        for (int q = 0; q < 3; ++q) {
          if (values[q] < best_f) {
            best_f = values[q];
            best_x = candidates[q];
          }
        }
      }
      if (best_f < res.residual) {
        slot(res.fields, p) = best_x;
        res.residual = best_f;
      }
    }
    if (res.residual < before) {
      ++res.sweeps;
      res.history.push_back(res.residual);
    }
    if (res.residual <= options.tolerance) break;
    if (!(res.residual < before)) {
      if (res.sweeps == 0) {
        throw NoImprovement("optimizer could not reduce the residual " +
                            std::to_string(res.residual));
      }
      break;
    }
    if (before - res.residual <= 1e-14 * before) break;
  }
  return res;
}

}  // namespace molspin
