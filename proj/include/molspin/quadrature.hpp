#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "molspin/errors.hpp"

namespace molspin {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_panels = 4096;
};

namespace detail {

struct GaussLegendre10 {
  std::array<double, 10> x;
  std::array<double, 10> w;
};

const GaussLegendre10& gauss_legendre10();

template <class T>
double magnitude(const T& v) {
  using std::abs;
  if constexpr (requires { v.norm(); }) {
    return v.norm();
  } else {
    return abs(v);
  }
}

}  // namespace detail

/// Adaptive Gauss-Legendre on [a, b].  Each panel is compared with the sum of
/// its two halves and the worst panel is bisected until the error estimate
/// meets rel_tol * |I| + abs_tol.  T needs +, scalar *, and abs() or norm().
template <class T, class F>
T integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  const auto& gl = detail::gauss_legendre10();
  auto panel = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    T sum = gl.w[0] * f(c + h * gl.x[0]);
    for (int i = 1; i < 10; ++i) sum = sum + gl.w[i] * f(c + h * gl.x[i]);
    return T(h * sum);
  };
  struct Panel {
    double lo, hi;
    T whole;
    T refined;
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  auto make = [&](double lo, double hi, T whole) {
    const double mid = 0.5 * (lo + hi);
    T refined = panel(lo, mid) + panel(mid, hi);
    return Panel{lo, hi, whole, refined, detail::magnitude(T(refined - whole))};
  };

  std::priority_queue<Panel> queue;
  queue.push(make(a, b, panel(a, b)));
  T total = queue.top().refined;
  double err = queue.top().err;
  int panels = 1;
  while (err > opt.rel_tol * detail::magnitude(total) + opt.abs_tol) {
    if (panels >= opt.max_panels) {
      throw Error("adaptive quadrature did not converge");
    }
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    Panel left = make(worst.lo, mid, panel(worst.lo, mid));
    Panel right = make(mid, worst.hi, panel(mid, worst.hi));
    queue.push(left);
    queue.push(right);
    ++panels;
    total = total + T(left.refined + right.refined - worst.refined);
    err += left.err + right.err - worst.err;
  }
  return total;
}

/// Fixed-order composite Gauss-Legendre, 10 nodes per panel.
template <class T, class F>
T integrate_fixed(F&& f, double a, double b, int panels) {
  const auto& gl = detail::gauss_legendre10();
  const double width = (b - a) / panels;
  T sum{};
  bool first = true;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * width, h = 0.5 * width;
    for (int i = 0; i < 10; ++i) {
      T term = (h * gl.w[i]) * f(c + h * gl.x[i]);
      sum = first ? term : T(sum + term);
      first = false;
    }
  }
  return sum;
}

}  // namespace molspin
