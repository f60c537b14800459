#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "flowercell/errors.hpp"

namespace flowercell {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_depth = 48;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum of panel error estimates
  int panels = 0;
};

namespace detail {

template <class F>
double gauss_panel(const F& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

template <class F>
void adapt(const F& f, double a, double b, double whole, double tol, int depth,
           const QuadratureOptions& opt, QuadratureResult& out) {
  const double m = 0.5 * (a + b);
  const double left = gauss_panel(f, a, m);
  const double right = gauss_panel(f, m, b);
  const double sum = left + right;
  const double err = std::abs(sum - whole);
  const bool tiny = (b - a) <= 1e-15 * std::max(1.0, std::abs(a));
  if (err <= std::max(tol, opt.rel_tol * std::abs(sum)) || tiny) {
    out.value += sum;
    out.error += err;
    out.panels += 2;
    return;
  }
  if (depth >= opt.max_depth) {
    throw NumericError("adaptive quadrature did not converge", err);
  }
  adapt(f, a, m, left, 0.5 * tol, depth + 1, opt, out);
  adapt(f, m, b, right, 0.5 * tol, depth + 1, opt, out);
}

}  // namespace detail

// Adaptive Gauss-Legendre (20 nodes per panel, bisection on the panel
// whose halves disagree). Throws NumericError if max_depth is hit.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, QuadratureOptions opt = {}) {
  QuadratureResult out;
  if (!(b > a)) return out;
  const double whole = detail::gauss_panel(f, a, b);
  detail::adapt(f, a, b, whole, opt.abs_tol, 0, opt, out);
  return out;
}

// Integrates over [a, b] split at the given interior points (kinks).
template <class F>
QuadratureResult integrate_split(const F& f, double a, double b, std::span<const double> cuts,
                                 QuadratureOptions opt = {}) {
  std::vector<double> knots{a};
  for (double c : cuts) {
    if (c > a && c < b) knots.push_back(c);
  }
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  QuadratureResult total;
  const double len = b - a;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i + 1] > knots[i])) continue;
    QuadratureOptions local = opt;
    local.abs_tol = opt.abs_tol * (knots[i + 1] - knots[i]) / len;
    auto r = integrate(f, knots[i], knots[i + 1], local);
    total.value += r.value;
    total.error += r.error;
    total.panels += r.panels;
  }
  return total;
}

// Over a full period [0, 2pi) with kinks at `cuts` (reduced angles).
template <class F>
QuadratureResult integrate_circle(const F& f, std::span<const double> cuts,
                                  QuadratureOptions opt = {}) {
  return integrate_split(f, 0.0, 2.0 * 3.14159265358979323846, cuts, opt);
}

// Integral over [a, inf) by t in (0, 1], x = a + (1 - t) / t.
template <class F>
QuadratureResult integrate_to_infinity(const F& f, double a, QuadratureOptions opt = {}) {
  auto g = [&](double t) {
    const double x = a + (1.0 - t) / t;
    return f(x) / (t * t);
  };
  return integrate(g, 0.0, 1.0, opt);
}

}  // namespace flowercell
