#pragma once

#include <cmath>

#include "flowercell/body.hpp"
#include "flowercell/errors.hpp"
#include "flowercell/geometry.hpp"
#include "flowercell/quadrature.hpp"

namespace flowercell {

// A(F_o(K u {x})) - A(F_o(K)), using p_o(K u {x}) = max(p_o(K), <x, u>).
inline double increment_area_exact(const ConvexBody& body, Vec2 x) {
  auto w = exceedance_window(body, x);
  if (!w) return 0.0;
  auto f = [&](double t) {
    const double a = dot(x, unit(t));
    const double p = body.support(t);
    return 0.5 * (a - p) * (a + p);
  };
  auto cuts = detail::cuts_in(body, w->lo, w->hi);
  return integrate_split(f, w->lo, w->hi, cuts, {1e-13, 1e-11, 48}).value;
}

// The point s(theta) + h u_theta at distance h above the boundary.
inline Vec2 smooth_exterior_point(const ConvexBody& body, Angle theta, double h) {
  return body.boundary_point(theta.radians()) + theta.u() * h;
}

// Leading term h^{3/2} 2^{5/2} / 3 * r^{-1/2} <s, n>.
inline double increment_area_smooth_asymptotic(const ConvexBody& body, Angle theta, double h) {
  if (!body.is_smooth()) throw UnsupportedKindError("smooth asymptotic needs a smooth body");
  if (!(h > 0.0)) throw DomainError("h must be positive");
  const double t = theta.radians();
  const double r = body.curvature_radius(t);
  return std::pow(h, 1.5) * std::pow(2.0, 2.5) / 3.0 / std::sqrt(r) * body.support(t);
}

// s = a_i + rho (cos(alpha) e_i + sin(alpha) n_i), with e_i the unit edge
// direction a_i -> a_{i+1} and n_i the outer normal of that edge.
inline Vec2 polygon_local_point(const ConvexBody& body, std::size_t i, double rho, double alpha) {
  if (!body.is_polygon()) throw UnsupportedKindError("polygon frame needs a polygon body");
  const auto v = body.vertices();
  const Vec2 a = v[i % v.size()];
  const Vec2 e = (v[(i + 1) % v.size()] - a) / body.edge_length(i % v.size());
  const Vec2 n{e.y, -e.x};
  return a + (e * std::cos(alpha) + n * std::sin(alpha)) * rho;
}

// alpha^2 (|o_i| / 2) rho L / (L - rho), valid in the strip 0 < rho cos(alpha) < L.
inline double increment_area_polygon_asymptotic(const ConvexBody& body, std::size_t i, double rho,
                                                double alpha) {
  if (!body.is_polygon()) throw UnsupportedKindError("polygon asymptotic needs a polygon body");
  i %= body.vertex_count();
  const double len = body.edge_length(i);
  const double c = rho * std::cos(alpha);
  if (!(c > 0.0 && c < len) || !(rho < len)) {
    throw DomainError("point outside the edge strip; use increment_area_exact");
  }
  return alpha * alpha * 0.5 * body.edge_offset(i) * rho * len / (len - rho);
}

}  // namespace flowercell
