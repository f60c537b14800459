#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <vector>

#include "flowercell/body.hpp"
#include "flowercell/errors.hpp"
#include "flowercell/quadrature.hpp"
#include "flowercell/vec.hpp"

namespace flowercell {

template <class T>
concept SupportFunction = requires(const T& t, double theta) {
  { t.support(theta) } -> std::convertible_to<double>;
};

struct BoundaryPoint {
  Vec2 point;
  double curvature_radius;  // 0 at polygon vertices
};

inline double support_function(const ConvexBody& body, Vec2 x, Angle theta) {
  return body.support_from(x, theta.radians());
}

inline BoundaryPoint boundary_point(const ConvexBody& body, Angle theta) {
  return {body.boundary_point(theta.radians()), body.curvature_radius(theta.radians())};
}

// x in scale * F_o(K), i.e. |x| <= scale * p_o(K, arg x).
inline bool flower_membership(const ConvexBody& body, Vec2 x, double scale = 1.0) {
  const double r2 = norm2(x);
  if (r2 == 0.0) return true;
  return r2 <= scale * body.support_at(x);
}

// Arc of directions where <x, u> > p_o(K, theta); empty if x is in K.
// Endpoints are unreduced with lo < hi < lo + pi.
struct AngleWindow {
  double lo;
  double hi;
};

inline std::optional<AngleWindow> exceedance_window(const ConvexBody& body, Vec2 x) {
  const Exceedance ex = body.exceedance(x);
  if (!(ex.value > 0.0)) return std::nullopt;
  auto g = [&](double t) { return dot(x, unit(t)) - body.support(t); };
  auto bisect = [&](double inside, double outside) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (mid == inside || mid == outside) break;
      (g(mid) > 0.0 ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  const double t = ex.theta;
  return AngleWindow{bisect(t, t - kPi), bisect(t, t + kPi)};
}

namespace detail {

// Breakpoints of the body shifted into [lo, hi].
inline std::vector<double> cuts_in(const ConvexBody& body, double lo, double hi) {
  std::vector<double> out;
  for (double b : body.breakpoints()) {
    for (int k = -2; k <= 2; ++k) {
      const double c = b + k * kTwoPi;
      if (c > lo && c < hi) out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

// R(x) = 1/2 int over {p_x <= 0} of p_x^2; zero for x in K.
inline double flower_rest(const ConvexBody& body, Vec2 x) {
  auto w = exceedance_window(body, x);
  if (!w) return 0.0;
  auto f = [&](double t) {
    const double g = dot(x, unit(t)) - body.support(t);
    return 0.5 * g * g;
  };
  auto cuts = detail::cuts_in(body, w->lo, w->hi);
  return integrate_split(f, w->lo, w->hi, cuts, {1e-13, 1e-12, 48}).value;
}

namespace detail {

inline double half_square_support_integral(const ConvexBody& body, Vec2 x) {
  if (body.is_polygon()) return polygon_flower_area(body.vertices(), x);
  auto f = [&](double t) {
    const double p = body.support_from(x, t);
    return 0.5 * p * p;
  };
  return integrate(f, 0.0, kTwoPi, {1e-12, 1e-14, 48}).value;
}

}  // namespace detail

// A(F_x(K)) = 1/2 int p_x^2, for x in the interior of K.
inline double flower_area(const ConvexBody& body, Vec2 x = {}) {
  if (!body.contains_interior(x)) {
    throw DomainError("flower_area needs x interior to K; use flower_area_general");
  }
  if (x == Vec2{}) return body.flower_area_o();
  return detail::half_square_support_integral(body, x);
}

// Area of the flower F_x(K) = union of disks with diameter [x, y], y in K, for any x.
inline double flower_area_general(const ConvexBody& body, Vec2 x) {
  return detail::half_square_support_integral(body, x) - flower_rest(body, x);
}

// st(K) = (1/pi) int p_o(K, theta) u_theta dtheta, in local coordinates.
inline Vec2 steiner_point(const ConvexBody& body) {
  auto cuts = body.breakpoints();
  QuadratureOptions opt{1e-13, 1e-14, 48};
  const double sx = integrate_circle([&](double t) { return body.support(t) * std::cos(t); }, cuts, opt).value;
  const double sy = integrate_circle([&](double t) { return body.support(t) * std::sin(t); }, cuts, opt).value;
  return Vec2{sx, sy} / kPi;
}

// max over theta of |p_A - p_B|: grid doubling plus Brent refinement,
// stopping when successive estimates agree to `tol`.
template <SupportFunction A, SupportFunction B>
double hausdorff_support(const A& a, const B& b, double tol = 1e-7) {
  auto diff = [&](double t) { return std::abs(a.support(t) - b.support(t)); };
  double previous = -1.0;
  for (int grid = 512; grid <= (1 << 17); grid *= 2) {
    const double estimate = detail::maximize_periodic(diff, grid).second;
    if (previous >= 0.0 && std::abs(estimate - previous) < tol) return std::max(estimate, previous);
    previous = std::max(previous, estimate);
  }
  return previous;
}

}  // namespace flowercell
