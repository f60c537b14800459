#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "flowercell/body.hpp"
#include "flowercell/errors.hpp"
#include "flowercell/quadrature.hpp"
#include "flowercell/vec.hpp"

namespace flowercell {

enum class Model { Voronoi, Crofton };
enum class Functional { DefectArea, DefectPerimeter, Vertices };

// Growth/decay rate of a functional's mean; None marks a raw (unrescaled) statistic.
enum class Rate { None, LambdaMinusTwoThirds, LambdaMinusHalf, LambdaOneThird, InvLambdaLogLambda, LogLambda };

inline double rate_value(Rate rate, double lambda) {
  switch (rate) {
    case Rate::None: return 1.0;
    case Rate::LambdaMinusTwoThirds: return std::pow(lambda, -2.0 / 3.0);
    case Rate::LambdaMinusHalf: return std::pow(lambda, -0.5);
    case Rate::LambdaOneThird: return std::cbrt(lambda);
    case Rate::InvLambdaLogLambda: return std::log(lambda) / lambda;
    case Rate::LogLambda: return std::log(lambda);
  }
  return 1.0;
}

inline std::string_view rate_name(Rate rate) {
  switch (rate) {
    case Rate::None: return "1";
    case Rate::LambdaMinusTwoThirds: return "lambda^(-2/3)";
    case Rate::LambdaMinusHalf: return "lambda^(-1/2)";
    case Rate::LambdaOneThird: return "lambda^(1/3)";
    case Rate::InvLambdaLogLambda: return "lambda^(-1)*log(lambda)";
    case Rate::LogLambda: return "log(lambda)";
  }
  return "1";
}

inline std::string_view functional_name(Functional f) {
  switch (f) {
    case Functional::DefectArea: return "defect_area";
    case Functional::DefectPerimeter: return "defect_perimeter";
    case Functional::Vertices: return "vertices";
  }
  return "";
}

struct LawSpec {
  Model model;
  BodyKind body_class;
  Functional functional;
};

struct TheoremConstant {
  double constant;
  Rate rate;
  double error;  // quadrature error estimate
};

inline double gamma_two_thirds() { return std::tgamma(2.0 / 3.0); }

// Smooth constants as theta-integrals of r^a h^b, r = h + h'', h = <s, n>.
struct SmoothLaw {
  double factor;
  double r_power;
  double h_power;
  Rate rate;
};

inline SmoothLaw smooth_law(Model model, Functional f) {
  const double g = gamma_two_thirds();
  const double c3 = std::pow(3.0, -4.0 / 3.0);
  if (model == Model::Voronoi) {
    switch (f) {
      case Functional::DefectArea:
        return {0.25 * std::pow(3.0, -1.0 / 3.0) * g, 4.0 / 3.0, -2.0 / 3.0, Rate::LambdaMinusTwoThirds};
      case Functional::DefectPerimeter: return {c3 * g, 1.0 / 3.0, -2.0 / 3.0, Rate::LambdaMinusTwoThirds};
      case Functional::Vertices: return {4.0 * c3 * g, 1.0 / 3.0, 1.0 / 3.0, Rate::LambdaOneThird};
    }
  }
  switch (f) {
    case Functional::DefectArea:
      return {std::pow(2.0, -2.0 / 3.0) * std::pow(3.0, -1.0 / 3.0) * g, 4.0 / 3.0, 0.0, Rate::LambdaMinusTwoThirds};
    case Functional::DefectPerimeter:
      return {std::pow(2.0, 4.0 / 3.0) * c3 * g, 1.0 / 3.0, 0.0, Rate::LambdaMinusTwoThirds};
    case Functional::Vertices: return {std::pow(2.0, 4.0 / 3.0) * c3 * g, 1.0 / 3.0, 0.0, Rate::LambdaOneThird};
  }
  return {};
}

inline TheoremConstant theorem_constant(LawSpec spec, const ConvexBody& body) {
  if (spec.body_class != body.kind()) throw UnsupportedKindError("law body class does not match the body");
  if (body.is_smooth()) {
    const SmoothLaw law = smooth_law(spec.model, spec.functional);
    auto f = [&](double t) {
      const double h = body.support(t);
      return std::pow(body.curvature_radius(t), law.r_power) * std::pow(h, law.h_power);
    };
    auto q = integrate(f, 0.0, kTwoPi, {1e-11, 1e-13, 48});
    return {law.factor * q.value, law.rate, law.factor * q.error};
  }
  const std::size_t n = body.vertex_count();
  const double nk = static_cast<double>(n);
  double sum = 0.0;
  if (spec.model == Model::Voronoi) {
    switch (spec.functional) {
      case Functional::DefectArea:
        for (std::size_t i = 0; i < n; ++i) sum += std::pow(body.edge_offset(i), -0.5) * std::pow(body.edge_length(i), 1.5);
        return {std::pow(2.0, -4.5) * std::pow(kPi, 1.5) * sum, Rate::LambdaMinusHalf, 0.0};
      case Functional::DefectPerimeter:
        for (std::size_t i = 0; i < n; ++i) sum += 1.0 / body.edge_offset(i);
        return {sum / 6.0, Rate::InvLambdaLogLambda, 0.0};
      case Functional::Vertices: return {2.0 * nk / 3.0, Rate::LogLambda, 0.0};
    }
  }
  switch (spec.functional) {
    case Functional::DefectArea:
      for (std::size_t i = 0; i < n; ++i) sum += std::pow(body.edge_length(i), 1.5);
      return {std::pow(2.0, -2.5) * std::pow(kPi, 1.5) * sum, Rate::LambdaMinusHalf, 0.0};
    case Functional::DefectPerimeter: return {2.0 * nk / 3.0, Rate::InvLambdaLogLambda, 0.0};
    case Functional::Vertices: return {2.0 * nk / 3.0, Rate::LogLambda, 0.0};
  }
  return {};
}

// Local geometry at s(theta): curvature radius r and support h = <s, n_s>.
struct SmoothFrame {
  double r;
  double h;
};

inline SmoothFrame smooth_frame(const ConvexBody& body, Angle theta) {
  if (!body.is_smooth()) throw UnsupportedKindError("smooth density needs a smooth body");
  return {body.curvature_radius(theta.radians()), body.support(theta.radians())};
}

namespace detail {
inline double smooth_rate(SmoothFrame f) { return std::pow(2.0, 4.5) / 3.0 / std::sqrt(f.r) * f.h; }
// q beyond which exp(-K q^{3/2}) < e^{-50}.
inline double smooth_q_max(SmoothFrame f) { return std::pow(50.0 / smooth_rate(f), 2.0 / 3.0); }
}  // namespace detail

// Limit density of (lambda^{1/3} X, lambda^{2/3} Y) at s.
inline double density_f_s(SmoothFrame f, double x, double y) {
  if (!(y > 0.0)) return 0.0;
  const double q = x * x / (2.0 * f.r) + y;
  return std::pow(2.0, 5.5) * f.h * f.h * std::pow(f.r, -1.5) * std::exp(-detail::smooth_rate(f) * std::pow(q, 1.5)) *
         std::sqrt(q) * y;
}

inline double density_f_s(const ConvexBody& body, Angle theta, double x, double y) {
  return density_f_s(smooth_frame(body, theta), x, y);
}

// Limit intensity of rescaled cell vertices near s.
inline double intensity_sigma_s(SmoothFrame f, double x, double y) {
  const double q = x * x / (2.0 * f.r) + y;
  if (!(q > 0.0)) return 0.0;
  return std::pow(2.0, 7.5) / 3.0 * std::exp(-detail::smooth_rate(f) * std::pow(q, 1.5)) * f.h * f.h *
         std::pow(f.r, -1.5) * std::pow(q, 1.5);
}

inline double intensity_sigma_s(const ConvexBody& body, Angle theta, double x, double y) {
  return intensity_sigma_s(smooth_frame(body, theta), x, y);
}

// Y-marginal of f_s: int f_s(x, y) dx.
inline double density_f_s_y(SmoothFrame f, double y) {
  const double qm = detail::smooth_q_max(f);
  if (!(y > 0.0) || y >= qm) return 0.0;
  const double xm = std::sqrt(2.0 * f.r * (qm - y));
  return 2.0 * integrate([&](double x) { return density_f_s(f, x, y); }, 0.0, xm, {1e-13, 1e-12, 40}).value;
}

// P(Y <= y) under f_s.
inline double cdf_f_s_y(SmoothFrame f, double y) {
  if (!(y > 0.0)) return 0.0;
  const double top = std::min(y, detail::smooth_q_max(f));
  return integrate([&](double t) { return density_f_s_y(f, t); }, 0.0, top, {1e-10, 1e-11, 40}).value;
}

inline double integral_f_s(SmoothFrame f) { return cdf_f_s_y(f, detail::smooth_q_max(f)); }

inline double mean_y_f_s(SmoothFrame f) {
  return integrate([&](double y) { return y * density_f_s_y(f, y); }, 0.0, detail::smooth_q_max(f),
                   {1e-10, 1e-11, 40})
      .value;
}

// int sigma_s(x, y) dy over y > -x^2 / (2r), at fixed x. Independent of x.
inline double sigma_s_column(SmoothFrame f, double x) {
  const double y0 = -x * x / (2.0 * f.r);
  return integrate([&](double y) { return intensity_sigma_s(f, x, y); }, y0, y0 + detail::smooth_q_max(f),
                   {1e-12, 1e-12, 40})
      .value;
}

enum class PolygonLaw { F, G, Sigma };

// |o_i| and edge length L_i of edge i.
struct EdgeFrame {
  double offset;
  double length;
};

inline EdgeFrame edge_frame(const ConvexBody& body, std::size_t i) {
  if (!body.is_polygon()) throw UnsupportedKindError("polygon density needs a polygon body");
  i %= body.vertex_count();
  return {body.edge_offset(i), body.edge_length(i)};
}

inline double density_f_i(EdgeFrame e, double rho, double alpha) {
  if (!(rho > 0.0) || !(alpha > 1.0)) return 0.0;
  const double o = e.offset;
  return 8.0 * o * o * std::exp(-2.0 * o * rho * alpha * alpha) * alpha * (alpha - 1.0) * rho;
}

// Limit density near the edge, for vertices with angle above tau. Includes the
// factor alpha required for normalisation (see README).
inline double density_g_i(EdgeFrame e, double tau, double rho, double alpha) {
  const double o = e.offset, len = e.length;
  if (!(rho > 0.0 && rho < len) || !(alpha > tau)) return 0.0;
  const double c = rho * len / (len - rho);
  const double k = rho / (len - rho);
  return 8.0 * o * o * c * alpha * (alpha - tau) * (k * alpha + tau) * std::exp(-2.0 * o * c * alpha * alpha);
}

inline double intensity_sigma_i(EdgeFrame e, double rho, double alpha) {
  if (!(rho > 0.0) || !(alpha > 0.0)) return 0.0;
  const double o = e.offset;
  return 8.0 / 3.0 * o * o * rho * alpha * alpha * alpha * std::exp(-2.0 * o * rho * alpha * alpha);
}

inline double density_polygon(PolygonLaw which, const ConvexBody& body, std::size_t i, double rho, double alpha,
                              double tau = 0.0) {
  const EdgeFrame e = edge_frame(body, i);
  switch (which) {
    case PolygonLaw::F: return density_f_i(e, rho, alpha);
    case PolygonLaw::G: return density_g_i(e, tau, rho, alpha);
    case PolygonLaw::Sigma: return intensity_sigma_i(e, rho, alpha);
  }
  return 0.0;
}

inline double integral_f_i(EdgeFrame e) {
  auto inner = [&](double alpha) {
    const double rm = 25.0 / (e.offset * alpha * alpha);
    return integrate([&](double rho) { return density_f_i(e, rho, alpha); }, 0.0, rm, {1e-13, 1e-12, 40}).value;
  };
  return integrate_to_infinity(inner, 1.0, {1e-10, 1e-11, 40}).value;
}

// rho-marginal of g_i: the alpha integral at fixed rho, through alpha = tau + b / sqrt(2 o c).
inline double g_i_rho_marginal(EdgeFrame e, double tau, double rho) {
  if (!(rho > 0.0 && rho < e.length)) return 0.0;
  const double c = rho * e.length / (e.length - rho);
  const double s = 1.0 / std::sqrt(2.0 * e.offset * c);
  return s * integrate([&](double b) { return density_g_i(e, tau, rho, tau + b * s); }, 0.0, 10.0,
                       {1e-13, 1e-12, 40})
                 .value;
}

// The marginal blows up like rho^{-1/2} at the vertex when tau > 0; rho = L w^2 removes it.
inline double integral_g_i(EdgeFrame e, double tau) {
  auto f = [&](double w) { return 2.0 * e.length * w * g_i_rho_marginal(e, tau, e.length * w * w); };
  return integrate(f, 0.0, 1.0, {1e-10, 1e-11, 40}).value;
}

inline double steiner_limit_density(Vec2 x) { return 2.0 * std::exp(-2.0 * kPi * norm2(x)); }

}  // namespace flowercell
