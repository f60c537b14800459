#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "flowercell/body.hpp"
#include "flowercell/errors.hpp"
#include "flowercell/vec.hpp"

namespace flowercell {

// Domain given by its polar radius d(theta) about o, piecewise smooth with
// kinks at `breakpoints`.
class StarlikeDomain {
 public:
  using Fn = std::function<double(double)>;

  static StarlikeDomain custom(Fn d, Fn d1, Fn d2, std::vector<double> breakpoints = {},
                               std::string model = "custom") {
    StarlikeDomain s;
    s.d_ = std::move(d);
    s.d1_ = std::move(d1);
    s.d2_ = std::move(d2);
    for (double& b : breakpoints) b = reduce_angle(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    s.breaks_ = std::move(breakpoints);
    s.model_ = std::move(model);
    s.validate();
    return s;
  }

  // Disk of radius R centred at c, with o strictly inside.
  static StarlikeDomain disk(double radius, Vec2 c = {}) {
    if (!(radius > 0.0) || norm(c) >= radius) throw ValidationError("o must lie strictly inside the disk");
    auto parts = [=](double t) {
      const double cu = dot(c, unit(t)), cv = dot(c, unit_perp(t));
      const double s = std::sqrt(radius * radius - cv * cv);
      return std::array<double, 4>{cu, cv, s, 0.0};
    };
    return custom(
        [=](double t) { auto p = parts(t); return p[0] + p[2]; },
        [=](double t) { auto p = parts(t); return p[1] + p[1] * p[0] / p[2]; },
        [=](double t) {
          auto p = parts(t);
          const double cu = p[0], cv = p[1], s = p[2];
          return -cu + (cv * cv - cu * cu) / s - cv * cv * cu * cu / (s * s * s);
        },
        {}, "disk");
  }

  // d = a0 + sum_k a_k cos(k t) + b_k sin(k t), coeffs = [a0, a1, b1, a2, b2, ...].
  static StarlikeDomain fourier(std::vector<double> coeffs) {
    if (coeffs.empty()) throw ValidationError("fourier domain needs coefficients");
    auto c = std::make_shared<const std::vector<double>>(std::move(coeffs));
    auto eval = [c](double t, int order) {
      double out = order == 0 ? (*c)[0] : 0.0;
      for (std::size_t j = 1; 2 * j - 1 < c->size(); ++j) {
        const double a = (*c)[2 * j - 1];
        const double b = 2 * j < c->size() ? (*c)[2 * j] : 0.0;
        const double k = static_cast<double>(j);
        const double ck = std::cos(k * t), sk = std::sin(k * t);
        if (order == 0) out += a * ck + b * sk;
        if (order == 1) out += k * (-a * sk + b * ck);
        if (order == 2) out += -k * k * (a * ck + b * sk);
      }
      return out;
    };
    return custom([eval](double t) { return eval(t, 0); }, [eval](double t) { return eval(t, 1); },
                  [eval](double t) { return eval(t, 2); }, {}, "fourier");
  }

  // Polar radius sampled at theta_k = 2 pi k / n, periodic cubic B-spline.
  static StarlikeDomain grid(const std::vector<double>& samples) {
    const int n = static_cast<int>(samples.size());
    if (n < 64) throw ValidationError("grid domain needs at least 64 samples");
    const int pad = 16;
    std::vector<double> padded;
    for (int k = -pad; k <= n + pad; ++k) padded.push_back(samples[((k % n) + n) % n]);
    const double step = kTwoPi / n;
    auto sp = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        padded.begin(), padded.end(), -pad * step, step);
    return custom([sp](double t) { return (*sp)(reduce_angle(t)); },
                  [sp](double t) { return sp->prime(reduce_angle(t)); },
                  [sp](double t) { return sp->double_prime(reduce_angle(t)); }, {}, "grid");
  }

  // Convex polygon containing o, seen as a starlike domain (kinks at vertex angles).
  static StarlikeDomain polygon(std::vector<Vec2> vertices) {
    auto body = ConvexBody::polygon(vertices);  // validates convexity and o inside
    std::vector<Vec2> v(body.vertices().begin(), body.vertices().end());
    auto shared = std::make_shared<const std::vector<Vec2>>(v);
    auto edge = [shared](double t) {
      const auto& w = *shared;
      const Vec2 u = unit(t);
      for (std::size_t i = 0; i < w.size(); ++i) {
        const Vec2 a = w[i], b = w[(i + 1) % w.size()];
        if (cross(a, u) >= 0.0 && cross(u, b) > 0.0) return i;
      }
      return w.size() - 1;
    };
    auto line = [shared, edge](double t) {
      const auto& w = *shared;
      const std::size_t i = edge(t);
      const Vec2 e = w[(i + 1) % w.size()] - w[i];
      const Vec2 n = Vec2{e.y, -e.x} / norm(e);
      return std::pair<double, double>{dot(w[i], n), polar_angle(n)};
    };
    std::vector<double> breaks;
    for (const Vec2& a : v) breaks.push_back(polar_angle(a));
    return custom(
        [line](double t) { auto [c, nu] = line(t); return c / std::cos(t - nu); },
        [line](double t) {
          auto [c, nu] = line(t);
          const double co = std::cos(t - nu);
          return c * std::sin(t - nu) / (co * co);
        },
        [line](double t) {
          auto [c, nu] = line(t);
          const double co = std::cos(t - nu), si = std::sin(t - nu);
          return c * (1.0 + si * si) / (co * co * co);
        },
        breaks, "polygon");
  }

  // scale * F_o(K): d = scale * p_o(K, .).
  static StarlikeDomain flower_of(const ConvexBody& body, double scale = 2.0) {
    std::vector<double> breaks(body.breakpoints().begin(), body.breakpoints().end());
    return custom([body, scale](double t) { return scale * body.support(t); },
                  [body, scale](double t) { return scale * body.support_derivative(t); },
                  [body, scale](double t) { return scale * body.support_second_derivative(t); }, breaks,
                  "flower");
  }

  double radius(double theta) const { return d_(theta); }
  double derivative(double theta) const { return d1_(theta); }
  double second_derivative(double theta) const { return d2_(theta); }
  std::span<const double> breakpoints() const { return breaks_; }
  const std::string& model() const { return model_; }

  double min_radius() const { return min_r_; }
  double max_radius() const { return max_r_; }
  // Bound on |d'|, used as a Lipschitz constant.
  double lipschitz() const { return lip_; }

  bool contains(Vec2 x) const { return norm(x) < d_(polar_angle(x)); }
  Vec2 boundary_point(double theta) const { return unit(theta) * d_(theta); }

 private:
  static constexpr int kGrid = 8192;

  bool near_break(double t, double tol) const {
    for (double b : breaks_) {
      double diff = std::abs(reduce_angle(t - b + kPi) - kPi);
      if (diff < tol) return true;
    }
    return false;
  }

  void validate() {
    const double step = kTwoPi / kGrid;
    const double fd = 1e-4;
    min_r_ = std::numeric_limits<double>::infinity();
    max_r_ = 0.0;
    lip_ = 0.0;
    for (int k = 0; k < kGrid; ++k) {
      const double t = k * step;
      const double d = d_(t);
      if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("polar radius must be positive");
      min_r_ = std::min(min_r_, d);
      max_r_ = std::max(max_r_, d);
      lip_ = std::max(lip_, std::abs(d1_(t)));
      if (near_break(t, 3 * fd)) continue;
      const double fd1 = (d_(t + fd) - d_(t - fd)) / (2 * fd);
      const double fd2 = (d1_(t + fd) - d1_(t - fd)) / (2 * fd);
      const double scale = std::max(1.0, d);
      if (std::abs(fd1 - d1_(t)) > 1e-6 * scale * std::max(1.0, std::abs(d_(t)))) {
        throw ValidationError("d' inconsistent with d");
      }
      if (std::abs(fd2 - d2_(t)) > 1e-4 * scale * std::max(1.0, std::abs(d2_(t)))) {
        throw ValidationError("d'' inconsistent with d'");
      }
    }
    for (double b : breaks_) {
      lip_ = std::max({lip_, std::abs(d1_(b - 1e-9)), std::abs(d1_(b + 1e-9))});
    }
    const double slack = 0.5 * step * lip_ * 1.5;
    min_r_ -= slack;
    max_r_ += slack;
    lip_ *= 1.05;
  }

  Fn d_, d1_, d2_;
  std::vector<double> breaks_;
  std::string model_;
  double min_r_{0}, max_r_{0}, lip_{0};
};

}  // namespace flowercell
