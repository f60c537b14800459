#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/tools/minima.hpp>

#include "flowercell/errors.hpp"
#include "flowercell/quadrature.hpp"
#include "flowercell/vec.hpp"

namespace flowercell {

enum class BodyKind { Smooth, Polygon };

// Location and value of max over theta of <x, u_theta> - h(theta).
// Positive value is dist(x, K); negative value is minus the distance to the boundary.
struct Exceedance {
  double value;
  double theta;
};

namespace detail {

// Closed form of 1/2 * int_{t0}^{t1} <w, u_theta>^2 dtheta.
inline double half_square_integral(Vec2 w, double t0, double t1) {
  const double phi = polar_angle(w);
  const double s = (t1 - t0) / 2.0 + (std::sin(2.0 * (t1 - phi)) - std::sin(2.0 * (t0 - phi))) / 4.0;
  return 0.5 * norm2(w) * s;
}

inline double segment_distance(Vec2 x, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double t = std::clamp(dot(x - a, d) / norm2(d), 0.0, 1.0);
  return norm(x - (a + d * t));
}

inline Vec2 segment_projection(Vec2 x, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double t = std::clamp(dot(x - a, d) / norm2(d), 0.0, 1.0);
  return a + d * t;
}

// Outer normal angles of the edges a_i -> a_{i+1} of a CCW polygon, reduced.
inline std::vector<double> edge_normal_angles(std::span<const Vec2> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 e = v[(i + 1) % v.size()] - v[i];
    out[i] = reduce_angle(std::atan2(-e.x, e.y));
  }
  return out;
}

// Maximises g on the circle: coarse grid then Brent on the best bracket.
template <class G>
std::pair<double, double> maximize_periodic(const G& g, int grid = 256) {
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  const double step = kTwoPi / grid;
  for (int k = 0; k < grid; ++k) {
    const double val = g(k * step);
    if (val > best_val) {
      best_val = val;
      best = k;
    }
  }
  auto neg = [&](double t) { return -g(t); };
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::brent_find_minima(neg, (best - 1) * step, (best + 1) * step, 52, iters);
  if (-r.second >= best_val) return {reduce_angle(r.first), -r.second};
  return {best * step, best_val};
}

}  // namespace detail

// Flower area 1/2 int p_x^2 of a convex CCW polygon, x strictly inside.
inline double polygon_flower_area(std::span<const Vec2> v, Vec2 x = {}) {
  const std::size_t n = v.size();
  auto normals = detail::edge_normal_angles(v);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double t0 = normals[(i + n - 1) % n];
    double t1 = normals[i];
    if (t1 < t0) t1 += kTwoPi;
    total += detail::half_square_integral(v[i] - x, t0, t1);
  }
  return total;
}

// A planar convex body with the origin o strictly inside, described by its
// support function about o. Coordinates are local: o is (0, 0), and
// reference_origin() records where o sits in the input frame.
class ConvexBody {
 public:
  using Fn = std::function<double(double)>;

  static ConvexBody smooth(Fn h, Fn h1, Fn h2, std::string model = "custom",
                           Vec2 reference_origin = {}) {
    ConvexBody b;
    b.kind_ = BodyKind::Smooth;
    b.model_ = std::move(model);
    b.origin_ = reference_origin;
    b.fns_ = std::make_shared<const Fns>(Fns{std::move(h), std::move(h1), std::move(h2)});
    b.validate_smooth();
    b.precompute();
    return b;
  }

  // Vertices in the input frame; `origin` becomes the local o.
  static ConvexBody polygon(std::vector<Vec2> vertices, Vec2 origin = {}) {
    if (vertices.size() < 3) throw ValidationError("polygon needs at least 3 vertices");
    for (auto& p : vertices) p -= origin;
    double signed_area = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      signed_area += cross(vertices[i], vertices[(i + 1) % vertices.size()]);
    }
    if (signed_area < 0.0) std::reverse(vertices.begin(), vertices.end());
    ConvexBody b;
    b.kind_ = BodyKind::Polygon;
    b.model_ = "polygon";
    b.origin_ = origin;
    b.vertices_ = std::move(vertices);
    b.validate_polygon();
    b.precompute();
    return b;
  }

  static ConvexBody disk(double radius, Vec2 center = {}) {
    if (!(radius > 0.0)) throw ValidationError("disk radius must be positive");
    if (norm(center) >= radius) throw ValidationError("origin must lie strictly inside the disk");
    return smooth([=](double t) { return radius + dot(center, unit(t)); },
                  [=](double t) { return dot(center, unit_perp(t)); },
                  [=](double t) { return -dot(center, unit(t)); }, "disk");
  }

  // Semi-axes a, b along the rotated axes, centred at `center`.
  static ConvexBody ellipse(double a, double b, Vec2 center = {}, double rotation = 0.0) {
    if (!(a > 0.0 && b > 0.0)) throw ValidationError("ellipse semi-axes must be positive");
    const double k = b * b - a * a;
    auto q = [=](double t) {
      const double c = std::cos(t - rotation), s = std::sin(t - rotation);
      return a * a * c * c + b * b * s * s;
    };
    auto h = [=](double t) { return std::sqrt(q(t)) + dot(center, unit(t)); };
    auto h1 = [=](double t) {
      const double q1 = k * std::sin(2.0 * (t - rotation));
      return q1 / (2.0 * std::sqrt(q(t))) + dot(center, unit_perp(t));
    };
    auto h2 = [=](double t) {
      const double s = std::sqrt(q(t));
      const double q1 = k * std::sin(2.0 * (t - rotation));
      const double q2 = 2.0 * k * std::cos(2.0 * (t - rotation));
      return q2 / (2.0 * s) - q1 * q1 / (4.0 * s * s * s) - dot(center, unit(t));
    };
    return smooth(h, h1, h2, "ellipse");
  }

  // Support function sampled on a uniform periodic grid (theta_k = 2 pi k / n),
  // interpolated by a cubic B-spline with periodic padding.
  static ConvexBody custom_grid(const std::vector<double>& samples) {
    const int n = static_cast<int>(samples.size());
    if (n < 512) throw ValidationError("custom-grid body needs at least 512 samples");
    const int pad = 16;
    std::vector<double> padded;
    padded.reserve(n + 2 * pad + 1);
    for (int k = -pad; k <= n + pad; ++k) padded.push_back(samples[((k % n) + n) % n]);
    const double step = kTwoPi / n;
    auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        padded.begin(), padded.end(), -pad * step, step);
    return smooth([spline](double t) { return (*spline)(reduce_angle(t)); },
                  [spline](double t) { return spline->prime(reduce_angle(t)); },
                  [spline](double t) { return spline->double_prime(reduce_angle(t)); },
                  "custom-grid");
  }

  BodyKind kind() const { return kind_; }
  bool is_smooth() const { return kind_ == BodyKind::Smooth; }
  bool is_polygon() const { return kind_ == BodyKind::Polygon; }
  const std::string& model() const { return model_; }
  Vec2 reference_origin() const { return origin_; }

  // p_o(K, theta).
  double support(double theta) const {
    if (kind_ == BodyKind::Smooth) return fns_->h(theta);
    return support_at(unit(theta));
  }

  // Homogeneous support p(z) = |z| p_o(K, arg z).
  double support_at(Vec2 z) const {
    if (kind_ == BodyKind::Smooth) return norm(z) * fns_->h(polar_angle(z));
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec2& a : vertices_) best = std::max(best, dot(a, z));
    return best;
  }

  // p_x(K, theta) = p_o(K, theta) - <x, u_theta>.
  double support_from(Vec2 x, double theta) const { return support(theta) - dot(x, unit(theta)); }

  double support_derivative(double theta) const {
    if (kind_ == BodyKind::Smooth) return fns_->h1(theta);
    return dot(vertices_[support_vertex(theta)], unit_perp(theta));
  }

  double support_second_derivative(double theta) const {
    if (kind_ == BodyKind::Smooth) return fns_->h2(theta);
    return -dot(vertices_[support_vertex(theta)], unit(theta));
  }

  // h + h''; zero away from the normal angles of a polygon.
  double curvature_radius(double theta) const {
    if (kind_ == BodyKind::Polygon) return 0.0;
    return fns_->h(theta) + fns_->h2(theta);
  }

  // Point of the boundary with outer normal u_theta (for a polygon, the lowest-index maximiser).
  Vec2 boundary_point(double theta) const {
    if (kind_ == BodyKind::Polygon) return vertices_[support_vertex(theta)];
    return unit(theta) * fns_->h(theta) + unit_perp(theta) * fns_->h1(theta);
  }

  std::size_t support_vertex(double theta) const {
    const Vec2 u = unit(theta);
    std::size_t best = 0;
    double best_val = dot(vertices_[0], u);
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
      const double val = dot(vertices_[i], u);
      if (val > best_val) {
        best_val = val;
        best = i;
      }
    }
    return best;
  }

  std::span<const Vec2> vertices() const { return vertices_; }
  // Outer normal angle of edge a_i -> a_{i+1}.
  double normal_angle(std::size_t i) const { return normals_[i]; }
  double edge_length(std::size_t i) const { return lengths_[i]; }
  // ||o_i||: distance from o to the line of edge i.
  double edge_offset(std::size_t i) const { return offsets_[i]; }
  std::size_t vertex_count() const { return vertices_.size(); }

  // Kinks of theta -> p (normal angles, sorted); empty for smooth bodies.
  std::span<const double> breakpoints() const { return breakpoints_; }

  double area() const { return area_; }
  double perimeter() const { return perimeter_; }
  // A(F_o(K)).
  double flower_area_o() const { return flower_area_o_; }
  double min_support() const { return min_support_; }
  double max_support() const { return max_support_; }
  // Upper bound on max |y| over K; also a Lipschitz bound for theta -> p.
  double max_radius() const { return max_radius_; }

  Exceedance exceedance(Vec2 x) const {
    if (kind_ == BodyKind::Polygon) {
      const std::size_t n = vertices_.size();
      double inner = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double slack = offsets_[i] - dot(x, unit(normals_[i]));
        if (slack < inner) {
          inner = slack;
          arg = i;
        }
      }
      if (inner >= 0.0) return {-inner, normals_[arg]};
      double best = std::numeric_limits<double>::infinity();
      Vec2 proj{};
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = detail::segment_projection(x, vertices_[i], vertices_[(i + 1) % n]);
        const double d = norm(x - p);
        if (d < best) {
          best = d;
          proj = p;
        }
      }
      return {best, reduce_angle(polar_angle(x - proj))};
    }
    auto g = [&](double t) { return dot(x, unit(t)) - fns_->h(t); };
    auto [theta, value] = detail::maximize_periodic(g);
    return {value, theta};
  }

  double distance(Vec2 x) const { return std::max(0.0, exceedance(x).value); }
  bool contains_interior(Vec2 x) const { return exceedance(x).value < 0.0; }

  // Same body with o moved to the local point p.
  ConvexBody rebased(Vec2 p) const {
    if (!contains_interior(p)) throw ValidationError("new origin must lie strictly inside the body");
    if (kind_ == BodyKind::Polygon) {
      std::vector<Vec2> v(vertices_.begin(), vertices_.end());
      ConvexBody b = polygon(std::move(v), p);
      b.origin_ = origin_ + p;
      return b;
    }
    auto f = fns_;
    ConvexBody b = smooth([f, p](double t) { return f->h(t) - dot(p, unit(t)); },
                          [f, p](double t) { return f->h1(t) - dot(p, unit_perp(t)); },
                          [f, p](double t) { return f->h2(t) + dot(p, unit(t)); }, model_, origin_ + p);
    return b;
  }

 private:
  struct Fns {
    Fn h, h1, h2;
  };

  static constexpr int kGrid = 4096;

  void validate_polygon() {
    const std::size_t n = vertices_.size();
    double scale = 0.0;
    for (const Vec2& a : vertices_) scale = std::max(scale, norm(a));
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("degenerate polygon");
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 e0 = vertices_[(i + 1) % n] - vertices_[i];
      const Vec2 e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
      if (norm(e0) <= 1e-12 * scale) throw ValidationError("polygon has repeated vertices");
      if (cross(e0, e1) <= 1e-12 * norm(e0) * norm(e1)) {
        throw ValidationError("polygon is not strictly convex");
      }
    }
    normals_ = detail::edge_normal_angles(vertices_);
    lengths_.resize(n);
    offsets_.resize(n);
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lengths_[i] = norm(vertices_[(i + 1) % n] - vertices_[i]);
      offsets_[i] = dot(vertices_[i], unit(normals_[i]));
      if (offsets_[i] <= 1e-12 * scale) throw ValidationError("origin must lie strictly inside the polygon");
      double d = normals_[(i + 1) % n] - normals_[i];
      if (d < 0) d += kTwoPi;
      turning += d;
    }
    if (std::abs(turning - kTwoPi) > 1e-9) throw ValidationError("polygon is not simple");
    breakpoints_ = normals_;
    std::sort(breakpoints_.begin(), breakpoints_.end());
  }

  void validate_smooth() {
    const double step = kTwoPi / kGrid;
    const double fd = 1e-3;
    auto d5 = [&](const Fn& f, double t) {
      return (-f(t + 2 * fd) + 8 * f(t + fd) - 8 * f(t - fd) + f(t - 2 * fd)) / (12 * fd);
    };
    double scale = 0.0;
    for (int k = 0; k < kGrid; ++k) scale = std::max(scale, std::abs(fns_->h(k * step)));
    if (!std::isfinite(scale) || !(scale > 0.0)) throw ValidationError("support function not finite");
    for (int k = 0; k < kGrid; ++k) {
      const double t = k * step;
      const double h = fns_->h(t);
      if (!(h > 0.0)) throw ValidationError("origin must lie strictly inside the body (h > 0)");
      if (!(h + fns_->h2(t) > 0.0)) throw ValidationError("curvature radius h + h'' must be positive");
      if (std::abs(fns_->h1(t) - d5(fns_->h, t)) > 1e-6 * scale) {
        throw ValidationError("h' inconsistent with h");
      }
      if (std::abs(fns_->h2(t) - d5(fns_->h1, t)) > 1e-4 * scale) {
        throw ValidationError("h'' inconsistent with h'");
      }
    }
  }

  void precompute() {
    if (kind_ == BodyKind::Polygon) {
      const std::size_t n = vertices_.size();
      area_ = 0.0;
      perimeter_ = 0.0;
      max_radius_ = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        area_ += 0.5 * cross(vertices_[i], vertices_[(i + 1) % n]);
        perimeter_ += lengths_[i];
        max_radius_ = std::max(max_radius_, norm(vertices_[i]));
      }
      min_support_ = *std::min_element(offsets_.begin(), offsets_.end());
      max_support_ = max_radius_;
      flower_area_o_ = polygon_flower_area(vertices_);
      return;
    }
    const double step = kTwoPi / kGrid;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, rad = 0.0;
    for (int k = 0; k < kGrid; ++k) {
      const double t = k * step;
      const double h = fns_->h(t);
      lo = std::min(lo, h);
      hi = std::max(hi, h);
      rad = std::max(rad, std::hypot(h, fns_->h1(t)));
    }
    // |p'| <= max|y|, so grid extrema are off by at most rad * step / 2.
    max_radius_ = rad * (1.0 + step);
    min_support_ = lo - 0.5 * max_radius_ * step;
    max_support_ = hi + 0.5 * max_radius_ * step;
    const auto& f = *fns_;
    perimeter_ = integrate([&](double t) { return f.h(t); }, 0.0, kTwoPi).value;
    area_ = integrate([&](double t) { return 0.5 * f.h(t) * (f.h(t) + f.h2(t)); }, 0.0, kTwoPi).value;
    flower_area_o_ = integrate([&](double t) { return 0.5 * f.h(t) * f.h(t); }, 0.0, kTwoPi).value;
  }

  BodyKind kind_{BodyKind::Smooth};
  std::string model_;
  Vec2 origin_{};
  std::shared_ptr<const Fns> fns_;
  std::vector<Vec2> vertices_;
  std::vector<double> normals_, lengths_, offsets_, breakpoints_;
  double area_{0}, perimeter_{0}, flower_area_o_{0}, min_support_{0}, max_support_{0}, max_radius_{0};
};

}  // namespace flowercell
