#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "flowercell/cell.hpp"
#include "flowercell/domain.hpp"
#include "flowercell/errors.hpp"
#include "flowercell/geometry.hpp"
#include "flowercell/limit_laws.hpp"
#include "flowercell/quadrature.hpp"
#include "flowercell/sampler.hpp"
#include "flowercell/stats.hpp"
#include "flowercell/vec.hpp"

namespace flowercell {

inline Vec2 invert(Vec2 x) {
  const double r2 = norm2(x);
  if (r2 == 0.0) throw DomainError("cannot invert the pole");
  return x / r2;
}

// True iff the complement of the inverted domain is convex: d + d'' >= 0 on smooth
// pieces (the polar-curvature sign of g = 1/d reduces to this), and d' does not jump
// down at breakpoints.
inline bool is_voronoi_flower(const StarlikeDomain& dom, int grid = 4096) {
  for (int k = 0; k < grid; ++k) {
    const double t = kTwoPi * k / grid;
    const double d = dom.radius(t);
    if (dom.radius(t) + dom.second_derivative(t) < -1e-9 * d) return false;
  }
  for (double b : dom.breakpoints()) {
    const double jump = dom.derivative(b + 1e-9) - dom.derivative(b - 1e-9);
    if (jump < -1e-6 * dom.radius(b)) return false;
  }
  return true;
}

// A piece of the flower boundary that is a circle through o, replacing the part of the
// domain between the tangency angles lo < hi. In inverted space it is the line <n, z> = c.
struct FillerArc {
  Vec2 center;
  double radius;
  double lo;
  double hi;
  Vec2 normal;
  double offset;
};

struct AngleInterval {
  double lo;
  double hi;
};

// Maximal Voronoi flower inside a starlike domain.
class FlowerDecomposition {
 public:
  FlowerDecomposition(StarlikeDomain dom, std::vector<FillerArc> fillers)
      : dom_(std::move(dom)), fillers_(std::move(fillers)) {
    std::sort(fillers_.begin(), fillers_.end(), [](const FillerArc& a, const FillerArc& b) { return a.lo < b.lo; });
    if (fillers_.empty()) {
      contacts_.push_back({0.0, kTwoPi});
      return;
    }
    for (std::size_t i = 0; i < fillers_.size(); ++i) {
      const double start = fillers_[i].hi;
      double end = fillers_[(i + 1) % fillers_.size()].lo;
      while (end < start) end += kTwoPi;
      contacts_.push_back({start, end});
    }
  }

  const StarlikeDomain& domain() const { return dom_; }
  std::span<const FillerArc> fillers() const { return fillers_; }
  std::span<const AngleInterval> contact_arcs() const { return contacts_; }
  bool is_flower_already() const { return fillers_.empty(); }

  const FillerArc* filler_at(double theta) const {
    for (const FillerArc& f : fillers_) {
      const double t = f.lo + reduce_angle(theta - f.lo);
      if (t > f.lo && t < f.hi) return &f;
    }
    return nullptr;
  }

  // Polar radius of the flower boundary.
  double radius(double theta) const {
    if (const FillerArc* f = filler_at(theta)) return dot(f->normal, unit(theta)) / f->offset;
    return dom_.radius(theta);
  }
  double derivative(double theta) const {
    if (const FillerArc* f = filler_at(theta)) return dot(f->normal, unit_perp(theta)) / f->offset;
    return dom_.derivative(theta);
  }
  // Support function of the limit body K, whose doubled flower is the maximal flower.
  double support(double theta) const { return 0.5 * radius(theta); }

 private:
  StarlikeDomain dom_;
  std::vector<FillerArc> fillers_;
  std::vector<AngleInterval> contacts_;
};

namespace detail {

inline Vec2 inverted_point(const StarlikeDomain& d, double t) { return unit(t) / d.radius(t); }

inline Vec2 inverted_tangent(const StarlikeDomain& d, double t) {
  const double r = d.radius(t);
  return unit_perp(t) / r - unit(t) * (d.derivative(t) / (r * r));
}

// Tangency angle of the line through `from` touching the inverted curve near `guess`.
inline double tangent_from(const StarlikeDomain& d, Vec2 from, double guess, double step) {
  auto phi = [&](double t) { return cross(inverted_point(d, t) - from, inverted_tangent(d, t)); };
  const int m = 24;
  double best = guess;
  double best_dist = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int k = -m; k < m; ++k) {
    double a = guess + k * step * 0.25, b = a + step * 0.25;
    double fa = phi(a), fb = phi(b);
    if ((fa <= 0.0) == (fb <= 0.0)) continue;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      const double fm = phi(mid);
      if ((fm <= 0.0) == (fa <= 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    const double root = 0.5 * (a + b);
    if (std::abs(root - guess) < best_dist) {
      best_dist = std::abs(root - guess);
      best = root;
      found = true;
    }
  }
  return found ? best : guess;
}

}  // namespace detail

// Convex hull of the inverted boundary samples; hull edges that skip samples become
// filler arcs after refining both tangency angles.
inline FlowerDecomposition maximal_flower(const StarlikeDomain& dom, int samples = 8192) {
  const double step = kTwoPi / samples;
  std::vector<Vec2> pts(samples);
  for (int j = 0; j < samples; ++j) pts[j] = detail::inverted_point(dom, j * step);

  std::vector<int> idx(samples);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a].x < pts[b].x || (pts[a].x == pts[b].x && pts[a].y < pts[b].y);
  });
  std::vector<int> hull(2 * samples);
  int k = 0;
  auto turn = [&](int a, int b, int c) { return cross(pts[b] - pts[a], pts[c] - pts[a]); };
  for (int i = 0; i < samples; ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], idx[i]) <= 0.0) --k;
    hull[k++] = idx[i];
  }
  for (int i = samples - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], idx[i]) <= 0.0) --k;
    hull[k++] = idx[i];
  }
  hull.resize(k - 1);
  std::vector<int> order = hull;
  std::sort(order.begin(), order.end());

  std::vector<FillerArc> fillers;
  const int h = static_cast<int>(order.size());
  for (int i = 0; i < h; ++i) {
    const int ja = order[i];
    const int jb = order[(i + 1) % h];
    const int gap = ((jb - ja) % samples + samples) % samples;
    if (gap < 2) continue;
    double ta = ja * step;
    double tb = ta + gap * step;
    for (int it = 0; it < 60; ++it) {
      const double nb = detail::tangent_from(dom, detail::inverted_point(dom, ta), tb, step);
      const double na = detail::tangent_from(dom, detail::inverted_point(dom, nb), ta, step);
      const bool done = std::abs(na - ta) < 1e-14 && std::abs(nb - tb) < 1e-14;
      ta = na;
      tb = nb;
      if (done) break;
    }
    const Vec2 a = detail::inverted_point(dom, ta), b = detail::inverted_point(dom, tb);
    const Vec2 e = b - a;
    Vec2 n = Vec2{e.y, -e.x} / norm(e);
    double c = dot(n, a);
    if (c < 0.0) {
      n = -n;
      c = -c;
    }
    // Skip numerically flat bridges.
    double depth = 0.0;
    for (int j = 1; j < gap; ++j) depth = std::max(depth, c - dot(n, pts[(ja + j) % samples]));
    if (depth < 1e-10 * c) continue;
    fillers.push_back({n / (2.0 * c), 1.0 / (2.0 * c), reduce_angle(ta), reduce_angle(ta) + (tb - ta), n, c});
  }
  if (fillers.size() > 256) {
    throw ValidationError("domain has too many non-convex sectors for the flower decomposition");
  }
  return FlowerDecomposition(dom, std::move(fillers));
}

enum class CurvePiece { Contact, Filler };

struct AntiorthotomicCurve {
  std::vector<Vec2> points;
  std::vector<double> theta;
  std::vector<CurvePiece> piece;
  std::vector<int> arc;  // index into contact arcs or fillers
};

// Point (d u + d' v) / 2 of the limit curve at angle theta of a contact arc.
inline Vec2 antiorthotomic_point(const StarlikeDomain& d, double t) {
  return (unit(t) * d.radius(t) + unit_perp(t) * d.derivative(t)) * 0.5;
}

// Limit curve: points equidistant from o and the domain boundary on contact arcs,
// joined through the corner n / (2c) of each filler.
inline AntiorthotomicCurve antiorthotomic(const FlowerDecomposition& fd, int samples = 4096) {
  AntiorthotomicCurve out;
  const StarlikeDomain& d = fd.domain();
  auto contacts = fd.contact_arcs();
  auto fillers = fd.fillers();
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const AngleInterval arc = contacts[i];
    const int m = std::max(8, static_cast<int>(std::ceil(samples * (arc.hi - arc.lo) / kTwoPi)));
    std::vector<double> ts;
    for (int j = 0; j <= m; ++j) ts.push_back(arc.lo + (arc.hi - arc.lo) * j / m);
    for (double b : d.breakpoints()) {
      for (int w = -1; w <= 1; ++w) {
        const double c = b + w * kTwoPi;
        if (c > arc.lo + 1e-9 && c < arc.hi - 1e-9) {
          ts.push_back(c - 1e-12);
          ts.push_back(c + 1e-12);
        }
      }
    }
    std::sort(ts.begin(), ts.end());
    if (fillers.empty()) ts.pop_back();  // full circle: skip the duplicate endpoint
    for (double t : ts) {
      out.points.push_back(antiorthotomic_point(d, t));
      out.theta.push_back(reduce_angle(t));
      out.piece.push_back(CurvePiece::Contact);
      out.arc.push_back(static_cast<int>(i));
    }
    if (!fillers.empty()) {
      const FillerArc& f = fillers[(i + 1) % fillers.size()];
      out.points.push_back(f.center);
      out.theta.push_back(reduce_angle(0.5 * (f.lo + f.hi)));
      out.piece.push_back(CurvePiece::Filler);
      out.arc.push_back(static_cast<int>((i + 1) % fillers.size()));
    }
  }
  return out;
}

inline AntiorthotomicCurve antiorthotomic(const StarlikeDomain& d, int samples = 4096) {
  return antiorthotomic(maximal_flower(d), samples);
}

// Smooth Voronoi constants of the limit body, written directly in d over the contact arcs
// (r = (d + d'') / 2, h = d / 2 substituted into the smooth-body integrals).
inline double domain_limit_constant(const FlowerDecomposition& fd, Functional f) {
  const double g = gamma_two_thirds();
  const double c3 = std::pow(3.0, -4.0 / 3.0);
  double factor = 0.0, rp = 0.0, dp = 0.0;
  switch (f) {
    case Functional::DefectArea:
      factor = std::pow(2.0, -8.0 / 3.0) * std::pow(3.0, -1.0 / 3.0) * g;
      rp = 4.0 / 3.0;
      dp = -2.0 / 3.0;
      break;
    case Functional::DefectPerimeter:
      factor = std::pow(2.0, 1.0 / 3.0) * c3 * g;
      rp = 1.0 / 3.0;
      dp = -2.0 / 3.0;
      break;
    case Functional::Vertices:
      factor = std::pow(2.0, 4.0 / 3.0) * c3 * g;
      rp = 1.0 / 3.0;
      dp = 1.0 / 3.0;
      break;
  }
  const StarlikeDomain& d = fd.domain();
  auto integrand = [&](double t) {
    const double dd = d.radius(t);
    return std::pow(std::max(0.0, dd + d.second_derivative(t)), rp) * std::pow(dd, dp);
  };
  double total = 0.0;
  for (const AngleInterval& arc : fd.contact_arcs()) {
    std::vector<double> cuts;
    for (double b : d.breakpoints()) {
      for (int w = -1; w <= 1; ++w) cuts.push_back(b + w * kTwoPi);
    }
    total += integrate_split(integrand, arc.lo, arc.hi, cuts, {1e-11, 1e-13, 48}).value;
  }
  return factor * total;
}

inline double domain_limit_constant(const StarlikeDomain& d, Functional f) {
  return domain_limit_constant(maximal_flower(d), f);
}

// Smooth body with support d / 2, for domains that are already flowers.
inline ConvexBody limit_body(const StarlikeDomain& d) {
  return ConvexBody::smooth([d](double t) { return 0.5 * d.radius(t); },
                            [d](double t) { return 0.5 * d.derivative(t); },
                            [d](double t) { return 0.5 * d.second_derivative(t); }, "limit-body");
}

// Distance from x to the boundary of the domain.
inline double distance_to_boundary(const StarlikeDomain& d, Vec2 x) {
  auto g = [&](double t) { return -norm(x - d.boundary_point(t)); };
  return -detail::maximize_periodic(g, 2048).second;
}

// Hausdorff distances d_H(C_lambda, K) per replicate, for several intensities coupled by
// thinning one sample drawn at the largest intensity.
inline std::vector<std::vector<double>> limit_shape_distances(const FlowerDecomposition& fd,
                                                              const std::vector<double>& lambdas,
                                                              std::size_t replicates, std::uint64_t seed,
                                                              unsigned workers = 0) {
  const double lmax = *std::max_element(lambdas.begin(), lambdas.end());
  const double lmin = *std::min_element(lambdas.begin(), lambdas.end());
  const Exclusion ex = Exclusion::domain(fd.domain());
  auto per_rep = [&](std::size_t rep) {
    PointSample full = sample_points(lmax, ex, {WindowKind::Margin, default_margin(lmin)}, seed, rep, lmax);
    std::vector<double> out;
    for (double lam : lambdas) {
      VoronoiBuild b = build_voronoi_cell(thin(full, lam));
      out.push_back(hausdorff_support(b.cell, fd));
    }
    return out;
  };
  return parallel_map<std::vector<double>>(replicates, per_rep, workers);
}

inline EstimatorReport limit_shape_check(const StarlikeDomain& d, double lambda, std::size_t replicates,
                                         std::uint64_t seed, unsigned workers = 0) {
  const FlowerDecomposition fd = maximal_flower(d);
  auto rows = limit_shape_distances(fd, {lambda}, replicates, seed, workers);
  Welford w;
  for (const auto& r : rows) w.add(r[0]);
  return make_report("hausdorff", lambda, w, 0.0, Rate::None, seed);
}

}  // namespace flowercell
