#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "flowercell/body.hpp"
#include "flowercell/domain.hpp"
#include "flowercell/errors.hpp"
#include "flowercell/geometry.hpp"
#include "flowercell/rng.hpp"
#include "flowercell/vec.hpp"

namespace flowercell {

// Region the process must avoid, as a radial function e(theta) about o:
// scale * F_o(K) for a body, or the starlike domain itself.
class Exclusion {
 public:
  static Exclusion flower(const ConvexBody& body, double scale) {
    if (!(scale > 0.0)) throw ValidationError("flower scale must be positive");
    Exclusion e;
    e.region_ = body;
    e.scale_ = scale;
    return e;
  }
  static Exclusion domain(const StarlikeDomain& d) {
    Exclusion e;
    e.region_ = d;
    e.scale_ = 2.0;
    return e;
  }

  double radius(double theta) const {
    if (auto* b = std::get_if<ConvexBody>(&region_)) return scale_ * b->support(theta);
    return std::get<StarlikeDomain>(region_).radius(theta);
  }
  // Bounds on e over the circle and on |e'|.
  double lower() const {
    if (auto* b = std::get_if<ConvexBody>(&region_)) return scale_ * b->min_support();
    return std::get<StarlikeDomain>(region_).min_radius();
  }
  double upper() const {
    if (auto* b = std::get_if<ConvexBody>(&region_)) return scale_ * b->max_support();
    return std::get<StarlikeDomain>(region_).max_radius();
  }
  double lipschitz() const {
    if (auto* b = std::get_if<ConvexBody>(&region_)) return scale_ * b->max_radius();
    return std::get<StarlikeDomain>(region_).lipschitz();
  }
  // 2 for points (bisectors halve distances), 1 for lines.
  double scale() const { return scale_; }
  const ConvexBody* body() const { return std::get_if<ConvexBody>(&region_); }
  const StarlikeDomain* domain() const { return std::get_if<StarlikeDomain>(&region_); }

 private:
  std::variant<ConvexBody, StarlikeDomain> region_;
  double scale_{2.0};
};

// Disk: sampled region is e(theta) < r <= extent.
// Margin: e(theta) < r <= e(theta) + scale * extent, i.e. scale * F_o(K + extent * B).
enum class WindowKind { Disk, Margin };

struct Window {
  WindowKind kind{WindowKind::Margin};
  double extent{0.0};
};

// Default margin for intensity lambda; doubled on each extension.
inline double default_margin(double lambda) { return 2.0 / std::sqrt(lambda); }

struct Line {
  double r;
  double theta;
};

struct SampleMeta {
  double lambda{0.0};
  double mark_bound{0.0};  // marks are uniform on (0, mark_bound); kept iff mark < lambda
  std::optional<Exclusion> exclusion;  // empty for explicit samples
  Window window{};
  std::vector<double> shell_extents;  // window extent after each shell; back() is current
  std::uint64_t seed{0};
  std::uint64_t stream{0};

  bool extensible() const { return exclusion.has_value(); }
  int extensions() const { return static_cast<int>(shell_extents.size()) - 1; }

  // Outer edge of the window in direction theta.
  double outer(double theta, double extent) const {
    if (window.kind == WindowKind::Disk) return extent;
    return exclusion->radius(theta) + exclusion->scale() * extent;
  }
  // sup over theta of the window's outer edge; infinite for explicit samples.
  double truncation_radius() const {
    if (!exclusion) return std::numeric_limits<double>::infinity();
    if (window.kind == WindowKind::Disk) return window.extent;
    return exclusion->upper() + exclusion->scale() * window.extent;
  }
};

struct PointSample : SampleMeta {
  std::vector<Vec2> points;
  std::vector<double> marks;

  static PointSample from_points(std::vector<Vec2> pts, double lambda = 1.0) {
    PointSample s;
    s.lambda = lambda;
    s.mark_bound = lambda;
    s.marks.assign(pts.size(), 0.0);
    s.points = std::move(pts);
    return s;
  }
};

struct LineSample : SampleMeta {
  std::vector<Line> lines;
  std::vector<double> marks;

  static LineSample from_lines(std::vector<Line> ls, double lambda = 1.0) {
    LineSample s;
    s.lambda = lambda;
    s.mark_bound = lambda;
    s.marks.assign(ls.size(), 0.0);
    s.lines = std::move(ls);
    return s;
  }
};

namespace detail {

// Poisson process of intensity mark_bound on the shell inner(theta) < r <= outer(theta)
// (area measure r dr dtheta for points, dr dtheta for lines), thinned to mark < lambda.
// theta-panels with Lipschitz bounds give the enclosing annular sectors.
template <class Inner, class Outer, class Emit>
void sample_shell(const Inner& inner, const Outer& outer, double lip, double thickness, bool area_measure,
                  double mark_bound, double lambda, Rng& rng, Emit&& emit) {
  const int panels = static_cast<int>(
      std::clamp(std::ceil(kTwoPi * 2.0 * lip / std::max(thickness, 1e-12)), 64.0, 65536.0));
  const double w = kTwoPi / panels;
  for (int j = 0; j < panels; ++j) {
    const double ta = j * w, tb = (j + 1) * w;
    const double lo = std::max(0.0, std::min(inner(ta), inner(tb)) - 0.5 * lip * w);
    const double hi = std::max(outer(ta), outer(tb)) + 0.5 * lip * w;
    if (!(hi > lo)) continue;
    const double measure = area_measure ? 0.5 * w * (hi * hi - lo * lo) : w * (hi - lo);
    const long long count = rng.poisson(mark_bound * measure);
    for (long long k = 0; k < count; ++k) {
      const double t = ta + w * rng.uniform();
      const double u = rng.uniform();
      const double r = area_measure ? std::sqrt(lo * lo + u * (hi * hi - lo * lo)) : lo + u * (hi - lo);
      const double mark = mark_bound * rng.uniform();
      if (!(mark < lambda)) continue;
      if (r > inner(t) && r <= outer(t)) emit(t, r, mark);
    }
  }
}

template <class S, class Emit>
void sample_next_shell(const S& s, double new_extent, StreamTag tag, bool area_measure, Emit&& emit) {
  const Exclusion& ex = *s.exclusion;
  const int index = static_cast<int>(s.shell_extents.size());
  Rng rng(s.seed, s.stream, tag, static_cast<std::uint64_t>(index));
  const bool first = s.shell_extents.empty();
  const double prev = first ? 0.0 : s.shell_extents.back();
  auto inner = [&](double t) { return first ? ex.radius(t) : s.outer(t, prev); };
  auto outer = [&](double t) { return s.outer(t, new_extent); };
  double lip = ex.lipschitz();
  double thickness;
  if (s.window.kind == WindowKind::Disk) {
    thickness = first ? new_extent - ex.upper() : new_extent - prev;
    if (!first) lip = 0.0;
  } else {
    thickness = ex.scale() * (new_extent - prev);
  }
  sample_shell(inner, outer, lip, thickness, area_measure, s.mark_bound, s.lambda, rng, emit);
}

template <class S>
void check_window(const S& s, double extent) {
  if (!(s.lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(s.mark_bound >= s.lambda)) throw DomainError("mark bound must be at least lambda");
  if (!(extent > 0.0)) throw DomainError("window extent must be positive");
  if (s.window.kind == WindowKind::Disk && !(extent > s.exclusion->upper())) {
    throw DomainError("truncation radius must exceed the excluded region");
  }
}

}  // namespace detail

// Poisson points of intensity lambda outside the exclusion, inside the window.
// mark_bound >= lambda enables coupled thinning to any lower intensity.
inline PointSample sample_points(double lambda, const Exclusion& ex, Window window, std::uint64_t seed,
                                 std::uint64_t stream = 0, double mark_bound = 0.0) {
  PointSample s;
  s.lambda = lambda;
  s.mark_bound = mark_bound > 0.0 ? mark_bound : lambda;
  s.exclusion = ex;
  s.window = window;
  s.seed = seed;
  s.stream = stream;
  detail::check_window(s, window.extent);
  detail::sample_next_shell(s, window.extent, StreamTag::Points, true, [&](double t, double r, double m) {
    s.points.push_back(unit(t) * r);
    s.marks.push_back(m);
  });
  s.shell_extents.push_back(window.extent);
  return s;
}

// Points outside 2F_o(K) within the disk of the given radius about o.
inline PointSample sample_conditioned_points(double lambda, const ConvexBody& body, double radius,
                                             std::uint64_t seed, std::uint64_t stream = 0) {
  return sample_points(lambda, Exclusion::flower(body, 2.0), {WindowKind::Disk, radius}, seed, stream);
}

// Appends the shell between the current and the new window extent.
inline PointSample extend_sample(const PointSample& s, double new_extent) {
  if (!s.extensible()) throw DomainError("explicit samples cannot be extended");
  if (new_extent < s.window.extent) throw DomainError("window cannot shrink");
  if (new_extent == s.window.extent) return s;
  PointSample out = s;
  detail::sample_next_shell(s, new_extent, StreamTag::Points, true, [&](double t, double r, double m) {
    out.points.push_back(unit(t) * r);
    out.marks.push_back(m);
  });
  out.window.extent = new_extent;
  out.shell_extents.push_back(new_extent);
  return out;
}

inline PointSample extend_sample(const PointSample& s) { return extend_sample(s, 2.0 * s.window.extent); }

// Keeps points with mark < lambda; the result is a sample at intensity lambda.
inline PointSample thin(const PointSample& s, double lambda) {
  if (!(lambda > 0.0 && lambda <= s.lambda)) throw DomainError("thinning needs 0 < lambda <= sample lambda");
  PointSample out = s;
  out.lambda = lambda;
  out.points.clear();
  out.marks.clear();
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (s.marks[i] < lambda) {
      out.points.push_back(s.points[i]);
      out.marks.push_back(s.marks[i]);
    }
  }
  return out;
}

// Lines {<y, u_theta> = r} of intensity lambda dr dtheta, avoiding scale-1 flower F_o(K),
// i.e. r > p_o(K, theta).
inline LineSample sample_lines(double lambda, const ConvexBody& body, Window window, std::uint64_t seed,
                               std::uint64_t stream = 0, double mark_bound = 0.0) {
  LineSample s;
  s.lambda = lambda;
  s.mark_bound = mark_bound > 0.0 ? mark_bound : lambda;
  s.exclusion = Exclusion::flower(body, 1.0);
  s.window = window;
  s.seed = seed;
  s.stream = stream;
  detail::check_window(s, window.extent);
  detail::sample_next_shell(s, window.extent, StreamTag::Lines, false, [&](double t, double r, double m) {
    s.lines.push_back({r, t});
    s.marks.push_back(m);
  });
  s.shell_extents.push_back(window.extent);
  return s;
}

inline LineSample sample_conditioned_lines(double lambda, const ConvexBody& body, double radius,
                                           std::uint64_t seed, std::uint64_t stream = 0) {
  return sample_lines(lambda, body, {WindowKind::Disk, radius}, seed, stream);
}

inline LineSample extend_sample(const LineSample& s, double new_extent) {
  if (!s.extensible()) throw DomainError("explicit samples cannot be extended");
  if (new_extent < s.window.extent) throw DomainError("window cannot shrink");
  if (new_extent == s.window.extent) return s;
  LineSample out = s;
  detail::sample_next_shell(s, new_extent, StreamTag::Lines, false, [&](double t, double r, double m) {
    out.lines.push_back({r, t});
    out.marks.push_back(m);
  });
  out.window.extent = new_extent;
  out.shell_extents.push_back(new_extent);
  return out;
}

inline LineSample extend_sample(const LineSample& s) { return extend_sample(s, 2.0 * s.window.extent); }

inline LineSample thin(const LineSample& s, double lambda) {
  if (!(lambda > 0.0 && lambda <= s.lambda)) throw DomainError("thinning needs 0 < lambda <= sample lambda");
  LineSample out = s;
  out.lambda = lambda;
  out.lines.clear();
  out.marks.clear();
  for (std::size_t i = 0; i < s.lines.size(); ++i) {
    if (s.marks[i] < lambda) {
      out.lines.push_back(s.lines[i]);
      out.marks.push_back(s.marks[i]);
    }
  }
  return out;
}

// log of exp(-4 lambda A(F_x) + 4 lambda A(F_o) + pi lambda |x|^2), written through
// A(F_x) = A(F_o) + pi/2 |x|^2 - R(x), valid when st(K) = o.
inline double nucleus_log_acceptance(const ConvexBody& body, double lambda, Vec2 x) {
  return -kPi * lambda * norm2(x) + 4.0 * lambda * flower_rest(body, x);
}

struct NucleusSample {
  std::vector<Vec2> points;
  std::size_t proposals{0};
  double max_log_ratio{-std::numeric_limits<double>::infinity()};
};

// Draws from the density proportional to exp(-4 lambda A(F_x(K))) by rejection from a
// centred Gaussian with per-coordinate variance 1 / (2 pi lambda).
inline NucleusSample sample_nucleus(double lambda, const ConvexBody& body, std::size_t n, std::uint64_t seed,
                                    std::uint64_t stream = 0) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (norm(steiner_point(body)) > 1e-8) throw DomainError("nucleus sampling needs st(K) = o");
  Rng rng(seed, stream, StreamTag::Nucleus, 0);
  const double sd = 1.0 / std::sqrt(2.0 * kPi * lambda);
  NucleusSample out;
  while (out.points.size() < n) {
    const Vec2 x{rng.normal(sd), rng.normal(sd)};
    const double u = rng.uniform();
    ++out.proposals;
    const double lr = nucleus_log_acceptance(body, lambda, x);
    out.max_log_ratio = std::max(out.max_log_ratio, lr);
    if (lr > 1e-12) throw NumericError("nucleus acceptance ratio exceeds 1", lr);
    if (std::log(u) < lr) out.points.push_back(x);
  }
  return out;
}

}  // namespace flowercell
