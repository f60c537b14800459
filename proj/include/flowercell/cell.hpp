#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "flowercell/body.hpp"
#include "flowercell/errors.hpp"
#include "flowercell/geometry.hpp"
#include "flowercell/sampler.hpp"
#include "flowercell/vec.hpp"

namespace flowercell {

enum class GeneratorKind { Box, Point, Line };

// Provenance of one cell edge.
struct Generator {
  GeneratorKind kind{GeneratorKind::Box};
  int index{-1};    // position in the sample
  Vec2 point{};     // nucleus, for Voronoi edges
  Line line{0, 0};  // for Crofton edges
};

// Convex CCW polygon around o. generators[i] supports the edge vertices[i] -> vertices[i+1].
struct ZeroCell {
  std::vector<Vec2> vertices;
  std::vector<Generator> generators;
  bool closed{false};
  double truncation_radius{0.0};
  int extensions{0};

  double support(double theta) const {
    const Vec2 u = unit(theta);
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec2& v : vertices) best = std::max(best, dot(v, u));
    return best;
  }
  double max_vertex_distance() const {
    double m = 0.0;
    for (const Vec2& v : vertices) m = std::max(m, norm(v));
    return m;
  }
};

namespace detail {

constexpr double kSideEps = 1e-12;
constexpr double kMergeEps = 1e-10;

struct Clipper {
  std::vector<Vec2> v;
  std::vector<Generator> g;
  // Supporting line {<ln, y> = lc} of each edge, for exact vertex placement.
  std::vector<Vec2> ln;
  std::vector<double> lc;
  double rho_max{0.0};

  void box(double half) {
    v = {{-half, -half}, {half, -half}, {half, half}, {-half, half}};
    g.assign(4, Generator{});
    ln = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
    lc.assign(4, half);
    rho_max = half * std::sqrt(2.0);
  }

  // Point where edge i meets {<n, y> = c}: the two lines' intersection, or interpolation
  // along the edge when they are nearly parallel.
  Vec2 crossing(std::size_t i, Vec2 n, double c, double da, double db) const {
    const Vec2 a = v[i], b = v[(i + 1) % v.size()];
    const Vec2 m = ln[i];
    const double det = cross(m, n);
    if (std::abs(det) > 1e-9 * norm(m) * norm(n)) {
      const Vec2 p{(lc[i] * n.y - c * m.y) / det, (m.x * c - n.x * lc[i]) / det};
      // Keep the exact point only if it lies on the segment.
      const double len = norm(b - a);
      if (norm(p - a) <= len * (1 + 1e-9) && norm(p - b) <= len * (1 + 1e-9)) return p;
    }
    return a + (b - a) * (da / (da - db));
  }

  // Intersects with {y : <n, y> <= c}. Returns true if the polygon changed.
  bool clip(Vec2 n, double c, const Generator& gen) {
    const std::size_t m = v.size();
    const double scale = std::max(1.0, std::abs(c));
    double dmax = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : v) dmax = std::max(dmax, dot(n, p) - c);
    if (dmax <= kSideEps * scale) return false;
    std::vector<Vec2> nv, nn;
    std::vector<double> nc;
    std::vector<Generator> ng;
    auto emit = [&](Vec2 p, const Generator& gg, Vec2 l, double lcv) {
      nv.push_back(p);
      ng.push_back(gg);
      nn.push_back(l);
      nc.push_back(lcv);
    };
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2 a = v[i], b = v[(i + 1) % m];
      const double da = dot(n, a) - c, db = dot(n, b) - c;
      const bool ain = da <= kSideEps * scale, bin = db <= kSideEps * scale;
      if (ain) {
        emit(a, g[i], ln[i], lc[i]);
        if (!bin) emit(crossing(i, n, c, da, db), gen, n, c);
      } else if (bin) {
        emit(crossing(i, n, c, da, db), g[i], ln[i], lc[i]);
      }
    }
    // Drop vertices closer than kMergeEps to their successor; the edge keeps the later label.
    std::vector<Vec2> mv, mn;
    std::vector<double> mc;
    std::vector<Generator> mg;
    for (std::size_t i = 0; i < nv.size(); ++i) {
      if (!mv.empty() && norm(nv[i] - mv.back()) < kMergeEps) {
        mg.back() = ng[i];
        mn.back() = nn[i];
        mc.back() = nc[i];
        continue;
      }
      mv.push_back(nv[i]);
      mg.push_back(ng[i]);
      mn.push_back(nn[i]);
      mc.push_back(nc[i]);
    }
    while (mv.size() > 1 && norm(mv.front() - mv.back()) < kMergeEps) {
      mv.pop_back();
      mg.pop_back();
      mn.pop_back();
      mc.pop_back();
    }
    v = std::move(mv);
    g = std::move(mg);
    ln = std::move(mn);
    lc = std::move(mc);
    rho_max = 0.0;
    for (const Vec2& p : v) rho_max = std::max(rho_max, norm(p));
    return true;
  }

  bool touches_box() const {
    return std::any_of(g.begin(), g.end(), [](const Generator& x) { return x.kind == GeneratorKind::Box; });
  }
};

// Largest overshoot of the cell's dual radial function over the window's outer edge,
// in window-extent units; <= current extent means no point beyond the window can cut.
template <class S>
bool window_covers(const S& s, const std::vector<Vec2>& verts) {
  if (!s.exclusion) return true;
  const Exclusion& ex = *s.exclusion;
  const double sc = ex.scale();
  if (s.window.kind == WindowKind::Disk) {
    double rho = 0.0;
    for (const Vec2& v : verts) rho = std::max(rho, norm(v));
    return sc * rho <= s.window.extent;
  }
  if (const ConvexBody* b = ex.body()) {
    for (const Vec2& v : verts) {
      if (b->distance(v) > s.window.extent) return false;
    }
    return true;
  }
  // Domain exclusion: need scale * <v, u> <= d(theta) + scale * extent for all theta.
  const StarlikeDomain& d = *ex.domain();
  for (const Vec2& v : verts) {
    auto g = [&](double t) { return sc * dot(v, unit(t)) - d.radius(t); };
    if (maximize_periodic(g, 256).second > sc * s.window.extent) return false;
  }
  return true;
}

inline ZeroCell finish(const Clipper& c, const SampleMeta& s) {
  ZeroCell cell;
  cell.vertices = c.v;
  cell.generators = c.g;
  cell.closed = true;
  cell.truncation_radius = s.truncation_radius();
  cell.extensions = s.extensions();
  return cell;
}

inline double box_half_side(const SampleMeta& s, double fallback) {
  const double r = s.truncation_radius();
  return std::isfinite(r) ? 2.0 * r : fallback;
}

}  // namespace detail

struct VoronoiBuild {
  ZeroCell cell;
  PointSample sample;  // after any extensions
};

constexpr int kMaxExtensions = 24;

// Cell of o among the sample points: intersection of {y : <y, x> <= |x|^2 / 2}.
// Extends the sample until no point beyond the window could cut the cell.
inline VoronoiBuild build_voronoi_cell(PointSample sample) {
  for (int attempt = 0;; ++attempt) {
    double far = 0.0;
    for (const Vec2& p : sample.points) far = std::max(far, norm(p));
    detail::Clipper c;
    c.box(detail::box_half_side(sample, 1e6 * std::max(far, 1.0)));
    std::vector<std::size_t> order(sample.points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> r2(sample.points.size());
    for (std::size_t i = 0; i < r2.size(); ++i) r2[i] = norm2(sample.points[i]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r2[a] < r2[b]; });
    for (std::size_t i : order) {
      const Vec2 x = sample.points[i];
      if (std::sqrt(r2[i]) >= 2.0 * c.rho_max) break;
      c.clip(x, 0.5 * r2[i], Generator{GeneratorKind::Point, static_cast<int>(i), x, {0, 0}});
    }
    const bool bounded = !c.touches_box();
    if (bounded && detail::window_covers(sample, c.v)) return {detail::finish(c, sample), std::move(sample)};
    if (!sample.extensible() || attempt >= kMaxExtensions) {
      throw UnboundedCellError("cell not bounded within the sampled window", sample.truncation_radius());
    }
    sample = extend_sample(sample);
  }
}

inline ZeroCell voronoi_zero_cell(const PointSample& sample) { return build_voronoi_cell(sample).cell; }

struct CroftonBuild {
  ZeroCell cell;
  LineSample sample;
};

// Cell of o in the line tessellation: intersection of {y : <y, u_theta> <= r}.
inline CroftonBuild build_crofton_cell(LineSample sample) {
  for (int attempt = 0;; ++attempt) {
    double far = 0.0;
    for (const Line& l : sample.lines) far = std::max(far, std::abs(l.r));
    detail::Clipper c;
    c.box(detail::box_half_side(sample, 1e6 * std::max(far, 1.0)));
    std::vector<std::size_t> order(sample.lines.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sample.lines[a].r < sample.lines[b].r; });
    for (std::size_t i : order) {
      const Line l = sample.lines[i];
      if (l.r >= c.rho_max) break;
      c.clip(unit(l.theta), l.r, Generator{GeneratorKind::Line, static_cast<int>(i), {}, l});
    }
    const bool bounded = !c.touches_box() && !sample.lines.empty();
    if (bounded && detail::window_covers(sample, c.v)) return {detail::finish(c, sample), std::move(sample)};
    if (!sample.extensible() || attempt >= kMaxExtensions) {
      throw UnboundedCellError("cell not bounded within the sampled window", sample.truncation_radius());
    }
    sample = extend_sample(sample);
  }
}

inline ZeroCell crofton_zero_cell(const LineSample& sample) { return build_crofton_cell(sample).cell; }

struct CellMetrics {
  double area{0};
  double perimeter{0};
  int n_vertices{0};
  double defect_area{0};
  double defect_perimeter{0};
  double hausdorff{0};
};

inline double polygon_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

inline double polygon_perimeter(const std::vector<Vec2>& v) {
  double p = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) p += norm(v[(i + 1) % v.size()] - v[i]);
  return p;
}

// Hausdorff distance of a cell containing K: the farthest vertex from K.
inline double hausdorff_containing(const ZeroCell& cell, const ConvexBody& body) {
  double h = 0.0;
  for (const Vec2& v : cell.vertices) h = std::max(h, body.distance(v));
  return h;
}

inline CellMetrics cell_metrics(const ZeroCell& cell, const ConvexBody& body) {
  if (!cell.closed) throw DomainError("cell_metrics needs a closed cell");
  CellMetrics m;
  m.area = polygon_area(cell.vertices);
  m.perimeter = polygon_perimeter(cell.vertices);
  m.n_vertices = static_cast<int>(cell.vertices.size());
  m.defect_area = m.area - body.area();
  m.defect_perimeter = m.perimeter - body.perimeter();
  bool contains = true;
  for (int k = 0; k < 64 && contains; ++k) {
    const double t = kTwoPi * k / 64;
    contains = cell.support(t) >= body.support(t) - 1e-9;
  }
  m.hausdorff = contains ? hausdorff_containing(cell, body) : hausdorff_support(cell, body);
  return m;
}

// A(F_o(cell)) by the polygon branch.
inline double cell_flower_area(const ZeroCell& cell) { return polygon_flower_area(cell.vertices); }

inline std::size_t support_vertex(const ZeroCell& cell, double theta) {
  const Vec2 u = unit(theta);
  std::size_t best = 0;
  double best_val = dot(cell.vertices[0], u);
  for (std::size_t i = 1; i < cell.vertices.size(); ++i) {
    const double val = dot(cell.vertices[i], u);
    if (val > best_val) {
      best_val = val;
      best = i;
    }
  }
  return best;
}

struct LocalXY {
  double x;
  double y;
};

// (X, Y) of the support vertex m in the frame (t_s, n_s) at s(theta).
inline LocalXY support_point(const ZeroCell& cell, const ConvexBody& body, Angle theta) {
  if (!cell.closed) throw DomainError("support_point needs a closed cell");
  if (!body.is_smooth()) throw UnsupportedKindError("support_point needs a smooth body");
  const double t = theta.radians();
  const Vec2 m = cell.vertices[support_vertex(cell, t)];
  const Vec2 d = m - body.boundary_point(t);
  return {dot(d, theta.v()), dot(d, theta.u())};
}

// Vertex coordinates in the frame (t_s, n_s) at s(theta) of a smooth body.
inline std::vector<LocalXY> vertex_cloud_smooth(const ZeroCell& cell, const ConvexBody& body, Angle theta) {
  const Vec2 s = body.boundary_point(theta.radians());
  std::vector<LocalXY> out;
  for (const Vec2& v : cell.vertices) out.push_back({dot(v - s, theta.v()), dot(v - s, theta.u())});
  return out;
}

struct LocalPolar {
  double rho;
  double alpha;
};

// Polar coordinates at vertex a_i: angle from the edge a_i -> a_{i+1} toward its outer normal.
inline std::vector<LocalPolar> vertex_cloud_polygon(const ZeroCell& cell, const ConvexBody& body, std::size_t i) {
  if (!body.is_polygon()) throw UnsupportedKindError("polygon frame needs a polygon body");
  const auto v = body.vertices();
  i %= v.size();
  const Vec2 a = v[i];
  const Vec2 e = (v[(i + 1) % v.size()] - a) / body.edge_length(i);
  const Vec2 n{e.y, -e.x};
  std::vector<LocalPolar> out;
  for (const Vec2& p : cell.vertices) {
    const Vec2 d = p - a;
    out.push_back({norm(d), std::atan2(dot(d, n), dot(d, e))});
  }
  return out;
}

}  // namespace flowercell
