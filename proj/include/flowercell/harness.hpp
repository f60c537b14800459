#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flowercell/body.hpp"
#include "flowercell/cell.hpp"
#include "flowercell/domain.hpp"
#include "flowercell/errors.hpp"
#include "flowercell/geometry.hpp"
#include "flowercell/io.hpp"
#include "flowercell/limit_laws.hpp"
#include "flowercell/sampler.hpp"
#include "flowercell/shape.hpp"
#include "flowercell/stats.hpp"

namespace flowercell {

enum class ExperimentModel { Voronoi, Crofton, Steiner, Shape };

struct ExperimentConfig {
  std::optional<ConvexBody> body;
  std::optional<StarlikeDomain> domain;
  ExperimentModel model{ExperimentModel::Voronoi};
  std::vector<double> lambdas;
  std::size_t replicates{100};
  std::uint64_t seed{1};
  std::vector<std::string> checks;
  // Pass thresholds.
  double se_multiplier{3.0};
  double rel_tol{0.15};
  double ks_alpha{0.01};
  double ks_theta{0.0};
  double steiner_var_tol{0.15};
  double shape_threshold{0.05};
  unsigned workers{0};  // 0: FLOWERCELL_THREADS or hardware
  std::string csv_out, json_out, svg_out;

  bool wants(const std::string& check) const {
    return std::find(checks.begin(), checks.end(), check) != checks.end();
  }

  void validate() const {
    if (replicates < 1) throw ValidationError("replicates must be at least 1");
    if (lambdas.empty()) throw ValidationError("lambda list is empty");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      if (!(lambdas[i] > 0.0)) throw ValidationError("lambdas must be positive");
      if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw ValidationError("lambdas must be strictly increasing");
    }
    if (model == ExperimentModel::Shape && !domain) throw ValidationError("shape model needs a domain");
    if (model != ExperimentModel::Shape && !body) throw ValidationError("model needs a body");
    for (const auto& c : checks) {
      if (c != "efron" && c != "theorem-constant" && c != "density-ks" && c != "steiner-gaussian" &&
          c != "limit-shape") {
        throw ValidationError("unknown check: " + c);
      }
    }
  }
};

struct CheckResult {
  std::string name;
  double lambda;
  bool passed;
  std::string detail;
};

struct ExperimentResult {
  std::vector<EstimatorReport> reports;
  std::vector<CheckResult> checks;
  std::vector<std::size_t> unbounded;  // per lambda

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  const EstimatorReport* find(const std::string& name, double lambda) const {
    for (const auto& r : reports) {
      if (r.name == name && r.lambda == lambda) return &r;
    }
    return nullptr;
  }
};

// One replicate of a cell experiment.
struct ReplicateRecord {
  bool bounded{false};
  double vertices{0};
  double defect_area{0};
  double defect_perimeter{0};
  double hausdorff{0};
  double growth{0};     // 4 lambda (A(F_o(cell)) - A(F_o(K))) or lambda * defect perimeter
  double support_y{0};  // lambda^{2/3} Y at ks_theta, smooth bodies
};

inline ReplicateRecord run_replicate(ExperimentModel model, const ConvexBody& body, double lambda,
                                     std::uint64_t seed, std::uint64_t stream, double ks_theta) {
  ReplicateRecord rec;
  ZeroCell cell;
  try {
    if (model == ExperimentModel::Voronoi) {
      auto s = sample_points(lambda, Exclusion::flower(body, 2.0), {WindowKind::Margin, default_margin(lambda)},
                             seed, stream);
      cell = build_voronoi_cell(std::move(s)).cell;
    } else {
      auto s = sample_lines(lambda, body, {WindowKind::Margin, default_margin(lambda)}, seed, stream);
      cell = build_crofton_cell(std::move(s)).cell;
    }
  } catch (const UnboundedCellError&) {
    return rec;
  }
  const CellMetrics m = cell_metrics(cell, body);
  rec.bounded = true;
  rec.vertices = m.n_vertices;
  rec.defect_area = m.defect_area;
  rec.defect_perimeter = m.defect_perimeter;
  rec.hausdorff = m.hausdorff;
  rec.growth = model == ExperimentModel::Voronoi ? 4.0 * lambda * (cell_flower_area(cell) - body.flower_area_o())
                                                 : lambda * m.defect_perimeter;
  if (body.is_smooth()) rec.support_y = std::pow(lambda, 2.0 / 3.0) * support_point(cell, body, Angle(ks_theta)).y;
  return rec;
}

namespace detail {

inline void run_cell_model(const ExperimentConfig& cfg, ExperimentResult& res) {
  const ConvexBody& body = *cfg.body;
  const Model law_model = cfg.model == ExperimentModel::Voronoi ? Model::Voronoi : Model::Crofton;
  for (double lambda : cfg.lambdas) {
    auto recs = parallel_map<ReplicateRecord>(
        cfg.replicates,
        [&](std::size_t rep) { return run_replicate(cfg.model, body, lambda, cfg.seed, rep, cfg.ks_theta); },
        cfg.workers);
    std::size_t unbounded = 0;
    Welford n_raw, growth, haus, ys_w;
    Welford fun[3];
    std::vector<double> ys;
    const Functional fs[3] = {Functional::DefectArea, Functional::DefectPerimeter, Functional::Vertices};
    TheoremConstant tc[3];
    for (int k = 0; k < 3; ++k) tc[k] = theorem_constant({law_model, body.kind(), fs[k]}, body);
    for (const auto& r : recs) {
      if (!r.bounded) {
        ++unbounded;
        continue;
      }
      n_raw.add(r.vertices);
      growth.add(r.growth);
      haus.add(r.hausdorff);
      const double raw[3] = {r.defect_area, r.defect_perimeter, r.vertices};
      for (int k = 0; k < 3; ++k) fun[k].add(raw[k] / rate_value(tc[k].rate, lambda));
      if (body.is_smooth()) ys.push_back(r.support_y);
    }
    res.unbounded.push_back(unbounded);
    if (unbounded * 100 > cfg.replicates) {
      throw std::runtime_error("more than 1% of replicates produced unbounded cells");
    }
    for (int k = 0; k < 3; ++k) {
      res.reports.push_back(make_report(std::string(functional_name(fs[k])), lambda, fun[k], tc[k].constant,
                                        tc[k].rate, cfg.seed));
    }
    res.reports.push_back(make_report("vertices_raw", lambda, n_raw, std::nan(""), Rate::None, cfg.seed));
    res.reports.push_back(make_report("flower_growth", lambda, growth, std::nan(""), Rate::None, cfg.seed));
    res.reports.push_back(make_report("hausdorff", lambda, haus, std::nan(""), Rate::None, cfg.seed));
    if (body.is_smooth()) {
      for (double y : ys) ys_w.add(y);
      const SmoothFrame frame = smooth_frame(body, Angle(cfg.ks_theta));
      res.reports.push_back(make_report("support_y", lambda, ys_w, mean_y_f_s(frame), Rate::None, cfg.seed));
    }

    if (cfg.wants("efron")) {
      const double se = std::hypot(n_raw.std_error(), growth.std_error());
      const double diff = n_raw.mean() - growth.mean();
      char buf[160];
      std::snprintf(buf, sizeof buf, "mean N %.5g vs growth %.5g, diff %.3g, combined SE %.3g", n_raw.mean(),
                    growth.mean(), diff, se);
      res.checks.push_back({"efron", lambda, std::abs(diff) <= cfg.se_multiplier * se, buf});
    }
    if (cfg.wants("theorem-constant")) {
      for (int k = 0; k < 3; ++k) {
        const double rel = std::abs(fun[k].mean() - tc[k].constant) / tc[k].constant;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s rescaled mean %.5g vs %.5g (rel %.3g)",
                      std::string(functional_name(fs[k])).c_str(), fun[k].mean(), tc[k].constant, rel);
        res.checks.push_back({"theorem-constant", lambda, rel <= cfg.rel_tol, buf});
      }
    }
    if (cfg.wants("density-ks") && body.is_smooth() && cfg.model == ExperimentModel::Voronoi) {
      const SmoothFrame frame = smooth_frame(body, Angle(cfg.ks_theta));
      const KsResult ks = ks_test(ys, [&](double y) { return cdf_f_s_y(frame, y); });
      char buf[160];
      std::snprintf(buf, sizeof buf, "KS D %.4g, p %.4g, n %zu", ks.statistic, ks.p_value, ys.size());
      res.checks.push_back({"density-ks", lambda, ks.p_value > cfg.ks_alpha, buf});
    }
  }
}

inline void run_steiner_model(const ExperimentConfig& cfg, ExperimentResult& res) {
  const ConvexBody& body = *cfg.body;
  for (double lambda : cfg.lambdas) {
    auto draws = parallel_map<NucleusSample>(
        cfg.replicates, [&](std::size_t rep) { return sample_nucleus(lambda, body, 1, cfg.seed, rep); },
        cfg.workers);
    Welford wx, wy;
    std::size_t proposals = 0;
    double max_lr = -std::numeric_limits<double>::infinity();
    const double s = std::sqrt(lambda);
    for (const auto& d : draws) {
      wx.add(s * d.points[0].x);
      wy.add(s * d.points[0].y);
      proposals += d.proposals;
      max_lr = std::max(max_lr, d.max_log_ratio);
    }
    res.unbounded.push_back(0);
    const double target = 1.0 / (4.0 * kPi);
    res.reports.push_back(make_report("steiner_x", lambda, wx, 0.0, Rate::None, cfg.seed));
    res.reports.push_back(make_report("steiner_y", lambda, wy, 0.0, Rate::None, cfg.seed));
    EstimatorReport acc;
    acc.name = "steiner_acceptance";
    acc.lambda = lambda;
    acc.n = proposals;
    acc.mean = static_cast<double>(cfg.replicates) / static_cast<double>(proposals);
    acc.ci_lo = acc.ci_hi = acc.mean;
    acc.theory_value = std::nan("");
    acc.seed = cfg.seed;
    res.reports.push_back(acc);
    if (cfg.wants("steiner-gaussian")) {
      const bool mean_ok = std::abs(wx.mean()) <= cfg.se_multiplier * wx.std_error() &&
                           std::abs(wy.mean()) <= cfg.se_multiplier * wy.std_error();
      const double rx = std::abs(wx.variance() - target) / target, ry = std::abs(wy.variance() - target) / target;
      const bool var_ok = rx <= cfg.steiner_var_tol && ry <= cfg.steiner_var_tol;
      char buf[200];
      std::snprintf(buf, sizeof buf, "mean (%.3g, %.3g), var (%.4g, %.4g) vs %.4g, max log ratio %.3g",
                    wx.mean(), wy.mean(), wx.variance(), wy.variance(), target, max_lr);
      res.checks.push_back({"steiner-gaussian", lambda, mean_ok && var_ok && max_lr <= 0.0, buf});
    }
  }
}

inline void run_shape_model(const ExperimentConfig& cfg, ExperimentResult& res) {
  const FlowerDecomposition fd = maximal_flower(*cfg.domain);
  auto rows = limit_shape_distances(fd, cfg.lambdas, cfg.replicates, cfg.seed, cfg.workers);
  std::vector<double> means;
  for (std::size_t k = 0; k < cfg.lambdas.size(); ++k) {
    Welford w;
    for (const auto& r : rows) w.add(r[k]);
    means.push_back(w.mean());
    res.unbounded.push_back(0);
    res.reports.push_back(make_report("hausdorff", cfg.lambdas[k], w, 0.0, Rate::None, cfg.seed));
  }
  if (cfg.wants("limit-shape")) {
    bool decreasing = true;
    for (std::size_t k = 1; k < means.size(); ++k) decreasing = decreasing && means[k] < means[k - 1];
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean d_H %.4g at largest lambda (threshold %.3g), decreasing: %s",
                  means.back(), cfg.shape_threshold, decreasing ? "yes" : "no");
    res.checks.push_back({"limit-shape", cfg.lambdas.back(), means.back() < cfg.shape_threshold && decreasing, buf});
  }
}

}  // namespace detail

// Runs every replicate for every lambda; replicate i uses stream i, so results do not
// depend on the number of workers.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  switch (cfg.model) {
    case ExperimentModel::Voronoi:
    case ExperimentModel::Crofton: detail::run_cell_model(cfg, res); break;
    case ExperimentModel::Steiner: detail::run_steiner_model(cfg, res); break;
    case ExperimentModel::Shape: detail::run_shape_model(cfg, res); break;
  }
  return res;
}

inline ExperimentModel model_from_name(const std::string& s) {
  if (s == "voronoi") return ExperimentModel::Voronoi;
  if (s == "crofton") return ExperimentModel::Crofton;
  if (s == "steiner") return ExperimentModel::Steiner;
  if (s == "shape") return ExperimentModel::Shape;
  throw ValidationError("unknown model: " + s);
}

inline ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    if (j.contains("body")) cfg.body = body_from_json(j.at("body"));
    if (j.contains("domain")) cfg.domain = domain_from_json(j.at("domain"));
    cfg.model = model_from_name(j.value("model", std::string("voronoi")));
    if (j.contains("lambdas")) cfg.lambdas = j.at("lambdas").get<std::vector<double>>();
    if (j.contains("lambda")) cfg.lambdas = {j.at("lambda").get<double>()};
    cfg.replicates = j.value("replicates", std::size_t{100});
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.checks = j.value("checks", std::vector<std::string>{});
    cfg.se_multiplier = j.value("se_multiplier", cfg.se_multiplier);
    cfg.rel_tol = j.value("tolerance", cfg.rel_tol);
    cfg.ks_alpha = j.value("ks_alpha", cfg.ks_alpha);
    cfg.ks_theta = j.value("ks_theta", cfg.ks_theta);
    cfg.steiner_var_tol = j.value("steiner_variance_tolerance", cfg.steiner_var_tol);
    cfg.shape_threshold = j.value("shape_threshold", cfg.shape_threshold);
    if (j.contains("output")) {
      const json& o = j.at("output");
      cfg.csv_out = o.value("csv", std::string{});
      cfg.json_out = o.value("json", std::string{});
      cfg.svg_out = o.value("svg", std::string{});
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config json: ") + e.what());
  }
}

// Things to draw; every member optional.
struct Scene {
  std::vector<Vec2> body;
  std::vector<Vec2> flower;
  std::vector<Vec2> domain;
  std::vector<Vec2> cell;
  std::vector<Vec2> points;
  std::vector<Vec2> gamma;
};

// Closed outline of a body's boundary and of scale * F_o(K).
inline std::vector<Vec2> body_outline(const ConvexBody& body, int n = 720) {
  if (body.is_polygon()) return {body.vertices().begin(), body.vertices().end()};
  std::vector<Vec2> out;
  for (int k = 0; k < n; ++k) out.push_back(body.boundary_point(kTwoPi * k / n));
  return out;
}

inline std::vector<Vec2> flower_outline(const ConvexBody& body, double scale, int n = 720) {
  std::vector<Vec2> out;
  for (int k = 0; k < n; ++k) {
    const double t = kTwoPi * k / n;
    out.push_back(unit(t) * (scale * body.support(t)));
  }
  return out;
}

inline std::string render_svg(const Scene& scene) {
  double lo_x = -1, hi_x = 1, lo_y = -1, hi_y = 1;
  bool any = false;
  auto grow = [&](const std::vector<Vec2>& pts) {
    for (const Vec2& p : pts) {
      if (!any) {
        lo_x = hi_x = p.x;
        lo_y = hi_y = p.y;
        any = true;
      }
      lo_x = std::min(lo_x, p.x);
      hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y);
      hi_y = std::max(hi_y, p.y);
    }
  };
  for (const auto* v : {&scene.body, &scene.flower, &scene.domain, &scene.cell, &scene.gamma}) grow(*v);
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  const double pad = 0.05 * span;
  const double scale = 800.0 / (span + 2 * pad);
  auto px = [&](Vec2 p) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f,%.2f", (p.x - lo_x + pad) * scale, (hi_y - p.y + pad) * scale);
    return std::string(buf);
  };
  const double w = (hi_x - lo_x + 2 * pad) * scale, h = (hi_y - lo_y + 2 * pad) * scale;
  std::ostringstream out;
  char head[256];
  std::snprintf(head, sizeof head,
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
                "version=\"1.1\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                w, h, w, h);
  out << head;
  auto poly = [&](const std::vector<Vec2>& pts, const char* style, bool closed) {
    if (pts.empty()) return;
    out << (closed ? "<polygon" : "<polyline") << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) out << (i ? " " : "") << px(pts[i]);
    out << "\" style=\"" << style << "\"/>\n";
  };
  poly(scene.domain, "fill:none;stroke:#999999;stroke-width:1", true);
  poly(scene.flower, "fill:#fde9c9;stroke:#d08a1e;stroke-width:1", true);
  poly(scene.cell, "fill:none;stroke:#1f4e9c;stroke-width:1.5", true);
  poly(scene.body, "fill:#c9d8f0;stroke:#000000;stroke-width:1", true);
  poly(scene.gamma, "fill:none;stroke:#b0232a;stroke-width:1.5", true);
  for (const Vec2& p : scene.points) {
    const std::string c = px(p);
    const auto comma = c.find(',');
    out << "<circle cx=\"" << c.substr(0, comma) << "\" cy=\"" << c.substr(comma + 1) << "\" r=\"1\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

}  // namespace flowercell
