#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowercell/body.hpp"
#include "flowercell/cell.hpp"
#include "flowercell/domain.hpp"
#include "flowercell/errors.hpp"
#include "flowercell/sampler.hpp"
#include "flowercell/stats.hpp"

namespace flowercell {

using nlohmann::json;

namespace detail {

inline Vec2 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("expected a point [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Vec2> points_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("expected a list of points");
  std::vector<Vec2> out;
  for (const auto& p : j) out.push_back(vec_from_json(p));
  return out;
}

inline double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace detail

// {"kind":"polygon","vertices":[[x,y],...]} or
// {"kind":"smooth","model":"disk|ellipse|custom-grid","params":{...}}.
inline ConvexBody body_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "polygon") {
      Vec2 origin = j.contains("origin") ? detail::vec_from_json(j.at("origin")) : Vec2{};
      return ConvexBody::polygon(detail::points_from_json(j.at("vertices")), origin);
    }
    if (kind != "smooth") throw ValidationError("unknown body kind: " + kind);
    const std::string model = j.at("model").get<std::string>();
    const json params = j.value("params", json::object());
    const Vec2 center = params.contains("center") ? detail::vec_from_json(params.at("center")) : Vec2{};
    if (model == "disk") return ConvexBody::disk(detail::number_or(params, "radius", 1.0), center);
    if (model == "ellipse") {
      return ConvexBody::ellipse(params.at("a").get<double>(), params.at("b").get<double>(), center,
                                 detail::number_or(params, "rotation", 0.0));
    }
    if (model == "custom-grid") return ConvexBody::custom_grid(params.at("samples").get<std::vector<double>>());
    throw ValidationError("unknown smooth model: " + model);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad body json: ") + e.what());
  }
}

// {"d":"fourier","coeffs":[...]}, {"d":"grid","samples":[...]}, {"d":"disk","radius":R,"center":[x,y]},
// {"d":"polygon","vertices":[...]}.
inline StarlikeDomain domain_from_json(const json& j) {
  try {
    const std::string kind = j.at("d").get<std::string>();
    if (kind == "fourier") return StarlikeDomain::fourier(j.at("coeffs").get<std::vector<double>>());
    if (kind == "grid") return StarlikeDomain::grid(j.at("samples").get<std::vector<double>>());
    if (kind == "disk") {
      const Vec2 c = j.contains("center") ? detail::vec_from_json(j.at("center")) : Vec2{};
      return StarlikeDomain::disk(detail::number_or(j, "radius", 1.0), c);
    }
    if (kind == "polygon") return StarlikeDomain::polygon(detail::points_from_json(j.at("vertices")));
    throw ValidationError("unknown domain kind: " + kind);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad domain json: ") + e.what());
  }
}

inline json cell_to_json(const ZeroCell& cell) {
  json verts = json::array();
  for (const Vec2& v : cell.vertices) verts.push_back({v.x, v.y});
  json gens = json::array();
  for (const Generator& g : cell.generators) {
    switch (g.kind) {
      case GeneratorKind::Box: gens.push_back({{"kind", "box"}}); break;
      case GeneratorKind::Point:
        gens.push_back({{"kind", "point"}, {"index", g.index}, {"x", g.point.x}, {"y", g.point.y}});
        break;
      case GeneratorKind::Line:
        gens.push_back({{"kind", "line"}, {"index", g.index}, {"r", g.line.r}, {"theta", g.line.theta}});
        break;
    }
  }
  return {{"vertices", verts}, {"generators", gens}, {"closed", cell.closed}};
}

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string points_to_csv(const PointSample& s) {
  std::string out = "x,y\n";
  for (const Vec2& p : s.points) out += format_number(p.x) + "," + format_number(p.y) + "\n";
  return out;
}

inline std::string lines_to_csv(const LineSample& s) {
  std::string out = "r,theta\n";
  for (const Line& l : s.lines) out += format_number(l.r) + "," + format_number(l.theta) + "\n";
  return out;
}

inline std::string reports_to_csv(const std::vector<EstimatorReport>& reports) {
  std::string out = "name,lambda,n,mean,std_error,ci_lo,ci_hi,theory,seed\n";
  for (const auto& r : reports) {
    out += r.name + "," + format_number(r.lambda) + "," + std::to_string(r.n) + "," + format_number(r.mean) + "," +
           format_number(r.std_error) + "," + format_number(r.ci_lo) + "," + format_number(r.ci_hi) + "," +
           format_number(r.theory_value) + "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

inline Rate rate_from_name(const std::string& s) {
  for (Rate r : {Rate::None, Rate::LambdaMinusTwoThirds, Rate::LambdaMinusHalf, Rate::LambdaOneThird,
                 Rate::InvLambdaLogLambda, Rate::LogLambda}) {
    if (rate_name(r) == s) return r;
  }
  throw ValidationError("unknown rate: " + s);
}

inline json report_to_json(const EstimatorReport& r) {
  auto num = [](double x) { return std::isnan(x) ? json(nullptr) : json(x); };
  return {{"name", r.name},           {"lambda", r.lambda},       {"n", r.n},
          {"mean", r.mean},           {"variance", r.variance},   {"std_error", r.std_error},
          {"ci95", {r.ci_lo, r.ci_hi}}, {"theory_value", num(r.theory_value)},
          {"rescale_rate", std::string(rate_name(r.rescale_rate))}, {"seed", r.seed}};
}

inline EstimatorReport report_from_json(const json& j) {
  EstimatorReport r;
  r.name = j.at("name").get<std::string>();
  r.lambda = j.at("lambda").get<double>();
  r.n = j.at("n").get<std::size_t>();
  r.mean = j.at("mean").get<double>();
  r.variance = j.at("variance").get<double>();
  r.std_error = j.at("std_error").get<double>();
  r.ci_lo = j.at("ci95").at(0).get<double>();
  r.ci_hi = j.at("ci95").at(1).get<double>();
  r.theory_value = j.at("theory_value").is_null() ? std::nan("") : j.at("theory_value").get<double>();
  r.rescale_rate = rate_from_name(j.at("rescale_rate").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

inline json reports_to_json(const std::vector<EstimatorReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) out.push_back(report_to_json(r));
  return out;
}

inline std::vector<EstimatorReport> reports_from_json(const json& j) {
  std::vector<EstimatorReport> out;
  for (const auto& r : j) out.push_back(report_from_json(r));
  return out;
}

}  // namespace flowercell
