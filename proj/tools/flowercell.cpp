#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "flowercell/flowercell.hpp"

using namespace flowercell;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<std::size_t> reps;
  std::string out;
  std::string format{"csv"};
};

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid json: ") + e.what());
  }
}

ExperimentConfig load(const Options& o) {
  ExperimentConfig cfg = config_from_json(read_json(o.config));
  if (o.seed) cfg.seed = *o.seed;
  if (o.lambda) cfg.lambdas = {*o.lambda};
  if (o.reps) cfg.replicates = *o.reps;
  return cfg;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
  }
}

double first_lambda(const ExperimentConfig& cfg) {
  if (cfg.lambdas.empty()) throw ValidationError("no lambda given");
  if (!(cfg.lambdas.front() > 0.0)) throw ValidationError("lambda must be positive");
  return cfg.lambdas.front();
}

// One cell plus the sample that produced it.
struct OneCell {
  ZeroCell cell;
  std::vector<Vec2> points;
  std::string sample_csv;
};

OneCell simulate_one(const ExperimentConfig& cfg) {
  if (!cfg.body) throw ValidationError("simulate needs a body");
  const double lambda = first_lambda(cfg);
  OneCell out;
  if (cfg.model == ExperimentModel::Crofton) {
    auto b = build_crofton_cell(
        sample_lines(lambda, *cfg.body, {WindowKind::Margin, default_margin(lambda)}, cfg.seed, 0));
    out.cell = b.cell;
    out.sample_csv = lines_to_csv(b.sample);
  } else {
    auto b = build_voronoi_cell(
        sample_points(lambda, Exclusion::flower(*cfg.body, 2.0), {WindowKind::Margin, default_margin(lambda)},
                      cfg.seed, 0));
    out.cell = b.cell;
    out.points = b.sample.points;
    out.sample_csv = points_to_csv(b.sample);
  }
  return out;
}

int cmd_simulate(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const OneCell c = simulate_one(cfg);
  if (o.format == "csv") {
    emit(o, c.sample_csv);
  } else {
    json j = cell_to_json(c.cell);
    const CellMetrics m = cell_metrics(c.cell, *cfg.body);
    j["metrics"] = {{"vertices", m.n_vertices},
                    {"defect_area", m.defect_area},
                    {"defect_perimeter", m.defect_perimeter},
                    {"hausdorff", m.hausdorff}};
    emit(o, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_estimate(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const ExperimentResult res = run_experiment(cfg);
  const std::string text = o.format == "json" ? reports_to_json(res.reports).dump(2) + "\n" : reports_to_csv(res.reports);
  emit(o, text);
  if (!cfg.csv_out.empty()) write_file(cfg.csv_out, reports_to_csv(res.reports));
  if (!cfg.json_out.empty()) write_file(cfg.json_out, reports_to_json(res.reports).dump(2) + "\n");
  for (std::size_t k = 0; k < res.unbounded.size() && k < cfg.lambdas.size(); ++k) {
    if (res.unbounded[k] > 0) {
      std::fprintf(stderr, "lambda %g: %zu unbounded replicates excluded\n", cfg.lambdas[k], res.unbounded[k]);
    }
  }
  for (const auto& c : res.checks) {
    std::fprintf(stderr, "%s %s lambda=%g: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.lambda,
                 c.detail.c_str());
  }
  return res.all_passed() ? 0 : 2;
}

int cmd_constants(const Options& o) {
  const json j = read_json(o.config);
  if (!j.contains("body")) throw ValidationError("constants needs a body");
  const ConvexBody body = body_from_json(j.at("body"));
  std::vector<EstimatorReport> rows;
  json arr = json::array();
  for (Model m : {Model::Voronoi, Model::Crofton}) {
    for (Functional f : {Functional::DefectArea, Functional::DefectPerimeter, Functional::Vertices}) {
      const TheoremConstant tc = theorem_constant({m, body.kind(), f}, body);
      arr.push_back({{"model", m == Model::Voronoi ? "voronoi" : "crofton"},
                     {"functional", std::string(functional_name(f))},
                     {"constant", tc.constant},
                     {"rate", std::string(rate_name(tc.rate))},
                     {"error", tc.error}});
    }
  }
  if (o.format == "json") {
    emit(o, arr.dump(2) + "\n");
  } else {
    std::ostringstream s;
    s << "model,functional,constant,rate,error\n";
    for (const auto& r : arr) {
      s << r["model"].get<std::string>() << ',' << r["functional"].get<std::string>() << ','
        << format_number(r["constant"].get<double>()) << ',' << r["rate"].get<std::string>() << ','
        << format_number(r["error"].get<double>()) << '\n';
    }
    emit(o, s.str());
  }
  return 0;
}

std::vector<Vec2> domain_outline(const StarlikeDomain& d, int n = 720) {
  std::vector<Vec2> out;
  for (int k = 0; k < n; ++k) out.push_back(d.boundary_point(kTwoPi * k / n));
  return out;
}

int cmd_shape(const Options& o) {
  const json j = read_json(o.config);
  if (!j.contains("domain")) throw ValidationError("shape needs a domain");
  const StarlikeDomain dom = domain_from_json(j.at("domain"));
  const FlowerDecomposition fd = maximal_flower(dom);
  const AntiorthotomicCurve gamma = antiorthotomic(fd);

  json fillers = json::array();
  for (const FillerArc& f : fd.fillers()) {
    fillers.push_back({{"lo", f.lo}, {"hi", f.hi}, {"center", {f.center.x, f.center.y}}, {"radius", f.radius}});
  }
  json contacts = json::array();
  for (const AngleInterval& a : fd.contact_arcs()) contacts.push_back({a.lo, a.hi});
  json curve = json::array();
  for (const Vec2& p : gamma.points) curve.push_back({p.x, p.y});
  json consts = json::object();
  for (Functional f : {Functional::DefectArea, Functional::DefectPerimeter, Functional::Vertices}) {
    consts[std::string(functional_name(f))] = domain_limit_constant(fd, f);
  }
  json out = {{"is_flower", is_voronoi_flower(dom)},
              {"fillers", fillers},
              {"contact_arcs", contacts},
              {"gamma", curve},
              {"constants", consts}};
  emit(o, out.dump(2) + "\n");

  const std::string svg = j.contains("output") ? j.at("output").value("svg", std::string{}) : std::string{};
  if (!svg.empty()) {
    Scene scene;
    scene.domain = domain_outline(dom);
    for (int k = 0; k < 720; ++k) scene.flower.push_back(unit(kTwoPi * k / 720) * fd.radius(kTwoPi * k / 720));
    scene.gamma = gamma.points;
    const double lambda = o.lambda.value_or(j.value("lambda", 1e4));
    auto b = build_voronoi_cell(sample_points(lambda, Exclusion::domain(dom), {WindowKind::Margin, default_margin(lambda)},
                                              o.seed.value_or(j.value("seed", std::uint64_t{1})), 0));
    scene.cell = b.cell.vertices;
    write_file(svg, render_svg(scene));
  }
  return 0;
}

int cmd_render(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const OneCell c = simulate_one(cfg);
  Scene scene;
  scene.body = body_outline(*cfg.body);
  if (cfg.model == ExperimentModel::Voronoi) scene.flower = flower_outline(*cfg.body, 1.0);
  scene.cell = c.cell.vertices;
  // Only generators near the cell are drawn.
  const double far = 2.0 * c.cell.max_vertex_distance();
  for (const Vec2& p : c.points) {
    if (norm(p) <= far) scene.points.push_back(p);
  }
  emit(o, render_svg(scene));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditioned Poisson-Voronoi and Crofton zero cells"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "experiment config (json)")->required();
    sub->add_option("--seed", o.seed, "override the seed");
    sub->add_option("--lambda", o.lambda, "run at a single intensity");
    sub->add_option("--reps", o.reps, "override the number of replicates");
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto* simulate = app.add_subcommand("simulate", "build one zero cell");
  auto* estimate = app.add_subcommand("estimate", "run replicates and checks");
  auto* constants = app.add_subcommand("constants", "limit constants for a body");
  auto* shape = app.add_subcommand("shape", "maximal flower and limit curve of a domain");
  auto* render = app.add_subcommand("render", "SVG of a body, its flower and one cell");
  for (auto* s : {simulate, estimate, constants, shape, render}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o);
    if (estimate->parsed()) return cmd_estimate(o);
    if (constants->parsed()) return cmd_constants(o);
    if (shape->parsed()) return cmd_shape(o);
    if (render->parsed()) return cmd_render(o);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
