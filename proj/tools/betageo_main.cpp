// betageo: Fisher-Rao geometry of beta distributions and histogram
// classification on top of it.
//
// Exit codes: 0 success, 1 numerical failure (non-convergence, boundary
// escape), 2 usage or parse error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "betageo/errors.hpp"
#include "betageo/fit.hpp"
#include "betageo/io.hpp"
#include "betageo/learn.hpp"
#include "betageo/manifold.hpp"
#include "betageo/stats.hpp"
#include "betageo/version.hpp"

namespace {

namespace bg = betageo;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

class Manifest {
 public:
  Manifest(std::string command, std::filesystem::path primary_output)
      : primary_output_(std::move(primary_output)),
        started_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = bg::kVersion;
  }

  json& config() { return doc_["config"]; }
  json& inputs() { return doc_["inputs"]; }
  json& outputs() { return doc_["outputs"]; }
  void set_seed(std::uint64_t seed) { doc_["seed"] = seed; }

  void write() {
    const auto elapsed = std::chrono::steady_clock::now() - started_;
    doc_["duration_seconds"] =
        std::chrono::duration<double>(elapsed).count();
    bg::io::atomic_write_text(primary_output_.string() + ".manifest.json",
                              doc_.dump(2) + "\n");
  }

 private:
  std::filesystem::path primary_output_;
  std::chrono::steady_clock::time_point started_;
  json doc_;
};

bg::learn::Geometry parse_geometry(const std::string& name) {
  if (name == "riemannian") return bg::learn::Geometry::riemannian;
  if (name == "euclidean") return bg::learn::Geometry::euclidean;
  throw CLI::ValidationError("geometry must be riemannian or euclidean");
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  std::string input;
  std::string areas_dir;
  std::string output;
  std::optional<double> lower;
  std::optional<double> upper;
  bool population_max = false;
};

int run_fit(const FitOptions& opt) {
  if (opt.input.empty() && opt.areas_dir.empty()) {
    std::fprintf(stderr, "fit: pass --input <jsonl> or --areas-dir <dir>\n");
    return kExitUsage;
  }
  std::vector<bg::fit::SubjectRecord> records;
  if (!opt.areas_dir.empty()) {
    records = bg::io::read_areas_dir(opt.areas_dir);
  } else {
    records = bg::io::read_subjects_jsonl(opt.input);
  }

  bg::fit::NormalizationConfig bounds{0.0, 1.0};
  if (opt.population_max) {
    bounds = bg::fit::population_max_bounds(records);
  } else {
    if (!opt.lower || !opt.upper) {
      std::fprintf(stderr,
                   "fit: clamp bounds required: pass --lower and --upper, or "
                   "--population-max\n");
      return kExitUsage;
    }
    bounds = {*opt.lower, *opt.upper};
    if (!(bounds.lower < bounds.upper)) {
      std::fprintf(stderr, "fit: --lower must be smaller than --upper\n");
      return kExitUsage;
    }
  }

  Manifest manifest("fit", opt.output);
  manifest.inputs()["subjects"] = opt.areas_dir.empty() ? opt.input : opt.areas_dir;
  manifest.config()["lower"] = bounds.lower;
  manifest.config()["upper"] = bounds.upper;
  manifest.config()["population_max"] = opt.population_max;

  const bg::fit::FittedCohort cohort = bg::fit::fit_cohort(records, bounds);
  bg::io::write_fitted_cohort_csv(opt.output, cohort.subjects);
  const std::string exclusions_path = opt.output + ".exclusions.csv";
  bg::io::write_exclusions_csv(exclusions_path, cohort.exclusions);

  manifest.outputs()["cohort"] = opt.output;
  manifest.outputs()["exclusions"] = exclusions_path;
  manifest.write();

  std::printf("fitted %zu subjects, %zu excluded\n", cohort.subjects.size(),
              cohort.exclusions.size());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// geodesic

struct GeodesicOptions {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int steps = 100;
  double bvp_tolerance = 1e-6;
  int bvp_max_iterations = 50;
  std::string output;
};

int run_geodesic(const GeodesicOptions& opt) {
  const bg::BetaPoint start(opt.x0, opt.y0);
  const bg::BetaPoint end(opt.x1, opt.y1);

  Manifest manifest("geodesic", opt.output);
  manifest.config()["start"] = {opt.x0, opt.y0};
  manifest.config()["end"] = {opt.x1, opt.y1};
  manifest.config()["steps"] = opt.steps;
  manifest.config()["bvp_tolerance"] = opt.bvp_tolerance;
  manifest.config()["bvp_max_iterations"] = opt.bvp_max_iterations;

  bg::GeodesicPath path;
  double dist = 0.0;
  if (start == end) {
    path.times.push_back(0.0);
    path.points.push_back(start);
    path.velocities.push_back({0.0, 0.0});
  } else {
    bg::ShootingConfig shooting;
    shooting.steps = opt.steps;
    shooting.tolerance = opt.bvp_tolerance;
    shooting.max_iterations = opt.bvp_max_iterations;
    const bg::TangentVector w = bg::log_map(start, end, shooting);
    dist = bg::norm(w);
    path = bg::geodesic_ivp(start, w, opt.steps);
  }
  bg::io::write_geodesic_csv(opt.output, path);
  manifest.outputs()["geodesic"] = opt.output;
  manifest.write();
  std::printf("%s\n", bg::io::format_double(dist).c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ball

struct BallOptions {
  double cx = 0, cy = 0;
  double radius = 0;
  int directions = 64;
  int steps = 100;
  std::string output;
};

int run_ball(const BallOptions& opt) {
  if (!(opt.radius > 0.0)) {
    std::fprintf(stderr, "ball: radius must be positive\n");
    return kExitUsage;
  }
  if (opt.directions < 1) {
    std::fprintf(stderr, "ball: need at least one direction\n");
    return kExitUsage;
  }
  const bg::BetaPoint center(opt.cx, opt.cy);
  const auto basis = bg::orthonormal_basis(center);

  Manifest manifest("ball", opt.output);
  manifest.config()["center"] = {opt.cx, opt.cy};
  manifest.config()["radius"] = opt.radius;
  manifest.config()["directions"] = opt.directions;
  manifest.config()["steps"] = opt.steps;

  std::string csv = "theta,x,y,truncated\n";
  int truncated = 0;
  for (int i = 0; i < opt.directions; ++i) {
    const double theta = 2.0 * M_PI * i / opt.directions;
    const bg::TangentVector w{
        center,
        opt.radius * (std::cos(theta) * basis[0].u + std::sin(theta) * basis[1].u),
        opt.radius * (std::cos(theta) * basis[0].v + std::sin(theta) * basis[1].v)};
    csv += bg::io::format_double(theta);
    try {
      const bg::BetaPoint endpoint = bg::exp_map(center, w, opt.steps);
      csv += "," + bg::io::format_double(endpoint.x()) + "," +
             bg::io::format_double(endpoint.y()) + ",0\n";
    } catch (const bg::BoundaryEscapeError& e) {
      // report the last state reached before the guard tripped
      csv += "," + bg::io::format_double(e.last_state()[0]) + "," +
             bg::io::format_double(e.last_state()[1]) + ",1\n";
      ++truncated;
    }
  }
  bg::io::atomic_write_text(opt.output, csv);
  manifest.outputs()["ball"] = opt.output;
  manifest.write();
  if (truncated > 0) {
    std::fprintf(stderr, "ball: %d of %d directions truncated at the boundary\n",
                 truncated, opt.directions);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// curvature-grid

struct CurvatureOptions {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  int n = 0;
  std::string output;
};

int run_curvature_grid(const CurvatureOptions& opt) {
  if (!(opt.xmin > 0.0) || !(opt.xmin < opt.xmax) || !(opt.ymin > 0.0) ||
      !(opt.ymin < opt.ymax) || opt.n < 2) {
    std::fprintf(stderr,
                 "curvature-grid: need 0 < xmin < xmax, 0 < ymin < ymax, n >= 2\n");
    return kExitUsage;
  }

  Manifest manifest("curvature-grid", opt.output);
  manifest.config()["x_range"] = {opt.xmin, opt.xmax};
  manifest.config()["y_range"] = {opt.ymin, opt.ymax};
  manifest.config()["n"] = opt.n;

  const auto log_spaced = [&](double lo, double hi, int i) {
    const double t = static_cast<double>(i) / (opt.n - 1);
    return std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  };
  std::string csv = "x,y,K\n";
  for (int i = 0; i < opt.n; ++i) {
    const double x = log_spaced(opt.xmin, opt.xmax, i);
    for (int j = 0; j < opt.n; ++j) {
      const double y = log_spaced(opt.ymin, opt.ymax, j);
      const double k = bg::sectional_curvature(bg::BetaPoint(x, y));
      csv += bg::io::format_double(x) + "," + bg::io::format_double(y) + "," +
             bg::io::format_double(k) + "\n";
    }
  }
  bg::io::atomic_write_text(opt.output, csv);
  manifest.outputs()["grid"] = opt.output;
  manifest.write();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// classify

struct NumericsOptions {
  int shooting_steps = 100;
  double shooting_tolerance = 1e-6;
  double karcher_step = 1.0;
  int karcher_max_iterations = 100;
  double karcher_tolerance = 1e-6;

  bg::ShootingConfig shooting() const {
    bg::ShootingConfig cfg;
    cfg.steps = shooting_steps;
    cfg.tolerance = shooting_tolerance;
    return cfg;
  }
  bg::stats::KarcherConfig karcher() const {
    bg::stats::KarcherConfig cfg;
    cfg.step_size = karcher_step;
    cfg.max_iterations = karcher_max_iterations;
    cfg.gradient_tolerance = karcher_tolerance;
    cfg.shooting = shooting();
    return cfg;
  }
  void describe(nlohmann::json& config) const {
    config["shooting_steps"] = shooting_steps;
    config["shooting_tolerance"] = shooting_tolerance;
    config["karcher_step"] = karcher_step;
    config["karcher_max_iterations"] = karcher_max_iterations;
    config["karcher_tolerance"] = karcher_tolerance;
  }
};

void add_numerics_flags(CLI::App* cmd, NumericsOptions& opt) {
  cmd->add_option("--shooting-steps", opt.shooting_steps,
                  "RK4 steps per exponential")
      ->default_val(100);
  cmd->add_option("--shooting-tolerance", opt.shooting_tolerance)
      ->default_val(1e-6);
  cmd->add_option("--karcher-step", opt.karcher_step)->default_val(1.0);
  cmd->add_option("--karcher-max-iterations", opt.karcher_max_iterations)
      ->default_val(100);
  cmd->add_option("--karcher-tolerance", opt.karcher_tolerance)
      ->default_val(1e-6);
}

struct ClassifyOptions {
  std::string cohort;
  std::string model = "knn";
  std::string geometry = "riemannian";
  int k = 7;
  int folds = 5;
  std::uint64_t seed = 0;
  NumericsOptions numerics;
  std::string output;
};

int run_classify(const ClassifyOptions& opt) {
  const auto cohort = bg::io::read_fitted_cohort_csv(opt.cohort);
  const bg::learn::Geometry geometry = parse_geometry(opt.geometry);

  Manifest manifest("classify", opt.output);
  manifest.set_seed(opt.seed);
  manifest.inputs()["cohort"] = opt.cohort;
  manifest.config()["model"] = opt.model;
  manifest.config()["geometry"] = opt.geometry;
  manifest.config()["folds"] = opt.folds;
  if (opt.model == "knn") manifest.config()["k"] = opt.k;
  opt.numerics.describe(manifest.config());

  bg::learn::CvReport report;
  if (opt.model == "knn") {
    bg::learn::KnnConfig cfg;
    cfg.k = opt.k;
    cfg.geometry = geometry;
    cfg.shooting = opt.numerics.shooting();
    report = bg::learn::cross_validate_knn(cohort, cfg, opt.folds, opt.seed);
  } else if (opt.model == "skm") {
    report = bg::learn::cross_validate_skm(cohort, geometry, opt.folds,
                                           opt.seed, opt.numerics.shooting(),
                                           opt.numerics.karcher());
  } else {
    std::fprintf(stderr, "classify: model must be knn or skm\n");
    return kExitUsage;
  }

  json doc;
  doc["model"] = opt.model;
  doc["geometry"] = opt.geometry;
  doc["folds"] = opt.folds;
  doc["seed"] = opt.seed;
  if (opt.model == "knn") doc["k"] = opt.k;
  doc["per_fold_accuracy"] = report.per_fold_accuracy;
  doc["mean_accuracy"] = report.mean_accuracy;
  doc["std_accuracy"] = report.std_accuracy;
  json folds_obj = json::object();
  for (const auto& [id, fold] : report.fold_assignments) folds_obj[id] = fold;
  doc["fold_assignments"] = folds_obj;
  bg::io::atomic_write_text(opt.output, doc.dump(2) + "\n");

  manifest.outputs()["report"] = opt.output;
  manifest.write();
  std::printf("%s %s: accuracy %.4f (%.4f)\n", opt.model.c_str(),
              opt.geometry.c_str(), report.mean_accuracy, report.std_accuracy);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cluster

struct ClusterOptions {
  std::string cohort;
  std::string geometry = "riemannian";
  int n_clusters = 2;
  int n_init = 10;
  int max_iterations = 100;
  std::uint64_t seed = 0;
  NumericsOptions numerics;
  std::string output;
};

int run_cluster(const ClusterOptions& opt) {
  const auto cohort = bg::io::read_fitted_cohort_csv(opt.cohort);
  std::vector<bg::BetaPoint> points;
  std::vector<std::string> labels;
  points.reserve(cohort.size());
  for (const auto& s : cohort) {
    points.push_back(s.point);
    labels.push_back(s.label);
  }

  bg::learn::KMeansConfig cfg;
  cfg.n_clusters = opt.n_clusters;
  cfg.geometry = parse_geometry(opt.geometry);
  cfg.max_iterations = opt.max_iterations;
  cfg.seed = opt.seed;
  cfg.n_init = opt.n_init;
  cfg.shooting = opt.numerics.shooting();
  cfg.karcher = opt.numerics.karcher();

  Manifest manifest("cluster", opt.output);
  manifest.set_seed(opt.seed);
  manifest.inputs()["cohort"] = opt.cohort;
  manifest.config()["geometry"] = opt.geometry;
  manifest.config()["n_clusters"] = opt.n_clusters;
  manifest.config()["n_init"] = opt.n_init;
  manifest.config()["max_iterations"] = opt.max_iterations;
  opt.numerics.describe(manifest.config());

  const bg::learn::KMeansResult result =
      bg::learn::unsupervised_kmeans(points, cfg);
  const double accuracy =
      bg::learn::clustering_accuracy(result.assignments, labels);

  json doc;
  doc["geometry"] = opt.geometry;
  doc["n_clusters"] = opt.n_clusters;
  doc["seed"] = opt.seed;
  doc["inertia"] = result.inertia;
  doc["accuracy"] = accuracy;
  json assignments = json::object();
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    assignments[cohort[i].id] = result.assignments[i];
  }
  doc["assignments"] = assignments;
  json centroids = json::array();
  for (const auto& c : result.centroids) {
    centroids.push_back({c.x(), c.y()});
  }
  doc["centroids"] = centroids;
  bg::io::atomic_write_text(opt.output, doc.dump(2) + "\n");

  manifest.outputs()["report"] = opt.output;
  manifest.write();
  std::printf("ukm %s: accuracy %.4f, inertia %.6g\n", opt.geometry.c_str(),
              accuracy, result.inertia);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher-Rao geometry of beta distributions: geodesics, means, "
               "and histogram classification"};
  app.set_version_flag("--version", bg::kVersion);
  app.require_subcommand(1);

  FitOptions fit_opt;
  CLI::App* fit = app.add_subcommand(
      "fit", "Fit beta distributions to per-subject samples (ML)");
  fit->add_option("--input", fit_opt.input,
                  "JSON-lines file: {\"id\", \"label\", \"samples\"} per line");
  fit->add_option("--areas-dir", fit_opt.areas_dir,
                  "directory of <id>__<label>.csv cell_id,area_t0,area_t1 files; "
                  "samples are per-cell area strains");
  fit->add_option("--lower", fit_opt.lower, "clamp lower bound p");
  fit->add_option("--upper", fit_opt.upper, "clamp upper bound q");
  fit->add_flag("--population-max", fit_opt.population_max,
                "normalize by the population maximum instead of fixed bounds "
                "(leaks the maximum across train/test splits)");
  fit->add_option("--output", fit_opt.output, "cohort CSV id,label,x,y")
      ->required();

  GeodesicOptions geo_opt;
  CLI::App* geo = app.add_subcommand(
      "geodesic", "Solve the boundary value problem between two points");
  geo->add_option("x0", geo_opt.x0)->required();
  geo->add_option("y0", geo_opt.y0)->required();
  geo->add_option("x1", geo_opt.x1)->required();
  geo->add_option("y1", geo_opt.y1)->required();
  geo->add_option("--steps", geo_opt.steps, "RK4 steps")->default_val(100);
  geo->add_option("--bvp-tolerance", geo_opt.bvp_tolerance,
                  "shooting residual tolerance")
      ->default_val(1e-6);
  geo->add_option("--bvp-max-iterations", geo_opt.bvp_max_iterations)
      ->default_val(50);
  geo->add_option("--output", geo_opt.output, "CSV t,x,y,u,v")->required();

  BallOptions ball_opt;
  CLI::App* ball = app.add_subcommand(
      "ball", "Endpoints of a geodesic ball around a center point");
  ball->add_option("cx", ball_opt.cx)->required();
  ball->add_option("cy", ball_opt.cy)->required();
  ball->add_option("--radius", ball_opt.radius)->required();
  ball->add_option("--directions", ball_opt.directions)->default_val(64);
  ball->add_option("--steps", ball_opt.steps)->default_val(100);
  ball->add_option("--output", ball_opt.output, "CSV theta,x,y,truncated")
      ->required();

  CurvatureOptions curv_opt;
  CLI::App* curv = app.add_subcommand(
      "curvature-grid", "Sectional curvature on a log-spaced grid");
  curv->add_option("xmin", curv_opt.xmin)->required();
  curv->add_option("xmax", curv_opt.xmax)->required();
  curv->add_option("ymin", curv_opt.ymin)->required();
  curv->add_option("ymax", curv_opt.ymax)->required();
  curv->add_option("n", curv_opt.n)->required();
  curv->add_option("--output", curv_opt.output, "CSV x,y,K")->required();

  ClassifyOptions cls_opt;
  CLI::App* cls = app.add_subcommand(
      "classify", "Cross-validated KNN / supervised K-means on a fitted cohort");
  cls->add_option("--cohort", cls_opt.cohort, "cohort CSV from fit")->required();
  cls->add_option("--model", cls_opt.model, "knn | skm")->default_val("knn");
  cls->add_option("--geometry", cls_opt.geometry, "riemannian | euclidean")
      ->default_val("riemannian");
  cls->add_option("--k", cls_opt.k, "KNN neighbor count (odd)")->default_val(7);
  cls->add_option("--folds", cls_opt.folds)->default_val(5);
  cls->add_option("--seed", cls_opt.seed, "RNG seed")->required();
  add_numerics_flags(cls, cls_opt.numerics);
  cls->add_option("--output", cls_opt.output, "report JSON")->required();

  ClusterOptions clu_opt;
  CLI::App* clu = app.add_subcommand(
      "cluster", "Unsupervised K-means on a fitted cohort");
  clu->add_option("--cohort", clu_opt.cohort, "cohort CSV from fit")->required();
  clu->add_option("--geometry", clu_opt.geometry, "riemannian | euclidean")
      ->default_val("riemannian");
  clu->add_option("--clusters", clu_opt.n_clusters)->default_val(2);
  clu->add_option("--n-init", clu_opt.n_init, "k-means++ restarts")
      ->default_val(10);
  clu->add_option("--max-iterations", clu_opt.max_iterations)->default_val(100);
  clu->add_option("--seed", clu_opt.seed, "RNG seed")->required();
  add_numerics_flags(clu, clu_opt.numerics);
  clu->add_option("--output", clu_opt.output, "report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fit->parsed()) return run_fit(fit_opt);
    if (geo->parsed()) return run_geodesic(geo_opt);
    if (ball->parsed()) return run_ball(ball_opt);
    if (curv->parsed()) return run_curvature_grid(curv_opt);
    if (cls->parsed()) return run_classify(cls_opt);
    if (clu->parsed()) return run_cluster(clu_opt);
  } catch (const bg::io::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const bg::BvpConvergenceError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const bg::BoundaryEscapeError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
