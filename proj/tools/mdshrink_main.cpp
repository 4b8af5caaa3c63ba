// mdshrink: regenerates the library's loss curves, shrinker curves and
// Monte-Carlo experiment tables as CSV (or JSON) with a provenance header.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdshrink/rmt.hpp"
#include "mdshrink/rng.hpp"
#include "mdshrink/shrinkage.hpp"
#include "mdshrink/sim.hpp"
#include "mdshrink/version.hpp"

namespace {

using json = nlohmann::json;
using mdshrink::AspectRatio;

// 17 significant digits round-trip doubles exactly.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RunManifest {
  std::string command;
  std::string version = mdshrink::kVersion;
  std::string rng = mdshrink::kRngAlgorithm;
  std::uint64_t seed = 0;
  json config;
  double duration_s = 0.0;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;   // CSV cells
  std::vector<std::vector<json>> json_rows;     // typed values for --json
};

void add_row(Table& t, std::initializer_list<json> cells) {
  std::vector<std::string> text;
  std::vector<json> typed;
  for (const json& c : cells) {
    typed.push_back(c);
    if (c.is_number_float()) {
      text.push_back(fmt(c.get<double>()));
    } else if (c.is_string()) {
      text.push_back(c.get<std::string>());
    } else {
      text.push_back(c.dump());
    }
  }
  t.rows.push_back(std::move(text));
  t.json_rows.push_back(std::move(typed));
}

void write_csv(std::ostream& os, const RunManifest& m, const Table& t) {
  os << "# mdshrink " << m.command << "\n";
  os << "# version: " << m.version << "\n";
  os << "# rng: " << m.rng << "\n";
  os << "# seed: " << m.seed << "\n";
  os << "# config: " << m.config.dump() << "\n";
  os << "# duration_s: " << fmt(m.duration_s) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    os << t.columns[i] << (i + 1 < t.columns.size() ? "," : "");
  }
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << row[i] << (i + 1 < row.size() ? "," : "");
    }
    os << "\n";
  }
}

void write_json(std::ostream& os, const RunManifest& m, const Table& t) {
  json doc;
  doc["manifest"] = {{"command", m.command}, {"version", m.version}, {"rng", m.rng},
                     {"seed", m.seed},       {"config", m.config},   {"duration_s", m.duration_s}};
  doc["columns"] = t.columns;
  doc["rows"] = t.json_rows;
  os << doc.dump(2) << "\n";
}

void emit(const std::string& out_path, bool as_json, const RunManifest& m, const Table& t) {
  if (out_path.empty() || out_path == "-") {
    as_json ? write_json(std::cout, m, t) : write_csv(std::cout, m, t);
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + out_path);
  as_json ? write_json(os, m, t) : write_csv(os, m, t);
}

class Timer {
 public:
  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

mdshrink::ThresholdVariant parse_variant(const std::string& s) {
  if (s == "bulk-edge") return mdshrink::ThresholdVariant::BulkEdge;
  if (s == "ell-plus") return mdshrink::ThresholdVariant::EllPlus;
  throw CLI::ValidationError("--threshold-variant", "expected bulk-edge or ell-plus");
}

// ---------------------------------------------------------------------------
// asym-loss: optimal asymptotic loss over an alpha grid, one block per beta.

struct AsymLossOpts {
  std::vector<double> betas{0.2, 0.4, 0.6, 0.8, 1.0};
  double alpha_min = 0.1;
  double alpha_max = 3.0;
  double step = 0.01;
  std::string out = "-";
  bool as_json = false;
};

void run_asym_loss(const AsymLossOpts& o) {
  Timer timer;
  if (!(o.alpha_min > 0.0) || !(o.alpha_max >= o.alpha_min) || !(o.step > 0.0)) {
    throw CLI::ValidationError("asym-loss", "need 0 < alpha-min <= alpha-max and step > 0");
  }
  Table t;
  t.columns = {"beta", "alpha", "optimal_delta"};
  const int steps = static_cast<int>(std::floor((o.alpha_max - o.alpha_min) / o.step + 0.5));
  for (double beta : o.betas) {
    const AspectRatio ar(beta);
    for (int k = 0; k <= steps; ++k) {
      const double alpha = o.alpha_min + k * o.step;
      add_row(t, {beta, alpha, mdshrink::optimal_delta(alpha, ar)});
    }
  }
  RunManifest m;
  m.command = "asym-loss";
  m.config = {{"beta", o.betas},
              {"alpha_min", o.alpha_min},
              {"alpha_max", o.alpha_max},
              {"step", o.step}};
  m.duration_s = timer.elapsed_s();
  emit(o.out, o.as_json, m, t);
}

// ---------------------------------------------------------------------------
// shrinker-curve: classical and optimal shrinkers over a lambda grid.

struct ShrinkerCurveOpts {
  double beta = 1.0;
  double sigma = 1.0;
  double lam_min = 0.0;
  double lam_max = 10.0;
  double step = 0.01;
  std::string variant = "bulk-edge";
  std::string out = "-";
  bool as_json = false;
};

void run_shrinker_curve(const ShrinkerCurveOpts& o) {
  Timer timer;
  if (!(o.lam_min >= 0.0) || !(o.lam_max >= o.lam_min) || !(o.step > 0.0)) {
    throw CLI::ValidationError("shrinker-curve", "need 0 <= lam-min <= lam-max and step > 0");
  }
  const AspectRatio ar(o.beta);
  const auto variant = parse_variant(o.variant);
  Table t;
  t.columns = {"lambda", "eta_classical", "eta_optimal"};
  const int steps = static_cast<int>(std::floor((o.lam_max - o.lam_min) / o.step + 0.5));
  for (int k = 0; k <= steps; ++k) {
    const double lam = o.lam_min + k * o.step;
    add_row(t, {lam, mdshrink::eta_classical(lam, o.sigma),
                mdshrink::eta_optimal(lam, o.sigma, ar, variant)});
  }
  RunManifest m;
  m.command = "shrinker-curve";
  m.config = {{"beta", o.beta},
              {"sigma", o.sigma},
              {"lam_min", o.lam_min},
              {"lam_max", o.lam_max},
              {"step", o.step},
              {"threshold_variant", o.variant}};
  m.duration_s = timer.elapsed_s();
  emit(o.out, o.as_json, m, t);
}

// ---------------------------------------------------------------------------
// spiked-sim

struct SpikedOpts {
  int n = 300;
  std::vector<double> betas{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> sigmas{0.225, 0.45, 0.675, 0.9, 1.125, 1.35, 1.575, 1.8};
  int d = 1;
  int reps = 200;
  std::uint64_t seed = 42;
  std::string noise_scaling = "sigma";
  std::string variant = "bulk-edge";
  std::string out = "-";
  bool as_json = false;
};

void run_spiked(const SpikedOpts& o) {
  Timer timer;
  mdshrink::SpikedExperimentConfig cfg;
  cfg.n = o.n;
  cfg.beta_grid = o.betas;
  cfg.sigma_grid = o.sigmas;
  cfg.reps = o.reps;
  cfg.master_seed = o.seed;
  cfg.spikes.clear();
  for (int i = o.d; i >= 1; --i) cfg.spikes.push_back(static_cast<double>(i));
  if (o.noise_scaling == "sigma") {
    cfg.noise_scaling = mdshrink::NoiseScaling::Sigma;
  } else if (o.noise_scaling == "sigma-squared") {
    cfg.noise_scaling = mdshrink::NoiseScaling::SigmaSquared;
  } else {
    throw CLI::ValidationError("--noise-scaling", "expected sigma or sigma-squared");
  }
  cfg.threshold_variant = parse_variant(o.variant);

  const mdshrink::LossReport report = mdshrink::run_spiked_experiment(cfg);

  Table t;
  t.columns = {"beta",      "sigma",       "rule",
               "median_log_excess_loss",   "iqr_low",
               "iqr_high",  "clamp_count", "theoretical_optimal_loss",
               "critical_sigma"};
  json spike_markers = json::object();
  for (const mdshrink::SpikedCell& cell : report.cells) {
    spike_markers["beta=" + fmt(cell.beta)] = cell.per_spike_critical_sigma;
    const auto emit_rule = [&](const char* rule, const mdshrink::RuleCellStats& stats) {
      add_row(t, {cell.beta, cell.sigma, rule, stats.median_log_excess, stats.q25_log_excess,
                  stats.q75_log_excess, stats.clamp_count, cell.theoretical_optimal_loss,
                  cell.critical_sigma});
    };
    emit_rule("classical", cell.classical);
    emit_rule("optimal", cell.optimal);
  }

  RunManifest m;
  m.command = "spiked-sim";
  m.seed = o.seed;
  m.config = {{"n", o.n},
              {"beta", o.betas},
              {"sigma", o.sigmas},
              {"d", o.d},
              {"spikes", cfg.spikes},
              {"reps", o.reps},
              {"noise_scaling", o.noise_scaling},
              {"threshold_variant", o.variant},
              {"per_spike_critical_sigma", spike_markers}};
  m.duration_s = timer.elapsed_s();
  emit(o.out, o.as_json, m, t);
}

// ---------------------------------------------------------------------------
// manifold-sim

struct ManifoldOpts {
  int p = 100;
  std::vector<double> betas{0.1, 0.5, 1.0};
  std::vector<double> sigmas{1.0, 1.5, 2.0};
  int reps = 500;
  std::vector<double> param_range{-5.0, 5.0};
  std::vector<std::pair<double, double>> test_points;
  std::uint64_t seed = 42;
  std::string convention = "squared";
  std::string variant = "bulk-edge";
  std::string out = "-";
  bool as_json = false;
};

void run_manifold(const ManifoldOpts& o) {
  Timer timer;
  if (o.param_range.size() != 2 || !(o.param_range[1] > o.param_range[0])) {
    throw CLI::ValidationError("--param-range", "expected two values with min < max");
  }
  mdshrink::ErrorConvention convention;
  if (o.convention == "squared") {
    convention = mdshrink::ErrorConvention::SquaredForm;
  } else if (o.convention == "root") {
    convention = mdshrink::ErrorConvention::RootForm;
  } else {
    throw CLI::ValidationError("--error-convention", "expected squared or root");
  }

  Table t;
  t.columns = {"beta", "sigma", "test_point", "rule", "mean_error", "std_error", "n_actual"};
  json cells_meta = json::array();
  for (double beta : o.betas) {
    for (double sigma : o.sigmas) {
      mdshrink::ManifoldExperimentConfig cfg;
      cfg.p = o.p;
      cfg.beta = beta;
      cfg.sigma = sigma;
      cfg.reps = o.reps;
      cfg.param_min = o.param_range[0];
      cfg.param_max = o.param_range[1];
      if (!o.test_points.empty()) cfg.test_points = o.test_points;
      cfg.master_seed = o.seed;
      cfg.convention = convention;
      cfg.threshold_variant = parse_variant(o.variant);

      const mdshrink::ErrorReport report = mdshrink::run_manifold_experiment(cfg);
      cells_meta.push_back({{"beta", beta}, {"sigma", sigma}, {"n_actual", report.n_actual}});
      for (const mdshrink::ManifoldPointStats& pt : report.points) {
        add_row(t, {beta, sigma, pt.label, "classical", pt.classical.mean, pt.classical.stddev,
                    report.n_actual});
        add_row(t, {beta, sigma, pt.label, "optimal", pt.optimal.mean, pt.optimal.stddev,
                    report.n_actual});
      }
    }
  }

  json points = json::array();
  {
    mdshrink::ManifoldExperimentConfig defaults;
    const auto& pts = o.test_points.empty() ? defaults.test_points : o.test_points;
    for (const auto& [s, tt] : pts) points.push_back({s, tt});
  }

  RunManifest m;
  m.command = "manifold-sim";
  m.seed = o.seed;
  m.config = {{"p", o.p},
              {"beta", o.betas},
              {"sigma", o.sigmas},
              {"reps", o.reps},
              {"param_range", o.param_range},
              {"test_points", points},
              {"error_convention", o.convention},
              {"threshold_variant", o.variant},
              {"cells", cells_meta}};
  m.duration_s = timer.elapsed_s();
  emit(o.out, o.as_json, m, t);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mahalanobis-distance estimation via optimal eigenvalue shrinkage"};
  app.require_subcommand(1);

  AsymLossOpts asym;
  CLI::App* asym_cmd = app.add_subcommand("asym-loss", "Optimal asymptotic loss curve data");
  asym_cmd->add_option("--beta", asym.betas, "Aspect ratios")->capture_default_str();
  asym_cmd->add_option("--alpha-min", asym.alpha_min)->capture_default_str();
  asym_cmd->add_option("--alpha-max", asym.alpha_max)->capture_default_str();
  asym_cmd->add_option("--step", asym.step)->capture_default_str();
  asym_cmd->add_option("--out", asym.out, "Output path, - for stdout");
  asym_cmd->add_flag("--json", asym.as_json, "Emit JSON instead of CSV");

  ShrinkerCurveOpts curve;
  CLI::App* curve_cmd =
      app.add_subcommand("shrinker-curve", "Classical and optimal shrinker curve data");
  curve_cmd->add_option("--beta", curve.beta)->capture_default_str();
  curve_cmd->add_option("--sigma", curve.sigma)->capture_default_str();
  curve_cmd->add_option("--lam-min", curve.lam_min)->capture_default_str();
  curve_cmd->add_option("--lam-max", curve.lam_max)->capture_default_str();
  curve_cmd->add_option("--step", curve.step)->capture_default_str();
  curve_cmd->add_option("--threshold-variant", curve.variant, "bulk-edge or ell-plus");
  curve_cmd->add_option("--out", curve.out);
  curve_cmd->add_flag("--json", curve.as_json);

  SpikedOpts spiked;
  CLI::App* spiked_cmd =
      app.add_subcommand("spiked-sim", "Monte-Carlo loss study on the spiked model");
  spiked_cmd->add_option("--n", spiked.n, "Observations per repetition")->capture_default_str();
  spiked_cmd->add_option("--beta", spiked.betas, "Aspect ratio grid")->capture_default_str();
  spiked_cmd->add_option("--sigma", spiked.sigmas, "Noise grid")->capture_default_str();
  spiked_cmd->add_option("--d", spiked.d, "Number of spikes (strengths d..1)")
      ->check(CLI::Range(0, 64))
      ->capture_default_str();
  spiked_cmd->add_option("--reps", spiked.reps)->check(CLI::PositiveNumber)->capture_default_str();
  spiked_cmd->add_option("--seed", spiked.seed)->capture_default_str();
  spiked_cmd->add_option("--noise-scaling", spiked.noise_scaling, "sigma or sigma-squared");
  spiked_cmd->add_option("--threshold-variant", spiked.variant, "bulk-edge or ell-plus");
  spiked_cmd->add_option("--out", spiked.out);
  spiked_cmd->add_flag("--json", spiked.as_json);

  ManifoldOpts manifold;
  CLI::App* manifold_cmd =
      app.add_subcommand("manifold-sim", "Normalized-error study on the paraboloid manifold");
  manifold_cmd->add_option("--p", manifold.p, "Ambient dimension")->capture_default_str();
  manifold_cmd->add_option("--beta", manifold.betas, "Aspect ratio grid")->capture_default_str();
  manifold_cmd->add_option("--sigma", manifold.sigmas, "Noise grid")->capture_default_str();
  manifold_cmd->add_option("--reps", manifold.reps)->check(CLI::PositiveNumber)
      ->capture_default_str();
  manifold_cmd->add_option("--param-range", manifold.param_range, "Parameter interval")
      ->expected(2);
  manifold_cmd->add_option("--test-point", manifold.test_points,
                           "Manifold parameter pair s t (repeatable)");
  manifold_cmd->add_option("--seed", manifold.seed)->capture_default_str();
  manifold_cmd->add_option("--error-convention", manifold.convention, "squared or root");
  manifold_cmd->add_option("--threshold-variant", manifold.variant, "bulk-edge or ell-plus");
  manifold_cmd->add_option("--out", manifold.out);
  manifold_cmd->add_flag("--json", manifold.as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*asym_cmd) run_asym_loss(asym);
    if (*curve_cmd) run_shrinker_curve(curve);
    if (*spiked_cmd) run_spiked(spiked);
    if (*manifold_cmd) run_manifold(manifold);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
