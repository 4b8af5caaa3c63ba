#include "mdshrink/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mdshrink/parallel.hpp"

namespace mdshrink {

namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

Eigen::MatrixXd signed_qr_q(const Eigen::MatrixXd& g, int keep_cols) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), keep_cols);
  const Eigen::VectorXd diag = qr.matrixQR().diagonal();
  for (int j = 0; j < keep_cols; ++j) {
    if (diag(j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

int derived_sample_size(int p, double beta) {
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(p) / beta)));
}

std::string cell_context(double beta, double sigma, int rep) {
  return "beta=" + std::to_string(beta) + ", sigma=" + std::to_string(sigma) +
         ", rep=" + std::to_string(rep);
}

}  // namespace

Eigen::MatrixXd haar_orthogonal(int p, Rng& rng) {
  if (p < 1) throw std::invalid_argument("haar_orthogonal: p must be >= 1");
  return signed_qr_q(gaussian_matrix(p, p, rng), p);
}

Eigen::MatrixXd haar_frame(int p, int d, Rng& rng) {
  if (p < 1) throw std::invalid_argument("haar_frame: p must be >= 1");
  if (d < 0 || d > p) throw std::invalid_argument("haar_frame: need 0 <= d <= p");
  if (d == 0) return Eigen::MatrixXd(p, 0);
  return signed_qr_q(gaussian_matrix(p, d, rng), d);
}

std::pair<SampleSet, GroundTruth> gen_spiked_sample(const SpikedModel& model, int n,
                                                    const Eigen::MatrixXd& rotation, Rng& rng,
                                                    NoiseScaling noise) {
  if (n < 1) throw std::invalid_argument("gen_spiked_sample: n must be >= 1");
  const int p = static_cast<int>(rotation.rows());
  const int d = model.rank();
  if (rotation.cols() < d) {
    throw std::invalid_argument("gen_spiked_sample: rotation has fewer columns than spikes");
  }
  const Eigen::MatrixXd directions = rotation.leftCols(d);
  if (d > 0) {
    const double ortho =
        (directions.transpose() * directions - Eigen::MatrixXd::Identity(d, d))
            .cwiseAbs()
            .maxCoeff();
    if (ortho > 1e-8) {
      throw std::invalid_argument("gen_spiked_sample: spike directions are not orthonormal");
    }
  }

  const double amp = noise == NoiseScaling::Sigma ? model.sigma()
                                                  : model.sigma() * model.sigma();

  SampleSet sample;
  sample.mean = Eigen::VectorXd::Zero(p);
  if (d > 0) {
    Eigen::MatrixXd coeff = gaussian_matrix(n, d, rng);
    for (int j = 0; j < d; ++j) coeff.col(j) *= std::sqrt(model.spikes()[static_cast<std::size_t>(j)]);
    sample.data.noalias() = coeff * directions.transpose();
  } else {
    sample.data = Eigen::MatrixXd::Zero(n, p);
  }
  sample.data += amp * gaussian_matrix(n, p, rng);

  return {std::move(sample), truth_from_spikes(model, directions)};
}

LossReport run_spiked_experiment(const SpikedExperimentConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("run_spiked_experiment: n must be >= 1");
  if (cfg.reps < 1) throw std::invalid_argument("run_spiked_experiment: reps must be >= 1");
  if (cfg.beta_grid.empty() || cfg.sigma_grid.empty()) {
    throw std::invalid_argument("run_spiked_experiment: empty beta or sigma grid");
  }
  for (double sigma : cfg.sigma_grid) {
    if (!(sigma > 0.0)) throw std::invalid_argument("run_spiked_experiment: sigma must be > 0");
  }

  struct Cell {
    double beta, sigma;
    int p;
    std::vector<double> classical_losses, optimal_losses;
  };
  std::vector<Cell> cells;
  for (double beta : cfg.beta_grid) {
    AspectRatio ar(beta);  // validates the grid entry
    (void)ar;
    for (double sigma : cfg.sigma_grid) {
      Cell c;
      c.beta = beta;
      c.sigma = sigma;
      c.p = std::max(1, static_cast<int>(std::lround(beta * cfg.n)));
      c.classical_losses.resize(static_cast<std::size_t>(cfg.reps));
      c.optimal_losses.resize(static_cast<std::size_t>(cfg.reps));
      cells.push_back(std::move(c));
    }
  }

  const std::size_t reps = static_cast<std::size_t>(cfg.reps);
  parallel_for(cells.size() * reps, [&](std::size_t job) {
    Cell& cell = cells[job / reps];
    const int rep = static_cast<int>(job % reps);
    try {
      Rng rng = make_stream_rng(cfg.master_seed,
                                {key_bits(cell.beta), key_bits(cell.sigma),
                                 static_cast<std::uint64_t>(rep)});
      const AspectRatio ar(cell.beta);
      const SpikedModel model(cfg.spikes, cell.sigma, ar);
      const Eigen::MatrixXd frame = haar_frame(cell.p, model.rank(), rng);
      auto [sample, truth] = gen_spiked_sample(model, cfg.n, frame, rng, cfg.noise_scaling);
      const Eigen::MatrixXd cov = sample_covariance(sample);
      const EigenSystem eig = sym_eig_psd(cov);
      const PrecisionEstimate classical =
          apply_rule(eig, ShrinkageRule::classical(cell.sigma));
      const PrecisionEstimate optimal = apply_rule(
          eig, ShrinkageRule::optimal(cell.sigma, ar, cfg.threshold_variant));
      cell.classical_losses[static_cast<std::size_t>(rep)] =
          op_norm_diff(truth.pseudo_inverse, classical.matrix);
      cell.optimal_losses[static_cast<std::size_t>(rep)] =
          op_norm_diff(truth.pseudo_inverse, optimal.matrix);
    } catch (const std::exception& e) {
      throw std::runtime_error("spiked experiment failed at " +
                               cell_context(cell.beta, cell.sigma, rep) + ": " + e.what());
    }
  });

  LossReport report;
  report.config = cfg;
  for (const Cell& cell : cells) {
    SpikedCell out;
    out.beta = cell.beta;
    out.sigma = cell.sigma;
    out.p = cell.p;
    const AspectRatio ar(cell.beta);
    const SpikedModel model(cfg.spikes, cell.sigma, ar);
    out.theoretical_optimal_loss = asymptotic_loss(
        ShrinkageRule::optimal(cell.sigma, ar, cfg.threshold_variant), model);
    out.critical_sigma = 1.0 / std::sqrt(ar.ell_plus());
    for (double ell : cfg.spikes) {
      out.per_spike_critical_sigma.push_back(std::sqrt(ell / ar.ell_plus()));
    }
    const auto fill = [&](const std::vector<double>& losses, RuleCellStats& stats) {
      stats.losses = losses;
      stats.raw = summarize(losses);
      std::vector<double> log_excess;
      log_excess.reserve(losses.size());
      stats.clamp_count = 0;
      for (double loss : losses) {
        double excess = loss - out.theoretical_optimal_loss;
        if (excess <= 0.0) {
          excess = 1e-12;
          ++stats.clamp_count;
        }
        log_excess.push_back(std::log10(excess));
      }
      const Summary s = summarize(log_excess);
      stats.median_log_excess = s.median;
      stats.q25_log_excess = s.q25;
      stats.q75_log_excess = s.q75;
    };
    fill(cell.classical_losses, out.classical);
    fill(cell.optimal_losses, out.optimal);
    report.cells.push_back(std::move(out));
  }
  return report;
}

Eigen::VectorXd manifold_point(int p, double s, double t) {
  if (p < 3) throw std::invalid_argument("manifold_point: p must be >= 3");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(p);
  y(0) = s;
  y(1) = t;
  y(2) = 4.0 * (s / 3.0) * (s / 3.0) + 5.0 * (t / 3.0) * (t / 3.0);
  return y;
}

ManifoldPopulation manifold_population(int p, double param_min, double param_max) {
  if (p < 3) throw std::invalid_argument("manifold_population: p must be >= 3");
  if (!(param_max > param_min)) {
    throw std::invalid_argument("manifold_population: empty parameter range");
  }
  // Uniform parameter moments on [param_min, param_max]; mid/half-width form
  // keeps the symmetric case exactly diagonal.
  const double mid = (param_min + param_max) / 2.0;
  const double half = (param_max - param_min) / 2.0;
  const double var_s = half * half / 3.0;
  const double mean_s2 = mid * mid + var_s;
  const double cov_s_s2 = 2.0 * mid * var_s;
  const double var_s2 = 4.0 * mid * mid * var_s + (4.0 / 45.0) * half * half * half * half;

  Eigen::Matrix3d block;
  block << var_s, 0.0, (4.0 / 9.0) * cov_s_s2,
           0.0, var_s, (5.0 / 9.0) * cov_s_s2,
           (4.0 / 9.0) * cov_s_s2, (5.0 / 9.0) * cov_s_s2, (41.0 / 81.0) * var_s2;

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(block);
  const double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<int> keep;
  for (int i = 2; i >= 0; --i) {  // descending
    if (solver.eigenvalues()(i) > 1e-12 * scale) keep.push_back(i);
  }

  Eigen::VectorXd values(static_cast<Eigen::Index>(keep.size()));
  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(p, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    values(static_cast<Eigen::Index>(k)) = solver.eigenvalues()(keep[k]);
    frame.block<3, 1>(0, static_cast<Eigen::Index>(k)) = solver.eigenvectors().col(keep[k]);
  }

  ManifoldPopulation pop;
  pop.mean = Eigen::VectorXd::Zero(p);
  pop.mean(0) = mid;
  pop.mean(1) = mid;
  pop.mean(2) = mean_s2;  // (4/9 + 5/9) E[s^2]
  pop.truth = truth_from_eigenpairs(values, frame);
  return pop;
}

std::pair<SampleSet, GroundTruth> gen_manifold_sample(const ManifoldExperimentConfig& cfg,
                                                      Rng& rng) {
  const int n = derived_sample_size(cfg.p, cfg.beta);
  ManifoldPopulation pop = manifold_population(cfg.p, cfg.param_min, cfg.param_max);

  std::uniform_real_distribution<double> uniform(cfg.param_min, cfg.param_max);
  SampleSet sample;
  sample.data = Eigen::MatrixXd::Zero(n, cfg.p);
  for (int i = 0; i < n; ++i) {
    const double s = uniform(rng);
    const double t = uniform(rng);
    sample.data(i, 0) = s;
    sample.data(i, 1) = t;
    sample.data(i, 2) = 4.0 * (s / 3.0) * (s / 3.0) + 5.0 * (t / 3.0) * (t / 3.0);
  }
  sample.data += cfg.sigma * gaussian_matrix(n, cfg.p, rng);
  sample.mean = std::move(pop.mean);
  return {std::move(sample), std::move(pop.truth)};
}

double normalized_md_error(const Eigen::MatrixXd& m, const Eigen::MatrixXd& pseudo_inverse,
                           const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                           ErrorConvention convention) {
  const double est = mahalanobis_sq(y, mu, m);
  const double truth = mahalanobis_sq(y, mu, pseudo_inverse);
  if (!(truth > 0.0)) {
    throw std::invalid_argument(
        "normalized_md_error: true Mahalanobis distance vanishes at the test point");
  }
  if (convention == ErrorConvention::SquaredForm) return std::abs(est - truth) / truth;
  return std::abs(std::sqrt(est) - std::sqrt(truth)) / std::sqrt(truth);
}

ErrorReport run_manifold_experiment(const ManifoldExperimentConfig& cfg) {
  if (cfg.p < 3) throw std::invalid_argument("run_manifold_experiment: p must be >= 3");
  if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) {
    throw std::invalid_argument("run_manifold_experiment: beta must be in (0, 1]");
  }
  if (!(cfg.sigma > 0.0)) {
    throw std::invalid_argument("run_manifold_experiment: sigma must be > 0");
  }
  if (cfg.reps < 1) throw std::invalid_argument("run_manifold_experiment: reps must be >= 1");
  if (cfg.test_points.empty()) {
    throw std::invalid_argument("run_manifold_experiment: no test points");
  }

  const ManifoldPopulation pop = manifold_population(cfg.p, cfg.param_min, cfg.param_max);
  const AspectRatio ar(cfg.beta);

  ErrorReport report;
  report.config = cfg;
  report.n_actual = derived_sample_size(cfg.p, cfg.beta);
  for (std::size_t k = 0; k < cfg.test_points.size(); ++k) {
    ManifoldPointStats stats;
    stats.label = "y" + std::to_string(k + 1);
    stats.s = cfg.test_points[k].first;
    stats.t = cfg.test_points[k].second;
    const Eigen::VectorXd y = manifold_point(cfg.p, stats.s, stats.t);
    stats.true_md_sq = mahalanobis_sq(y, pop.mean, pop.truth.pseudo_inverse);
    if (!(stats.true_md_sq > 0.0)) {
      throw std::invalid_argument("run_manifold_experiment: true distance vanishes at " +
                                  stats.label + "; cannot normalize");
    }
    stats.classical_errors.resize(static_cast<std::size_t>(cfg.reps));
    stats.optimal_errors.resize(static_cast<std::size_t>(cfg.reps));
    report.points.push_back(std::move(stats));
  }

  parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t rep) {
    try {
      Rng rng = make_stream_rng(cfg.master_seed,
                                {key_bits(cfg.beta), key_bits(cfg.sigma),
                                 static_cast<std::uint64_t>(rep)});
      auto [sample, truth] = gen_manifold_sample(cfg, rng);
      const Eigen::MatrixXd cov = sample_covariance(sample);
      const EigenSystem eig = sym_eig_psd(cov);
      const PrecisionEstimate classical = apply_rule(eig, ShrinkageRule::classical(cfg.sigma));
      const PrecisionEstimate optimal =
          apply_rule(eig, ShrinkageRule::optimal(cfg.sigma, ar, cfg.threshold_variant));
      for (ManifoldPointStats& stats : report.points) {
        const Eigen::VectorXd y = manifold_point(cfg.p, stats.s, stats.t);
        stats.classical_errors[rep] = normalized_md_error(
            classical.matrix, truth.pseudo_inverse, y, sample.mean, cfg.convention);
        stats.optimal_errors[rep] = normalized_md_error(
            optimal.matrix, truth.pseudo_inverse, y, sample.mean, cfg.convention);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("manifold experiment failed at " +
                               cell_context(cfg.beta, cfg.sigma, static_cast<int>(rep)) + ": " +
                               e.what());
    }
  });

  for (ManifoldPointStats& stats : report.points) {
    stats.classical = summarize(stats.classical_errors);
    stats.optimal = summarize(stats.optimal_errors);
  }
  return report;
}

}  // namespace mdshrink
