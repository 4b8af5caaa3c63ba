#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mdshrink/linalg.hpp"
#include "mdshrink/rng.hpp"
#include "mdshrink/shrinkage.hpp"
#include "mdshrink/stats.hpp"

namespace mdshrink {

/// Ambient noise amplitude convention: observations are signal + sigma * xi
/// (the model), or signal + sigma^2 * xi for literal reproduction of the
/// alternative scaling.
enum class NoiseScaling { Sigma, SigmaSquared };

/// Normalized Mahalanobis error convention: compare the squared quadratic
/// forms (default) or their square roots.
enum class ErrorConvention { SquaredForm, RootForm };

/// Haar-distributed p x p orthogonal matrix: QR of a standard Gaussian
/// matrix with the sign of each diagonal entry of R folded into the
/// corresponding column of Q.
Eigen::MatrixXd haar_orthogonal(int p, Rng& rng);

/// First d columns of a Haar orthogonal matrix (uniform orthonormal frame),
/// drawn directly as the sign-fixed thin QR of a p x d Gaussian matrix.
Eigen::MatrixXd haar_frame(int p, int d, Rng& rng);

/// Draws n observations y_i = rotation * x_i + sigma * xi_i where x_i is
/// supported on the first d coordinates with variances given by the spikes
/// and xi_i is standard Gaussian.  `rotation` may be the full p x p matrix
/// or just its first d columns; only those columns enter the sample.  Draw
/// order per stream: the n x d spike coefficients in column-major order,
/// then the n x p noise matrix in column-major order.
std::pair<SampleSet, GroundTruth> gen_spiked_sample(
    const SpikedModel& model, int n, const Eigen::MatrixXd& rotation, Rng& rng,
    NoiseScaling noise = NoiseScaling::Sigma);

struct SpikedExperimentConfig {
  int n = 300;
  std::vector<double> beta_grid{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> spikes{1.0};  // strictly decreasing
  std::vector<double> sigma_grid{0.225, 0.45, 0.675, 0.9, 1.125, 1.35, 1.575, 1.8};
  int reps = 200;
  std::uint64_t master_seed = 42;
  NoiseScaling noise_scaling = NoiseScaling::Sigma;
  ThresholdVariant threshold_variant = ThresholdVariant::BulkEdge;
};

/// Per-cell, per-rule loss sample with its summaries.  The log-excess
/// statistics describe log10(L_n - L_opt), where nonpositive excesses are
/// clamped to 1e-12 and counted.
struct RuleCellStats {
  std::vector<double> losses;
  Summary raw;
  double median_log_excess = 0.0;
  double q25_log_excess = 0.0;
  double q75_log_excess = 0.0;
  int clamp_count = 0;
};

struct SpikedCell {
  double beta = 0.0;
  double sigma = 0.0;
  int p = 0;
  double theoretical_optimal_loss = 0.0;
  double critical_sigma = 0.0;  // 1/sqrt(ell_+) for this beta
  std::vector<double> per_spike_critical_sigma;
  RuleCellStats classical;
  RuleCellStats optimal;
};

struct LossReport {
  SpikedExperimentConfig config;
  std::vector<SpikedCell> cells;  // beta-major, sigma-minor order
};

/// Monte-Carlo loss study over the (beta, sigma) grid: per repetition draw a
/// fresh rotation, generate data, eigendecompose the sample covariance,
/// apply the classical and optimal rules and record the operator-norm loss
/// against the ground-truth pseudo-inverse.  Repetitions run in parallel;
/// results are bit-identical for a fixed master seed regardless of the
/// worker budget.
LossReport run_spiked_experiment(const SpikedExperimentConfig& cfg);

struct ManifoldExperimentConfig {
  int p = 100;
  double beta = 0.5;
  double sigma = 1.0;
  int reps = 500;
  double param_min = -5.0;
  double param_max = 5.0;
  std::vector<std::pair<double, double>> test_points{{0.0, 0.0}, {2.0, 2.0}};
  std::uint64_t master_seed = 42;
  ErrorConvention convention = ErrorConvention::SquaredForm;
  ThresholdVariant threshold_variant = ThresholdVariant::BulkEdge;
};

/// Point on the paraboloid chart [s, t, 4(s/3)^2 + 5(t/3)^2, 0, ..., 0].
Eigen::VectorXd manifold_point(int p, double s, double t);

/// Analytic population mean and covariance ground truth of the chart under
/// uniform parameters on [param_min, param_max]^2.
struct ManifoldPopulation {
  Eigen::VectorXd mean;
  GroundTruth truth;
};
ManifoldPopulation manifold_population(int p, double param_min, double param_max);

/// Draws n = round(p/beta) noisy chart points.  Draw order per stream: the
/// (s, t) parameter pairs, then the n x p noise matrix in column-major
/// order.
std::pair<SampleSet, GroundTruth> gen_manifold_sample(const ManifoldExperimentConfig& cfg,
                                                      Rng& rng);

/// Normalized Mahalanobis error of the estimate m against the ground-truth
/// pseudo-inverse at test point y.  Throws when the true distance vanishes
/// (nothing to normalize by).
double normalized_md_error(const Eigen::MatrixXd& m, const Eigen::MatrixXd& pseudo_inverse,
                           const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                           ErrorConvention convention);

struct ManifoldPointStats {
  std::string label;  // y1, y2, ... in test-point order
  double s = 0.0;
  double t = 0.0;
  double true_md_sq = 0.0;
  std::vector<double> classical_errors;
  std::vector<double> optimal_errors;
  Summary classical;
  Summary optimal;
};

struct ErrorReport {
  ManifoldExperimentConfig config;
  int n_actual = 0;
  std::vector<ManifoldPointStats> points;
};

/// Monte-Carlo normalized-error study of one (beta, sigma) cell of the
/// manifold setup.  Same determinism contract as run_spiked_experiment.
ErrorReport run_manifold_experiment(const ManifoldExperimentConfig& cfg);

}  // namespace mdshrink
