#pragma once

#include <functional>
#include <optional>

#include "mdshrink/linalg.hpp"
#include "mdshrink/rmt.hpp"

namespace mdshrink {

enum class ShrinkerKind { Classical, Optimal, Custom };

/// Zero-region convention of the optimal shrinker.  BulkEdge (the default)
/// vanishes on [0, sigma^2 lambda_+], where the spike inversion is defined.
/// EllPlus vanishes only on [0, sigma^2 ell_+]; inside the remaining bulk
/// band the inversion has a negative discriminant, so its real part is used
/// and nonpositive inversions map to 0.  EllPlus exists for comparison only.
enum class ThresholdVariant { BulkEdge, EllPlus };

/// Classical precision shrinker 1/(lam - sigma^2) for lam > sigma^2, else 0.
double eta_classical(double lam, double sigma);

/// Optimal precision shrinker 1/(sigma^2 ell(lam/sigma^2)) for
/// lam/sigma^2 > lambda_+, else 0 (BulkEdge convention; see ThresholdVariant).
double eta_optimal(double lam, double sigma, AspectRatio beta,
                   ThresholdVariant variant = ThresholdVariant::BulkEdge);

/// A scalar map applied to sample covariance eigenvalues to build a
/// precision-matrix estimate spectrally.  Immutable after construction and
/// safe to share across threads.
///
/// Custom rules must vanish at or below sigma^2 lambda_+ and be nonnegative
/// and finite above; this is checked on a grid (1000 points on
/// [0, 10 sigma^2 lambda_+]) at construction.
class ShrinkageRule {
 public:
  static ShrinkageRule classical(double sigma);
  static ShrinkageRule optimal(double sigma, AspectRatio beta,
                               ThresholdVariant variant = ThresholdVariant::BulkEdge);
  static ShrinkageRule custom(double sigma, AspectRatio beta,
                              std::function<double(double)> fn);

  double operator()(double lam) const;

  ShrinkerKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  std::optional<AspectRatio> beta() const { return beta_; }
  ThresholdVariant threshold_variant() const { return variant_; }
  const char* name() const;

 private:
  ShrinkageRule(ShrinkerKind kind, double sigma, std::optional<AspectRatio> beta,
                ThresholdVariant variant, std::function<double(double)> fn);

  ShrinkerKind kind_;
  double sigma_;
  std::optional<AspectRatio> beta_;
  ThresholdVariant variant_;
  std::function<double(double)> fn_;  // Custom only
};

/// Symmetric PSD precision-matrix estimate.
struct PrecisionEstimate {
  Eigen::MatrixXd matrix;
};

/// Spectral application V diag(rule(lambda_i)) V^T of a rule to an
/// eigensystem, symmetrized as (M + M^T)/2 after assembly.  Requires the
/// eigenvectors to be orthonormal within 1e-8.
PrecisionEstimate apply_rule(const EigenSystem& eig, const ShrinkageRule& rule);

}  // namespace mdshrink
