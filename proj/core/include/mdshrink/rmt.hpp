#pragma once

#include <functional>
#include <vector>

namespace mdshrink {

/// Dimension-to-sample aspect ratio beta = p/n, restricted to 0 < beta <= 1.
///
/// Carries the derived spectral constants of the white-noise bulk:
/// the Marcenko-Pastur support edges lambda_- = (1-sqrt(beta))^2 and
/// lambda_+ = (1+sqrt(beta))^2, and the spike detectability threshold
/// ell_+ = sqrt(beta).
class AspectRatio {
 public:
  explicit AspectRatio(double beta);

  double value() const { return beta_; }
  double ell_plus() const { return sqrt_beta_; }
  double lambda_minus() const;
  double lambda_plus() const;

 private:
  double beta_;
  double sqrt_beta_;
};

struct BulkEdges {
  double lambda_minus;
  double lambda_plus;
  double ell_plus;
};

/// Support edges of the Marcenko-Pastur law together with the spike
/// detectability threshold ell_+ = sqrt(beta).
BulkEdges bulk_edges(AspectRatio beta);

/// Marcenko-Pastur density sqrt((lambda_+ - x)(x - lambda_-)) / (2 pi beta x)
/// on [lambda_-, lambda_+], zero elsewhere (including exactly at the edges).
/// Throws std::domain_error for x < 0.
double mp_density(double x, AspectRatio beta);

/// Almost-sure limit of the top sample eigenvalue for a population spike of
/// strength alpha: 1 + alpha + beta + beta/alpha above the detectability
/// threshold, the bulk edge (1+sqrt(beta))^2 at or below it.  The alpha = 0
/// plateau value is returned directly, so there is no division by zero.
double lambda_fwd(double alpha, AspectRatio beta);

/// Inverse of lambda_fwd on the supercritical branch:
///   ell(lam) = (lam + 1 - beta + sqrt((lam + 1 - beta)^2 - 4 lam)) / 2 - 1
/// defined for lam > lambda_+.  The discriminant is analytically nonnegative
/// there and is clamped at zero against round-off near the edge.
/// Throws std::domain_error for lam <= lambda_+.
double ell_inv(double lam, AspectRatio beta);

/// Limiting cosine of the angle between the population and sample spike
/// eigenvectors: sqrt((alpha^2 - beta)/(alpha^2 + beta alpha)) above the
/// threshold, zero at or below it.  Always in [0, 1].
double cosine(double alpha, AspectRatio beta);

/// sqrt(1 - cosine^2); always in [0, 1].
double sine(double alpha, AspectRatio beta);

/// Asymptotic operator-norm loss contribution of a single spike of strength
/// alpha when the shrinker assigns it the value zeta:
///
///   alpha > ell_+, zeta <= 1/alpha :  u_+(alpha, zeta)
///   alpha > ell_+, zeta >  1/alpha : -u_-(alpha, zeta)
///   0 < alpha <= ell_+             :  1/alpha   (independent of zeta)
///   alpha = 0                      :  0
///
/// where u_± = (1/alpha - zeta ± sqrt((1/alpha - zeta)^2 + 4 zeta s^2(alpha)
/// / alpha)) / 2.  Throws std::domain_error for negative inputs.
double delta_loss(double alpha, double zeta, AspectRatio beta);

/// Loss of the optimal shrinker at spike strength alpha:
/// sine(alpha)/alpha above the threshold, 1/alpha on (0, ell_+], 0 at 0.
/// Equals delta_loss(alpha, 1/alpha, beta) on the supercritical branch.
double optimal_delta(double alpha, AspectRatio beta);

/// Population description of the spiked covariance model: spike strengths
/// ell_1 > ... > ell_d > 0 (possibly empty), white-noise level sigma >= 0,
/// and the aspect ratio.
class SpikedModel {
 public:
  SpikedModel(std::vector<double> spikes, double sigma, AspectRatio beta);

  const std::vector<double>& spikes() const { return spikes_; }
  double sigma() const { return sigma_; }
  AspectRatio beta() const { return beta_; }
  int rank() const { return static_cast<int>(spikes_.size()); }

 private:
  std::vector<double> spikes_;
  double sigma_;
  AspectRatio beta_;
};

/// Asymptotic worst-case loss of a shrinkage rule on a spiked model.
///
/// Spikes are rescaled by 1/sigma^2, mapped forward through lambda_fwd, and
/// the rule is evaluated on the observed eigenvalue scale:
///
///   max_i delta_loss(ell_i/s^2, s^2 * rule(s^2 * lambda_fwd(ell_i/s^2))) / s^2
///
/// with s = sigma.  Reduces to the plain spike-wise loss at sigma = 1.  An
/// empty spike list yields 0.  Throws std::domain_error when sigma = 0 and
/// spikes are present (the rescaling is undefined without noise).
double asymptotic_loss(const std::function<double(double)>& rule,
                       const SpikedModel& model);

}  // namespace mdshrink
