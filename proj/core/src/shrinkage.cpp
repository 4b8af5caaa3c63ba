#include "mdshrink/shrinkage.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace mdshrink {

namespace {

void check_nonneg(double lam, double sigma, const char* where) {
  if (!(lam >= 0.0)) {
    throw std::domain_error(std::string(where) + ": lam must be nonnegative, got " +
                            std::to_string(lam));
  }
  if (!(sigma > 0.0)) {
    throw std::domain_error(std::string(where) + ": sigma must be positive, got " +
                            std::to_string(sigma));
  }
}

}  // namespace

double eta_classical(double lam, double sigma) {
  check_nonneg(lam, sigma, "eta_classical");
  const double s2 = sigma * sigma;
  return lam > s2 ? 1.0 / (lam - s2) : 0.0;
}

double eta_optimal(double lam, double sigma, AspectRatio beta, ThresholdVariant variant) {
  check_nonneg(lam, sigma, "eta_optimal");
  const double s2 = sigma * sigma;
  const double x = lam / s2;
  if (x > beta.lambda_plus()) return 1.0 / (s2 * ell_inv(x, beta));
  if (variant == ThresholdVariant::BulkEdge) return 0.0;
  // EllPlus: the inversion formula applied verbatim down to ell_+, taking the
  // real part where the discriminant is negative; nonpositive inversions
  // cannot define a precision value and map to 0.
  if (x <= beta.ell_plus()) return 0.0;
  const double ell_real = (x + 1.0 - beta.value()) / 2.0 - 1.0;
  return ell_real > 0.0 ? 1.0 / (s2 * ell_real) : 0.0;
}

ShrinkageRule::ShrinkageRule(ShrinkerKind kind, double sigma, std::optional<AspectRatio> beta,
                             ThresholdVariant variant, std::function<double(double)> fn)
    : kind_(kind), sigma_(sigma), beta_(beta), variant_(variant), fn_(std::move(fn)) {}

ShrinkageRule ShrinkageRule::classical(double sigma) {
  if (!(sigma > 0.0)) {
    throw std::domain_error("ShrinkageRule::classical: sigma must be positive");
  }
  return ShrinkageRule(ShrinkerKind::Classical, sigma, std::nullopt,
                       ThresholdVariant::BulkEdge, {});
}

ShrinkageRule ShrinkageRule::optimal(double sigma, AspectRatio beta, ThresholdVariant variant) {
  if (!(sigma > 0.0)) {
    throw std::domain_error("ShrinkageRule::optimal: sigma must be positive");
  }
  return ShrinkageRule(ShrinkerKind::Optimal, sigma, beta, variant, {});
}

ShrinkageRule ShrinkageRule::custom(double sigma, AspectRatio beta,
                                    std::function<double(double)> fn) {
  if (!(sigma > 0.0)) {
    throw std::domain_error("ShrinkageRule::custom: sigma must be positive");
  }
  if (!fn) {
    throw std::invalid_argument("ShrinkageRule::custom: empty function");
  }
  const double threshold = sigma * sigma * beta.lambda_plus();
  constexpr int kGridPoints = 1000;
  // Grid validation of the shrinker contract: zero at or below the rescaled
  // bulk edge, finite and nonnegative above it.
  for (int i = 0; i < kGridPoints; ++i) {
    const double lam = 10.0 * threshold * static_cast<double>(i) / (kGridPoints - 1);
    const double v = fn(lam);
    if (!std::isfinite(v)) {
      throw std::invalid_argument("ShrinkageRule::custom: non-finite value at lam = " +
                                  std::to_string(lam));
    }
    if (lam <= threshold && v != 0.0) {
      throw std::invalid_argument(
          "ShrinkageRule::custom: rule must vanish at or below sigma^2 lambda_+ = " +
          std::to_string(threshold) + ", got " + std::to_string(v) + " at lam = " +
          std::to_string(lam));
    }
    if (v < 0.0) {
      throw std::invalid_argument("ShrinkageRule::custom: negative value at lam = " +
                                  std::to_string(lam));
    }
  }
  return ShrinkageRule(ShrinkerKind::Custom, sigma, beta, ThresholdVariant::BulkEdge,
                       std::move(fn));
}

double ShrinkageRule::operator()(double lam) const {
  switch (kind_) {
    case ShrinkerKind::Classical:
      return eta_classical(lam, sigma_);
    case ShrinkerKind::Optimal:
      return eta_optimal(lam, sigma_, *beta_, variant_);
    case ShrinkerKind::Custom:
      return fn_(lam);
  }
  return 0.0;  // unreachable
}

const char* ShrinkageRule::name() const {
  switch (kind_) {
    case ShrinkerKind::Classical:
      return "classical";
    case ShrinkerKind::Optimal:
      return "optimal";
    case ShrinkerKind::Custom:
      return "custom";
  }
  return "unknown";
}

PrecisionEstimate apply_rule(const EigenSystem& eig, const ShrinkageRule& rule) {
  const Eigen::Index p = eig.vectors.rows();
  if (eig.vectors.cols() != p || eig.values.size() != p) {
    throw std::invalid_argument("apply_rule: inconsistent eigensystem shapes");
  }
  const double ortho =
      (eig.vectors.transpose() * eig.vectors - Eigen::MatrixXd::Identity(p, p))
          .cwiseAbs()
          .maxCoeff();
  if (ortho > 1e-8) {
    throw std::invalid_argument("apply_rule: eigenvectors are not orthonormal (residual " +
                                std::to_string(ortho) + ")");
  }
  Eigen::VectorXd shrunk(p);
  for (Eigen::Index i = 0; i < p; ++i) shrunk(i) = rule(eig.values(i));
  Eigen::MatrixXd m = eig.vectors * shrunk.asDiagonal() * eig.vectors.transpose();
  return PrecisionEstimate{((m + m.transpose()) / 2.0).eval()};
}

}  // namespace mdshrink
