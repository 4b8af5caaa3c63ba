#include "mdshrink/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdshrink {

AspectRatio::AspectRatio(double beta) : beta_(beta), sqrt_beta_(std::sqrt(beta)) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::domain_error("AspectRatio: beta must satisfy 0 < beta <= 1, got " +
                            std::to_string(beta));
  }
}

double AspectRatio::lambda_minus() const {
  const double r = 1.0 - sqrt_beta_;
  return r * r;
}

double AspectRatio::lambda_plus() const {
  const double r = 1.0 + sqrt_beta_;
  return r * r;
}

BulkEdges bulk_edges(AspectRatio beta) {
  return BulkEdges{beta.lambda_minus(), beta.lambda_plus(), beta.ell_plus()};
}

double mp_density(double x, AspectRatio beta) {
  if (!(x >= 0.0)) {
    throw std::domain_error("mp_density: x must be nonnegative, got " + std::to_string(x));
  }
  const double lo = beta.lambda_minus();
  const double hi = beta.lambda_plus();
  // The square root vanishes at both edges; returning 0 there also covers the
  // beta = 1 corner where lambda_- = 0 would otherwise divide by zero.
  if (x <= lo || x >= hi) return 0.0;
  return std::sqrt((hi - x) * (x - lo)) / (2.0 * M_PI * beta.value() * x);
}

double lambda_fwd(double alpha, AspectRatio beta) {
  if (!(alpha >= 0.0)) {
    throw std::domain_error("lambda_fwd: alpha must be nonnegative, got " +
                            std::to_string(alpha));
  }
  if (alpha <= beta.ell_plus()) return beta.lambda_plus();
  return 1.0 + alpha + beta.value() + beta.value() / alpha;
}

double ell_inv(double lam, AspectRatio beta) {
  if (!(lam > beta.lambda_plus())) {
    throw std::domain_error("ell_inv: lam must exceed the bulk edge " +
                            std::to_string(beta.lambda_plus()) + ", got " +
                            std::to_string(lam));
  }
  const double g = lam + 1.0 - beta.value();
  // Analytically >= 0 on lam > lambda_+ (zero exactly at the edge); round-off
  // can push it to -1e-17 just above the edge.
  const double disc = std::max(g * g - 4.0 * lam, 0.0);
  return (g + std::sqrt(disc)) / 2.0 - 1.0;
}

double cosine(double alpha, AspectRatio beta) {
  if (!(alpha >= 0.0)) {
    throw std::domain_error("cosine: alpha must be nonnegative, got " +
                            std::to_string(alpha));
  }
  if (alpha <= beta.ell_plus()) return 0.0;
  const double b = beta.value();
  const double c2 = (alpha * alpha - b) / (alpha * alpha + b * alpha);
  return std::sqrt(std::clamp(c2, 0.0, 1.0));
}

double sine(double alpha, AspectRatio beta) {
  const double c = cosine(alpha, beta);
  return std::sqrt(std::max(1.0 - c * c, 0.0));
}

double delta_loss(double alpha, double zeta, AspectRatio beta) {
  if (!(alpha >= 0.0) || !(zeta >= 0.0)) {
    throw std::domain_error("delta_loss: alpha and zeta must be nonnegative");
  }
  if (alpha == 0.0) return 0.0;
  if (alpha <= beta.ell_plus()) return 1.0 / alpha;
  const double s = sine(alpha, beta);
  const double a = 1.0 / alpha - zeta;
  const double root = std::sqrt(a * a + 4.0 * zeta * s * s / alpha);
  // root >= |a|, so both branches are nonnegative.
  if (zeta <= 1.0 / alpha) return (a + root) / 2.0;  // u_+
  return (root - a) / 2.0;                           // -u_-
}

double optimal_delta(double alpha, AspectRatio beta) {
  if (!(alpha >= 0.0)) {
    throw std::domain_error("optimal_delta: alpha must be nonnegative, got " +
                            std::to_string(alpha));
  }
  if (alpha == 0.0) return 0.0;
  if (alpha <= beta.ell_plus()) return 1.0 / alpha;
  return sine(alpha, beta) / alpha;
}

SpikedModel::SpikedModel(std::vector<double> spikes, double sigma, AspectRatio beta)
    : spikes_(std::move(spikes)), sigma_(sigma), beta_(beta) {
  if (!(sigma >= 0.0)) {
    throw std::domain_error("SpikedModel: sigma must be nonnegative, got " +
                            std::to_string(sigma));
  }
  for (std::size_t i = 0; i < spikes_.size(); ++i) {
    if (!(spikes_[i] > 0.0)) {
      throw std::domain_error("SpikedModel: spikes must be strictly positive");
    }
    if (i > 0 && !(spikes_[i] < spikes_[i - 1])) {
      throw std::domain_error("SpikedModel: spikes must be strictly decreasing");
    }
  }
}

double asymptotic_loss(const std::function<double(double)>& rule,
                       const SpikedModel& model) {
  if (model.spikes().empty()) return 0.0;
  const double sigma = model.sigma();
  if (!(sigma > 0.0)) {
    throw std::domain_error("asymptotic_loss: sigma must be positive when spikes are present");
  }
  const double s2 = sigma * sigma;
  const AspectRatio beta = model.beta();
  double worst = 0.0;
  for (double ell : model.spikes()) {
    const double alpha = ell / s2;
    const double lam = lambda_fwd(alpha, beta);
    const double zeta = s2 * rule(s2 * lam);
    worst = std::max(worst, delta_loss(alpha, zeta, beta) / s2);
  }
  return worst;
}

}  // namespace mdshrink
