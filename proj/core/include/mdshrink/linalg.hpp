#pragma once

#include <Eigen/Dense>

#include "mdshrink/rmt.hpp"

namespace mdshrink {

/// n observation vectors (rows of `data`) in dimension p, together with the
/// known population mean.
struct SampleSet {
  Eigen::MatrixXd data;  // n x p, rows are observations
  Eigen::VectorXd mean;  // p

  Eigen::Index n() const { return data.rows(); }
  Eigen::Index p() const { return data.cols(); }
};

/// Eigendecomposition of a symmetric matrix: eigenvalues sorted descending,
/// eigenvectors as the columns of an orthogonal matrix.  The sign of each
/// eigenvector is fixed so that its entry of largest magnitude (lowest index
/// on ties) is positive, making the output reproducible.
struct EigenSystem {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns aligned with values
};

/// Low-rank population covariance and its Moore-Penrose pseudo-inverse.
struct GroundTruth {
  Eigen::MatrixXd sigma_x;
  Eigen::MatrixXd pseudo_inverse;
  int rank = 0;
};

/// Covariance about the known mean with 1/n normalization:
///   (1/n) sum_i (y_i - mu)(y_i - mu)^T,
/// exactly symmetric by construction.  Throws on dimension mismatch or
/// non-finite data.
Eigen::MatrixXd sample_covariance(const SampleSet& s);

/// Eigendecomposition of a symmetric matrix (symmetry checked to 1e-8
/// relative).  Deterministic: fixed backend, descending order, sign
/// convention as in EigenSystem.
EigenSystem sym_eig(const Eigen::MatrixXd& m);

/// sym_eig for covariance matrices: eigenvalues in [-tol, 0) are clamped to
/// zero (tol = 1e-10 relative to the largest magnitude); anything more
/// negative throws std::domain_error.
EigenSystem sym_eig_psd(const Eigen::MatrixXd& m);

/// Eigenvalues only, descending.  Cheaper than sym_eig when vectors are not
/// needed.
Eigen::VectorXd sym_eigvalues(const Eigen::MatrixXd& m);

/// Operator-norm distance max_i |eig_i(a - b)| between symmetric matrices.
double op_norm_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Squared Mahalanobis-type quadratic form (z - mu)^T m (z - mu) for a PSD
/// matrix m; tiny negative round-off is clamped to zero.
double mahalanobis_sq(const Eigen::VectorXd& z, const Eigen::VectorXd& mu,
                      const Eigen::MatrixXd& m);

/// Ground truth from explicit eigenpairs: sigma_x = u diag(values) u^T and
/// pseudo_inverse = u diag(1/values) u^T for a p x d orthonormal frame u.
/// Repeated values are permitted.  Throws if u is not orthonormal within
/// 1e-10 or any value is nonpositive.
GroundTruth truth_from_eigenpairs(const Eigen::VectorXd& values,
                                  const Eigen::MatrixXd& u);

/// Ground truth of a spiked model whose spike directions are the columns
/// of u (p x d, orthonormal within 1e-10).
GroundTruth truth_from_spikes(const SpikedModel& model, const Eigen::MatrixXd& u);

}  // namespace mdshrink
