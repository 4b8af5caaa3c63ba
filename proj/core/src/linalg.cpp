#include "mdshrink/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef MDSHRINK_HAVE_LAPACKE
#include <lapacke.h>
#endif

// When the BLAS backing LAPACK is OpenBLAS, pin it to one thread: results
// must not depend on the worker budget (parallelism lives at the repetition
// level), and the symbol resolves to null with any other BLAS.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace mdshrink {

namespace {

void pin_blas_threads() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    if (openblas_set_num_threads) openblas_set_num_threads(1);
  });
}

void check_symmetric(const Eigen::MatrixXd& m, const char* where) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(where) + ": matrix must be square, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale) {
    throw std::invalid_argument(std::string(where) + ": matrix is not symmetric (max |m - m^T| = " +
                                std::to_string(asym) + ")");
  }
}

// Flip each eigenvector so its largest-magnitude entry (lowest index on
// ties) is positive.
void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors(best, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

}  // namespace

Eigen::MatrixXd sample_covariance(const SampleSet& s) {
  if (s.n() < 1 || s.p() < 1) {
    throw std::invalid_argument("sample_covariance: need n >= 1 and p >= 1");
  }
  if (s.mean.size() != s.p()) {
    throw std::invalid_argument("sample_covariance: mean has dimension " +
                                std::to_string(s.mean.size()) + ", data has p = " +
                                std::to_string(s.p()));
  }
  if (!s.data.allFinite() || !s.mean.allFinite()) {
    throw std::invalid_argument("sample_covariance: non-finite input");
  }
  const Eigen::Index p = s.p();
  Eigen::MatrixXd centered = s.data.rowwise() - s.mean.transpose();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(),
                                                 1.0 / static_cast<double>(s.n()));
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  return cov;
}

EigenSystem sym_eig(const Eigen::MatrixXd& m) {
  check_symmetric(m, "sym_eig");
  const Eigen::Index p = m.rows();
  EigenSystem out;
#ifdef MDSHRINK_HAVE_LAPACKE
  pin_blas_threads();
  Eigen::MatrixXd work = m;
  Eigen::VectorXd w(p);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(p), work.data(),
                     static_cast<lapack_int>(p), w.data());
  if (info != 0) {
    throw std::runtime_error("sym_eig: dsyevd failed with info = " + std::to_string(info));
  }
  out.values = w.reverse();
  out.vectors = work.rowwise().reverse();
#else
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("sym_eig: eigendecomposition did not converge");
  }
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
#endif
  fix_signs(out.vectors);
  return out;
}

EigenSystem sym_eig_psd(const Eigen::MatrixXd& m) {
  EigenSystem eig = sym_eig(m);
  const double scale =
      eig.values.size() > 0 ? std::max(1.0, eig.values.cwiseAbs().maxCoeff()) : 1.0;
  const double tol = 1e-10 * scale;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) < -tol) {
      throw std::domain_error("sym_eig_psd: eigenvalue " + std::to_string(eig.values(i)) +
                              " is below the PSD tolerance");
    }
    if (eig.values(i) < 0.0) eig.values(i) = 0.0;
  }
  return eig;
}

Eigen::VectorXd sym_eigvalues(const Eigen::MatrixXd& m) {
  check_symmetric(m, "sym_eigvalues");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("sym_eigvalues: eigendecomposition did not converge");
  }
  return solver.eigenvalues().reverse();
}

double op_norm_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("op_norm_diff: shape mismatch");
  }
  const Eigen::VectorXd values = sym_eigvalues(a - b);
  if (values.size() == 0) return 0.0;
  return std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
}

double mahalanobis_sq(const Eigen::VectorXd& z, const Eigen::VectorXd& mu,
                      const Eigen::MatrixXd& m) {
  if (z.size() != mu.size() || m.rows() != z.size() || m.cols() != z.size()) {
    throw std::invalid_argument("mahalanobis_sq: shape mismatch");
  }
  const Eigen::VectorXd w = z - mu;
  return std::max(w.dot(m * w), 0.0);
}

GroundTruth truth_from_eigenpairs(const Eigen::VectorXd& values, const Eigen::MatrixXd& u) {
  const Eigen::Index p = u.rows();
  const Eigen::Index d = u.cols();
  if (values.size() != d) {
    throw std::invalid_argument("truth_from_eigenpairs: " + std::to_string(values.size()) +
                                " values for " + std::to_string(d) + " directions");
  }
  if (d > 0) {
    const double ortho =
        (u.transpose() * u - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
    if (ortho > 1e-10) {
      throw std::invalid_argument("truth_from_eigenpairs: frame is not orthonormal (residual " +
                                  std::to_string(ortho) + ")");
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(values(i) > 0.0)) {
      throw std::invalid_argument("truth_from_eigenpairs: eigenvalues must be positive");
    }
  }
  GroundTruth out;
  out.rank = static_cast<int>(d);
  if (d == 0) {
    out.sigma_x = Eigen::MatrixXd::Zero(p, p);
    out.pseudo_inverse = Eigen::MatrixXd::Zero(p, p);
    return out;
  }
  out.sigma_x = u * values.asDiagonal() * u.transpose();
  out.sigma_x = ((out.sigma_x + out.sigma_x.transpose()) / 2.0).eval();
  out.pseudo_inverse = u * values.cwiseInverse().asDiagonal() * u.transpose();
  out.pseudo_inverse = ((out.pseudo_inverse + out.pseudo_inverse.transpose()) / 2.0).eval();
  return out;
}

GroundTruth truth_from_spikes(const SpikedModel& model, const Eigen::MatrixXd& u) {
  if (u.cols() != model.rank()) {
    throw std::invalid_argument("truth_from_spikes: frame has " + std::to_string(u.cols()) +
                                " columns for " + std::to_string(model.rank()) + " spikes");
  }
  Eigen::VectorXd values(model.rank());
  for (int i = 0; i < model.rank(); ++i) values(i) = model.spikes()[static_cast<std::size_t>(i)];
  return truth_from_eigenpairs(values, u);
}

}  // namespace mdshrink
