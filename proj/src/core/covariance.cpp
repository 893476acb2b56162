#include "covariance.hpp"

#include <cmath>

#include "error.hpp"

namespace horocover {

CovarianceMatrix::CovarianceMatrix(const Eigen::MatrixXd& sigma, Eigen::MatrixXd standard_error,
                                   std::int64_t samples, double time)
    : sigma_(0.5 * (sigma + sigma.transpose())),
      stderr_(std::move(standard_error)),
      samples_(samples),
      time_(time) {
  if (sigma_.rows() == 0 || sigma_.rows() != sigma_.cols() || !sigma_.allFinite()) {
    throw NumericGuard(GuardKind::SingularEstimate, "covariance must be a finite square matrix");
  }
  llt_.compute(sigma_);
  bool ok = llt_.info() == Eigen::Success;
  if (ok) {
    // LLT accepts some numerically semidefinite inputs; require a usable pivot.
    const Eigen::VectorXd diag = Eigen::MatrixXd(llt_.matrixL()).diagonal();
    const double scale = std::sqrt(sigma_.diagonal().cwiseAbs().maxCoeff());
    ok = diag.minCoeff() > 1e-10 * scale && scale > 0.0;
  }
  if (!ok) {
    throw NumericGuard(GuardKind::SingularEstimate,
                       "covariance is not positive definite (Cholesky failed); raise the sample "
                       "count or time, or check the cover projection for zero rows");
  }
  if (stderr_.size() == 0) stderr_ = Eigen::MatrixXd::Zero(sigma_.rows(), sigma_.cols());
}

double CovarianceMatrix::det() const {
  const Eigen::VectorXd diag = Eigen::MatrixXd(llt_.matrixL()).diagonal();
  return diag.prod() * diag.prod();
}

double CovarianceMatrix::norm_sq(std::span<const double> v) const {
  Eigen::VectorXd x(dim());
  for (int i = 0; i < dim(); ++i) x[i] = v[i];
  return x.dot(llt_.solve(x));
}

Eigen::MatrixXd CovarianceMatrix::inverse_sqrt() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_);
  return es.operatorInverseSqrt();
}

}  // namespace horocover
