#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace horocover {

// Symmetric positive-definite d x d covariance with its Cholesky factor.
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;
  // Symmetrizes, then throws SingularEstimate unless the Cholesky
  // factorization succeeds.
  explicit CovarianceMatrix(const Eigen::MatrixXd& sigma, Eigen::MatrixXd standard_error = {},
                            std::int64_t samples = 0, double time = 0.0);

  int dim() const { return static_cast<int>(sigma_.rows()); }
  const Eigen::MatrixXd& matrix() const { return sigma_; }
  const Eigen::MatrixXd& standard_error() const { return stderr_; }
  std::int64_t samples() const { return samples_; }
  double time() const { return time_; }
  double det() const;
  // ||v||_Sigma^2 = v . Sigma^{-1} v.
  double norm_sq(std::span<const double> v) const;
  // Symmetric Sigma^{-1/2}.
  Eigen::MatrixXd inverse_sqrt() const;

 private:
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd stderr_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  std::int64_t samples_ = 0;
  double time_ = 0.0;
};

}  // namespace horocover
