#pragma once

// Covariance of the winding cycle, CLT diagnostics, and Ulam discretization
// of the twisted transfer operators.

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cover.hpp"
#include "covariance.hpp"
#include "jacobi.hpp"
#include "rng.hpp"

namespace horocover {

struct SigmaEstimate {
  CovarianceMatrix sigma;
  std::vector<double> mean_winding;  // (1/n) sum F
  std::vector<double> mean_stderr;   // standard error of each mean component
  bool drift_ok = true;              // every |mean| within 3 standard errors
  double t = 0.0;
  std::int64_t samples = 0;
};

// Monte Carlo Sigma^ = (1/n) sum F F^T / t over volume-random x, where F is
// the winding over [0, t]. Throws SingularEstimate when Sigma^ is singular.
SigmaEstimate estimate_sigma(const Cover& cover, const CurvatureModel& model, double t,
                             std::int64_t n, std::uint64_t seed, int threads, double flow_step = 1.0);

// Winding vectors F(x_i, t) for the sampled points of a stream family.
std::vector<DeckVector> sample_windings(const Cover& cover, double t, std::int64_t n,
                                        std::uint64_t seed, StreamPurpose purpose, int threads,
                                        double flow_step = 1.0);

struct CltReport {
  bool degenerate = false;
  std::vector<double> ks_statistic;  // per whitened coordinate
  std::vector<double> ks_p_value;
  Eigen::MatrixXd whitened_covariance;
  double covariance_max_deviation = 0.0;  // max |cov - I|
};

// Whitened samples Sigma^{-1/2} (F + U) / sqrt(t), U uniform on
// [-1/2, 1/2]^d from a dedicated stream: F is lattice valued, and the
// uniform jitter turns it into a continuous variable with the same limit.
CltReport clt_diagnostic(const Cover& cover, const CurvatureModel& model, double t, std::int64_t n,
                         const CovarianceMatrix& sigma, std::uint64_t seed, int threads,
                         double flow_step = 1.0);

struct UlamOptions {
  std::array<int, 3> cells{24, 24, 24};
  int samples_per_cell = 32;
  double t = 2.0;
  double flow_step = 1.0;
  double tolerance = 1e-8;
  int max_iterations = 10000;
};

struct UlamEigen {
  std::complex<double> lambda;
  double subdominant_ratio = 0.0;  // raw |lambda_2 / lambda_1| from the Ritz values
  int iterations = 0;
};

// A(omega)_{ij} = average over x in cell i of G_{t,omega}(x) J_{-t}(x) 1[g_{-t} x in cell j],
// cells = disk square [-R, R]^2 (R = vertex radius) x fiber angle.
class UlamOperator {
 public:
  UlamOperator(const Cover& cover, const CurvatureModel& model, const UlamOptions& options,
               std::uint64_t seed, int threads);

  std::size_t size() const { return rows_.size(); }
  int dim() const { return dim_; }
  double t() const { return options_.t; }
  std::size_t active_cells() const;
  std::size_t sample_count() const;

  int cell_of(const Isometry& reduced_base) const;

  void apply(const Twist& omega, const std::vector<std::complex<double>>& v,
             std::vector<std::complex<double>>& out) const;
  UlamEigen leading_eigenvalue(const Twist& omega) const;
  Eigen::MatrixXcd dense(const Twist& omega) const;

  // Binary layout: uint64 rows, uint64 cols, then rows*cols (re, im) float64
  // pairs in row-major order, all little-endian.
  void dump(const Twist& omega, const std::string& path) const;
  static constexpr std::size_t kMaxDumpCells = 2048;
  static constexpr int kBlockSize = 4;

 private:
  struct Entry {
    std::int32_t target;
    double weight;
    DeckVector winding;  // deck(g_{-t} x) - deck(x)
  };
  UlamOptions options_;
  int dim_ = 0;
  std::vector<std::vector<Entry>> rows_;
};

struct UlamPoint {
  Twist omega;
  UlamEigen eigen;
  double lambda_hat_abs = 0.0;  // |lambda| e^{-h t}
};

struct UlamSpectrum {
  std::vector<UlamPoint> points;
  double lambda_hat_zero = 0.0;
  double max_hat_nonzero = 0.0;  // over omega != 0 with |omega| >= 0.1
  Eigen::MatrixXd quadratic;     // fitted Q with -log(|lambda(omega)| / lambda(0)) / t ~ omega.Q omega
  int fit_points = 0;
};

// Uniform grid {-max, ..., max} in steps of `step` per dimension.
std::vector<Twist> omega_grid(int d, double max, double step);

UlamSpectrum ulam_spectrum(const UlamOperator& op, const CurvatureModel& model,
                           const std::vector<Twist>& omegas, double fit_radius);

// Frobenius-relative distance |Q - 2 pi^2 Sigma| / |2 pi^2 Sigma|.
double quadratic_mismatch(const Eigen::MatrixXd& Q, const CovarianceMatrix& sigma);

struct HtopEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::int64_t samples = 0;
};

// h_top from lim tau(s, t, x) / s = e^{-h t}: mean of -log(tau(1, t, x)) / t
// over volume-random x.
HtopEstimate estimate_htop(const CurvatureModel& model, double t, std::int64_t n, std::uint64_t seed,
                           int threads);

}  // namespace horocover
