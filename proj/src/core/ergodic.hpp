#pragma once

// Horocycle ergodic integrals on M and on the cover, and the three
// experiments built on them: asymptotics with the oscillating factor on the
// cover, equidistribution of geodesic-pushed arcs, and the power-law
// deviation on the compact quotient.

#include <span>
#include <vector>

#include "cover.hpp"
#include "covariance.hpp"
#include "jacobi.hpp"
#include "observable.hpp"

namespace horocover {

// psi on [0, L]: 0 at both ends, 1 on [B, L - B], with a piecewise linear
// derivative ramping over [B/2, B] (and symmetrically at the far end), so
// psi' is Lipschitz with constant 16 / B^2.
class SmoothingWindow {
 public:
  SmoothingWindow(double width, double length);
  // B = e^{-delta t / 3}.
  static double default_width(double t, double delta = 0.3);

  double width() const { return width_; }
  double length() const { return length_; }
  double operator()(double s) const;
  double derivative(double s) const;
  double derivative_lipschitz() const { return 16.0 / (width_ * width_); }

 private:
  double ramp(double v) const;        // rising edge, v in [0, B]
  double ramp_slope(double v) const;  // its derivative
  double width_;
  double length_;
};

struct HorocycleIntegral {
  double value = 0.0;
  double error = 0.0;  // sum of |Q4 - Q2| over panels where f is nonzero
};

struct IntegralOptions {
  double step = 0.05;  // panel width bound
  bool estimate_error = true;
};

// Cumulative integrals of f along h_s(x) at each checkpoint (non-decreasing,
// >= 0). Panels are aligned to the checkpoints; every node is computed
// directly from an anchor at most a few units away, so long arcs do not
// accumulate marching error.
std::vector<HorocycleIntegral> horocycle_integrals(const Cover& cover, const CoverObservable& f,
                                                   const CoverPoint& x,
                                                   std::span<const double> checkpoints,
                                                   const IntegralOptions& options);
HorocycleIntegral horocycle_integral(const Cover& cover, const CoverObservable& f, const CoverPoint& x,
                                     double T, const IntegralOptions& options);
// Same on the compact quotient M.
std::vector<HorocycleIntegral> horocycle_integrals(const OctagonGroup& group, const BaseObservable& f,
                                                   const Isometry& x, std::span<const double> checkpoints,
                                                   const IntegralOptions& options);

// Step bound tied to the observable: radius / 8.
double max_integral_step(const BaseBump& bump);

// int_0^T f(h_s x) psi(tau(s, t, x)) ds with psi on [0, tau(T, t, x)].
HorocycleIntegral smoothed_integral(const Cover& cover, const CurvatureModel& model,
                                    const CoverObservable& f, const CoverPoint& x, double T, double t,
                                    double window_width, const IntegralOptions& options);
// e^{h t} int_0^{tau(T,t,x)} (L^_t f)(h_s x_t) psi(s) ds, evaluated along the
// renormalized arc through x_t = g_t x by flowing each node back.
HorocycleIntegral renormalized_integral(const Cover& cover, const CurvatureModel& model,
                                        const CoverObservable& f, const CoverPoint& x, double T,
                                        double t, double window_width, const IntegralOptions& options);

struct AsymptoticPrediction {
  double T = 0.0;
  double t_star = 0.0;
  std::vector<double> F_star;
  double mu = 0.0;
  double h_top = 1.0;
  const CovarianceMatrix* sigma = nullptr;

  double a() const;    // h^{d/2} / ((2 pi)^{d/2} sqrt(det Sigma)) * T / (log T)^{d/2}
  double phi() const;  // exp(-1/2 |F* / sqrt(t*)|_Sigma^2)
  double value() const { return a() * phi() * mu; }
};

// T log log T / (log T)^{(d+1)/2}.
double theorem_a_envelope(double T, int d);

struct TheoremARow {
  int x_index = 0;
  double T = 0.0;
  double t_star = 0.0;
  std::vector<double> F_star;
  double phi = 0.0;
  double a_T = 0.0;
  double mu = 0.0;
  double integral = 0.0;
  double quad_error = 0.0;
  double prediction = 0.0;
  double residual = 0.0;
  double normalized_residual = 0.0;
  double ratio = 0.0;
};

std::vector<TheoremARow> theorem_a_experiment(const Cover& cover, const CurvatureModel& model,
                                              const CoverObservable& f, std::span<const CoverPoint> xs,
                                              std::span<const double> schedule,
                                              const CovarianceMatrix& sigma,
                                              const IntegralOptions& options, int threads);

struct TheoremBRow {
  int x_index = 0;
  int observable_index = 0;
  double t = 0.0;
  double integral = 0.0;  // int over g_{-t} of the arc of length sigma
  double quad_error = 0.0;
  double normalized = 0.0;
  double mu = 0.0;
  double residual = 0.0;
  double scaled_residual = 0.0;  // residual * sqrt(t) / log t
};

// Above t = 14 the pushed arc is too long to integrate.
inline constexpr double kTheoremBMaxTime = 14.0;

std::vector<TheoremBRow> theorem_b_experiment(const Cover& cover, const CurvatureModel& model,
                                              std::span<const CoverObservable> observables,
                                              std::span<const CoverPoint> xs, double sigma_len,
                                              std::span<const double> times,
                                              const CovarianceMatrix& sigma,
                                              const IntegralOptions& options, int threads);

struct TheoremCRow {
  int x_index = 0;
  double T = 0.0;
  double average = 0.0;
  double mu = 0.0;
  double deviation = 0.0;
  double quad_error = 0.0;
};

struct TheoremCFit {
  double a = 0.0;  // deviation ~ T^{-a}
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> median_deviation;  // per schedule entry
};

struct TheoremCResult {
  std::vector<TheoremCRow> rows;
  TheoremCFit fit;
};

// Throws DegenerateFit when the deviations sit at the quadrature noise floor
// (for instance for constant f).
TheoremCResult theorem_c_experiment(const OctagonGroup& group, const CurvatureModel& model,
                                    const BaseObservable& f, std::span<const Isometry> xs,
                                    std::span<const double> schedule, const IntegralOptions& options,
                                    int threads);

// Geometric schedule lo, lo r, lo r^2, ... up to hi (inclusive within rounding).
std::vector<double> geometric_schedule(double lo, double hi, double ratio);

}  // namespace horocover
