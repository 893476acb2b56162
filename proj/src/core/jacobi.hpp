#pragma once

// Stable Jacobi field J(t, x), renormalization time tau(s, t, x) and the
// normalizing time t*. Exact in constant curvature; for curvature samplers J
// is the decaying solution of J'' + K J = 0 obtained from the Riccati
// equation u' = -K - u^2 (u = J'/J) integrated backward from a far horizon.

#include <cmath>
#include <utility>
#include <vector>

#include "cover.hpp"
#include "geometry.hpp"

namespace horocover {

// Curvature seen along one geodesic orbit, as a function of orbit time:
//   K(u) = -(mean + amplitude * sin(frequency * u + phase)).
struct OrbitCurvature {
  double mean = 1.0;
  double amplitude = 0.0;
  double frequency = 1.0;
  double phase = 0.0;

  double operator()(double u) const { return -(mean + amplitude * std::sin(frequency * u + phase)); }
  // Same orbit seen from the point reached after time `dt`.
  OrbitCurvature shifted(double dt) const {
    return {mean, amplitude, frequency, phase + frequency * dt};
  }
};

class CurvatureModel {
 public:
  // K == -1.
  static CurvatureModel constant();
  // Sinusoidal sampler with range [-(mean + |amplitude|), -(mean - |amplitude|)].
  static CurvatureModel sinusoidal(double mean, double amplitude, double frequency);

  bool is_constant() const { return constant_; }
  double mean() const { return mean_; }
  double amplitude() const { return amplitude_; }
  double frequency() const { return frequency_; }
  double k_low() const { return -(mean_ + std::abs(amplitude_)); }
  double k_high() const { return -(mean_ - std::abs(amplitude_)); }
  // Contraction rate lower bound sqrt(-k_high).
  double contraction_bound() const { return std::sqrt(-k_high()); }
  // Constant: 1. Sampler: the estimate attached with with_h_top, NaN if none.
  double h_top() const { return h_top_; }
  CurvatureModel with_h_top(double h) const;

  // Point-dependent phase of the sampler: a smooth deck-invariant bump in
  // the distance from the domain centre, so J_t(h_r x) is smooth in r.
  double phase(const Isometry& reduced_base) const;
  OrbitCurvature profile(const Isometry& reduced_base) const;

 private:
  bool constant_ = true;
  double mean_ = 1.0;
  double amplitude_ = 0.0;
  double frequency_ = 1.0;
  double h_top_ = 1.0;
};

struct JacobiOptions {
  double step = 0.01;          // RK4 step of the Riccati integration
  double horizon_scale = 30.0;  // horizon = max(t, 0) + scale / sqrt(-k_high)
  bool check_horizon = true;    // compare against bracketing seeds
  double horizon_tolerance = 1e-8;
};

// J(t) along an orbit with the given curvature profile; t may be negative.
double jacobi_field(const CurvatureModel& model, const OrbitCurvature& orbit, double t,
                    const JacobiOptions& options = {});
// J(t_max k / n), k = 0..n, from a single backward pass.
std::vector<double> jacobi_profile(const CurvatureModel& model, const OrbitCurvature& orbit, double t_max,
                                   int n, const JacobiOptions& options = {});
// J_t at a reduced base point.
double jacobi_at(const CurvatureModel& model, const Isometry& reduced_base, double t,
                 const JacobiOptions& options = {});

struct RenormRecord {
  double s = 0.0;
  double t = 0.0;
  double tau = 0.0;
  // (r, J_t(h_r x)) samples along the arc, at most a few thousand.
  std::vector<std::pair<double, double>> j_profile;
  double quad_error = 0.0;
};

struct TauOptions {
  double step = 0.05;  // quadrature panel width along the horocycle
  bool estimate_error = true;
  JacobiOptions jacobi{};
};

// tau(s, t, x); constant curvature uses the closed form e^{-t} s.
RenormRecord tau(const CurvatureModel& model, const CoverPoint& x, double s, double t,
                 const TauOptions& options = {});
// Always integrates J_t along the horocycle arc, also in constant curvature.
RenormRecord tau_quadrature(const CurvatureModel& model, const CoverPoint& x, double s, double t,
                            const TauOptions& options = {});

// t* with tau(T, t*, x) = 1. Constant curvature returns log T exactly.
double normalizing_time(const CurvatureModel& model, const CoverPoint& x, double T,
                        const TauOptions& options = {.step = 0.1, .estimate_error = false});

}  // namespace horocover
