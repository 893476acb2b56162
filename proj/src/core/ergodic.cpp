#include "ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "stats.hpp"

namespace horocover {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAnchorSpan = 4.0;

// f along h_s(x) on the cover; nodes are taken from an anchor recomputed
// directly from x every kAnchorSpan units of s.
class CoverArc {
 public:
  CoverArc(const Cover& cover, const CoverObservable& f, const CoverPoint& x)
      : cover_(cover), f_(f), x_(x) {}

  CoverPoint point(double s) {
    const auto k = static_cast<std::int64_t>(std::floor(s / kAnchorSpan));
    if (k != anchor_index_) {
      anchor_ = cover_.move(x_, horocycle_matrix(static_cast<double>(k) * kAnchorSpan));
      anchor_index_ = k;
    }
    return cover_.move(anchor_, horocycle_matrix(s - static_cast<double>(k) * kAnchorSpan));
  }
  double operator()(double s) {
    const CoverPoint p = point(s);
    return f_(p);
  }

 private:
  const Cover& cover_;
  const CoverObservable& f_;
  CoverPoint x_;
  std::int64_t anchor_index_ = std::numeric_limits<std::int64_t>::min();
  CoverPoint anchor_{};
};

class BaseArc {
 public:
  BaseArc(const OctagonGroup& group, const BaseObservable& f, const Isometry& x)
      : group_(group), f_(f), x_(x) {}

  double operator()(double s) {
    const auto k = static_cast<std::int64_t>(std::floor(s / kAnchorSpan));
    if (k != anchor_index_) {
      anchor_ = x_ * horocycle_matrix(static_cast<double>(k) * kAnchorSpan);
      group_.reduce_in_place(anchor_, scratch_);
      anchor_ = renormalize(anchor_);
      anchor_index_ = k;
    }
    Isometry p = anchor_ * horocycle_matrix(s - static_cast<double>(k) * kAnchorSpan);
    group_.reduce_in_place(p, scratch_);
    return f_(p);
  }

 private:
  const OctagonGroup& group_;
  const BaseObservable& f_;
  Isometry x_;
  std::int64_t anchor_index_ = std::numeric_limits<std::int64_t>::min();
  Isometry anchor_{};
  LetterTally scratch_{};
};

void check_checkpoints(std::span<const double> checkpoints) {
  double prev = 0.0;
  for (double T : checkpoints) {
    if (!(T >= prev) || !std::isfinite(T)) {
      throw NumericGuard(GuardKind::Precondition,
                         "integration checkpoints must be finite, non-negative and non-decreasing");
    }
    prev = T;
  }
}

void check_step(double step, double bound) {
  if (!(step > 0.0)) throw NumericGuard(GuardKind::Precondition, "integration step must be positive");
  if (step > bound * (1.0 + 1e-12)) {
    throw NumericGuard(GuardKind::StepTooCoarse, "integration step " + std::to_string(step) +
                                                     " exceeds the bound radius/8 = " +
                                                     std::to_string(bound));
  }
}

template <class F>
std::vector<HorocycleIntegral> integrate_arc(F& f, std::span<const double> checkpoints,
                                             const IntegralOptions& options) {
  check_checkpoints(checkpoints);
  std::vector<HorocycleIntegral> out;
  out.reserve(checkpoints.size());
  double value = 0.0;
  double error = 0.0;
  double prev = 0.0;
  for (double T : checkpoints) {
    const double len = T - prev;
    if (len > 0.0) {
      const auto n = static_cast<std::int64_t>(std::ceil(len / options.step));
      const double h = len / static_cast<double>(n);
      for (std::int64_t p = 0; p < n; ++p) {
        const double mid = prev + h * (static_cast<double>(p) + 0.5);
        double q4 = 0.0;
        bool touched = false;
        for (int k = 0; k < 4; ++k) {
          const double v = f(mid + 0.5 * h * GaussLegendre4::nodes[k]);
          touched = touched || v != 0.0;
          q4 += GaussLegendre4::weights[k] * v;
        }
        q4 *= 0.5 * h;
        value += q4;
        if (options.estimate_error && touched) {
          double q2 = 0.0;
          for (int k = 0; k < 2; ++k) q2 += GaussLegendre2::weights[k] * f(mid + 0.5 * h * GaussLegendre2::nodes[k]);
          error += std::abs(q4 - 0.5 * h * q2);
        }
      }
    }
    out.push_back({value, error});
    prev = T;
  }
  return out;
}

void require_constant(const CurvatureModel& model, const char* what) {
  if (!model.is_constant()) {
    throw ValidationError("curvature.model",
                          std::string(what) +
                              " needs the constant-curvature model: the invariant measure of a "
                              "curvature sampler is not available as a volume integral");
  }
}

}  // namespace

// --- SmoothingWindow ---------------------------------------------------------

SmoothingWindow::SmoothingWindow(double width, double length) : width_(width), length_(length) {
  if (!(width > 0.0) || !(length >= 2.0 * width) || !std::isfinite(length)) {
    throw NumericGuard(GuardKind::Precondition, "smoothing window needs B > 0 and length >= 2B");
  }
}

double SmoothingWindow::default_width(double t, double delta) { return std::exp(-delta * t / 3.0); }

double SmoothingWindow::ramp(double v) const {
  const double B = width_;
  const double u = v - 0.5 * B;
  if (u <= 0.0) return 0.0;
  if (u >= 0.5 * B) return 1.0;
  if (u <= 0.25 * B) return 8.0 * u * u / (B * B);
  const double w = 0.5 * B - u;
  return 1.0 - 8.0 * w * w / (B * B);
}

double SmoothingWindow::ramp_slope(double v) const {
  const double B = width_;
  const double u = v - 0.5 * B;
  if (u <= 0.0 || u >= 0.5 * B) return 0.0;
  if (u <= 0.25 * B) return 16.0 * u / (B * B);
  return 16.0 * (0.5 * B - u) / (B * B);
}

double SmoothingWindow::operator()(double s) const {
  if (!(s >= 0.0 && s <= length_)) return 0.0;
  return std::min(ramp(s), ramp(length_ - s));
}

double SmoothingWindow::derivative(double s) const {
  if (!(s >= 0.0 && s <= length_)) return 0.0;
  if (s < width_) return ramp_slope(s);
  if (s > length_ - width_) return -ramp_slope(length_ - s);
  return 0.0;
}

// --- integrals -----------------------------------------------------------------

double max_integral_step(const BaseBump& bump) { return bump.radius() / 8.0; }

std::vector<HorocycleIntegral> horocycle_integrals(const Cover& cover, const CoverObservable& f,
                                                   const CoverPoint& x,
                                                   std::span<const double> checkpoints,
                                                   const IntegralOptions& options) {
  check_step(options.step, max_integral_step(f.bump()));
  CoverArc arc(cover, f, x);
  return integrate_arc(arc, checkpoints, options);
}

HorocycleIntegral horocycle_integral(const Cover& cover, const CoverObservable& f, const CoverPoint& x,
                                     double T, const IntegralOptions& options) {
  const double cp[1] = {T};
  return horocycle_integrals(cover, f, x, cp, options).front();
}

std::vector<HorocycleIntegral> horocycle_integrals(const OctagonGroup& group, const BaseObservable& f,
                                                   const Isometry& x, std::span<const double> checkpoints,
                                                   const IntegralOptions& options) {
  check_step(options.step, max_integral_step(f.bump));
  BaseArc arc(group, f, x);
  return integrate_arc(arc, checkpoints, options);
}

HorocycleIntegral smoothed_integral(const Cover& cover, const CurvatureModel& model,
                                    const CoverObservable& f, const CoverPoint& x, double T, double t,
                                    double window_width, const IntegralOptions& options) {
  require_constant(model, "the smoothed integral");
  check_step(options.step, max_integral_step(f.bump()));
  const double contraction = std::exp(-t);
  const SmoothingWindow psi(window_width, contraction * T);
  CoverArc arc(cover, f, x);
  auto integrand = [&](double s) {
    const double w = psi(contraction * s);
    return w == 0.0 ? 0.0 : arc(s) * w;
  };
  const double cp[1] = {T};
  return integrate_arc(integrand, cp, options).front();
}

HorocycleIntegral renormalized_integral(const Cover& cover, const CurvatureModel& model,
                                        const CoverObservable& f, const CoverPoint& x, double T,
                                        double t, double window_width, const IntegralOptions& options) {
  require_constant(model, "the renormalized integral");
  check_step(options.step, max_integral_step(f.bump()));
  const double tau_T = std::exp(-t) * T;
  const SmoothingWindow psi(window_width, tau_T);
  const CoverPoint x_t = cover.flow_with_winding(x, t).point;
  const double jac = std::exp(t);  // J_{-t}
  auto integrand = [&](double s) {
    const double w = psi(s);
    if (w == 0.0) return 0.0;
    const CoverPoint y = cover.move(x_t, horocycle_matrix(s));
    const CoverPoint back = cover.flow_with_winding(y, -t).point;
    return jac * f(back) * w;
  };
  // The pulled-back integrand varies e^t times faster in s.
  IntegralOptions scaled = options;
  scaled.step = options.step * std::exp(-t);
  const double cp[1] = {tau_T};
  return integrate_arc(integrand, cp, scaled).front();
}

// --- predictions ----------------------------------------------------------------

double AsymptoticPrediction::a() const {
  const int d = sigma->dim();
  const double hd = std::pow(h_top, 0.5 * d);
  return hd / (std::pow(2.0 * kPi, 0.5 * d) * std::sqrt(sigma->det())) * T / std::pow(std::log(T), 0.5 * d);
}

double AsymptoticPrediction::phi() const {
  if (!(t_star > 0.0)) return 1.0;
  std::vector<double> v(F_star.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = F_star[i] / std::sqrt(t_star);
  return std::exp(-0.5 * sigma->norm_sq(v));
}

double theorem_a_envelope(double T, int d) {
  return T * std::log(std::log(T)) / std::pow(std::log(T), 0.5 * (d + 1));
}

std::vector<TheoremARow> theorem_a_experiment(const Cover& cover, const CurvatureModel& model,
                                              const CoverObservable& f, std::span<const CoverPoint> xs,
                                              std::span<const double> schedule,
                                              const CovarianceMatrix& sigma,
                                              const IntegralOptions& options, int threads) {
  require_constant(model, "theorem-a");
  if (sigma.dim() != cover.dim()) {
    throw ValidationError("sigma.file", "covariance dimension does not match cover.d");
  }
  for (double T : schedule) {
    if (!(T > std::exp(1.0))) {
      throw ValidationError("schedule.T", "theorem-a schedule entries must exceed e");
    }
  }
  check_checkpoints(schedule);
  const double mu = f.mean();
  const int d = cover.dim();

  auto per_x = parallel_map(xs.size(), threads, [&](std::size_t i) {
    const CoverPoint& x = xs[i];
    const auto integrals = horocycle_integrals(cover, f, x, schedule, options);
    std::vector<TheoremARow> rows;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      TheoremARow row;
      row.x_index = static_cast<int>(i);
      row.T = schedule[k];
      row.t_star = normalizing_time(model, x, row.T);
      const WindingVector F = cover.frobenius_vector(x, row.t_star);
      row.F_star = F.values();
      AsymptoticPrediction pred{row.T, row.t_star, row.F_star, mu, model.h_top(), &sigma};
      row.phi = pred.phi();
      row.a_T = pred.a();
      row.mu = mu;
      row.integral = integrals[k].value;
      row.quad_error = integrals[k].error;
      row.prediction = pred.value();
      row.residual = std::abs(row.integral - row.prediction);
      row.normalized_residual = row.residual / theorem_a_envelope(row.T, d);
      row.ratio = row.prediction != 0.0 ? row.integral / row.prediction
                                        : std::numeric_limits<double>::quiet_NaN();
      rows.push_back(std::move(row));
    }
    return rows;
  });

  std::vector<TheoremARow> out;
  for (auto& rows : per_x) {
    for (auto& r : rows) out.push_back(std::move(r));
  }
  return out;
}

std::vector<TheoremBRow> theorem_b_experiment(const Cover& cover, const CurvatureModel& model,
                                              std::span<const CoverObservable> observables,
                                              std::span<const CoverPoint> xs, double sigma_len,
                                              std::span<const double> times,
                                              const CovarianceMatrix& sigma,
                                              const IntegralOptions& options, int threads) {
  require_constant(model, "theorem-b");
  if (sigma.dim() != cover.dim()) {
    throw ValidationError("sigma.file", "covariance dimension does not match cover.d");
  }
  if (!(sigma_len > 0.0)) throw ValidationError("theorem_b.sigma_len", "arc length sigma must be positive");
  for (double t : times) {
    if (!(t >= 0.0)) throw ValidationError("schedule.t", "theorem-b times must be non-negative");
    if (t > kTheoremBMaxTime) {
      throw NumericGuard(GuardKind::Overflow, "theorem-b time " + std::to_string(t) +
                                                  " exceeds 14: pushed arc length sigma e^t is too long");
    }
  }
  const int d = cover.dim();
  const std::size_t combos = xs.size() * observables.size();

  auto per_combo = parallel_map(combos, threads, [&](std::size_t c) {
    const std::size_t xi = c / observables.size();
    const std::size_t oi = c % observables.size();
    const CoverObservable& f = observables[oi];
    const double mu = f.mean();
    std::vector<TheoremBRow> rows;
    for (double t : times) {
      TheoremBRow row;
      row.x_index = static_cast<int>(xi);
      row.observable_index = static_cast<int>(oi);
      row.t = t;
      // g_{-t} h_s = h_{s e^t} g_{-t}, and J_{-t} = e^t: the pushed arc is the
      // horocycle arc of length sigma e^t through g_{-t} x.
      const CoverPoint y = cover.flow_with_winding(xs[xi], -t).point;
      const HorocycleIntegral I = horocycle_integral(cover, f, y, sigma_len * std::exp(t), options);
      row.integral = I.value;
      row.quad_error = I.error;
      const double spread = t > 0.0 ? std::pow(2.0 * kPi * t, 0.5 * d) * std::sqrt(sigma.det()) : 1.0;
      row.normalized = spread * std::exp(-model.h_top() * t) / sigma_len * row.integral;
      row.mu = mu;
      row.residual = std::abs(row.normalized - mu);
      row.scaled_residual = t > 1.0 ? row.residual * std::sqrt(t) / std::log(t)
                                    : std::numeric_limits<double>::quiet_NaN();
      rows.push_back(row);
    }
    return rows;
  });

  std::vector<TheoremBRow> out;
  for (auto& rows : per_combo) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

TheoremCResult theorem_c_experiment(const OctagonGroup& group, const CurvatureModel& model,
                                    const BaseObservable& f, std::span<const Isometry> xs,
                                    std::span<const double> schedule, const IntegralOptions& options,
                                    int threads) {
  require_constant(model, "theorem-c");
  if (schedule.size() < 2) throw ValidationError("schedule.T", "theorem-c needs at least two schedule entries");
  for (double T : schedule) {
    if (!(T > 0.0)) throw ValidationError("schedule.T", "theorem-c schedule entries must be positive");
  }
  if (xs.empty()) throw ValidationError("schedule.x_count", "theorem-c needs at least one point");
  const double mu = f.mean();

  auto per_x = parallel_map(xs.size(), threads, [&](std::size_t i) {
    const auto integrals = horocycle_integrals(group, f, xs[i], schedule, options);
    std::vector<TheoremCRow> rows;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      TheoremCRow row;
      row.x_index = static_cast<int>(i);
      row.T = schedule[k];
      row.average = integrals[k].value / row.T;
      row.mu = mu;
      row.deviation = std::abs(row.average - mu);
      row.quad_error = integrals[k].error;
      rows.push_back(row);
    }
    return rows;
  });

  TheoremCResult result;
  for (auto& rows : per_x) result.rows.insert(result.rows.end(), rows.begin(), rows.end());

  if (f.is_constant()) {
    throw NumericGuard(GuardKind::DegenerateFit, "constant observable: deviations vanish identically");
  }
  std::vector<double> logT;
  std::vector<double> logdev;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    std::vector<double> devs;
    std::vector<double> floors;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const TheoremCRow& row = result.rows[i * schedule.size() + k];
      devs.push_back(row.deviation);
      floors.push_back(row.quad_error / row.T + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(mu));
    }
    const double med = median(devs);
    if (!(med > median(floors))) {
      throw NumericGuard(GuardKind::DegenerateFit,
                         "median deviation at T = " + std::to_string(schedule[k]) +
                             " is below the quadrature noise floor; rescale the observable");
    }
    result.fit.median_deviation.push_back(med);
    logT.push_back(std::log(schedule[k]));
    logdev.push_back(std::log(med));
  }
  const LinearFit fit = linear_fit(logT, logdev);
  result.fit.a = -fit.slope;
  result.fit.intercept = fit.intercept;
  result.fit.r2 = fit.r2;
  return result;
}

std::vector<double> geometric_schedule(double lo, double hi, double ratio) {
  if (!(lo > 0.0) || !(hi >= lo) || !(ratio > 1.0)) {
    throw ValidationError("schedule.T", "geometric schedule needs 0 < lo <= hi and ratio > 1");
  }
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = lo * std::pow(ratio, k);
    if (v > hi * (1.0 + 1e-12)) break;
    out.push_back(v);
  }
  return out;
}

}  // namespace horocover
