#include "jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "error.hpp"
#include "quadrature.hpp"

namespace horocover {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPhaseRadius = 1.4;  // below the inradius, so the bump is a smooth function on M
constexpr std::size_t kMaxProfileSamples = 4096;

struct RiccatiState {
  double u;
  double L;
};

// One backward RK4 step s -> s - h of u' = -K - u^2, L' = u.
template <class K>
RiccatiState backward_step(const K& curvature, double s, RiccatiState y, double h) {
  auto f = [&](double at, double u) { return -curvature(at) - u * u; };
  const double u1 = y.u;
  const double k1 = f(s, u1);
  const double u2 = y.u - 0.5 * h * k1;
  const double k2 = f(s - 0.5 * h, u2);
  const double u3 = y.u - 0.5 * h * k2;
  const double k3 = f(s - 0.5 * h, u3);
  const double u4 = y.u - h * k3;
  const double k4 = f(s - h, u4);
  return {y.u - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
          y.L - h / 6.0 * (u1 + 2.0 * u2 + 2.0 * u3 + u4)};
}

// Integrate from `from` down to `to` (from >= to) with equal steps <= h.
template <class K>
RiccatiState integrate_down(const K& curvature, double from, double to, RiccatiState y, double h) {
  const double length = from - to;
  if (length <= 0.0) return y;
  const auto n = static_cast<std::int64_t>(std::ceil(length / h));
  const double dh = length / static_cast<double>(n);
  for (std::int64_t i = 0; i < n; ++i) {
    y = backward_step(curvature, from - dh * static_cast<double>(i), y, dh);
  }
  return y;
}

double bump(double u) {
  if (u >= 1.0) return 0.0;
  const double c = 0.5 * (1.0 + std::cos(kPi * u));
  return c * c;
}

void check_options(const JacobiOptions& o) {
  if (!(o.step > 0.0 && o.step <= 0.5)) {
    throw NumericGuard(GuardKind::Precondition, "Jacobi RK4 step must lie in (0, 0.5]");
  }
  if (!(o.horizon_scale > 0.0)) {
    throw NumericGuard(GuardKind::Precondition, "Jacobi horizon scale must be positive");
  }
}

}  // namespace

CurvatureModel CurvatureModel::constant() { return CurvatureModel{}; }

CurvatureModel CurvatureModel::sinusoidal(double mean, double amplitude, double frequency) {
  if (!(mean - std::abs(amplitude) > 0.0) || !std::isfinite(mean) || !std::isfinite(amplitude)) {
    throw ValidationError("curvature.mean",
                          "sinusoidal curvature needs mean > |amplitude| so that K < 0 everywhere");
  }
  if (!(frequency > 0.0) || !std::isfinite(frequency)) {
    throw ValidationError("curvature.frequency", "frequency must be positive");
  }
  CurvatureModel m;
  m.constant_ = false;
  m.mean_ = mean;
  m.amplitude_ = amplitude;
  m.frequency_ = frequency;
  m.h_top_ = std::numeric_limits<double>::quiet_NaN();
  return m;
}

CurvatureModel CurvatureModel::with_h_top(double h) const {
  if (!(h > 0.0)) throw NumericGuard(GuardKind::Precondition, "h_top must be positive");
  CurvatureModel m = *this;
  if (!constant_) m.h_top_ = h;
  return m;
}

double CurvatureModel::phase(const Isometry& reduced_base) const {
  if (constant_) return 0.0;
  const double d = hyperbolic_distance(reduced_base.basepoint(), Complex{0.0, 1.0});
  return 2.0 * kPi * bump(d / kPhaseRadius);
}

OrbitCurvature CurvatureModel::profile(const Isometry& reduced_base) const {
  if (constant_) return OrbitCurvature{1.0, 0.0, 1.0, 0.0};
  return OrbitCurvature{mean_, amplitude_, frequency_, phase(reduced_base)};
}

double jacobi_field(const CurvatureModel& model, const OrbitCurvature& orbit, double t,
                    const JacobiOptions& options) {
  if (model.is_constant()) return std::exp(-t);
  if (t == 0.0) return 1.0;
  check_options(options);

  const double hi = std::max(t, 0.0);
  const double lo = std::min(t, 0.0);
  const double horizon = hi + options.horizon_scale / std::sqrt(-model.k_high());

  RiccatiState y{-std::sqrt(-orbit(horizon)), 0.0};
  y = integrate_down(orbit, horizon, hi, y, options.step);
  const RiccatiState at_hi = y;
  y = integrate_down(orbit, hi, lo, y, options.step);
  const RiccatiState at_lo = y;
  // integral_0^t u = L(t) - L(0).
  const double integral = t > 0.0 ? at_hi.L - at_lo.L : at_lo.L - at_hi.L;
  const double u0 = t > 0.0 ? at_lo.u : at_hi.u;

  if (options.check_horizon) {
    // Bracketing seeds must have forgotten their initial value by s = 0.
    double u_at_zero[2];
    const double seeds[2] = {-std::sqrt(-model.k_low()), -std::sqrt(-model.k_high())};
    for (int k = 0; k < 2; ++k) {
      RiccatiState z{seeds[k], 0.0};
      z = integrate_down(orbit, horizon, hi, z, options.step);
      if (t > 0.0) z = integrate_down(orbit, hi, 0.0, z, options.step);
      u_at_zero[k] = z.u;
    }
    const double spread = std::max(std::abs(u_at_zero[0] - u0), std::abs(u_at_zero[1] - u0));
    if (!(spread <= options.horizon_tolerance)) {
      throw NumericGuard(GuardKind::HorizonTooShort,
                         "backward Riccati horizon did not stabilize u(0) (spread " +
                             std::to_string(spread) + ")");
    }
  }
  return std::exp(integral);
}

std::vector<double> jacobi_profile(const CurvatureModel& model, const OrbitCurvature& orbit, double t_max,
                                   int n, const JacobiOptions& options) {
  if (!(t_max > 0.0) || n < 1) {
    throw NumericGuard(GuardKind::Precondition, "jacobi_profile needs t_max > 0 and n >= 1");
  }
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  if (model.is_constant()) {
    for (int k = 0; k <= n; ++k) out[k] = std::exp(-t_max * k / n);
    return out;
  }
  check_options(options);
  const double horizon = t_max + options.horizon_scale / std::sqrt(-model.k_high());
  std::vector<double> L(out.size());
  RiccatiState y{-std::sqrt(-orbit(horizon)), 0.0};
  y = integrate_down(orbit, horizon, t_max, y, options.step);
  L[n] = y.L;
  for (int k = n - 1; k >= 0; --k) {
    y = integrate_down(orbit, t_max * (k + 1) / n, t_max * k / n, y, options.step);
    L[k] = y.L;
  }
  if (options.check_horizon) {
    for (const double seed : {-std::sqrt(-model.k_low()), -std::sqrt(-model.k_high())}) {
      RiccatiState z{seed, 0.0};
      z = integrate_down(orbit, horizon, t_max, z, options.step);
      for (int k = n - 1; k >= 0; --k) z = integrate_down(orbit, t_max * (k + 1) / n, t_max * k / n, z, options.step);
      if (!(std::abs(z.u - y.u) <= options.horizon_tolerance)) {
        throw NumericGuard(GuardKind::HorizonTooShort, "backward Riccati horizon did not stabilize u(0)");
      }
    }
  }
  for (int k = 0; k <= n; ++k) out[k] = std::exp(L[k] - L[0]);
  return out;
}

double jacobi_at(const CurvatureModel& model, const Isometry& reduced_base, double t,
                 const JacobiOptions& options) {
  return jacobi_field(model, model.profile(reduced_base), t, options);
}

namespace {

// Base points of the quadrature nodes along h_r(x), r in [0, s], reduced to
// the domain. Panels are marched so matrix entries stay O(1) for long arcs.
struct ArcNodes {
  std::vector<double> r;
  std::vector<double> weight;
  std::vector<double> phase;  // curvature phase per node (sampler only)
};

ArcNodes arc_nodes(const CurvatureModel& model, const Isometry& start, double s, std::int64_t panels,
                   const std::array<double, 4>& nodes, const std::array<double, 4>& weights,
                   int order) {
  const OctagonGroup& group = default_group();
  ArcNodes out;
  const double h = s / static_cast<double>(panels);
  out.r.reserve(static_cast<std::size_t>(panels * order));
  out.weight.reserve(out.r.capacity());
  if (!model.is_constant()) out.phase.reserve(out.r.capacity());
  Isometry panel_start = start;
  LetterTally scratch{};
  for (std::int64_t p = 0; p < panels; ++p) {
    const double lo = h * static_cast<double>(p);
    for (int k = 0; k < order; ++k) {
      const double offset = 0.5 * h * (1.0 + nodes[k]);
      out.r.push_back(lo + offset);
      out.weight.push_back(0.5 * h * weights[k]);
      if (!model.is_constant()) {
        Isometry node = panel_start * horocycle_matrix(offset);
        group.reduce_in_place(node, scratch);
        out.phase.push_back(model.phase(node));
      }
    }
    if (!model.is_constant()) {
      panel_start = panel_start * horocycle_matrix(h);
      group.reduce_in_place(panel_start, scratch);
      panel_start = renormalize(panel_start);
    }
  }
  return out;
}

double node_jacobi(const CurvatureModel& model, const ArcNodes& a, std::size_t i, double t,
                   const JacobiOptions& options) {
  if (model.is_constant()) return std::exp(-t);
  const OrbitCurvature orbit{model.mean(), model.amplitude(), model.frequency(), a.phase[i]};
  return jacobi_field(model, orbit, t, options);
}

std::array<double, 4> padded(const std::array<double, 3>& x) { return {x[0], x[1], x[2], 0.0}; }

}  // namespace

RenormRecord tau_quadrature(const CurvatureModel& model, const CoverPoint& x, double s, double t,
                            const TauOptions& options) {
  RenormRecord rec;
  rec.s = s;
  rec.t = t;
  if (s == 0.0) return rec;
  if (!(options.step > 0.0 && options.step <= 0.1)) {
    throw NumericGuard(GuardKind::Precondition, "tau quadrature step must lie in (0, 0.1]");
  }
  const auto panels = static_cast<std::int64_t>(std::ceil(std::abs(s) / options.step));

  const ArcNodes q4 = arc_nodes(model, x.base, s, panels, GaussLegendre4::nodes,
                                GaussLegendre4::weights, 4);
  std::vector<double> j4(q4.r.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < q4.r.size(); ++i) {
    j4[i] = node_jacobi(model, q4, i, t, options.jacobi);
    sum += q4.weight[i] * j4[i];
  }
  rec.tau = sum;

  const std::size_t stride = std::max<std::size_t>(1, (static_cast<std::size_t>(panels) + kMaxProfileSamples - 1) /
                                                          kMaxProfileSamples);
  for (std::size_t p = 0; p < static_cast<std::size_t>(panels); p += stride) {
    rec.j_profile.emplace_back(q4.r[4 * p], j4[4 * p]);
  }

  if (options.estimate_error) {
    const ArcNodes q3 = arc_nodes(model, x.base, s, panels, padded(GaussLegendre3::nodes),
                                  padded(GaussLegendre3::weights), 3);
    double err = 0.0;
    for (std::int64_t p = 0; p < panels; ++p) {
      double a = 0.0;
      double b = 0.0;
      for (int k = 0; k < 4; ++k) a += q4.weight[4 * p + k] * j4[4 * p + k];
      for (int k = 0; k < 3; ++k) {
        const std::size_t i = static_cast<std::size_t>(3 * p + k);
        b += q3.weight[i] * node_jacobi(model, q3, i, t, options.jacobi);
      }
      err += std::abs(a - b);
    }
    rec.quad_error = err;
  }
  return rec;
}

RenormRecord tau(const CurvatureModel& model, const CoverPoint& x, double s, double t,
                 const TauOptions& options) {
  if (model.is_constant()) {
    RenormRecord rec;
    rec.s = s;
    rec.t = t;
    rec.tau = std::exp(-t) * s;
    return rec;
  }
  return tau_quadrature(model, x, s, t, options);
}

double normalizing_time(const CurvatureModel& model, const CoverPoint& x, double T,
                        const TauOptions& options) {
  if (!(T >= 1.0) || !std::isfinite(T)) {
    throw NumericGuard(GuardKind::Precondition, "normalizing_time requires T >= 1");
  }
  if (model.is_constant()) return std::log(T);
  if (T == 1.0) return 0.0;
  if (!(options.step > 0.0 && options.step <= 0.1)) {
    throw NumericGuard(GuardKind::Precondition, "tau quadrature step must lie in (0, 0.1]");
  }

  const auto panels = static_cast<std::int64_t>(std::ceil(T / options.step));
  const ArcNodes nodes = arc_nodes(model, x.base, T, panels, GaussLegendre4::nodes,
                                   GaussLegendre4::weights, 4);
  auto tau_at = [&](double t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.r.size(); ++i) {
      sum += nodes.weight[i] * node_jacobi(model, nodes, i, t, options.jacobi);
    }
    return sum;
  };

  const double rate = std::isfinite(model.h_top()) ? model.h_top() : model.contraction_bound();
  double lo = 0.0;
  double hi = 2.0 * std::log(T) / rate + 50.0;
  if (!(tau_at(lo) >= 1.0) || !(tau_at(hi) < 1.0)) {
    throw NumericGuard(GuardKind::BracketFailure,
                       "could not bracket tau(T, t, x) = 1 on [0, " + std::to_string(hi) + "]");
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (tau_at(mid) >= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace horocover
