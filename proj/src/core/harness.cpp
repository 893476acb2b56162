#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "ergodic.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "spectral.hpp"
#include "stats.hpp"
#include "twist.hpp"

namespace horocover {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void put(Summary& s, const std::string& key, double v) { s.emplace_back(key, format_double(v)); }
void put(Summary& s, const std::string& key, std::int64_t v) { s.emplace_back(key, std::to_string(v)); }
void put(Summary& s, const std::string& key, int v) { s.emplace_back(key, std::to_string(v)); }
void put(Summary& s, const std::string& key, bool v) { s.emplace_back(key, v ? "true" : "false"); }
void put(Summary& s, const std::string& key, const std::string& v) { s.emplace_back(key, v); }

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::vector<std::string> indexed(const std::string& stem, int d) {
  std::vector<std::string> out;
  for (int i = 1; i <= d; ++i) out.push_back(stem + "_" + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<CoverPoint> experiment_points(const Cover& cover, std::uint64_t seed, int n) {
  std::vector<CoverPoint> xs;
  for (int i = 0; i < n; ++i) {
    RandomStream rng(seed, stream_id(StreamPurpose::ExperimentPoints, static_cast<std::uint64_t>(i)));
    xs.push_back(cover.lift(cover.group().volume_random_point(rng)));
  }
  return xs;
}

// A frame whose base point lies within the bump support.
Isometry support_point(const BaseBump& bump, RandomStream& rng) {
  const Isometry centre = frame_from_disk(bump.center_disk(), 0.0);
  const double r = bump.radius() * rng.uniform();
  return centre * rotation_matrix(2.0 * kPi * rng.uniform()) * geodesic_matrix(r) *
         rotation_matrix(2.0 * kPi * rng.uniform());
}

Summary validate_geometry(const ExperimentConfig& c, const std::string& out, int threads) {
  const OctagonGroup& group = default_group();
  struct Commutation {
    double geodesic;
    double horocycle;
  };
  const auto comm = parallel_map(static_cast<std::size_t>(c.geometry_samples), threads, [&](std::size_t k) {
    RandomStream rng(c.seed, stream_id(StreamPurpose::GeometryChecks, k));
    const Isometry x = group.volume_random_point(rng);
    const Isometry& D = group.generator(static_cast<Letter>(rng.next_u64() % kLetterCount));
    const double t = rng.uniform(-5.0, 5.0);
    const double s = rng.uniform(-5.0, 5.0);
    const Isometry Dx = renormalize(D * x);
    return Commutation{
        projective_relative_distance(renormalize(D * geodesic_step(x, t)), geodesic_step(Dx, t)),
        projective_relative_distance(renormalize(D * horocycle_step(x, s)), horocycle_step(Dx, s))};
  });
  double commutation = 0.0;
  for (const auto& r : comm) commutation = std::max({commutation, r.geodesic, r.horocycle});

  // Chained flow steps with renormalization and reduction after each step.
  RandomStream rng(c.seed, stream_id(StreamPurpose::GeometryChecks, std::uint64_t{1} << 40));
  Isometry y = Isometry::identity();
  LetterTally tally{};
  double drift = 0.0;
  for (std::int64_t k = 0; k < c.geometry_drift_steps; ++k) {
    y = horocycle_step(geodesic_step(y, rng.uniform(-1.0, 1.0)), rng.uniform(-1.0, 1.0));
    group.reduce_in_place(y, tally);
    drift = std::max(drift, std::abs(y.det() - 1.0));
  }

  const double unit_distance =
      std::abs(hyperbolic_distance(Complex{0.0, 1.0}, geodesic_step(Isometry::identity(), 1.0).basepoint()) - 1.0);

  struct Check {
    const char* name;
    double value;
    double tolerance;
  };
  const std::vector<Check> checks{
      {"relation_residual", group.relation_residual(), 1e-8},
      {"pairing_residual", group.pairing_residual(), 1e-8},
      {"flow_deck_commutation", commutation, 1e-12},
      {"determinant_drift", drift, 1e-8},
      {"unit_geodesic_distance", unit_distance, 1e-10},
  };
  CsvWriter csv(path_in(out, "geometry.csv"), {"check", "value", "tolerance", "pass"});
  Summary s;
  bool all = true;
  for (const Check& ch : checks) {
    const bool pass = ch.value <= ch.tolerance;
    all = all && pass;
    csv.field(ch.name).field(ch.value).field(ch.tolerance).field(pass ? "true" : "false");
    csv.end_row();
    put(s, ch.name, ch.value);
  }
  put(s, "drift_steps", c.geometry_drift_steps);
  put(s, "commutation_samples", c.geometry_samples);
  put(s, "all_pass", all);
  return s;
}

Summary tau_tables(const ExperimentConfig& c, const std::string& out, int threads) {
  const Cover cover = make_cover(c);
  const CurvatureModel model = make_model(c);
  const TauOptions opt{.step = c.tau_step, .estimate_error = true};

  struct Row {
    double s, t, tau, tau_q, err, closed, cocycle, cocycle_tol, inverse;
  };
  const auto per_point = parallel_map(static_cast<std::size_t>(c.tau_points), threads, [&](std::size_t i) {
    RandomStream rng(c.seed, stream_id(StreamPurpose::TauPoints, i));
    const CoverPoint x = cover.lift(cover.group().volume_random_point(rng));
    std::vector<Row> rows;
    for (double s : c.tau_s) {
      const CoverPoint hx = cover.move(x, horocycle_matrix(s));
      for (double t : c.tau_t) {
        Row r{};
        r.s = s;
        r.t = t;
        r.tau = tau(model, x, s, t, opt).tau;
        const RenormRecord q = tau_quadrature(model, x, s, t, opt);
        r.tau_q = q.tau;
        r.err = q.quad_error;
        r.closed = model.is_constant()
                       ? std::max(std::abs(r.tau - std::exp(-t) * s), std::abs(r.tau_q - std::exp(-t) * s))
                       : kNaN;
        const RenormRecord whole = tau_quadrature(model, x, 2.0 * s, t, opt);
        const RenormRecord tail = tau_quadrature(model, hx, s, t, opt);
        r.cocycle = std::abs(whole.tau - tail.tau - q.tau);
        r.cocycle_tol = 10.0 * (whole.quad_error + tail.quad_error + q.quad_error);
        if (model.is_constant()) {
          const CoverPoint gx = cover.flow_with_winding(x, t).point;
          r.inverse = std::abs(jacobi_at(model, x.base, t) * jacobi_at(model, gx.base, -t) - 1.0);
        } else {
          // Sampler curvature is a function of orbit time: compare along the
          // orbit profile seen from x and from g_t x.
          const OrbitCurvature orbit = model.profile(x.base);
          r.inverse = std::abs(jacobi_field(model, orbit, t) * jacobi_field(model, orbit.shifted(t), -t) - 1.0);
        }
        rows.push_back(r);
      }
    }
    return rows;
  });

  CsvWriter csv(path_in(out, "tau_table.csv"),
                {"x_index", "s", "t", "tau", "tau_quadrature", "quad_error", "closed_form_residual",
                 "cocycle_residual", "cocycle_tolerance", "inverse_residual"});
  double closed = 0.0, cocycle = 0.0, inverse = 0.0;
  bool cocycle_ok = true;
  for (std::size_t i = 0; i < per_point.size(); ++i) {
    for (const Row& r : per_point[i]) {
      csv.field(static_cast<std::int64_t>(i)).field(r.s).field(r.t).field(r.tau).field(r.tau_q).field(r.err);
      csv.field(r.closed).field(r.cocycle).field(r.cocycle_tol).field(r.inverse);
      csv.end_row();
      if (!std::isnan(r.closed)) closed = std::max(closed, r.closed);
      cocycle = std::max(cocycle, r.cocycle);
      inverse = std::max(inverse, r.inverse);
      if (!(r.cocycle <= std::max(r.cocycle_tol, 1e-8))) cocycle_ok = false;
    }
  }
  Summary s;
  put(s, "model", c.curvature_model);
  put(s, "max_closed_form_residual", model.is_constant() ? closed : kNaN);
  put(s, "max_cocycle_residual", cocycle);
  put(s, "cocycle_within_tolerance", cocycle_ok);
  put(s, "max_inverse_residual", inverse);
  return s;
}

Summary winding_orbit(const ExperimentConfig& c, const std::string& out, int /*threads*/) {
  const Cover cover = make_cover(c);
  RandomStream rng(c.seed, stream_id(StreamPurpose::WindingOrbit, 0));
  CoverPoint x = cover.lift(cover.group().volume_random_point(rng));
  const int d = cover.dim();
  CsvWriter csv(path_in(out, "winding_orbit.csv"), concat({"t", "reduction_steps"}, indexed("deck", d)));
  const auto n = static_cast<std::int64_t>(std::ceil(c.winding_time / c.winding_step));
  const double dt = n > 0 ? c.winding_time / static_cast<double>(n) : 0.0;
  std::int64_t steps = 0;
  std::vector<double> ts, counts;
  auto emit = [&](double t) {
    csv.field(t).field(steps);
    for (int i = 0; i < d; ++i) csv.field(x.deck[i]);
    csv.end_row();
    ts.push_back(t);
    counts.push_back(static_cast<double>(steps));
  };
  emit(0.0);
  for (std::int64_t k = 1; k <= n; ++k) {
    const FlowResult r = cover.flow_with_winding(x, dt, c.winding_step);
    x = r.point;
    steps += r.reduction_steps;
    emit(static_cast<double>(k) * dt);
  }
  Summary s;
  const double diam = OctagonGroup::diameter();
  put(s, "final_reduction_steps", steps);
  if (ts.size() >= 3) {
    const LinearFit fit = linear_fit(ts, counts);
    put(s, "word_growth_slope", fit.slope);
    put(s, "word_growth_r2", fit.r2);
    put(s, "slope_lower_bound", 0.5 / diam);
    put(s, "slope_upper_bound", 4.0 / diam);
    put(s, "slope_in_bounds", fit.slope >= 0.5 / diam && fit.slope <= 4.0 / diam);
  }
  return s;
}

Summary estimate_sigma_cmd(const ExperimentConfig& c, const std::string& out, int threads) {
  const Cover cover = make_cover(c);
  const CurvatureModel model = make_model(c);
  const int d = cover.dim();
  CsvWriter csv(path_in(out, "sigma_estimates.csv"), {"t", "i", "j", "sigma", "standard_error", "samples"});
  CsvWriter means(path_in(out, "sigma_mean_winding.csv"), {"t", "i", "mean", "standard_error"});
  std::vector<SigmaEstimate> estimates;
  for (std::size_t k = 0; k < c.mc_times.size(); ++k) {
    // Independent samples per time, so comparing times is a genuine check.
    const double t = c.mc_times[k];
    estimates.push_back(estimate_sigma(cover, model, t, c.mc_samples, c.seed + k, threads, c.numeric_flow_step));
    const SigmaEstimate& e = estimates.back();
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        csv.field(t).field(i).field(j).field(e.sigma.matrix()(i, j)).field(e.sigma.standard_error()(i, j));
        csv.field(e.samples);
        csv.end_row();
      }
      means.field(t).field(i).field(e.mean_winding[i]).field(e.mean_stderr[i]);
      means.end_row();
    }
  }
  const auto best = std::max_element(estimates.begin(), estimates.end(),
                                     [](const auto& a, const auto& b) { return a.t < b.t; });
  write_sigma(sigma_path(c, out), best->sigma);

  Summary s;
  put(s, "sigma_file", sigma_path(c, out));
  put(s, "sigma_t", best->t);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) put(s, "sigma_" + std::to_string(i) + std::to_string(j), best->sigma.matrix()(i, j));
  }
  bool drift = true;
  for (const auto& e : estimates) drift = drift && e.drift_ok;
  put(s, "drift_ok", drift);
  if (estimates.size() >= 2) {
    // Relative change per entry between the first two times.
    const Eigen::MatrixXd& a = estimates[0].sigma.matrix();
    const Eigen::MatrixXd& b = estimates[1].sigma.matrix();
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        // Off-diagonal entries are compared against the diagonal scale.
        const double scale = i == j ? std::abs(b(i, j)) : std::sqrt(b(i, i) * b(j, j));
        worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / scale);
      }
    }
    put(s, "max_relative_change", worst);
  }
  return s;
}

CovarianceMatrix require_sigma(const ExperimentConfig& c, const std::string& out) {
  const std::string path = sigma_path(c, out);
  if (!fs::exists(path)) {
    throw ValidationError("sigma.file", "covariance file '" + path + "' not found: run estimate-sigma first");
  }
  CovarianceMatrix sigma = load_sigma(path);
  if (sigma.dim() != c.cover_d) {
    throw ValidationError("sigma.file", "covariance file '" + path + "' has dimension " +
                                            std::to_string(sigma.dim()) + ", cover.d is " +
                                            std::to_string(c.cover_d) + ": rerun estimate-sigma");
  }
  return sigma;
}

Summary clt_test(const ExperimentConfig& c, const std::string& out, int threads) {
  const Cover cover = make_cover(c);
  const CurvatureModel model = make_model(c);
  const CovarianceMatrix sigma = require_sigma(c, out);
  const int d = cover.dim();
  CsvWriter ks(path_in(out, "clt.csv"), {"seed_index", "coordinate", "ks_statistic", "p_value"});
  CsvWriter cov(path_in(out, "clt_covariance.csv"), {"seed_index", "i", "j", "value"});
  int passing = 0;
  double worst_cov = 0.0;
  bool degenerate = false;
  for (int k = 0; k < c.clt_seeds; ++k) {
    const CltReport r = clt_diagnostic(cover, model, c.clt_time, c.clt_samples, sigma,
                                       c.seed + static_cast<std::uint64_t>(k), threads, c.numeric_flow_step);
    degenerate = degenerate || r.degenerate;
    bool pass = !r.degenerate;
    for (int i = 0; i < d; ++i) {
      ks.field(k).field(i).field(r.ks_statistic[i]).field(r.ks_p_value[i]);
      ks.end_row();
      pass = pass && r.ks_p_value[i] > 0.01;
    }
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        cov.field(k).field(i).field(j).field(r.whitened_covariance(i, j));
        cov.end_row();
      }
    }
    passing += pass ? 1 : 0;
    worst_cov = std::max(worst_cov, r.covariance_max_deviation);
  }
  Summary s;
  put(s, "seeds", c.clt_seeds);
  put(s, "seeds_passing_ks", passing);
  put(s, "max_covariance_deviation", worst_cov);
  put(s, "degenerate", degenerate);
  return s;
}

Summary ulam_cmd(const ExperimentConfig& c, const std::string& out, int threads) {
  const Cover cover = make_cover(c);
  CurvatureModel model = make_model(c);
  Summary s;
  if (!std::isfinite(model.h_top())) {
    const HtopEstimate h = estimate_htop(model, 10.0, 256, c.seed, threads);
    model = model.with_h_top(h.value);
    put(s, "h_top_estimate", h.value);
    put(s, "h_top_standard_error", h.standard_error);
  }
  UlamOptions opt;
  opt.cells = c.ulam_cells;
  opt.samples_per_cell = c.ulam_samples_per_cell;
  opt.t = c.ulam_time;
  opt.flow_step = c.numeric_flow_step;
  const UlamOperator op(cover, model, opt, c.seed, threads);
  const int d = cover.dim();
  const auto omegas = omega_grid(d, c.ulam_omega_max, c.ulam_omega_step);
  const UlamSpectrum spectrum = ulam_spectrum(op, model, omegas, c.ulam_fit_radius);

  CsvWriter csv(path_in(out, "ulam_spectrum.csv"),
                concat(indexed("omega", d), {"omega_norm", "lambda_re", "lambda_im", "lambda_abs", "lambda_hat",
                                             "subdominant_ratio", "iterations"}));
  bool strict = true;
  double band_max = 0.0;
  for (const UlamPoint& p : spectrum.points) {
    for (int i = 0; i < d; ++i) csv.field(p.omega[i]);
    csv.field(p.omega.norm()).field(p.eigen.lambda.real()).field(p.eigen.lambda.imag());
    csv.field(std::abs(p.eigen.lambda)).field(p.lambda_hat_abs).field(p.eigen.subdominant_ratio);
    csv.field(p.eigen.iterations);
    csv.end_row();
    const double r = p.omega.norm();
    if (r >= 0.1 - 1e-12 && r <= 0.5 + 1e-12) {
      band_max = std::max(band_max, p.lambda_hat_abs);
      strict = strict && p.lambda_hat_abs < spectrum.lambda_hat_zero;
    }
  }

  double mismatch = kNaN;
  const std::string sp = sigma_path(c, out);
  std::optional<CovarianceMatrix> sigma;
  if (fs::exists(sp)) {
    sigma = load_sigma(sp);
    if (sigma->dim() == d) mismatch = quadratic_mismatch(spectrum.quadratic, *sigma);
  }
  CsvWriter q(path_in(out, "ulam_quadratic.csv"), {"i", "j", "fitted", "target"});
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      q.field(i).field(j).field(spectrum.quadratic(i, j));
      q.field(sigma && sigma->dim() == d ? 2.0 * kPi * kPi * sigma->matrix()(i, j) : kNaN);
      q.end_row();
    }
  }
  if (!c.ulam_dump.empty()) op.dump(Twist::zero(d), path_in(out, c.ulam_dump));

  put(s, "cells", static_cast<std::int64_t>(op.size()));
  put(s, "active_cells", static_cast<std::int64_t>(op.active_cells()));
  put(s, "samples", static_cast<std::int64_t>(op.sample_count()));
  put(s, "lambda_hat_zero", spectrum.lambda_hat_zero);
  put(s, "max_hat_nonzero", spectrum.max_hat_nonzero);
  put(s, "max_hat_band", band_max);
  put(s, "strict_ordering", strict);
  put(s, "fit_points", spectrum.fit_points);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) put(s, "quadratic_" + std::to_string(i) + std::to_string(j), spectrum.quadratic(i, j));
  }
  put(s, "quadratic_mismatch", mismatch);
  return s;
}

IntegralOptions integral_options(const ExperimentConfig& c) { return {.step = c.numeric_step, .estimate_error = true}; }

Summary theorem_a(const ExperimentConfig& c, const std::string& out, int threads) {
  const Cover cover = make_cover(c);
  const CurvatureModel model = make_model(c);
  const CovarianceMatrix sigma = require_sigma(c, out);
  const CoverObservable f = make_observable(c, 0);
  const auto xs = experiment_points(cover, c.seed, c.schedule_x_count);
  const auto rows = theorem_a_experiment(cover, model, f, xs, c.schedule_T, sigma, integral_options(c), threads);
  const int d = cover.dim();

  CsvWriter csv(path_in(out, "theorem_a.csv"),
                concat(concat({"x_index", "T", "t_star"}, indexed("F_star", d)),
                       {"phi", "a_T", "mu", "integral", "quad_error", "prediction", "residual",
                        "normalized_residual", "ratio"}));
  double ratio_lo = std::numeric_limits<double>::infinity();
  double ratio_hi = -std::numeric_limits<double>::infinity();
  std::map<double, std::vector<double>> by_T;
  for (const TheoremARow& r : rows) {
    csv.field(r.x_index).field(r.T).field(r.t_star);
    for (double v : r.F_star) csv.field(v);
    csv.field(r.phi).field(r.a_T).field(r.mu).field(r.integral).field(r.quad_error).field(r.prediction);
    csv.field(r.residual).field(r.normalized_residual).field(r.ratio);
    csv.end_row();
    if (r.T >= 1e3 * (1.0 - 1e-12)) {
      ratio_lo = std::min(ratio_lo, r.ratio);
      ratio_hi = std::max(ratio_hi, r.ratio);
    }
    by_T[r.T].push_back(r.normalized_residual);
  }
  std::vector<double> Ts, med;
  for (auto& [T, v] : by_T) {
    Ts.push_back(T);
    med.push_back(median(v));
  }
  Summary s;
  put(s, "mu", f.mean());
  put(s, "ratio_min_T_ge_1e3", ratio_lo);
  put(s, "ratio_max_T_ge_1e3", ratio_hi);
  put(s, "median_residual_spearman", Ts.size() >= 2 ? spearman(Ts, med) : kNaN);
  return s;
}

Summary theorem_b(const ExperimentConfig& c, const std::string& out, int threads) {
  const Cover cover = make_cover(c);
  const CurvatureModel model = make_model(c);
  const CovarianceMatrix sigma = require_sigma(c, out);
  const std::vector<CoverObservable> fs{make_observable(c, 0), make_observable(c, 1)};
  const auto xs = experiment_points(cover, c.seed, c.schedule_x_count);
  const auto rows = theorem_b_experiment(cover, model, fs, xs, c.theorem_b_sigma_len, c.schedule_t, sigma,
                                         integral_options(c), threads);
  CsvWriter csv(path_in(out, "theorem_b.csv"),
                {"x_index", "observable", "t", "integral", "quad_error", "normalized", "mu", "residual",
                 "scaled_residual"});
  std::map<double, std::vector<double>> by_t;
  for (const TheoremBRow& r : rows) {
    csv.field(r.x_index).field(r.observable_index).field(r.t).field(r.integral).field(r.quad_error);
    csv.field(r.normalized).field(r.mu).field(r.residual).field(r.scaled_residual);
    csv.end_row();
    by_t[r.t].push_back(r.scaled_residual);
  }
  CsvWriter med_csv(path_in(out, "theorem_b_median.csv"), {"t", "median_scaled_residual"});
  Summary s;
  double first = kNaN;
  double worst_ratio = 0.0;
  for (auto& [t, v] : by_t) {
    const double m = median(v);
    med_csv.field(t).field(m);
    med_csv.end_row();
    put(s, "median_scaled_residual_t" + format_double(t), m);
    if (std::isnan(m)) continue;
    if (std::isnan(first)) {
      first = m;
    } else {
      worst_ratio = std::max(worst_ratio, m / first);
    }
  }
  put(s, "max_ratio_to_first", worst_ratio);
  return s;
}

Summary theorem_c(const ExperimentConfig& c, const std::string& out, int threads) {
  const CurvatureModel model = make_model(c);
  const Cover cover = make_cover(c);
  const BaseObservable f{make_observable(c, 0).bump(), 1.0, 0.0};
  std::vector<Isometry> xs;
  for (const CoverPoint& p : experiment_points(cover, c.seed, c.schedule_x_count)) xs.push_back(p.base);
  const TheoremCResult res = theorem_c_experiment(default_group(), model, f, xs, c.schedule_T, integral_options(c), threads);

  CsvWriter csv(path_in(out, "theorem_c.csv"), {"x_index", "T", "average", "mu", "deviation", "quad_error"});
  for (const TheoremCRow& r : res.rows) {
    csv.field(r.x_index).field(r.T).field(r.average).field(r.mu).field(r.deviation).field(r.quad_error);
    csv.end_row();
  }
  CsvWriter fit(path_in(out, "theorem_c_fit.csv"), {"T", "median_deviation"});
  for (std::size_t k = 0; k < c.schedule_T.size(); ++k) {
    fit.field(c.schedule_T[k]).field(res.fit.median_deviation[k]);
    fit.end_row();
  }
  // Median deviation at T against the one a decade later.
  bool decades = true;
  int compared = 0;
  for (std::size_t i = 0; i < c.schedule_T.size(); ++i) {
    for (std::size_t j = i + 1; j < c.schedule_T.size(); ++j) {
      if (std::abs(c.schedule_T[j] / c.schedule_T[i] - 10.0) < 1e-6) {
        ++compared;
        decades = decades && res.fit.median_deviation[j] < res.fit.median_deviation[i];
      }
    }
  }
  Summary s;
  put(s, "mu", f.mean());
  put(s, "exponent_a", res.fit.a);
  put(s, "intercept", res.fit.intercept);
  put(s, "r2", res.fit.r2);
  put(s, "decades_compared", compared);
  put(s, "monotone_decades", decades);
  return s;
}

Summary reconstruct_check(const ExperimentConfig& c, const std::string& out, int threads) {
  const Cover cover = make_cover(c);
  const CurvatureModel model = make_model(c);
  const CoverObservable f = make_observable(c, 0);
  const int d = cover.dim();
  const int bound = reconstruct_grid_bound(f);
  const int grid = c.reconstruct_grid > 0 ? c.reconstruct_grid : bound;
  // Deck coordinates within w of the window's bounding box, the region where
  // the grid sum is exact.
  const std::int64_t w = f.window_width();
  std::array<std::int64_t, kMaxDeckRank> lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = std::numeric_limits<std::int64_t>::max();
    hi[i] = std::numeric_limits<std::int64_t>::min();
    for (const auto& [D, coef] : f.copies()) {
      lo[i] = std::min(lo[i], D[i] - w);
      hi[i] = std::max(hi[i], D[i] + w);
    }
  }
  const CoverFunction u = [&f](const CoverPoint& x) { return std::complex<double>(f(x)); };

  struct Row {
    CoverPoint x;
    double value;
    std::complex<double> rec;
    Twist omega;
    double t, s, equivariance, conjugation, semigroup, unitarity;
  };
  const auto rows = parallel_map(static_cast<std::size_t>(c.reconstruct_points), threads, [&](std::size_t k) {
    RandomStream rng(c.seed, stream_id(StreamPurpose::ReconstructPoints, k));
    const Isometry y = support_point(f.bump(), rng);
    DeckVector deck = DeckVector::zero(d);
    for (int i = 0; i < d; ++i) {
      deck[i] = lo[i] + static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(hi[i] - lo[i] + 1));
    }
    Row r{};
    r.x = cover.lift(y, deck);
    r.value = f(r.x);
    r.rec = reconstruct(f, r.x, grid, c.reconstruct_allow_aliasing);
    r.omega = Twist::zero(d);
    DeckVector D = DeckVector::zero(d);
    for (int i = 0; i < d; ++i) {
      r.omega[i] = rng.uniform();
      D[i] = static_cast<std::int64_t>(rng.next_u64() % 7) - 3;
    }
    r.t = rng.uniform(0.5, 3.0);
    r.s = rng.uniform(0.5, 3.0);
    const TransferOptions topt{.flow_step = c.numeric_flow_step};

    r.equivariance = TwistedSection::from_observable(f, r.omega).equivariance_defect(cover, D, r.x);
    // Evaluate the operators at points whose backward orbit lands in the
    // support, so the identities are not trivially 0 = 0.
    const CoverPoint xt = cover.flow_with_winding(r.x, r.t, c.numeric_flow_step).point;
    const auto lhs = twisted_transfer_apply(cover, model, u, r.omega, r.t, xt, topt);
    const CoverFunction inner = xi_operator(-r.omega, u);
    const CoverFunction plain = [&](const CoverPoint& p) { return transfer_apply(cover, model, inner, r.t, p, topt); };
    const auto rhs = xi_operator(r.omega, plain)(xt);
    r.conjugation = std::abs(lhs - rhs);

    const CoverPoint xts = cover.flow_with_winding(r.x, r.t + r.s, c.numeric_flow_step).point;
    const auto whole = twisted_transfer_apply(cover, model, u, r.omega, r.t + r.s, xts, topt);
    const CoverFunction first = twisted_transfer(cover, model, u, r.omega, r.s, topt);
    const auto composed = twisted_transfer_apply(cover, model, first, r.omega, r.t, xts, topt);
    r.semigroup = std::abs(whole - composed);
    r.unitarity = std::abs(std::abs(xi_operator(r.omega, u)(r.x)) - std::abs(u(r.x)));
    return r;
  });

  CsvWriter rec(path_in(out, "reconstruct.csv"),
                concat(concat({"point_index"}, indexed("deck", d)), {"value", "reconstructed_re", "reconstructed_im", "error"}));
  CsvWriter id(path_in(out, "twist_identities.csv"),
               concat(concat({"point_index"}, indexed("omega", d)),
                      {"t", "s", "equivariance_defect", "conjugation_defect", "semigroup_defect", "unitarity_defect"}));
  double rec_err = 0.0, eq = 0.0, conj = 0.0, semi = 0.0, unit = 0.0;
  int nonzero = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& r = rows[k];
    const double err = std::abs(r.rec - r.value);
    rec.field(static_cast<std::int64_t>(k));
    for (int i = 0; i < d; ++i) rec.field(r.x.deck[i]);
    rec.field(r.value).field(r.rec.real()).field(r.rec.imag()).field(err);
    rec.end_row();
    id.field(static_cast<std::int64_t>(k));
    for (int i = 0; i < d; ++i) id.field(r.omega[i]);
    id.field(r.t).field(r.s).field(r.equivariance).field(r.conjugation).field(r.semigroup).field(r.unitarity);
    id.end_row();
    rec_err = std::max(rec_err, err);
    eq = std::max(eq, r.equivariance);
    conj = std::max(conj, r.conjugation);
    semi = std::max(semi, r.semigroup);
    unit = std::max(unit, r.unitarity);
    nonzero += r.value != 0.0 ? 1 : 0;
  }
  Summary s;
  put(s, "grid", grid);
  put(s, "grid_bound", bound);
  put(s, "points_in_support", nonzero);
  put(s, "max_reconstruction_error", rec_err);
  put(s, "max_equivariance_defect", eq);
  put(s, "max_conjugation_defect", conj);
  put(s, "max_semigroup_defect", semi);
  put(s, "max_unitarity_defect", unit);
  return s;
}

using Handler = Summary (*)(const ExperimentConfig&, const std::string&, int);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"validate-geometry", &validate_geometry}, {"tau-tables", &tau_tables},
      {"winding-orbit", &winding_orbit},         {"estimate-sigma", &estimate_sigma_cmd},
      {"clt-test", &clt_test},                   {"ulam-spectrum", &ulam_cmd},
      {"theorem-a", &theorem_a},                 {"theorem-b", &theorem_b},
      {"theorem-c", &theorem_c},                 {"reconstruct-check", &reconstruct_check},
  };
  return h;
}

void write_manifest(const std::string& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("out", "cannot write manifest '" + path + "'");
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{
      "validate-geometry", "tau-tables", "winding-orbit", "estimate-sigma", "clt-test",
      "ulam-spectrum",     "theorem-a",  "theorem-b",     "theorem-c",      "reconstruct-check"};
  return names;
}

int resolve_threads(int cli_threads, const ExperimentConfig& config) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("HOROCOVER_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) {
      throw ValidationError("HOROCOVER_THREADS", "HOROCOVER_THREADS must be an integer in [1, 1024]");
    }
    return static_cast<int>(v);
  }
  return config.threads;
}

std::vector<std::pair<std::string, std::string>> read_manifest(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

std::string sigma_path(const ExperimentConfig& config, const std::string& out_dir) {
  if (config.sigma_file.empty()) return path_in(out_dir, "sigma.csv");
  const fs::path p(config.sigma_file);
  return p.is_absolute() ? p.string() : (fs::path(out_dir) / p).string();
}

void write_sigma(const std::string& path, const CovarianceMatrix& sigma) {
  CsvWriter csv(path, {"i", "j", "sigma", "standard_error", "t", "samples"});
  const int d = sigma.dim();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double se = sigma.standard_error().size() ? sigma.standard_error()(i, j) : 0.0;
      csv.field(i).field(j).field(sigma.matrix()(i, j)).field(se).field(sigma.time()).field(sigma.samples());
      csv.end_row();
    }
  }
}

CovarianceMatrix load_sigma(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("sigma.file", "cannot read covariance file '" + path + "'");
  std::string line;
  std::getline(in, line);
  struct Entry {
    int i, j;
    double v, se, t;
    std::int64_t n;
  };
  std::vector<Entry> entries;
  int d = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Entry e{};
    std::string v, se, t;
    if (!(ss >> e.i >> e.j >> v >> se >> t >> e.n)) {
      throw ValidationError("sigma.file", "malformed covariance file '" + path + "'");
    }
    e.v = std::strtod(v.c_str(), nullptr);
    e.se = std::strtod(se.c_str(), nullptr);
    e.t = std::strtod(t.c_str(), nullptr);
    if (e.i < 0 || e.j < 0 || e.i >= kMaxDeckRank || e.j >= kMaxDeckRank) {
      throw ValidationError("sigma.file", "covariance index out of range in '" + path + "'");
    }
    d = std::max({d, e.i + 1, e.j + 1});
    entries.push_back(e);
  }
  if (d == 0 || static_cast<int>(entries.size()) != d * d) {
    throw ValidationError("sigma.file", "covariance file '" + path + "' is not a full square matrix");
  }
  Eigen::MatrixXd m(d, d), se(d, d);
  for (const Entry& e : entries) {
    m(e.i, e.j) = e.v;
    se(e.i, e.j) = e.se;
  }
  return CovarianceMatrix(m, se, entries.front().n, entries.front().t);
}

Summary run_experiment(const std::string& subcommand, const ExperimentConfig& config, const std::string& out_dir,
                       int threads) {
  const auto it = handlers().find(subcommand);
  if (it == handlers().end()) throw ValidationError("subcommand", "unknown subcommand '" + subcommand + "'");
  validate_config(config);
  fs::create_directories(out_dir);

  const std::string manifest = path_in(out_dir, "manifest.txt");
  const std::string hash = config_hash(config);
  auto kv = read_manifest(manifest);
  for (const auto& [k, v] : kv) {
    if (k == "config_hash" && v != hash) {
      throw ValidationError("config_hash", "output directory '" + out_dir + "' holds results for config hash " + v +
                                               ", this config hashes to " + hash +
                                               "; use a fresh --out directory");
    }
  }

  const auto start = std::chrono::steady_clock::now();
  const Summary summary = it->second(config, out_dir, threads);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::map<std::string, std::string> merged(kv.begin(), kv.end());
  merged["config_hash"] = hash;
  merged["seed"] = std::to_string(config.seed);
  merged["version"] = kVersion;
  merged["csv_schema"] = std::to_string(kCsvSchemaVersion);
  merged["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION);
  const std::string prefix = subcommand + ".";
  for (auto p = merged.begin(); p != merged.end();) {
    p = p->first.rfind(prefix, 0) == 0 ? merged.erase(p) : std::next(p);
  }
  merged[prefix + "wall_seconds"] = format_double(wall);
  merged[prefix + "threads"] = std::to_string(threads);
  for (const auto& [k, v] : summary) merged[prefix + k] = v;
  // Fixed header keys first, then everything else in key order.
  std::vector<std::pair<std::string, std::string>> ordered;
  for (const char* k : {"config_hash", "seed", "version", "csv_schema", "eigen_version"}) {
    ordered.emplace_back(k, merged[k]);
    merged.erase(k);
  }
  ordered.insert(ordered.end(), merged.begin(), merged.end());
  write_manifest(manifest, ordered);
  return summary;
}

int run(const std::string& subcommand, const std::string& config_path, const std::string& out_dir, int cli_threads,
        std::ostream& err) {
  try {
    const ExperimentConfig config = load_config(config_path);
    const int threads = resolve_threads(cli_threads, config);
    const Summary s = run_experiment(subcommand, config, out_dir, threads);
    for (const auto& [k, v] : s) err << subcommand << '.' << k << " = " << v << '\n';
    return 0;
  } catch (const ValidationError& e) {
    err << "error [" << e.key() << "]: " << e.what() << '\n';
    return 2;
  } catch (const NumericGuard& e) {
    err << "numeric guard: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace horocover
