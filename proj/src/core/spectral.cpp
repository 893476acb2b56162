#include "spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "error.hpp"
#include "parallel.hpp"
#include "stats.hpp"

namespace horocover {

namespace {

constexpr double kPi = std::numbers::pi;

CoverPoint random_cover_point(const Cover& cover, RandomStream& rng) {
  return cover.lift(cover.group().volume_random_point(rng));
}

void write_u64_le(std::ofstream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes, sizeof bytes);
}

void write_f64_le(std::ofstream& out, double v) { write_u64_le(out, std::bit_cast<std::uint64_t>(v)); }

}  // namespace

std::vector<DeckVector> sample_windings(const Cover& cover, double t, std::int64_t n,
                                        std::uint64_t seed, StreamPurpose purpose, int threads,
                                        double flow_step) {
  return parallel_map(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    RandomStream rng(seed, stream_id(purpose, i));
    const CoverPoint x = random_cover_point(cover, rng);
    return cover.frobenius_vector(x, t, flow_step).w;
  });
}

SigmaEstimate estimate_sigma(const Cover& cover, const CurvatureModel& /*model*/, double t,
                             std::int64_t n, std::uint64_t seed, int threads, double flow_step) {
  // The winding cocycle lives on the constant-curvature flow; m = normalized
  // volume there.
  if (!(t > 0.0)) throw ValidationError("mc.times", "estimate-sigma needs t > 0");
  if (n < 2) throw ValidationError("mc.samples", "estimate-sigma needs at least two samples");
  const int d = cover.dim();
  const auto F = sample_windings(cover, t, n, seed, StreamPurpose::SigmaSamples, threads, flow_step);

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd mean_sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd mean_sq = Eigen::VectorXd::Zero(d);
  for (const DeckVector& w : F) {
    for (int i = 0; i < d; ++i) {
      const double fi = static_cast<double>(w.v[i]);
      mean_sum[i] += fi;
      mean_sq[i] += fi * fi;
      for (int j = 0; j < d; ++j) {
        const double q = fi * static_cast<double>(w.v[j]) / t;
        sum(i, j) += q;
        sum_sq(i, j) += q * q;
      }
    }
  }
  const double nn = static_cast<double>(n);
  const Eigen::MatrixXd sigma = sum / nn;
  Eigen::MatrixXd se(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double var = std::max(0.0, (sum_sq(i, j) / nn - sigma(i, j) * sigma(i, j))) * nn / (nn - 1.0);
      se(i, j) = std::sqrt(var / nn);
    }
  }

  SigmaEstimate est{CovarianceMatrix(sigma, se, n, t), {}, {}, true, t, n};
  for (int i = 0; i < d; ++i) {
    const double m = mean_sum[i] / nn;
    const double var = std::max(0.0, mean_sq[i] / nn - m * m) * nn / (nn - 1.0);
    const double s = std::sqrt(var / nn);
    est.mean_winding.push_back(m);
    est.mean_stderr.push_back(s);
    if (std::abs(m) > 3.0 * s) est.drift_ok = false;
  }
  return est;
}

CltReport clt_diagnostic(const Cover& cover, const CurvatureModel& /*model*/, double t, std::int64_t n,
                         const CovarianceMatrix& sigma, std::uint64_t seed, int threads,
                         double flow_step) {
  const int d = cover.dim();
  if (sigma.dim() != d) throw ValidationError("sigma.file", "covariance dimension does not match cover.d");
  CltReport report;
  if (!(t > 0.0) || n < 2) {
    report.degenerate = true;
    report.whitened_covariance = Eigen::MatrixXd::Zero(d, d);
    report.ks_statistic.assign(d, 0.0);
    report.ks_p_value.assign(d, 0.0);
    report.covariance_max_deviation = 1.0;
    return report;
  }
  const auto F = sample_windings(cover, t, n, seed, StreamPurpose::CltSamples, threads, flow_step);
  const Eigen::MatrixXd W = sigma.inverse_sqrt();
  const double scale = 1.0 / std::sqrt(t);

  Eigen::MatrixXd Z(d, n);
  for (std::int64_t k = 0; k < n; ++k) {
    RandomStream jitter(seed, stream_id(StreamPurpose::CltJitter, static_cast<std::uint64_t>(k)));
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = static_cast<double>(F[k].v[i]) + jitter.uniform(-0.5, 0.5);
    Z.col(k) = W * v * scale;
  }
  for (int i = 0; i < d; ++i) {
    std::vector<double> coord(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) coord[k] = Z(i, k);
    const KsResult ks = ks_test_normal(std::move(coord));
    report.ks_statistic.push_back(ks.statistic);
    report.ks_p_value.push_back(ks.p_value);
  }
  const Eigen::VectorXd m = Z.rowwise().mean();
  const Eigen::MatrixXd centered = Z.colwise() - m;
  report.whitened_covariance = centered * centered.transpose() / static_cast<double>(n - 1);
  report.covariance_max_deviation =
      (report.whitened_covariance - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  return report;
}

// --- Ulam ---------------------------------------------------------------------

UlamOperator::UlamOperator(const Cover& cover, const CurvatureModel& model, const UlamOptions& options,
                           std::uint64_t seed, int threads)
    : options_(options), dim_(cover.dim()) {
  for (int n : options.cells) {
    if (n < 1) throw ValidationError("ulam.cells", "Ulam cell counts must be positive");
  }
  if (options.samples_per_cell < 1) {
    throw ValidationError("ulam.samples_per_cell", "samples per cell must be positive");
  }
  if (!(options.t > 0.0)) throw ValidationError("ulam.time", "Ulam time must be positive");

  const auto [n1, n2, n3] = options.cells;
  const std::size_t total = static_cast<std::size_t>(n1) * n2 * n3;
  const double R = OctagonGroup::disk_vertex_radius();
  const double dx = 2.0 * R / n1;
  const double dy = 2.0 * R / n2;
  const double dth = 2.0 * kPi / n3;
  const OctagonGroup& group = cover.group();

  rows_ = parallel_map(total, threads, [&](std::size_t cell) {
    const int ix = static_cast<int>(cell / (static_cast<std::size_t>(n2) * n3));
    const int iy = static_cast<int>((cell / n3) % n2);
    const int ith = static_cast<int>(cell % n3);
    RandomStream rng(seed, stream_id(StreamPurpose::UlamCells, cell));
    std::vector<Entry> entries;
    std::vector<double> density;
    const int max_tries = 16 * options.samples_per_cell;
    for (int tries = 0; tries < max_tries && static_cast<int>(entries.size()) < options.samples_per_cell;
         ++tries) {
      const Complex w{-R + dx * (ix + rng.uniform()), -R + dy * (iy + rng.uniform())};
      const double theta = dth * (ith + rng.uniform());
      if (!(std::norm(w) < 1.0) || !group.contains(from_disk(w))) continue;
      const CoverPoint x = cover.lift(frame_from_disk(w, theta));
      const FlowResult back = cover.flow_with_winding(x, -options.t, options.flow_step);
      const double jac =
          model.is_constant() ? std::exp(options.t) : jacobi_at(model, x.base, -options.t);
      const double rho = 1.0 - std::norm(w);
      density.push_back(4.0 / (rho * rho));
      entries.push_back({cell_of(back.point.base), jac, back.winding.w});
    }
    double total_density = 0.0;
    for (double v : density) total_density += v;
    for (std::size_t k = 0; k < entries.size(); ++k) entries[k].weight *= density[k] / total_density;
    return entries;
  });
}

std::size_t UlamOperator::active_cells() const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(), [](const auto& r) { return !r.empty(); }));
}

std::size_t UlamOperator::sample_count() const {
  std::size_t s = 0;
  for (const auto& r : rows_) s += r.size();
  return s;
}

int UlamOperator::cell_of(const Isometry& reduced_base) const {
  const auto [n1, n2, n3] = options_.cells;
  const double R = OctagonGroup::disk_vertex_radius();
  const Complex w = reduced_base.disk_point();
  auto bin = [](double u, int n) { return std::clamp(static_cast<int>(std::floor(u * n)), 0, n - 1); };
  const int ix = bin((w.real() + R) / (2.0 * R), n1);
  const int iy = bin((w.imag() + R) / (2.0 * R), n2);
  const int ith = bin(reduced_base.fiber_angle() / (2.0 * kPi), n3);
  return (ix * n2 + iy) * n3 + ith;
}

void UlamOperator::apply(const Twist& omega, const std::vector<std::complex<double>>& v,
                         std::vector<std::complex<double>>& out) const {
  out.assign(rows_.size(), 0.0);
  const bool untwisted = omega.norm() == 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    std::complex<double> s = 0.0;
    for (const Entry& e : rows_[i]) {
      // G = E_omega(deck(x) - deck(g_{-t} x)).
      const std::complex<double> g = untwisted ? 1.0 : deck_character(omega, -e.winding);
      s += e.weight * g * v[static_cast<std::size_t>(e.target)];
    }
    out[i] = s;
  }
}

UlamEigen UlamOperator::leading_eigenvalue(const Twist& omega) const {
  using Cx = std::complex<double>;
  const auto n = static_cast<Eigen::Index>(rows_.size());
  // Phases are fixed per entry; precompute them once.
  std::vector<std::vector<Cx>> coeff(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    coeff[i].reserve(rows_[i].size());
    for (const Entry& e : rows_[i]) coeff[i].push_back(e.weight * deck_character(omega, -e.winding));
  }
  const Eigen::Index active = static_cast<Eigen::Index>(active_cells());
  if (active == 0) throw NumericGuard(GuardKind::Precondition, "Ulam operator has no active cells");

  // Block power iteration with Rayleigh-Ritz extraction. A single vector
  // cannot settle when the dominant eigenvalues share a modulus (at omega
  // with real characters they come as a conjugate pair).
  const Eigen::Index k = std::min<Eigen::Index>(kBlockSize, active);
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (rows_[static_cast<std::size_t>(i)].empty()) continue;
    for (Eigen::Index j = 0; j < k; ++j) {
      Q(i, j) = j == 0 ? Cx(1.0) : Cx(std::cos(1.7 * static_cast<double>(j) * static_cast<double>(i) + 0.3 * j));
    }
  }
  auto orthonormalize = [&](const Eigen::MatrixXcd& M) -> Eigen::MatrixXcd {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(M);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, k);
  };
  Q = orthonormalize(Q);
  Eigen::MatrixXcd Z(n, k);

  UlamEigen out;
  Cx prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= options_.max_iterations; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows_[static_cast<std::size_t>(i)];
      const auto& c = coeff[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < k; ++j) {
        Cx s = 0.0;
        for (std::size_t e = 0; e < row.size(); ++e) s += c[e] * Q(row[e].target, j);
        Z(i, j) = s;
      }
    }
    const Eigen::MatrixXcd H = Q.adjoint() * Z;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(H, false);
    std::vector<Cx> ritz(solver.eigenvalues().data(), solver.eigenvalues().data() + k);
    // Largest modulus first; near-ties resolved by the larger imaginary part
    // so the choice is stable between iterations.
    std::sort(ritz.begin(), ritz.end(), [](const Cx& a, const Cx& b) {
      const double scale = std::max(std::abs(a), std::abs(b));
      if (std::abs(std::abs(a) - std::abs(b)) > 1e-10 * scale) return std::abs(a) > std::abs(b);
      return a.imag() > b.imag();
    });
    const Cx lambda = ritz.front();
    out.subdominant_ratio = k > 1 && std::abs(lambda) > 0.0 ? std::abs(ritz[1]) / std::abs(lambda) : 0.0;
    if (std::abs(lambda) == 0.0) {
      out.lambda = 0.0;
      out.iterations = it;
      return out;
    }
    if (it > 1 && std::abs(lambda - prev) <= options_.tolerance * std::abs(lambda)) {
      out.lambda = lambda;
      out.iterations = it;
      return out;
    }
    prev = lambda;
    Q = orthonormalize(Z);
  }
  throw NumericGuard(GuardKind::PowerIterationStall,
                     "power iteration did not reach relative change 1e-8 within " +
                         std::to_string(options_.max_iterations) + " iterations");
}

Eigen::MatrixXcd UlamOperator::dense(const Twist& omega) const {
  const auto n = static_cast<Eigen::Index>(rows_.size());
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const Entry& e : rows_[static_cast<std::size_t>(i)]) {
      A(i, e.target) += e.weight * deck_character(omega, -e.winding);
    }
  }
  return A;
}

void UlamOperator::dump(const Twist& omega, const std::string& path) const {
  if (rows_.size() > kMaxDumpCells) {
    throw ValidationError("ulam.dump", "refusing to dump a dense Ulam matrix with more than " +
                                           std::to_string(kMaxDumpCells) + " cells");
  }
  const Eigen::MatrixXcd A = dense(omega);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("ulam.dump", "cannot open " + path + " for writing");
  write_u64_le(out, static_cast<std::uint64_t>(A.rows()));
  write_u64_le(out, static_cast<std::uint64_t>(A.cols()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      write_f64_le(out, A(i, j).real());
      write_f64_le(out, A(i, j).imag());
    }
  }
  if (!out) throw ValidationError("ulam.dump", "failed writing " + path);
}

std::vector<Twist> omega_grid(int d, double max, double step) {
  if (!(step > 0.0) || !(max >= 0.0)) throw ValidationError("ulam.omega_step", "omega grid needs step > 0");
  const int k = static_cast<int>(std::floor(max / step + 1e-9));
  const int side = 2 * k + 1;
  std::int64_t total = 1;
  for (int i = 0; i < d; ++i) total *= side;
  std::vector<Twist> out;
  out.reserve(static_cast<std::size_t>(total));
  for (std::int64_t idx = 0; idx < total; ++idx) {
    Twist w = Twist::zero(d);
    std::int64_t rest = idx;
    for (int i = 0; i < d; ++i) {
      w.w[i] = static_cast<double>(rest % side - k) * step;
      rest /= side;
    }
    out.push_back(w);
  }
  return out;
}

UlamSpectrum ulam_spectrum(const UlamOperator& op, const CurvatureModel& model,
                           const std::vector<Twist>& omegas, double fit_radius) {
  const double h = model.h_top();
  if (!std::isfinite(h)) {
    throw NumericGuard(GuardKind::Precondition, "h_top is unknown for this curvature sampler; estimate it first");
  }
  const int d = op.dim();
  UlamSpectrum out;
  const double t = op.t();
  std::complex<double> lambda0 = std::numeric_limits<double>::quiet_NaN();
  for (const Twist& w : omegas) {
    UlamPoint p{w, op.leading_eigenvalue(w), 0.0};
    p.lambda_hat_abs = std::abs(p.eigen.lambda) * std::exp(-h * t);
    if (w.norm() == 0.0) lambda0 = p.eigen.lambda;
    out.points.push_back(p);
  }
  if (std::isnan(lambda0.real())) lambda0 = op.leading_eigenvalue(Twist::zero(d)).lambda;
  out.lambda_hat_zero = std::abs(lambda0) * std::exp(-h * t);
  for (const UlamPoint& p : out.points) {
    if (p.omega.norm() >= 0.1 - 1e-12) out.max_hat_nonzero = std::max(out.max_hat_nonzero, p.lambda_hat_abs);
  }

  // Least squares for the symmetric Q in -log(|lambda| / |lambda_0|) / t = omega.Q omega.
  const int unknowns = d * (d + 1) / 2;
  std::vector<Eigen::VectorXd> features;
  std::vector<double> targets;
  for (const UlamPoint& p : out.points) {
    const double r = p.omega.norm();
    if (r == 0.0 || r > fit_radius + 1e-12) continue;
    Eigen::VectorXd f(unknowns);
    int k = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) f[k++] = (i == j ? 1.0 : 2.0) * p.omega.w[i] * p.omega.w[j];
    }
    features.push_back(f);
    targets.push_back(-std::log(std::abs(p.eigen.lambda) / std::abs(lambda0)) / t);
  }
  out.fit_points = static_cast<int>(features.size());
  if (out.fit_points < unknowns) {
    throw NumericGuard(GuardKind::DegenerateFit, "too few omega points inside the fit radius");
  }
  Eigen::MatrixXd A(out.fit_points, unknowns);
  Eigen::VectorXd b(out.fit_points);
  for (int r = 0; r < out.fit_points; ++r) {
    A.row(r) = features[r].transpose();
    b[r] = targets[r];
  }
  const Eigen::VectorXd q = A.colPivHouseholderQr().solve(b);
  out.quadratic = Eigen::MatrixXd::Zero(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      out.quadratic(i, j) = q[k];
      out.quadratic(j, i) = q[k];
      ++k;
    }
  }
  return out;
}

double quadratic_mismatch(const Eigen::MatrixXd& Q, const CovarianceMatrix& sigma) {
  const Eigen::MatrixXd target = 2.0 * kPi * kPi * sigma.matrix();
  return (Q - target).norm() / target.norm();
}

HtopEstimate estimate_htop(const CurvatureModel& model, double t, std::int64_t n, std::uint64_t seed,
                           int threads) {
  if (!(t > 0.0) || n < 2) throw ValidationError("mc.samples", "h_top estimate needs t > 0 and n >= 2");
  const Cover cover(default_group(), AbelianizationMap({Homology{1, 0, 0, 0}}));
  const auto rates = parallel_map(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    RandomStream rng(seed, stream_id(StreamPurpose::HtopSamples, i));
    const CoverPoint x = cover.lift(default_group().volume_random_point(rng));
    TauOptions opt;
    opt.estimate_error = false;
    return -std::log(tau(model, x, 1.0, t, opt).tau) / t;
  });
  HtopEstimate e;
  e.value = mean(rates);
  e.standard_error = stddev(rates) / std::sqrt(static_cast<double>(n));
  e.samples = n;
  return e;
}

}  // namespace horocover
