// Acceptance suite: one PASS/FAIL line per criterion. Each criterion runs the
// experiment end to end in its own work directory at full size.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "harness.hpp"
#include "jacobi.hpp"
#include "rng.hpp"
#include "shooting.hpp"

namespace fs = std::filesystem;
using namespace horocover;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  double limit_seconds = 0.0;  // 0: no runtime bound

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double num(const Summary& s, const std::string& key) {
  for (const auto& [k, v] : s) {
    if (k == key) return std::strtod(v.c_str(), nullptr);
  }
  throw std::runtime_error("summary has no key '" + key + "'");
}

bool flag(const Summary& s, const std::string& key) {
  for (const auto& [k, v] : s) {
    if (k == key) return v == "true";
  }
  throw std::runtime_error("summary has no key '" + key + "'");
}

fs::path fresh_dir(const fs::path& root, const std::string& name) {
  const fs::path p = root / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Summary run(const std::string& sub, const std::string& cfg_text, const fs::path& dir, int threads) {
  return run_experiment(sub, parse_config(cfg_text), dir.string(), threads);
}

Outcome geometry(const fs::path& root, std::uint64_t seed, int threads) {
  Outcome o{.limit_seconds = 60};
  const Summary s = run("validate-geometry", "seed = " + std::to_string(seed) + "\n",
                        fresh_dir(root, "c1"), threads);
  o.check(num(s, "relation_residual") <= 1e-8, "relation " + fmt(num(s, "relation_residual")) + " <= 1e-8");
  o.check(num(s, "commutation_samples") >= 1000 && num(s, "flow_deck_commutation") <= 1e-12,
          "commutation " + fmt(num(s, "flow_deck_commutation")) + " <= 1e-12 on 1e3 triples");
  o.check(num(s, "drift_steps") >= 1e6 && num(s, "determinant_drift") <= 1e-8,
          "drift " + fmt(num(s, "determinant_drift")) + " <= 1e-8 over 1e6 steps");
  return o;
}

Outcome renormalization(const fs::path& root, std::uint64_t seed, int threads) {
  Outcome o{.limit_seconds = 60};
  const Summary s = run("tau-tables", "seed = " + std::to_string(seed) + "\n", fresh_dir(root, "c2"), threads);
  o.check(num(s, "max_closed_form_residual") <= 1e-10,
          "tau closed form and quadrature " + fmt(num(s, "max_closed_form_residual")) + " <= 1e-10");
  o.check(num(s, "max_cocycle_residual") <= 1e-8, "cocycle " + fmt(num(s, "max_cocycle_residual")) + " <= 1e-8");
  o.check(num(s, "max_inverse_residual") <= 1e-10,
          "J_t J_-t(g_t) - 1 " + fmt(num(s, "max_inverse_residual")) + " <= 1e-10");
  return o;
}

Outcome jacobi_bounds(std::uint64_t seed) {
  Outcome o{.limit_seconds = 300};
  constexpr int kSamplers = 10000;
  constexpr int kOracleSamplers = 500;
  constexpr int kGrid = 400;
  constexpr double kTmax = 10.0;
  double worst_low = 0.0, worst_high = 0.0, worst_oracle = 0.0;
  for (int k = 0; k < kSamplers; ++k) {
    RandomStream rng(seed, k);
    double lo = rng.uniform(1.0, 4.0), hi = rng.uniform(1.0, 4.0);
    if (lo > hi) std::swap(lo, hi);
    const double mean = 0.5 * (lo + hi);
    const double amp = (rng.uniform() < 0.5 ? -0.5 : 0.5) * (hi - lo);
    const double freq = rng.uniform(0.1, 5.0);
    const double phase = rng.uniform(0.0, 2.0 * 3.141592653589793);
    const CurvatureModel model = CurvatureModel::sinusoidal(mean, amp, freq);
    const OrbitCurvature orbit{mean, amp, freq, phase};
    const std::vector<double> J = jacobi_profile(model, orbit, kTmax, kGrid);
    for (int i = 0; i <= kGrid; ++i) {
      const double t = kTmax * i / kGrid;
      // Relative violation of e^{-2t} <= J <= e^{-t}.
      worst_low = std::max(worst_low, std::exp(-2.0 * t) / J[i] - 1.0);
      worst_high = std::max(worst_high, J[i] / std::exp(-t) - 1.0);
    }
    if (k < kOracleSamplers) {
      const oracle::Curvature K = [&](long double u) {
        return -(static_cast<long double>(mean) +
                 static_cast<long double>(amp) * std::sin(static_cast<long double>(freq) * u + phase));
      };
      for (int q = 1; q <= 4; ++q) {
        const int i = q * kGrid / 4;
        const long double ref = oracle::stable_jacobi(K, 2.5L * q);
        worst_oracle = std::max(worst_oracle, static_cast<double>(std::abs((J[i] - ref) / ref)));
      }
    }
  }
  o.check(worst_low <= 0.01, "lower bound violation " + fmt(worst_low) + " <= 1%");
  o.check(worst_high <= 0.01, "upper bound violation " + fmt(worst_high) + " <= 1%");
  o.check(worst_oracle <= 1e-4, "shooting oracle relative " + fmt(worst_oracle) + " <= 1e-4");
  return o;
}

Outcome twist(const fs::path& root, std::uint64_t seed, int threads) {
  Outcome o{.limit_seconds = 60};
  const std::string base = "seed = " + std::to_string(seed) + "\n";
  for (const char* extra : {"", "cover.d = 2\nobservable.copies = 0 0:1; 1 0:-0.5; 0 -1:0.25\n"}) {
    const std::string cfg = base + extra;
    const bool d2 = *extra != '\0';
    const Summary s = run("reconstruct-check", cfg, fresh_dir(root, d2 ? "c4_d2" : "c4_d1"), threads);
    const std::string tag = d2 ? "d=2 " : "d=1 ";
    o.check(num(s, "points_in_support") > 0 && num(s, "max_reconstruction_error") <= 1e-12,
            tag + "reconstruction " + fmt(num(s, "max_reconstruction_error")) + " <= 1e-12");
    o.check(num(s, "max_equivariance_defect") <= 1e-10,
            tag + "equivariance " + fmt(num(s, "max_equivariance_defect")) + " <= 1e-10");
    o.check(num(s, "max_conjugation_defect") <= 1e-10,
            tag + "conjugation " + fmt(num(s, "max_conjugation_defect")) + " <= 1e-10");
    o.check(num(s, "max_semigroup_defect") <= 1e-9,
            tag + "semigroup " + fmt(num(s, "max_semigroup_defect")) + " <= 1e-9");
  }
  return o;
}

Outcome covariance(const fs::path& root, std::uint64_t seed, int threads) {
  Outcome o{.limit_seconds = 600};
  for (int d : {1, 2}) {
    const std::string cfg = "seed = " + std::to_string(seed) + "\ncover.d = " + std::to_string(d) + "\n";
    const fs::path dir = fresh_dir(root, "c5_d" + std::to_string(d));
    const Summary s = run("estimate-sigma", cfg, dir, threads);
    const Summary c = run("clt-test", cfg, dir, threads);
    const std::string tag = "d=" + std::to_string(d) + " ";
    o.check(num(s, "max_relative_change") <= 0.1,
            tag + "sigma t=20 vs t=40 " + fmt(num(s, "max_relative_change")) + " <= 0.1");
    o.check(num(c, "seeds_passing_ks") >= 4, tag + "KS seeds " + fmt(num(c, "seeds_passing_ks")) + "/5 >= 4");
    o.check(num(c, "max_covariance_deviation") <= 0.1,
            tag + "whitened covariance " + fmt(num(c, "max_covariance_deviation")) + " <= 0.1");
  }
  return o;
}

Outcome ulam(const fs::path& root, std::uint64_t seed, int threads) {
  Outcome o{.limit_seconds = 1800};
  const std::string cfg = "seed = " + std::to_string(seed) + "\n";
  const fs::path dir = fresh_dir(root, "c6");
  run("estimate-sigma", cfg, dir, threads);
  const Summary s = run("ulam-spectrum", cfg, dir, threads);
  const double l0 = num(s, "lambda_hat_zero");
  o.check(l0 >= 0.9 && l0 <= 1.1, "lambda_hat(0) " + fmt(l0) + " in [0.9, 1.1]");
  o.check(flag(s, "strict_ordering") && num(s, "max_hat_band") < l0,
          "max |lambda_hat| on 0.1 <= |omega| <= 0.5 " + fmt(num(s, "max_hat_band")) + " < lambda_hat(0)");
  o.check(num(s, "quadratic_mismatch") <= 0.25,
          "quadratic vs 2 pi^2 Sigma " + fmt(num(s, "quadratic_mismatch")) + " <= 0.25");
  return o;
}

Outcome theorem_c(const fs::path& root, std::uint64_t seed, int threads) {
  Outcome o{.limit_seconds = 1200};
  const Summary s = run("theorem-c", "seed = " + std::to_string(seed) + "\n", fresh_dir(root, "c7"), threads);
  const double a = num(s, "exponent_a");
  o.check(a > 0.0 && a < 1.0, "exponent a " + fmt(a) + " in (0, 1)");
  o.check(num(s, "r2") >= 0.9, "R^2 " + fmt(num(s, "r2")) + " >= 0.9");
  o.check(num(s, "decades_compared") >= 1 && flag(s, "monotone_decades"), "median deviation decreases per decade");
  return o;
}

Outcome theorem_a(const fs::path& root, std::uint64_t seed, int threads) {
  Outcome o{.limit_seconds = 1800};
  const std::string cfg = "seed = " + std::to_string(seed) + "\n";
  const fs::path dir = fresh_dir(root, "c8");
  run("estimate-sigma", cfg, dir, threads);
  const Summary s = run("theorem-a", cfg, dir, threads);
  const double lo = num(s, "ratio_min_T_ge_1e3"), hi = num(s, "ratio_max_T_ge_1e3");
  o.check(lo >= 0.3 && hi <= 3.0, "ratio for T >= 1e3 in [" + fmt(lo) + ", " + fmt(hi) + "] within [0.3, 3]");
  const double rho = num(s, "median_residual_spearman");
  o.check(rho <= 0.0, "envelope-normalized residual Spearman " + fmt(rho) + " <= 0");
  return o;
}

Outcome theorem_b(const fs::path& root, std::uint64_t seed, int threads) {
  Outcome o{.limit_seconds = 1200};
  const std::string cfg = "seed = " + std::to_string(seed) + "\n";
  const fs::path dir = fresh_dir(root, "c9");
  run("estimate-sigma", cfg, dir, threads);
  const Summary s = run("theorem-b", cfg, dir, threads);
  const double r = num(s, "max_ratio_to_first");
  o.check(std::isfinite(r) && r <= 3.0, "median scaled residual over its t=6 value " + fmt(r) + " <= 3");
  return o;
}

std::map<std::string, std::string> csv_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

// Every subcommand at reduced size, once per worker count; CSV bytes compared.
Outcome reproducibility(const fs::path& root, std::uint64_t seed) {
  Outcome o;
  const std::string reduced =
      "seed = " + std::to_string(seed) +
      "\n"
      "geometry.samples = 200\ngeometry.drift_steps = 20000\n"
      "tau.points = 2\nwinding.time = 30\n"
      "mc.samples = 600\nmc.times = 10 20\n"
      "clt.samples = 600\nclt.time = 20\nclt.seeds = 2\n"
      "ulam.cells = 10 10 8\nulam.samples_per_cell = 8\nulam.omega_step = 0.1\n"
      "schedule.T = 100 316.22776601683796 1000\nschedule.t = 6 8\nschedule.x_count = 3\n"
      "reconstruct.points = 6\n";
  for (int d : {1, 2}) {
    const std::string cfg = reduced + "cover.d = " + std::to_string(d) + "\n";
    std::map<int, std::map<std::string, std::string>> runs;
    for (int workers : {1, 8}) {
      const fs::path dir = fresh_dir(root, "c10_d" + std::to_string(d) + "_w" + std::to_string(workers));
      for (const std::string& sub : subcommands()) {
        // Theorem C lives on the compact quotient; one run covers it.
        if (d == 2 && sub == "theorem-c") continue;
        run(sub, cfg, dir, workers);
      }
      runs[workers] = csv_contents(dir);
    }
    int differing = 0;
    for (const auto& [name, bytes] : runs[1]) {
      const auto it = runs[8].find(name);
      if (it == runs[8].end() || it->second != bytes) ++differing;
    }
    differing += runs[1].size() == runs[8].size() ? 0 : 1;
    o.check(differing == 0 && !runs[1].empty(), "d=" + std::to_string(d) + ": " + std::to_string(runs[1].size()) +
                                                    " CSV files, " + std::to_string(differing) +
                                                    " differ between 1 and 8 workers");
  }
  // Same seed, same worker count, fresh directory: identical bytes again.
  const fs::path again = fresh_dir(root, "c10_repeat");
  const std::string cfg = reduced + "cover.d = 1\n";
  for (const std::string& sub : subcommands()) run(sub, cfg, again, 1);
  o.check(csv_contents(again) == csv_contents(root / "c10_d1_w1"), "repeat run byte-identical");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int criterion = 0;
  std::string work = "acceptance_work";
  std::uint64_t seed = 1;
  int threads = 1;
  app.add_option("--criterion", criterion, "Criterion number")->required()->check(CLI::Range(1, 10));
  app.add_option("--work", work, "Scratch directory")->capture_default_str();
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 1024));
  CLI11_PARSE(app, argc, argv);

  const fs::path root(work);
  const std::map<int, std::function<Outcome()>> criteria{
      {1, [&] { return geometry(root, seed, threads); }},
      {2, [&] { return renormalization(root, seed, threads); }},
      {3, [&] { return jacobi_bounds(seed); }},
      {4, [&] { return twist(root, seed, threads); }},
      {5, [&] { return covariance(root, seed, threads); }},
      {6, [&] { return ulam(root, seed, threads); }},
      {7, [&] { return theorem_c(root, seed, threads); }},
      {8, [&] { return theorem_a(root, seed, threads); }},
      {9, [&] { return theorem_b(root, seed, threads); }},
      {10, [&] { return reproducibility(root, seed); }},
  };

  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = criteria.at(criterion)();
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.limit_seconds > 0.0) o.check(wall < o.limit_seconds, "runtime " + fmt(wall) + " s < " + fmt(o.limit_seconds) + " s");
  std::printf("criterion %d: %s  %s\n", criterion, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  return o.pass ? 0 : 1;
}
