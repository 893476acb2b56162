#pragma once

// Flat `key = value` experiment configuration with `#` comments.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cover.hpp"
#include "jacobi.hpp"
#include "observable.hpp"

namespace horocover {

struct ObservableConfig {
  std::array<double, 2> center{0.0, 0.0};  // disk model
  double radius = 0.6;
  double angle = 0.0;
  double angle_halfwidth = 3.141592653589793;
  // Deck copies and coefficients, "D_1 .. D_d : c" separated by ';'.
  std::vector<std::pair<std::vector<std::int64_t>, double>> copies;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  int threads = 1;

  int cover_d = 1;
  std::vector<std::array<std::int64_t, 4>> projection;

  std::string curvature_model = "constant";
  double curvature_mean = 1.5;
  double curvature_amplitude = 0.5;
  double curvature_frequency = 1.0;
  double curvature_h_top = 0.0;  // 0 = unknown (sampler)

  ObservableConfig observable;
  ObservableConfig observable2;

  std::string sigma_file;  // empty: <out>/sigma.csv

  std::vector<double> schedule_T;
  std::vector<double> schedule_t;
  int schedule_x_count = 5;

  double numeric_step = 0.05;
  double numeric_flow_step = 1.0;

  std::int64_t mc_samples = 10000;
  std::vector<double> mc_times{20.0, 40.0};

  std::int64_t clt_samples = 10000;
  double clt_time = 40.0;
  int clt_seeds = 5;

  std::array<int, 3> ulam_cells{24, 24, 24};
  int ulam_samples_per_cell = 32;
  double ulam_time = 2.0;
  double ulam_omega_max = 0.5;
  double ulam_omega_step = 0.05;
  double ulam_fit_radius = 0.2;
  std::string ulam_dump;

  double theorem_b_sigma_len = 1.0;

  std::vector<double> tau_s{0.5, 1.0, 2.0};
  std::vector<double> tau_t{-2.0, -1.0, 0.0, 1.0, 2.0};
  double tau_step = 0.05;
  int tau_points = 4;

  double winding_time = 100.0;
  double winding_step = 1.0;

  int reconstruct_grid = 0;  // 0: smallest exact grid
  int reconstruct_points = 16;
  bool reconstruct_allow_aliasing = false;

  int geometry_samples = 1000;
  std::int64_t geometry_drift_steps = 1000000;
};

ExperimentConfig default_config(std::uint64_t seed);

// Throws ValidationError naming the offending key for unknown keys, missing
// `seed`, malformed values and out-of-range knobs.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Canonical text; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ExperimentConfig& config);
void validate_config(const ExperimentConfig& config);

// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

Cover make_cover(const ExperimentConfig& config);
CurvatureModel make_model(const ExperimentConfig& config);
CoverObservable make_observable(const ExperimentConfig& config, int which = 0);

}  // namespace horocover
