#pragma once

// Experiment orchestration: one entry point per subcommand, each writing its
// CSV tables and merging a summary into <out>/manifest.txt.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "covariance.hpp"

namespace horocover {

inline constexpr const char* kVersion = "0.1.0";
// Bumped whenever a CSV column is added, removed or reinterpreted.
inline constexpr int kCsvSchemaVersion = 1;

using Summary = std::vector<std::pair<std::string, std::string>>;

const std::vector<std::string>& subcommands();

// Explicit flag (> 0) wins, then HOROCOVER_THREADS, then the config.
int resolve_threads(int cli_threads, const ExperimentConfig& config);

// Runs one subcommand. Throws ValidationError / NumericGuard; the summary is
// also merged into the manifest.
Summary run_experiment(const std::string& subcommand, const ExperimentConfig& config,
                       const std::string& out_dir, int threads);

// Full CLI semantics: load, validate, run, map exceptions to exit codes
// (0 ok, 2 validation, 3 numeric guard, 1 anything else). Messages go to err.
int run(const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
        int cli_threads, std::ostream& err);

// Sigma file: CSV with columns i,j,sigma,standard_error,t,samples.
void write_sigma(const std::string& path, const CovarianceMatrix& sigma);
CovarianceMatrix load_sigma(const std::string& path);
std::string sigma_path(const ExperimentConfig& config, const std::string& out_dir);

// Flat key = value manifest.
std::vector<std::pair<std::string, std::string>> read_manifest(const std::string& path);

}  // namespace horocover
