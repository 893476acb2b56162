// Command-line front end; talks to the library only through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "horocover/horocover.h"

int main(int argc, char** argv) {
  CLI::App app{"Geodesic and horocycle flow experiments on Z^d covers of a genus-two surface"};
  app.set_version_flag("--version", std::string(hc_version()));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = "results";
  int threads = 0;
  for (std::size_t i = 0; i < hc_subcommand_count(); ++i) {
    CLI::App* sub = app.add_subcommand(hc_subcommand_name(i));
    sub->add_option("--config", config_path, "Configuration file (key = value)")->required();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (overrides HOROCOVER_THREADS and the config)")
        ->check(CLI::Range(1, 1024));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : HC_ERROR_VALIDATION;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  hc_config* config = nullptr;
  hc_status st = hc_config_load(config_path.c_str(), &config);
  int resolved = 0;
  if (st == HC_OK) st = hc_resolve_threads(config, threads, &resolved);
  if (st == HC_OK) st = hc_run(config, subcommand.c_str(), out_dir.c_str(), resolved);
  hc_config_free(config);

  if (st != HC_OK) {
    const std::string key = hc_last_error_key();
    if (st == HC_ERROR_VALIDATION && !key.empty()) {
      std::fprintf(stderr, "error [%s]: %s\n", key.c_str(), hc_last_error());
    } else if (st == HC_ERROR_NUMERIC) {
      std::fprintf(stderr, "numeric guard: %s\n", hc_last_error());
    } else {
      std::fprintf(stderr, "error: %s\n", hc_last_error());
    }
    return static_cast<int>(st);
  }
  std::fputs(hc_last_summary(), stdout);
  return 0;
}
