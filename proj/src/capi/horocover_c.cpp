#include "horocover/horocover.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <sstream>
#include <string>

#include "config.hpp"
#include "cover.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "jacobi.hpp"
#include "rng.hpp"

struct hc_config {
  horocover::ExperimentConfig value;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_key;
thread_local std::string g_summary;

hc_status fail(hc_status status, std::string message, std::string key = {}) {
  g_error = std::move(message);
  g_error_key = std::move(key);
  return status;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
hc_status guarded(Fn&& fn) {
  try {
    g_error.clear();
    g_error_key.clear();
    fn();
    return HC_OK;
  } catch (const horocover::ValidationError& e) {
    return fail(HC_ERROR_VALIDATION, e.what(), e.key());
  } catch (const horocover::NumericGuard& e) {
    return fail(HC_ERROR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(HC_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(HC_ERROR_INTERNAL, "unknown error");
  }
}

hc_status make_config(hc_config** out, horocover::ExperimentConfig&& c) {
  *out = new hc_config{std::move(c)};
  return HC_OK;
}

}  // namespace

extern "C" {

const char* hc_version(void) { return horocover::kVersion; }
const char* hc_last_error(void) { return g_error.c_str(); }
const char* hc_last_error_key(void) { return g_error_key.c_str(); }
const char* hc_last_summary(void) { return g_summary.c_str(); }

hc_status hc_config_default(uint64_t seed, hc_config** out) {
  if (out == nullptr) return fail(HC_ERROR_ARGUMENT, "out is null");
  return guarded([&] { make_config(out, horocover::default_config(seed)); });
}

hc_status hc_config_parse(const char* text, hc_config** out) {
  if (text == nullptr || out == nullptr) return fail(HC_ERROR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { make_config(out, horocover::parse_config(text)); });
}

hc_status hc_config_load(const char* path, hc_config** out) {
  if (path == nullptr || out == nullptr) return fail(HC_ERROR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { make_config(out, horocover::load_config(path)); });
}

void hc_config_free(hc_config* config) { delete config; }

uint64_t hc_config_seed(const hc_config* config) { return config ? config->value.seed : 0; }

hc_status hc_config_serialize(const hc_config* config, char* buffer, size_t cap, size_t* needed) {
  if (config == nullptr) return fail(HC_ERROR_ARGUMENT, "config is null");
  return guarded([&] {
    const std::string text = horocover::serialize_config(config->value);
    if (needed) *needed = text.size();
    if (buffer && cap > 0) {
      const size_t n = std::min(cap - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

hc_status hc_config_hash(const hc_config* config, char out[17]) {
  if (config == nullptr || out == nullptr) return fail(HC_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string h = horocover::config_hash(config->value);
    std::memcpy(out, h.c_str(), 17);
  });
}

size_t hc_subcommand_count(void) { return horocover::subcommands().size(); }

const char* hc_subcommand_name(size_t index) {
  const auto& names = horocover::subcommands();
  return index < names.size() ? names[index].c_str() : nullptr;
}

hc_status hc_resolve_threads(const hc_config* config, int cli_threads, int* out) {
  if (config == nullptr || out == nullptr) return fail(HC_ERROR_ARGUMENT, "null argument");
  return guarded([&] { *out = horocover::resolve_threads(cli_threads, config->value); });
}

hc_status hc_run(const hc_config* config, const char* subcommand, const char* out_dir, int threads) {
  if (config == nullptr || subcommand == nullptr || out_dir == nullptr) {
    return fail(HC_ERROR_ARGUMENT, "null argument");
  }
  if (threads < 1) return fail(HC_ERROR_ARGUMENT, "threads must be positive");
  g_summary.clear();
  return guarded([&] {
    const horocover::Summary s = horocover::run_experiment(subcommand, config->value, out_dir, threads);
    std::ostringstream text;
    for (const auto& [k, v] : s) text << k << " = " << v << '\n';
    g_summary = text.str();
  });
}

hc_status hc_stream_u64(uint64_t seed, uint64_t stream_id, uint64_t* out, size_t n) {
  if (out == nullptr && n > 0) return fail(HC_ERROR_ARGUMENT, "out is null");
  return guarded([&] {
    horocover::RandomStream rng = horocover::seed_streams(seed, stream_id);
    for (size_t i = 0; i < n; ++i) out[i] = rng.next_u64();
  });
}

hc_status hc_relation_residual(double* out) {
  if (out == nullptr) return fail(HC_ERROR_ARGUMENT, "out is null");
  return guarded([&] { *out = horocover::default_group().relation_residual(); });
}

hc_status hc_jacobi_sinusoidal(double mean, double amplitude, double frequency, double phase, double t, double* out) {
  if (out == nullptr) return fail(HC_ERROR_ARGUMENT, "out is null");
  return guarded([&] {
    const auto model = horocover::CurvatureModel::sinusoidal(mean, amplitude, frequency);
    *out = horocover::jacobi_field(model, {mean, amplitude, frequency, phase}, t);
  });
}

hc_status hc_tau_constant(double s, double t, double* out) {
  if (out == nullptr) return fail(HC_ERROR_ARGUMENT, "out is null");
  return guarded([&] {
    const horocover::Cover cover(horocover::default_group(),
                                 horocover::AbelianizationMap({horocover::Homology{1, 0, 0, 0}}));
    *out = horocover::tau_quadrature(horocover::CurvatureModel::constant(), cover.lift(horocover::Isometry::identity()),
                                     s, t)
               .tau;
  });
}

hc_status hc_winding(const hc_config* config, double wx, double wy, double theta, double t, int64_t* out) {
  if (config == nullptr || out == nullptr) return fail(HC_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    if (wx * wx + wy * wy >= 1.0) throw horocover::ValidationError("point", "disk point must satisfy |w| < 1");
    const horocover::Cover cover = horocover::make_cover(config->value);
    const auto x = cover.lift(horocover::frame_from_disk({wx, wy}, theta));
    const auto r = cover.flow_with_winding(x, t);
    for (int i = 0; i < cover.dim(); ++i) out[i] = r.winding.w[i];
  });
}

}  // extern "C"
