/* Horocycle and geodesic flows on Z^d covers of a genus-two surface.
 *
 * Plain C interface over the simulation core. Objects are opaque handles;
 * every fallible call returns an hc_status and leaves a message retrievable
 * with hc_last_error() on the calling thread. */
#ifndef HOROCOVER_H
#define HOROCOVER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HOROCOVER_BUILDING_LIBRARY)
#    define HC_API __declspec(dllexport)
#  else
#    define HC_API __declspec(dllimport)
#  endif
#else
#  define HC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes. */
typedef enum hc_status {
  HC_OK = 0,
  HC_ERROR_INTERNAL = 1,
  HC_ERROR_VALIDATION = 2,
  HC_ERROR_NUMERIC = 3,
  HC_ERROR_ARGUMENT = 4
} hc_status;

typedef struct hc_config hc_config;

HC_API const char* hc_version(void);
/* Message of the last failed call on this thread; "" if none. */
HC_API const char* hc_last_error(void);
/* Configuration key involved in the last validation failure; "" if none. */
HC_API const char* hc_last_error_key(void);

HC_API hc_status hc_config_default(uint64_t seed, hc_config** out);
HC_API hc_status hc_config_parse(const char* text, hc_config** out);
HC_API hc_status hc_config_load(const char* path, hc_config** out);
HC_API void hc_config_free(hc_config* config);
HC_API uint64_t hc_config_seed(const hc_config* config);
/* Canonical text. Writes at most cap bytes including the terminator and
 * stores the full length (without terminator) in *needed. */
HC_API hc_status hc_config_serialize(const hc_config* config, char* buffer, size_t cap, size_t* needed);
/* 16 hex digits plus terminator. */
HC_API hc_status hc_config_hash(const hc_config* config, char out[17]);

HC_API size_t hc_subcommand_count(void);
HC_API const char* hc_subcommand_name(size_t index);

/* cli_threads > 0 wins, then HOROCOVER_THREADS, then the config. */
HC_API hc_status hc_resolve_threads(const hc_config* config, int cli_threads, int* out);
/* Runs one subcommand into out_dir. The summary ("key = value" lines) is
 * available from hc_last_summary() afterwards. */
HC_API hc_status hc_run(const hc_config* config, const char* subcommand, const char* out_dir, int threads);
HC_API const char* hc_last_summary(void);

/* Seeded random streams: first n outputs of stream (seed, id). */
HC_API hc_status hc_stream_u64(uint64_t seed, uint64_t stream_id, uint64_t* out, size_t n);

/* Primitives. */
HC_API hc_status hc_relation_residual(double* out);
/* Decaying Jacobi field for K(u) = -(mean + amplitude sin(frequency u + phase)). */
HC_API hc_status hc_jacobi_sinusoidal(double mean, double amplitude, double frequency, double phase, double t,
                                      double* out);
/* tau(s, t, x) in constant curvature by quadrature of J_t along the arc. */
HC_API hc_status hc_tau_constant(double s, double t, double* out);
/* Winding of the geodesic orbit of length t from the point given by disk
 * coordinates (wx, wy) and fiber angle theta, on the cover defined by the
 * config. out receives cover.d integers. */
HC_API hc_status hc_winding(const hc_config* config, double wx, double wy, double theta, double t, int64_t* out);

#ifdef __cplusplus
}
#endif

#endif
