/* C API exercised from plain C. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "horocover/horocover.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

int main(int argc, char** argv) {
  const char* work = argc > 1 ? argv[1] : "capi_work";
  hc_config* cfg = NULL;
  hc_config* bad = NULL;
  char hash[17];
  char hash2[17];
  size_t needed = 0;
  double v = 0.0;
  int64_t w[4];
  uint64_t s1[4], s2[4];
  int threads = 0;
  size_t i;

  EXPECT(strlen(hc_version()) > 0);
  EXPECT(hc_subcommand_count() == 10);
  EXPECT(strcmp(hc_subcommand_name(0), "validate-geometry") == 0);
  EXPECT(hc_subcommand_name(99) == NULL);

  /* Validation errors carry the key. */
  EXPECT(hc_config_parse("mc.samples = 3\n", &bad) == HC_ERROR_VALIDATION);
  EXPECT(bad == NULL);
  EXPECT(strcmp(hc_last_error_key(), "seed") == 0);
  EXPECT(hc_config_parse("seed = 1\nnope = 2\n", &bad) == HC_ERROR_VALIDATION);
  EXPECT(strcmp(hc_last_error_key(), "nope") == 0);
  EXPECT(hc_config_parse(NULL, &bad) == HC_ERROR_ARGUMENT);

  EXPECT(hc_config_parse("seed = 5\ngeometry.samples = 50\ngeometry.drift_steps = 2000\n", &cfg) == HC_OK);
  EXPECT(hc_config_seed(cfg) == 5);
  EXPECT(hc_config_serialize(cfg, NULL, 0, &needed) == HC_OK);
  EXPECT(needed > 100);
  {
    char* text = malloc(needed);
    hc_config* again = NULL;
    EXPECT(hc_config_serialize(cfg, text, needed, &needed) == HC_OK);
    EXPECT(hc_config_parse(text, &again) == HC_OK);
    EXPECT(hc_config_hash(cfg, hash) == HC_OK);
    EXPECT(hc_config_hash(again, hash2) == HC_OK);
    EXPECT(strcmp(hash, hash2) == 0 && strlen(hash) == 16);
    hc_config_free(again);
    free(text);
  }

  EXPECT(hc_resolve_threads(cfg, 3, &threads) == HC_OK && threads == 3);

  EXPECT(hc_relation_residual(&v) == HC_OK && v < 1e-8);
  EXPECT(hc_tau_constant(2.0, 1.0, &v) == HC_OK && fabs(v - 2.0 * exp(-1.0)) < 1e-12);
  EXPECT(hc_jacobi_sinusoidal(1.0, 0.0, 1.0, 0.0, 2.0, &v) == HC_OK && fabs(v - exp(-2.0)) < 1e-9);
  EXPECT(hc_jacobi_sinusoidal(2.0, 3.0, 1.0, 0.0, 2.0, &v) == HC_ERROR_VALIDATION);
  EXPECT(hc_tau_constant(1.0, 1.0, NULL) == HC_ERROR_ARGUMENT);

  EXPECT(hc_stream_u64(0, 0, s1, 4) == HC_OK);
  EXPECT(s1[0] == UINT64_C(9826868804458059804));
  EXPECT(hc_stream_u64(0, 0, s2, 4) == HC_OK);
  for (i = 0; i < 4; ++i) EXPECT(s1[i] == s2[i]);

  /* Zero-length orbit winds by zero; long orbits wind somewhere. */
  EXPECT(hc_winding(cfg, 0.1, 0.2, 0.3, 0.0, w) == HC_OK && w[0] == 0);
  EXPECT(hc_winding(cfg, 0.1, 0.2, 0.3, 50.0, w) == HC_OK);

  EXPECT(hc_run(cfg, "validate-geometry", work, 1) == HC_OK);
  EXPECT(strstr(hc_last_summary(), "relation_residual") != NULL);
  EXPECT(hc_run(cfg, "no-such-command", work, 1) == HC_ERROR_VALIDATION);
  EXPECT(hc_run(cfg, "theorem-a", work, 1) == HC_ERROR_VALIDATION);
  EXPECT(strcmp(hc_last_error_key(), "sigma.file") == 0);

  hc_config_free(cfg);
  hc_config_free(NULL);
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
