#include <string>

#include "config.hpp"
#include "doctest.h"
#include "error.hpp"

using namespace horocover;

namespace {

std::string key_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ValidationError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("canonical serialization round trips") {
    const ExperimentConfig c = parse_config(
        "seed = 42\ncover.d = 2\ncurvature.model = sinusoidal\ncurvature.h_top = 1.7\n"
        "observable.copies = 0 0:1; 1 -1:-0.5\nschedule.t = 6 9\nulam.cells = 8 8 4\n");
    const std::string text = serialize_config(c);
    CHECK(serialize_config(parse_config(text)) == text);
    CHECK(config_hash(parse_config(text)) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
    CHECK(c.seed == 42);
    CHECK(c.observable.copies.size() == 2);
  }

  TEST_CASE("comments and whitespace are ignored") {
    const ExperimentConfig c = parse_config("# header\n  seed = 7   # trailing\n\nmc.samples=123\n");
    CHECK(c.seed == 7);
    CHECK(c.mc_samples == 123);
  }

  TEST_CASE("hash changes with any value") {
    CHECK(config_hash(parse_config("seed = 1\n")) != config_hash(parse_config("seed = 2\n")));
    CHECK(config_hash(parse_config("seed = 1\n")) != config_hash(parse_config("seed = 1\nmc.samples = 99\n")));
  }

  TEST_CASE("errors name the offending key") {
    CHECK(key_of("mc.samples = 10\n") == "seed");
    CHECK(key_of("seed = 1\nbogus.key = 3\n") == "bogus.key");
    CHECK(key_of("seed = 1\nseed = 2\n") == "seed");
    CHECK(key_of("seed = 1\nmc.samples = ten\n") == "mc.samples");
    CHECK(key_of("seed = 1\ncover.d = 9\n") == "cover.d");
    CHECK(key_of("seed = 1\nulam.omega_max = 0.7\n") == "ulam.omega_max");
    CHECK(key_of("seed = 1\nobservable.radius = 4\n") == "observable.radius");
    CHECK(key_of("seed = 1\ncurvature.model = sinusoidal\ncurvature.mean = 0.2\n") == "curvature.mean");
    CHECK(key_of("seed = 1\nschedule.T = 100 10\n") == "schedule.T");
    CHECK(key_of("seed = 1\n") == "");
  }
}
