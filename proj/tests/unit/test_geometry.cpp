#include <cmath>

#include "doctest.h"
#include "geometry.hpp"
#include "rng.hpp"

using namespace horocover;

namespace {

Isometry random_frame(RandomStream& rng) {
  return default_group().volume_random_point(rng);
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("identity, inverse and unit determinant") {
    RandomStream rng(11, 0);
    for (int k = 0; k < 50; ++k) {
      const Isometry x = random_frame(rng);
      CHECK(x.det() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(projective_distance(x * x.inverse(), Isometry::identity()) < 1e-12);
      CHECK(projective_distance(Isometry::identity() * x, x) == 0.0);
    }
  }

  TEST_CASE("geodesic step moves the base point by distance |t|") {
    for (double t : {0.25, 1.0, 3.0, -2.0}) {
      const Complex z = geodesic_step(Isometry::identity(), t).basepoint();
      CHECK(hyperbolic_distance(Complex{0.0, 1.0}, z) == doctest::Approx(std::abs(t)).epsilon(1e-12));
    }
  }

  TEST_CASE("horocycle flow is a one-parameter group") {
    RandomStream rng(12, 0);
    const Isometry x = random_frame(rng);
    const Isometry a = horocycle_step(horocycle_step(x, 0.7), 1.9);
    const Isometry b = horocycle_step(x, 2.6);
    CHECK(projective_relative_distance(a, b) < 1e-13);
    CHECK(projective_relative_distance(horocycle_step(horocycle_step(x, 1.3), -1.3), x) < 1e-13);
  }

  TEST_CASE("renormalization: n_s a_t = a_t n_{e^-t s}") {
    for (double t : {-1.5, 0.5, 2.0}) {
      for (double s : {0.3, 1.0, 4.0}) {
        const Isometry lhs = horocycle_matrix(s) * geodesic_matrix(t);
        const Isometry rhs = geodesic_matrix(t) * horocycle_matrix(std::exp(-t) * s);
        CHECK(projective_relative_distance(lhs, rhs) < 1e-14);
      }
    }
  }

  TEST_CASE("surface relation and side pairings") {
    const OctagonGroup& g = default_group();
    CHECK(g.relation_residual() < 1e-8);
    CHECK(g.pairing_residual() < 1e-8);
    // Generators are hyperbolic and, by the symmetry of the octagon, share
    // one translation length.
    const double trace = std::abs(g.generator(Letter::a1).a + g.generator(Letter::a1).d);
    CHECK(trace > 2.0);
    for (int k = 0; k < kLetterCount; ++k) {
      const Letter l = static_cast<Letter>(k);
      CHECK(projective_distance(g.generator(l) * g.generator(inverse(l)), Isometry::identity()) < 1e-12);
      CHECK(std::abs(g.generator(l).a + g.generator(l).d) == doctest::Approx(trace).epsilon(1e-12));
    }
  }

  TEST_CASE("reducing a generator returns to the identity tile") {
    const OctagonGroup& g = default_group();
    for (int k = 0; k < kLetterCount; ++k) {
      const Letter l = static_cast<Letter>(k);
      const Reduction r = g.reduce(g.generator(l));
      REQUIRE(r.word.size() == 1);
      CHECK(r.word[0] == inverse(l));
      CHECK(projective_distance(r.point, Isometry::identity()) < 1e-10);
    }
  }

  TEST_CASE("reduction round trip") {
    const OctagonGroup& g = default_group();
    RandomStream rng(13, 0);
    for (int k = 0; k < 200; ++k) {
      const Isometry x = geodesic_step(random_frame(rng), 5.0 + 10.0 * rng.uniform());
      const Reduction r = g.reduce(x);
      CHECK(g.contains(r.point.basepoint(), 1e-9));
      Word back;
      for (Letter l : r.word) back.push_back(inverse(l));
      CHECK(projective_relative_distance(g.evaluate(back) * r.point, x) < 1e-8);
    }
  }

  TEST_CASE("tiling coverage on a 32 x 32 disk grid") {
    const OctagonGroup& g = default_group();
    int tested = 0;
    for (int i = 0; i < 32; ++i) {
      for (int j = 0; j < 32; ++j) {
        const Complex w{-0.96 + 1.92 * (i + 0.5) / 32.0, -0.96 + 1.92 * (j + 0.5) / 32.0};
        if (std::abs(w) >= 0.97) continue;
        const Reduction r = g.reduce(frame_from_disk(w, 0.3));
        CHECK(g.contains(r.point.basepoint(), 1e-9));
        ++tested;
      }
    }
    CHECK(tested > 600);
  }

  TEST_CASE("disk model round trip") {
    for (Complex z : {Complex{0.0, 1.0}, Complex{0.3, 2.0}, Complex{-1.5, 0.4}}) {
      CHECK(std::abs(from_disk(to_disk(z)) - z) < 1e-14);
    }
    CHECK(std::abs(to_disk(Complex{0.0, 1.0})) < 1e-15);
  }
}
