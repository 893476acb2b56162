#include <cmath>
#include <tuple>

#include "doctest.h"
#include "error.hpp"
#include "observable.hpp"

using namespace horocover;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Liouville mean of the bump in closed form: radial profile integrated by
// composite Simpson against sinh r, times the fiber window 0.75 * halfwidth,
// over vol(T^1 M) = 8 pi^2.
double mean_oracle(double radius, double halfwidth) {
  const int n = 20000;
  const double h = radius / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    const double c = 0.5 * (1.0 + std::cos(kPi * r / radius));
    const double v = (i == n ? 0.0 : c * c) * std::sinh(r);
    acc += v * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  const double radial = 2.0 * kPi * acc * h / 3.0;
  return radial * 0.75 * halfwidth / (8.0 * kPi * kPi);
}

}  // namespace

TEST_SUITE("observable") {
  TEST_CASE("cosine bump profile") {
    CHECK(cosine_bump(0.0) == 1.0);
    CHECK(cosine_bump(0.5) == doctest::Approx(0.25));
    CHECK(cosine_bump(1.0) == 0.0);
    CHECK(cosine_bump(3.0) == 0.0);
  }

  TEST_CASE("bump mean matches the polar closed form") {
    using Case = std::tuple<Complex, double, double>;
    for (const auto& [center, radius, halfwidth] :
         {Case{{0.0, 0.0}, 0.6, kPi}, Case{{0.2, -0.1}, 0.5, 1.5}, Case{{-0.1, 0.15}, 0.3, 0.4}}) {
      const BaseBump b(center, radius, 1.0, halfwidth);
      CHECK(b.mean() == doctest::Approx(mean_oracle(radius, halfwidth)).epsilon(1e-9));
    }
  }

  TEST_CASE("bump is supported in its ball and fiber window") {
    const BaseBump b(Complex{0.1, 0.05}, 0.4, 1.0, 0.5);
    const Isometry centre = frame_from_disk(b.center_disk(), 1.0);
    CHECK(b(centre) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b(centre * rotation_matrix(0.6)) == 0.0);
    CHECK(b(centre * geodesic_matrix(0.41)) == 0.0);
  }

  TEST_CASE("support must fit inside the inscribed disk") {
    CHECK_THROWS_AS(BaseBump(Complex{0.0, 0.0}, 5.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(BaseBump(Complex{0.0, 0.0}, 0.5, 0.0, 4.0), ValidationError);
  }

  TEST_CASE("cover observable mean and window") {
    const BaseBump b(Complex{0.0, 0.0}, 0.6, 0.0, kPi);
    const CoverObservable f(b, {{DeckVector{{-1}, 1}, 1.0}, {DeckVector{{2}, 1}, -0.5}});
    CHECK(f.mean() == doctest::Approx(0.5 * b.mean()));
    CHECK(f.window_radius() == 2);
    CHECK(f.window_width() == 3);
    CHECK(f.coefficient(DeckVector{{2}, 1}) == -0.5);
    CHECK(f.coefficient(DeckVector{{0}, 1}) == 0.0);
    CHECK(f(CoverPoint{frame_from_disk(Complex{0.0, 0.0}, 0.0), DeckVector{{-1}, 1}}) ==
          doctest::Approx(1.0));
  }
}
