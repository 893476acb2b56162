#include <cmath>
#include <cstdlib>

#include "cover.hpp"
#include "config.hpp"
#include "doctest.h"
#include "error.hpp"
#include "twist.hpp"

using namespace horocover;

namespace {

std::int64_t mod(std::int64_t a, std::int64_t n) { return ((a % n) + n) % n; }

// Grid average of pi_omega f by direct summation over the window: the
// character sum over omega = k/N keeps exactly the copies congruent to the
// deck of x modulo N.
double reconstruct_oracle(const CoverObservable& f, const CoverPoint& x, int n) {
  double sum = 0.0;
  for (const auto& [E, c] : f.copies()) {
    bool congruent = true;
    for (int i = 0; i < E.dim; ++i) congruent = congruent && mod(E[i] - x.deck[i], n) == 0;
    if (congruent) sum += c;
  }
  return sum * f.bump()(x.base);
}

}  // namespace

TEST_SUITE("twist") {
  TEST_CASE("reconstruction matches direct summation, with and without aliasing") {
    const BaseBump b(Complex{0.0, 0.0}, 0.6, 0.0, 3.14159265358979323846);
    const CoverObservable f(b, {{DeckVector{{-1}, 1}, 1.0}, {DeckVector{{0}, 1}, 0.5}, {DeckVector{{1}, 1}, -0.25}});
    const int bound = reconstruct_grid_bound(f);
    CHECK(bound == 5);
    const Isometry base = frame_from_disk(Complex{0.1, 0.0}, 0.2);
    for (std::int64_t deck = -6; deck <= 6; ++deck) {
      const CoverPoint x{base, DeckVector{{deck}, 1}};
      for (int n : {bound, bound + 2}) {
        const double r = reconstruct(f, x, n).real();
        CHECK(std::abs(r - reconstruct_oracle(f, x, n)) < 1e-12);
        // Exact within the window width of the bounding box [-1, 1].
        if (std::abs(deck) <= 1 + 2) CHECK(std::abs(r - f(x)) < 1e-12);
      }
      const double aliased = reconstruct(f, x, 2, true).real();
      CHECK(std::abs(aliased - reconstruct_oracle(f, x, 2)) < 1e-12);
    }
    CHECK_THROWS_AS(reconstruct(f, CoverPoint{base, DeckVector{{0}, 1}}, 2), NumericGuard);
    // At deck 1 the N = 2 grid folds the copies at -1 and 1 together.
    CHECK(reconstruct(f, CoverPoint{base, DeckVector{{1}, 1}}, 2, true).real() ==
          doctest::Approx((1.0 - 0.25) * b(base)));
  }

  TEST_CASE("reconstruction in two dimensions") {
    const BaseBump b(Complex{0.0, 0.0}, 0.6, 0.0, 3.14159265358979323846);
    const CoverObservable f(b, {{DeckVector{{0, 0}, 2}, 1.0}, {DeckVector{{1, -1}, 2}, 0.5}});
    const int n = reconstruct_grid_bound(f);
    const Isometry base = frame_from_disk(Complex{0.0, 0.1}, 1.0);
    for (std::int64_t i = -1; i <= 2; ++i) {
      for (std::int64_t j = -2; j <= 1; ++j) {
        const CoverPoint x{base, DeckVector{{i, j}, 2}};
        CHECK(std::abs(reconstruct(f, x, n).real() - f(x)) < 1e-12);
        CHECK(std::abs(reconstruct(f, x, n).imag()) < 1e-12);
      }
    }
  }

  TEST_CASE("pi_omega is equivariant under deck translations") {
    const Cover cover = make_cover(parse_config("seed = 1\n"));
    const BaseBump b(Complex{0.0, 0.0}, 0.6, 0.0, 3.14159265358979323846);
    const CoverObservable f(b, {{DeckVector{{0}, 1}, 1.0}, {DeckVector{{2}, 1}, 0.3}});
    const Twist w{{0.3}, 1};
    const TwistedSection u = TwistedSection::from_observable(f, w);
    const CoverPoint x{frame_from_disk(Complex{0.05, 0.0}, 0.0), DeckVector{{1}, 1}};
    for (std::int64_t D : {-2, 1, 3}) CHECK(u.equivariance_defect(cover, DeckVector{{D}, 1}, x) < 1e-12);
  }

  TEST_CASE("untwisted transfer of the constant function is e^t in constant curvature") {
    const Cover cover = make_cover(parse_config("seed = 1\n"));
    const CoverFunction one = [](const CoverPoint&) { return std::complex<double>(1.0, 0.0); };
    const CoverPoint x = cover.lift(frame_from_disk(Complex{0.2, -0.3}, 2.0));
    CHECK(transfer_apply(cover, CurvatureModel::constant(), one, 1.5, x).real() ==
          doctest::Approx(std::exp(1.5)).epsilon(1e-12));
    const auto tw = twisted_transfer_apply(cover, CurvatureModel::constant(), one, Twist{{0.2}, 1}, 1.5, x);
    CHECK(std::abs(tw) == doctest::Approx(std::exp(1.5)).epsilon(1e-12));
  }
}
