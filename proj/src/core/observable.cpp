#include "observable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"
#include "quadrature.hpp"

namespace horocover {

namespace {

constexpr double kPi = std::numbers::pi;

double angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return d > kPi ? 2.0 * kPi - d : d;
}

}  // namespace

double cosine_bump(double u) {
  if (!(u < 1.0)) return 0.0;
  const double c = 0.5 * (1.0 + std::cos(kPi * u));
  return c * c;
}

BaseBump::BaseBump(Complex center_disk, double radius, double angle, double angle_halfwidth)
    : center_disk_(center_disk),
      center_(from_disk(center_disk)),
      radius_(radius),
      angle_(angle),
      halfwidth_(angle_halfwidth) {
  if (!(std::abs(center_disk) < 1.0)) {
    throw ValidationError("observable.center", "observable centre must lie in the unit disk");
  }
  if (!(radius > 0.0)) throw ValidationError("observable.radius", "observable radius must be positive");
  if (!(angle_halfwidth > 0.0 && angle_halfwidth <= kPi)) {
    throw ValidationError("observable.angle_halfwidth", "angle half-width must lie in (0, pi]");
  }
  const double reach = hyperbolic_distance(center_, Complex{0.0, 1.0}) + radius;
  if (!(reach < OctagonGroup::inradius())) {
    throw ValidationError("observable.radius",
                          "observable support (centre distance + radius = " + std::to_string(reach) +
                              ") must stay inside the inscribed disk of radius " +
                              std::to_string(OctagonGroup::inradius()));
  }
}

double BaseBump::operator()(Complex z, double fiber_angle) const {
  const double d = hyperbolic_distance(z, center_);
  if (!(d < radius_)) return 0.0;
  const double gap = angle_gap(fiber_angle, angle_);
  if (!(gap < halfwidth_)) return 0.0;
  return cosine_bump(d / radius_) * cosine_bump(gap / halfwidth_);
}

double BaseBump::operator()(const Isometry& reduced_base) const {
  const Complex z = reduced_base.basepoint();
  // Cheap rejection before computing the fiber angle.
  if (!(hyperbolic_distance(z, center_) < radius_)) return 0.0;
  return (*this)(z, reduced_base.fiber_angle());
}

double BaseBump::mean() const {
  // Geodesic polar coordinates (r, phi) about the centre, area sinh r dr dphi,
  // times the fiber angle over the bump's angular window.
  constexpr int kRadialPanels = 16;
  constexpr int kPolar = 32;
  constexpr int kAnglePanels = 16;
  const Isometry to_center = frame_from_disk(center_disk_, 0.0);
  double total = 0.0;
  for (int ip = 0; ip < kPolar; ++ip) {
    const double phi = 2.0 * kPi * ip / kPolar;
    const Isometry spoke = to_center * rotation_matrix(phi);
    auto radial = [&](double r) {
      const Complex z = (spoke * geodesic_matrix(r)).basepoint();
      auto fiber = [&](double theta) { return (*this)(z, theta); };
      const double inner =
          composite_gauss_legendre(fiber, angle_ - halfwidth_, angle_ + halfwidth_, kAnglePanels, false)
              .value;
      return inner * std::sinh(r);
    };
    total += composite_gauss_legendre(radial, 0.0, radius_, kRadialPanels, false).value;
  }
  total *= 2.0 * kPi / kPolar;
  return total / kUnnormalizedVolume;
}

double BaseBump::c2_bound() const {
  // |beta| <= 1, |beta'| <= pi, |beta''| <= 1.5 pi^2, chained through the
  // unit-Lipschitz distance and angle coordinates.
  const double k = 1.0 / radius_ + 1.0 / halfwidth_;
  return 1.0 + kPi * k + 1.5 * kPi * kPi * k * k;
}

CoverObservable::CoverObservable(BaseBump bump, std::vector<std::pair<DeckVector, double>> copies)
    : bump_(std::move(bump)), copies_(std::move(copies)) {
  if (copies_.empty()) throw ValidationError("observable.copies", "observable needs at least one deck copy");
  const int d = copies_.front().first.dim;
  for (std::size_t i = 0; i < copies_.size(); ++i) {
    if (copies_[i].first.dim != d) {
      throw ValidationError("observable.copies", "deck copies must all have the cover dimension");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (copies_[j].first == copies_[i].first) {
        throw ValidationError("observable.copies", "duplicate deck copy in observable window");
      }
    }
  }
}

double CoverObservable::coefficient(const DeckVector& deck) const {
  for (const auto& [D, c] : copies_) {
    if (D == deck) return c;
  }
  return 0.0;
}

double CoverObservable::operator()(const CoverPoint& x) const {
  const double c = coefficient(x.deck);
  return c == 0.0 ? 0.0 : c * bump_(x.base);
}

double CoverObservable::mean() const {
  double s = 0.0;
  for (const auto& copy : copies_) s += copy.second;
  return s * bump_.mean();
}

double CoverObservable::sup_norm() const {
  double m = 0.0;
  for (const auto& copy : copies_) m = std::max(m, std::abs(copy.second));
  return m;
}

std::int64_t CoverObservable::window_radius() const {
  std::int64_t r = 0;
  for (const auto& copy : copies_) {
    for (int i = 0; i < copy.first.dim; ++i) r = std::max<std::int64_t>(r, std::abs(copy.first.v[i]));
  }
  return r;
}

std::int64_t CoverObservable::window_width() const {
  std::int64_t w = 0;
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    std::int64_t lo = copies_.front().first.v[i];
    std::int64_t hi = lo;
    for (const auto& copy : copies_) {
      lo = std::min(lo, copy.first.v[i]);
      hi = std::max(hi, copy.first.v[i]);
    }
    w = std::max(w, hi - lo);
  }
  return w;
}

}  // namespace horocover
