#pragma once

// Compactly supported test functions on M and on the cover.

#include <utility>
#include <vector>

#include "cover.hpp"
#include "geometry.hpp"

namespace horocover {

// Smooth bump on T^1 of the fundamental domain:
//   b(x) = beta(d(x, c) / radius) * beta(|angle(x) - angle| / halfwidth),
//   beta(u) = ((1 + cos(pi u)) / 2)^2 on [0, 1), 0 beyond.
// d is the hyperbolic distance of base points, angles are disk-model fiber
// angles. beta is C^1 with Lipschitz derivative at the edge and smooth inside,
// so b is C^2 away from a null set and C^{1,1} everywhere.
class BaseBump {
 public:
  // `center` in the disk model; the support must sit strictly inside the
  // inscribed disk of the octagon so it never meets the domain boundary.
  BaseBump(Complex center_disk, double radius, double angle, double angle_halfwidth);

  double operator()(const Isometry& reduced_base) const;
  double operator()(Complex z, double fiber_angle) const;

  Complex center_disk() const { return center_disk_; }
  double radius() const { return radius_; }
  double angle() const { return angle_; }
  double angle_halfwidth() const { return halfwidth_; }

  // Liouville integral of b over T^1 M with vol(M) = 1, by tensor-product
  // Gauss-Legendre quadrature in polar coordinates about the centre.
  double mean() const;
  // Bound on the C^2 norm from the bump parameters.
  double c2_bound() const;

 private:
  Complex center_disk_;
  Complex center_;
  double radius_;
  double angle_;
  double halfwidth_;
};

// beta(u) above; exposed for tests.
double cosine_bump(double u);

// f(base, deck) = c_deck * b(base) for deck in the window, 0 otherwise.
class CoverObservable {
 public:
  CoverObservable(BaseBump bump, std::vector<std::pair<DeckVector, double>> copies);

  double operator()(const CoverPoint& x) const;
  double coefficient(const DeckVector& deck) const;

  const BaseBump& bump() const { return bump_; }
  const std::vector<std::pair<DeckVector, double>>& copies() const { return copies_; }
  int dim() const { return copies_.empty() ? 0 : copies_.front().first.dim; }

  // mu(f) = sum_D c_D * mean(b).
  double mean() const;
  double sup_norm() const;
  // Largest |D_i| over the window.
  std::int64_t window_radius() const;
  // Largest coordinate range max D_i - min D_i over the window.
  std::int64_t window_width() const;

 private:
  BaseBump bump_;
  std::vector<std::pair<DeckVector, double>> copies_;
};

// Observable on M ignoring the deck coordinate: offset + coefficient * b.
struct BaseObservable {
  BaseBump bump;
  double coefficient = 1.0;
  double offset = 0.0;

  double operator()(const Isometry& reduced_base) const {
    return coefficient == 0.0 ? offset : offset + coefficient * bump(reduced_base);
  }
  double mean() const { return offset + coefficient * bump.mean(); }
  bool is_constant() const { return coefficient == 0.0; }
};

}  // namespace horocover
