#pragma once

// Constant curvature -1 model of the unit tangent bundle of the genus-two
// surface built from the regular hyperbolic octagon.
//
// Points of T^1 H are elements of PSL(2,R): g <-> (g.i, g_*(up vector at i)).
// The surface group acts on the left, both flows act on the right, so every
// flow commutes with every group element at the matrix level.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "rng.hpp"

namespace horocover {

using Complex = std::complex<double>;

struct Isometry {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  static constexpr Isometry identity() { return {}; }

  constexpr double det() const { return a * d - b * c; }
  // Inverse of a unit-determinant matrix.
  constexpr Isometry inverse() const { return {d, -b, -c, a}; }

  // Base point g.i in the upper half-plane.
  Complex basepoint() const {
    const double n = c * c + d * d;
    return {(a * c + b * d) / n, det() / n};
  }
  // Base point in the Poincare disk centred at i.
  Complex disk_point() const;
  // Angle in [0, 2pi) of the tangent direction, measured in the disk model.
  double fiber_angle() const;

  friend constexpr Isometry operator*(const Isometry& x, const Isometry& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend constexpr bool operator==(const Isometry&, const Isometry&) = default;
};

// Rescale to unit determinant and fix the global sign so that the first
// nonzero entry is positive.
Isometry renormalize(const Isometry& x);
// Entrywise max distance between x and +-y (PSL identification).
double projective_distance(const Isometry& x, const Isometry& y);
// Same, relative to the largest entry of x and y.
double projective_relative_distance(const Isometry& x, const Isometry& y);

double cosh_distance(Complex z, Complex w);
double hyperbolic_distance(Complex z, Complex w);

Complex to_disk(Complex z);
Complex from_disk(Complex w);

Isometry geodesic_matrix(double t);   // diag(e^{t/2}, e^{-t/2})
Isometry horocycle_matrix(double s);  // [[1, s], [0, 1]]
Isometry rotation_matrix(double phi);  // rotation about i by phi (disk angle)

// Unit tangent vector at disk point w pointing in disk direction theta.
Isometry frame_from_disk(Complex w, double theta);

inline constexpr double kMaxStepTime = 500.0;

// x . a_t, renormalized. Requires |t| <= 500; longer flows must be chunked.
Isometry geodesic_step(const Isometry& x, double t);
// x . n_s, renormalized.
Isometry horocycle_step(const Isometry& x, double s);

// Generators of the genus-two surface group and their inverses.
enum class Letter : std::uint8_t { a1, b1, a2, b2, a1_inv, b1_inv, a2_inv, b2_inv };
inline constexpr int kLetterCount = 8;

constexpr Letter inverse(Letter l) {
  return static_cast<Letter>((static_cast<int>(l) + 4) % 8);
}
constexpr int index_of(Letter l) { return static_cast<int>(l); }
const char* letter_name(Letter l);

using Word = std::vector<Letter>;
// Number of times each letter was applied during a reduction.
using LetterTally = std::array<std::int64_t, kLetterCount>;

struct Reduction {
  Isometry point;
  Word word;  // letters applied to the input, in order
};

// Regular octagon with vertex angle 2pi/8 centred at i, sides paired so that
// [a1,b1][a2,b2] = 1. Immutable after construction; validates itself.
class OctagonGroup {
 public:
  OctagonGroup();

  const Isometry& generator(Letter l) const { return generators_[index_of(l)]; }
  // Element that maps the domain across side k (0..7, counterclockwise from
  // the positive real axis of the disk).
  const Isometry& side_element(int side) const { return side_elements_[side]; }
  Letter side_letter(int side) const { return side_letters_[side]; }
  // Side paired with `side` (side_element(side) maps it onto `side`).
  static int paired_side(int side);

  Isometry evaluate(std::span<const Letter> word) const;
  // Distance from +-identity of the relator [a1,b1][a2,b2].
  double relation_residual() const { return relation_residual_; }
  // Worst distance of a sampled paired-side point from its target side.
  double pairing_residual() const { return pairing_residual_; }

  static double inradius();
  static double circumradius();
  static double half_side_length();
  static double translation_length();
  static double diameter() { return 2.0 * circumradius(); }
  // Disk-model Euclidean radius of the vertices.
  static double disk_vertex_radius();

  // Point on side k at signed arclength u from the side midpoint.
  Complex side_point(int side, double u) const;

  bool contains(Complex z, double rel_tol = 1e-12) const;

  // Greedy reduction into the closed Dirichlet domain. Throws NonTermination
  // after `max_steps`.
  Reduction reduce(const Isometry& x, int max_steps = 10000) const;
  // Allocation-free variant used on hot paths; returns the number of steps.
  int reduce_in_place(Isometry& x, LetterTally& tally, int max_steps = 10000) const;

  // Volume-random (Liouville) unit tangent vector over the domain.
  Isometry volume_random_point(RandomStream& rng) const;

 private:
  std::array<Isometry, kLetterCount> generators_;
  std::array<Isometry, 8> side_elements_;
  std::array<Isometry, 8> side_inverses_;
  std::array<Letter, 8> side_letters_;
  std::array<Complex, 8> side_centers_;
  std::array<double, 8> side_center_heights_;
  double relation_residual_ = 0.0;
  double pairing_residual_ = 0.0;
};

// Process-wide immutable instance.
const OctagonGroup& default_group();

// Volume of T^1 S for the octagon surface before normalization: area 4pi
// times the fiber length 2pi.
inline constexpr double kUnnormalizedVolume = 8.0 * 3.14159265358979323846 * 3.14159265358979323846;

}  // namespace horocover
