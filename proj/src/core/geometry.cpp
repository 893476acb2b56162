#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace horocover {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

double wrap_angle(double theta) {
  double r = std::fmod(theta, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  if (r >= 2.0 * kPi) r = 0.0;
  return r;
}

}  // namespace

Complex Isometry::disk_point() const { return to_disk(basepoint()); }

double Isometry::fiber_angle() const {
  // Direction of g_*(i) at g.i pushed to the disk:
  //   arg( -2 / ((c i + d)^2 (z + i)^2) ).
  const Complex z = basepoint();
  const Complex ci_d{d, c};
  return wrap_angle(kPi - 2.0 * std::arg(ci_d) - 2.0 * std::arg(z + kI));
}

Isometry renormalize(const Isometry& x) {
  const double det = x.det();
  const double s = 1.0 / std::sqrt(det);
  Isometry y{x.a * s, x.b * s, x.c * s, x.d * s};
  const double first = y.a != 0.0 ? y.a : (y.b != 0.0 ? y.b : (y.c != 0.0 ? y.c : y.d));
  if (first < 0.0) y = {-y.a, -y.b, -y.c, -y.d};
  return y;
}

double projective_distance(const Isometry& x, const Isometry& y) {
  const double plus = std::max({std::abs(x.a - y.a), std::abs(x.b - y.b),
                                std::abs(x.c - y.c), std::abs(x.d - y.d)});
  const double minus = std::max({std::abs(x.a + y.a), std::abs(x.b + y.b),
                                 std::abs(x.c + y.c), std::abs(x.d + y.d)});
  return std::min(plus, minus);
}

double projective_relative_distance(const Isometry& x, const Isometry& y) {
  const double scale = std::max({1.0, std::abs(x.a), std::abs(x.b), std::abs(x.c), std::abs(x.d),
                                 std::abs(y.a), std::abs(y.b), std::abs(y.c), std::abs(y.d)});
  return projective_distance(x, y) / scale;
}

double cosh_distance(Complex z, Complex w) {
  return 1.0 + std::norm(z - w) / (2.0 * z.imag() * w.imag());
}

double hyperbolic_distance(Complex z, Complex w) {
  // acosh(1 + u) loses precision for tiny u; use the log form via the chordal ratio.
  const double num = std::abs(z - w);
  const double den = std::abs(z - std::conj(w));
  return 2.0 * std::atanh(num / den);
}

Complex to_disk(Complex z) { return (z - kI) / (z + kI); }
Complex from_disk(Complex w) { return kI * (1.0 + w) / (1.0 - w); }

Isometry geodesic_matrix(double t) {
  return {std::exp(0.5 * t), 0.0, 0.0, std::exp(-0.5 * t)};
}

Isometry horocycle_matrix(double s) { return {1.0, s, 0.0, 1.0}; }

Isometry rotation_matrix(double phi) {
  const double c = std::cos(0.5 * phi);
  const double s = std::sin(0.5 * phi);
  return {c, s, -s, c};
}

Isometry frame_from_disk(Complex w, double theta) {
  const Complex z = from_disk(w);
  const double sy = std::sqrt(z.imag());
  const Isometry base{sy, z.real() / sy, 0.0, 1.0 / sy};
  return renormalize(base * rotation_matrix(theta - base.fiber_angle()));
}

Isometry geodesic_step(const Isometry& x, double t) {
  if (!(std::abs(t) <= kMaxStepTime)) {
    throw NumericGuard(GuardKind::Precondition,
                       "geodesic_step requires |t| <= 500 per call (got " + std::to_string(t) + ")");
  }
  return renormalize(x * geodesic_matrix(t));
}

Isometry horocycle_step(const Isometry& x, double s) {
  return renormalize(x * horocycle_matrix(s));
}

const char* letter_name(Letter l) {
  static constexpr const char* kNames[] = {"a1", "b1", "a2", "b2", "A1", "B1", "A2", "B2"};
  return kNames[index_of(l)];
}

// --- OctagonGroup -----------------------------------------------------------

double OctagonGroup::inradius() { return std::acosh(1.0 + std::numbers::sqrt2); }

double OctagonGroup::circumradius() {
  const double cot = 1.0 / std::tan(kPi / 8.0);
  return std::acosh(cot * cot);
}

double OctagonGroup::half_side_length() {
  // cosh(side/2) = cos(pi/n) / sin(alpha/2) with n = 8, alpha = pi/4.
  return std::acosh(std::cos(kPi / 8.0) / std::sin(kPi / 8.0));
}

double OctagonGroup::translation_length() { return 2.0 * inradius(); }

double OctagonGroup::disk_vertex_radius() { return std::tanh(0.5 * circumradius()); }

int OctagonGroup::paired_side(int side) {
  // Sides 0..3 carry a1, b1^-1, a1^-1, b1; sides 4..7 the same for a2, b2.
  static constexpr int kPair[8] = {2, 3, 0, 1, 6, 7, 4, 5};
  return kPair[side];
}

OctagonGroup::OctagonGroup() {
  const double ell = translation_length();
  auto side_angle = [](int k) { return k * kPi / 4.0; };
  auto translate = [&](double theta) {
    const Isometry r = rotation_matrix(theta);
    return renormalize(r * geodesic_matrix(ell) * r.inverse());
  };
  // Element mapping side j onto side i and the domain across side i.
  auto pairing = [&](int i, int j) {
    return renormalize(translate(side_angle(i)) *
                       rotation_matrix(side_angle(i) - side_angle(j) + kPi));
  };

  const Isometry a1 = pairing(0, 2);
  const Isometry b1 = pairing(3, 1);
  const Isometry a2 = pairing(4, 6);
  const Isometry b2 = pairing(7, 5);
  generators_ = {a1, b1, a2, b2, a1.inverse(), b1.inverse(), a2.inverse(), b2.inverse()};

  side_letters_ = {Letter::a1, Letter::b1_inv, Letter::a1_inv, Letter::b1,
                   Letter::a2, Letter::b2_inv, Letter::a2_inv, Letter::b2};
  for (int k = 0; k < 8; ++k) {
    side_elements_[k] = generator(side_letters_[k]);
    side_inverses_[k] = side_elements_[k].inverse();
    side_centers_[k] = side_elements_[k].basepoint();
    side_center_heights_[k] = side_centers_[k].imag();
  }

  const Letter relator[] = {Letter::a1, Letter::b1, Letter::a1_inv, Letter::b1_inv,
                            Letter::a2, Letter::b2, Letter::a2_inv, Letter::b2_inv};
  relation_residual_ = projective_distance(evaluate(relator), Isometry::identity());
  if (!(relation_residual_ <= 1e-8)) {
    throw NumericGuard(GuardKind::Precondition,
                       "surface-group relation residual " + std::to_string(relation_residual_) +
                           " exceeds 1e-8");
  }

  const Complex center = kI;
  double worst = 0.0;
  for (int k = 0; k < 8; ++k) {
    const int from = paired_side(k);
    const Complex mid_target = side_point(k, 0.0);
    for (int s = 0; s <= 16; ++s) {
      const double u = (-1.0 + s / 8.0) * half_side_length();
      const Complex z = side_point(from, u);
      const Isometry& g = side_elements_[k];
      const Complex gz = (g.a * z + g.b) / (g.c * z + g.d);
      // On the bisector of i and side_center k ...
      const double on_bisector =
          std::abs(hyperbolic_distance(gz, center) - hyperbolic_distance(gz, side_centers_[k]));
      // ... and within the side's extent.
      const double overshoot =
          std::max(0.0, hyperbolic_distance(gz, mid_target) - half_side_length());
      worst = std::max({worst, on_bisector, overshoot});
    }
  }
  pairing_residual_ = worst;
  if (!(pairing_residual_ <= 1e-8)) {
    throw NumericGuard(GuardKind::Precondition,
                       "side pairing residual " + std::to_string(pairing_residual_) +
                           " exceeds 1e-8");
  }
}

Isometry OctagonGroup::evaluate(std::span<const Letter> word) const {
  Isometry m = Isometry::identity();
  for (Letter l : word) m = m * generator(l);
  return renormalize(m);
}

Complex OctagonGroup::side_point(int side, double u) const {
  const Isometry frame = rotation_matrix(side * kPi / 4.0) * geodesic_matrix(inradius()) *
                         rotation_matrix(0.5 * kPi) * geodesic_matrix(u);
  return frame.basepoint();
}

bool OctagonGroup::contains(Complex z, double rel_tol) const {
  const double to_center = std::norm(z - kI);
  for (int k = 0; k < 8; ++k) {
    const double to_side = std::norm(z - side_centers_[k]) / side_center_heights_[k];
    if (to_side < to_center * (1.0 - rel_tol)) return false;
  }
  return true;
}

int OctagonGroup::reduce_in_place(Isometry& x, LetterTally& tally, int max_steps) const {
  constexpr double kTol = 1e-12;
  for (int step = 0; step <= max_steps; ++step) {
    const Complex z = x.basepoint();
    // cosh d(z, p) - 1 = |z - p|^2 / (2 Im z Im p); the common factor drops out.
    const double to_center = std::norm(z - kI);
    int best = -1;
    double best_value = to_center * (1.0 - kTol);
    for (int k = 0; k < 8; ++k) {
      const double v = std::norm(z - side_centers_[k]) / side_center_heights_[k];
      if (v < best_value) {
        best_value = v;
        best = k;
      }
    }
    if (best < 0) return step;
    x = side_inverses_[best] * x;
    ++tally[index_of(inverse(side_letters_[best]))];
  }
  throw NumericGuard(GuardKind::NonTermination,
                     "reduction needed more than " + std::to_string(max_steps) + " steps");
}

Reduction OctagonGroup::reduce(const Isometry& x, int max_steps) const {
  Reduction out{x, {}};
  constexpr double kTol = 1e-12;
  for (int step = 0; step <= max_steps; ++step) {
    const Complex z = out.point.basepoint();
    const double to_center = std::norm(z - kI);
    int best = -1;
    double best_value = to_center * (1.0 - kTol);
    for (int k = 0; k < 8; ++k) {
      const double v = std::norm(z - side_centers_[k]) / side_center_heights_[k];
      if (v < best_value) {
        best_value = v;
        best = k;
      }
    }
    if (best < 0) {
      out.point = renormalize(out.point);
      return out;
    }
    out.point = side_inverses_[best] * out.point;
    out.word.push_back(inverse(side_letters_[best]));
  }
  throw NumericGuard(GuardKind::NonTermination,
                     "reduction needed more than " + std::to_string(max_steps) + " steps");
}

Isometry OctagonGroup::volume_random_point(RandomStream& rng) const {
  // Hyperbolic-area uniform point in the circumscribed disk (density sinh r),
  // rejected outside the octagon; uniform fiber angle.
  const double cosh_max = std::cosh(circumradius());
  for (;;) {
    const double cosh_r = 1.0 + rng.uniform() * (cosh_max - 1.0);
    const double phi = 2.0 * kPi * rng.uniform();
    const double theta = 2.0 * kPi * rng.uniform();
    const double r = std::acosh(cosh_r);
    const Complex w = std::polar(std::tanh(0.5 * r), phi);
    const Complex z = from_disk(w);
    if (!contains(z)) continue;
    return frame_from_disk(w, theta);
  }
}

const OctagonGroup& default_group() {
  static const OctagonGroup group;
  return group;
}

}  // namespace horocover
