#pragma once

// Z^d-cover bookkeeping. A point of the cover is a domain-reduced unit
// tangent vector together with the deck coordinate of the tile it sits in.
// Winding is the integer crossing cocycle: the abelianized reduction word
// accumulated along a path, projected onto the classes defining the cover.

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "geometry.hpp"

namespace horocover {

inline constexpr int kHomologyRank = 4;  // 2g for g = 2
inline constexpr int kMaxDeckRank = kHomologyRank;

using Homology = std::array<std::int64_t, kHomologyRank>;

Homology abelianize(Letter l);
Homology abelianize(std::span<const Letter> word);
Homology abelianize(const LetterTally& tally);

struct DeckVector {
  std::array<std::int64_t, kMaxDeckRank> v{};
  int dim = 0;

  static DeckVector zero(int dim) { return DeckVector{{}, dim}; }
  std::int64_t operator[](int i) const { return v[i]; }
  std::int64_t& operator[](int i) { return v[i]; }

  friend DeckVector operator+(DeckVector x, const DeckVector& y) {
    for (int i = 0; i < x.dim; ++i) x.v[i] += y.v[i];
    return x;
  }
  friend DeckVector operator-(DeckVector x, const DeckVector& y) {
    for (int i = 0; i < x.dim; ++i) x.v[i] -= y.v[i];
    return x;
  }
  DeckVector operator-() const { return zero(dim) - *this; }
  friend bool operator==(const DeckVector&, const DeckVector&) = default;
  bool is_zero() const {
    for (int i = 0; i < dim; ++i)
      if (v[i] != 0) return false;
    return true;
  }
};

// A point of T^1 S^~ (the cover).
struct CoverPoint {
  Isometry base;  // reduced to the fundamental domain
  DeckVector deck;
};

// omega in [0,1)^d; components are reduced mod 1 when used as a character.
struct Twist {
  std::array<double, kMaxDeckRank> w{};
  int dim = 0;

  static Twist zero(int dim) { return Twist{{}, dim}; }
  double operator[](int i) const { return w[i]; }
  double& operator[](int i) { return w[i]; }
  Twist operator-() const {
    Twist t = *this;
    for (int i = 0; i < dim; ++i) t.w[i] = -t.w[i];
    return t;
  }
  double norm() const;
};

double pairing(const Twist& omega, const DeckVector& deck);

// Winding of an orbit segment: the deck displacement it produces.
struct WindingVector {
  DeckVector w;
  double t = 0.0;
  CoverPoint start;

  std::vector<double> values() const;
};

// E_omega(D) = exp(2 pi i omega . D).
std::complex<double> deck_character(const Twist& omega, const DeckVector& deck);

// Homomorphism pi_1(S) -> H_1(S, Z) = Z^4 followed by the projection onto
// the d classes that define the cover.
class AbelianizationMap {
 public:
  explicit AbelianizationMap(std::vector<Homology> rows);

  int dim() const { return static_cast<int>(rows_.size()); }
  const std::vector<Homology>& rows() const { return rows_; }
  DeckVector project(const Homology& h) const;
  DeckVector image(std::span<const Letter> word) const { return project(abelianize(word)); }

 private:
  std::vector<Homology> rows_;
};

struct FlowResult {
  CoverPoint point;
  WindingVector winding;
  std::int64_t reduction_steps = 0;
};

class Cover {
 public:
  Cover(const OctagonGroup& group, AbelianizationMap map);

  const OctagonGroup& group() const { return *group_; }
  const AbelianizationMap& map() const { return map_; }
  int dim() const { return map_.dim(); }

  // Reduce an arbitrary lift in the base tile (deck 0) to a CoverPoint.
  CoverPoint lift(const Isometry& x) const;
  CoverPoint lift(const Isometry& x, const DeckVector& deck) const;

  // Deck transformation by D: translate the deck coordinate.
  CoverPoint act(const DeckVector& D, const CoverPoint& x) const;

  // Geodesic flow for time t in chunks of at most `step`, reducing after
  // each chunk. The winding is exactly deck(out) - deck(in).
  FlowResult flow_with_winding(const CoverPoint& x, double t, double step = 1.0) const;
  // Same mechanism along a horocycle arc of length s.
  FlowResult horocycle_with_winding(const CoverPoint& x, double s, double step = 1.0) const;

  // Component k is the omega_k = e_k pairing of the winding over [0, t].
  WindingVector frobenius_vector(const CoverPoint& x, double t, double step = 1.0) const;

  // Apply a right multiplication and reduce, updating the deck coordinate.
  // Retries once after a 1e-12 perturbation on NonTermination.
  CoverPoint move(const CoverPoint& x, const Isometry& right, std::int64_t* steps = nullptr) const;

 private:
  const OctagonGroup* group_;
  AbelianizationMap map_;
};

// xi_omega(x) = omega . deck(x): locally constant primitive of the
// combinatorial cocycle.
double xi_cocycle(const Twist& omega, const CoverPoint& x);

}  // namespace horocover
