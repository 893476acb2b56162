#include "cover.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace horocover {

Homology abelianize(Letter l) {
  Homology h{};
  const int i = index_of(l);
  h[i % 4] = i < 4 ? 1 : -1;
  return h;
}

Homology abelianize(std::span<const Letter> word) {
  Homology h{};
  for (Letter l : word) {
    const int i = index_of(l);
    h[i % 4] += i < 4 ? 1 : -1;
  }
  return h;
}

Homology abelianize(const LetterTally& tally) {
  Homology h{};
  for (int i = 0; i < 4; ++i) h[i] = tally[i] - tally[i + 4];
  return h;
}

double Twist::norm() const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += w[i] * w[i];
  return std::sqrt(s);
}

double pairing(const Twist& omega, const DeckVector& deck) {
  double s = 0.0;
  for (int i = 0; i < deck.dim; ++i) s += omega.w[i] * static_cast<double>(deck.v[i]);
  return s;
}

std::vector<double> WindingVector::values() const {
  std::vector<double> out(w.dim);
  for (int i = 0; i < w.dim; ++i) out[i] = static_cast<double>(w.v[i]);
  return out;
}

std::complex<double> deck_character(const Twist& omega, const DeckVector& deck) {
  // Reduce each term mod 1 before summing so large deck vectors keep precision.
  double phase = 0.0;
  for (int i = 0; i < deck.dim; ++i) {
    const double term = omega.w[i] * static_cast<double>(deck.v[i]);
    phase += term - std::floor(term);
  }
  phase -= std::floor(phase);
  return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

double xi_cocycle(const Twist& omega, const CoverPoint& x) { return pairing(omega, x.deck); }

AbelianizationMap::AbelianizationMap(std::vector<Homology> rows) : rows_(std::move(rows)) {
  if (rows_.empty() || rows_.size() > static_cast<std::size_t>(kMaxDeckRank)) {
    throw std::invalid_argument("cover rank must be between 1 and 4 (got " +
                                std::to_string(rows_.size()) + ")");
  }
}

DeckVector AbelianizationMap::project(const Homology& h) const {
  DeckVector out = DeckVector::zero(dim());
  for (int r = 0; r < dim(); ++r) {
    std::int64_t s = 0;
    for (int k = 0; k < kHomologyRank; ++k) s += rows_[r][k] * h[k];
    out.v[r] = s;
  }
  return out;
}

Cover::Cover(const OctagonGroup& group, AbelianizationMap map)
    : group_(&group), map_(std::move(map)) {}

CoverPoint Cover::lift(const Isometry& x) const { return lift(x, DeckVector::zero(dim())); }

CoverPoint Cover::lift(const Isometry& x, const DeckVector& deck) const {
  return move(CoverPoint{x, deck}, Isometry::identity());
}

CoverPoint Cover::act(const DeckVector& D, const CoverPoint& x) const {
  return CoverPoint{x.base, x.deck + D};
}

CoverPoint Cover::move(const CoverPoint& x, const Isometry& right, std::int64_t* steps) const {
  for (int attempt = 0;; ++attempt) {
    Isometry y = attempt == 0 ? x.base * right : x.base * geodesic_matrix(1e-12) * right;
    LetterTally tally{};
    try {
      const int n = group_->reduce_in_place(y, tally);
      if (steps) *steps += n;
    } catch (const NumericGuard& e) {
      if (attempt == 0 && e.kind() == GuardKind::NonTermination) continue;
      throw;
    }
    // The tile element is the inverse of the applied word.
    return CoverPoint{renormalize(y), x.deck - map_.project(abelianize(tally))};
  }
}

FlowResult Cover::flow_with_winding(const CoverPoint& x, double t, double step) const {
  if (!(step > 0.0 && step <= 1.0)) {
    throw NumericGuard(GuardKind::Precondition, "flow step must lie in (0, 1]");
  }
  FlowResult out{x, WindingVector{DeckVector::zero(dim()), t, x}, 0};
  if (t == 0.0) return out;
  const auto n = static_cast<std::int64_t>(std::ceil(std::abs(t) / step));
  const Isometry chunk = geodesic_matrix(t / static_cast<double>(n));
  CoverPoint p = x;
  for (std::int64_t i = 0; i < n; ++i) p = move(p, chunk, &out.reduction_steps);
  out.point = p;
  out.winding.w = p.deck - x.deck;
  return out;
}

FlowResult Cover::horocycle_with_winding(const CoverPoint& x, double s, double step) const {
  if (!(step > 0.0 && step <= 1.0)) {
    throw NumericGuard(GuardKind::Precondition, "flow step must lie in (0, 1]");
  }
  FlowResult out{x, WindingVector{DeckVector::zero(dim()), s, x}, 0};
  if (s == 0.0) return out;
  const auto n = static_cast<std::int64_t>(std::ceil(std::abs(s) / step));
  const Isometry chunk = horocycle_matrix(s / static_cast<double>(n));
  CoverPoint p = x;
  for (std::int64_t i = 0; i < n; ++i) p = move(p, chunk, &out.reduction_steps);
  out.point = p;
  out.winding.w = p.deck - x.deck;
  return out;
}

WindingVector Cover::frobenius_vector(const CoverPoint& x, double t, double step) const {
  if (t < 0.0) throw NumericGuard(GuardKind::Precondition, "frobenius_vector requires t >= 0");
  return flow_with_winding(x, t, step).winding;
}

}  // namespace horocover
