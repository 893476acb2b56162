#include "twist.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace horocover {

std::complex<double> project_twist(const CoverObservable& f, const Twist& omega, const CoverPoint& x) {
  const double b = f.bump()(x.base);
  if (b == 0.0) return 0.0;
  std::complex<double> sum = 0.0;
  // f(D x) is nonzero only when deck(x) + D lies in the window.
  for (const auto& [W, c] : f.copies()) sum += deck_character(omega, W - x.deck) * c;
  return sum * b;
}

int reconstruct_grid_bound(const CoverObservable& f) {
  return static_cast<int>(2 * f.window_width() + 1);
}

std::complex<double> reconstruct(const CoverObservable& f, const CoverPoint& x, int n,
                                 bool allow_aliasing) {
  const int bound = reconstruct_grid_bound(f);
  if (n < 1 || (n < bound && !allow_aliasing)) {
    throw NumericGuard(GuardKind::GridTooCoarse, "reconstruction grid N = " + std::to_string(n) +
                                                     " is below the bound " + std::to_string(bound));
  }
  const int d = x.deck.dim;
  std::int64_t total = 1;
  for (int i = 0; i < d; ++i) total *= n;
  std::complex<double> sum = 0.0;
  for (std::int64_t k = 0; k < total; ++k) {
    Twist omega = Twist::zero(d);
    std::int64_t rest = k;
    for (int i = 0; i < d; ++i) {
      omega.w[i] = static_cast<double>(rest % n) / n;
      rest /= n;
    }
    sum += project_twist(f, omega, x);
  }
  return sum / static_cast<double>(total);
}

std::complex<double> twist_phase(const Twist& omega, const CoverPoint& x) {
  return deck_character(omega, x.deck);
}

CoverFunction xi_operator(const Twist& omega, CoverFunction u) {
  return [omega, u = std::move(u)](const CoverPoint& x) { return twist_phase(omega, x) * u(x); };
}

TwistedSection TwistedSection::from_observable(const CoverObservable& f, const Twist& omega) {
  return TwistedSection{omega, [f, omega](const CoverPoint& x) { return project_twist(f, omega, x); }};
}

double TwistedSection::equivariance_defect(const Cover& cover, const DeckVector& D,
                                           const CoverPoint& x) const {
  const CoverPoint moved = cover.act(-D, x);
  return std::abs(values(moved) - deck_character(omega, D) * values(x));
}

std::complex<double> twisted_transfer_apply(const Cover& cover, const CurvatureModel& model,
                                            const CoverFunction& u, const Twist& omega, double t,
                                            const CoverPoint& x, const TransferOptions& options) {
  if (t == 0.0) return u(x);
  const FlowResult back = cover.flow_with_winding(x, -t, options.flow_step);
  // back.winding = deck(g_{-t} x) - deck(x).
  const std::complex<double> g = deck_character(omega, -back.winding.w);
  const double jac = model.is_constant() ? std::exp(t) : jacobi_at(model, x.base, -t, options.jacobi);
  return g * jac * u(back.point);
}

std::complex<double> transfer_apply(const Cover& cover, const CurvatureModel& model,
                                    const CoverFunction& u, double t, const CoverPoint& x,
                                    const TransferOptions& options) {
  return twisted_transfer_apply(cover, model, u, Twist::zero(cover.dim()), t, x, options);
}

CoverFunction twisted_transfer(const Cover& cover, const CurvatureModel& model, CoverFunction u,
                               const Twist& omega, double t, const TransferOptions& options) {
  return [&cover, model, u = std::move(u), omega, t, options](const CoverPoint& x) {
    return twisted_transfer_apply(cover, model, u, omega, t, x, options);
  };
}

}  // namespace horocover
