#pragma once

// Fourier decomposition over the deck group and the pointwise action of the
// twisted transfer operators.

#include <complex>
#include <functional>

#include "cover.hpp"
#include "jacobi.hpp"
#include "observable.hpp"

namespace horocover {

using CoverFunction = std::function<std::complex<double>(const CoverPoint&)>;

// pi_omega(f)(x) = sum_D E_omega(D) f(D x); finite over the window.
std::complex<double> project_twist(const CoverObservable& f, const Twist& omega, const CoverPoint& x);

// Smallest grid N per dimension for which reconstruct is exact.
int reconstruct_grid_bound(const CoverObservable& f);

// Riemann sum of pi_omega(f)(x) over the uniform N^d grid omega = k / N.
// With N >= 2w + 1 (w = window width) the sum equals f(x) whenever deck(x)
// lies within w of the window's bounding box; farther out, copies at
// multiples of N alias onto D = 0.
// Throws GridTooCoarse below reconstruct_grid_bound unless aliasing is
// explicitly allowed (then the aliased copies are summed in).
std::complex<double> reconstruct(const CoverObservable& f, const CoverPoint& x, int n,
                                 bool allow_aliasing = false);

// e^{2 pi i xi_omega(x)}.
std::complex<double> twist_phase(const Twist& omega, const CoverPoint& x);
// (Xi_omega u)(x) = e^{2 pi i xi_omega(x)} u(x).
CoverFunction xi_operator(const Twist& omega, CoverFunction u);

// Omega-equivariant function on the cover: u(D^{-1} x) = E_omega(D) u(x).
struct TwistedSection {
  Twist omega;
  CoverFunction values;

  static TwistedSection from_observable(const CoverObservable& f, const Twist& omega);
  std::complex<double> operator()(const CoverPoint& x) const { return values(x); }
  // |u(D^{-1} x) - E_omega(D) u(x)|.
  double equivariance_defect(const Cover& cover, const DeckVector& D, const CoverPoint& x) const;
};

struct TransferOptions {
  double flow_step = 1.0;
  JacobiOptions jacobi{};
};

// L^(omega)_t u(x) = G_{t,omega}(x) J_{-t}(x) u(g_{-t} x) with
// G_{t,omega}(x) = E_omega(deck(x) - deck(g_{-t} x)).
std::complex<double> twisted_transfer_apply(const Cover& cover, const CurvatureModel& model,
                                            const CoverFunction& u, const Twist& omega, double t,
                                            const CoverPoint& x, const TransferOptions& options = {});
// Untwisted L_t.
std::complex<double> transfer_apply(const Cover& cover, const CurvatureModel& model,
                                    const CoverFunction& u, double t, const CoverPoint& x,
                                    const TransferOptions& options = {});
// L^(omega)_t as a CoverFunction, for composing.
CoverFunction twisted_transfer(const Cover& cover, const CurvatureModel& model, CoverFunction u,
                               const Twist& omega, double t, const TransferOptions& options = {});

}  // namespace horocover
