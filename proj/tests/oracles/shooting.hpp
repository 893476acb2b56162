#pragma once

// Independent reference for the stable Jacobi field of J'' + K(u) J = 0.
// Multiple shooting in long double: on each segment [a, a + seg] the decaying
// solution is pinned by J(a) = 1 and J(a + look) = 0, built from the two
// fundamental solutions with plain RK4. J(t) is the product of the segment
// ratios. No Riccati equation is involved.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Curvature = std::function<long double(long double)>;

struct Fundamental {
  long double y1, y1p, y2, y2p;
};

// Both fundamental solutions of y'' = -K y on [a, b], at every RK4 node.
inline std::vector<Fundamental> fundamental(const Curvature& K, long double a, long double b, long double h) {
  const long n = std::lround(static_cast<double>((b - a) / h));
  const long double dt = (b - a) / static_cast<long double>(n);
  Fundamental s{1.0L, 0.0L, 0.0L, 1.0L};
  std::vector<Fundamental> out{s};
  out.reserve(static_cast<std::size_t>(n) + 1);
  auto deriv = [&](long double u, long double y, long double yp, long double& dy, long double& dyp) {
    dy = yp;
    dyp = -K(u) * y;
  };
  for (long k = 0; k < n; ++k) {
    const long double u = a + dt * static_cast<long double>(k);
    auto step = [&](long double& y, long double& yp) {
      long double k1, l1, k2, l2, k3, l3, k4, l4;
      deriv(u, y, yp, k1, l1);
      deriv(u + dt / 2, y + dt / 2 * k1, yp + dt / 2 * l1, k2, l2);
      deriv(u + dt / 2, y + dt / 2 * k2, yp + dt / 2 * l2, k3, l3);
      deriv(u + dt, y + dt * k3, yp + dt * l3, k4, l4);
      y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      yp += dt / 6 * (l1 + 2 * l2 + 2 * l3 + l4);
    };
    step(s.y1, s.y1p);
    step(s.y2, s.y2p);
    out.push_back(s);
  }
  return out;
}

// J(t) for t >= 0 with J(0) = 1.
inline long double stable_jacobi(const Curvature& K, long double t, long double seg = 2.5L,
                                 long double look = 20.0L, long double h = 5e-3L) {
  long double log_j = 0.0L;
  long double a = 0.0L;
  while (a < t) {
    const long double len = std::min(seg, t - a);
    const auto sol = fundamental(K, a, a + look, h);
    const long double c = -sol.back().y1 / sol.back().y2;
    const long double dt = look / static_cast<long double>(sol.size() - 1);
    const long n_seg = std::lround(static_cast<double>(len / dt));
    const Fundamental& e = sol[static_cast<std::size_t>(n_seg)];
    log_j += std::log(e.y1 + c * e.y2);
    a += len;
  }
  return std::exp(log_j);
}

}  // namespace oracle
