#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace horocover {

// Gauss-Legendre rules on [-1, 1].
struct GaussLegendre4 {
  static constexpr std::array<double, 4> nodes{-0.8611363115940526, -0.3399810435848563,
                                               0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> weights{0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};
};

struct GaussLegendre3 {
  static constexpr std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> weights{0.5555555555555556, 0.8888888888888888,
                                                 0.5555555555555556};
};

struct GaussLegendre2 {
  static constexpr std::array<double, 2> nodes{-0.5773502691896257, 0.5773502691896257};
  static constexpr std::array<double, 2> weights{1.0, 1.0};
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum over panels of |Q4 - Q3|
};

// Composite 4-point Gauss-Legendre over [a, b] split into `panels` equal panels.
template <class F>
QuadratureResult composite_gauss_legendre(F&& f, double a, double b, std::int64_t panels,
                                          bool estimate_error = true) {
  QuadratureResult out;
  const double h = (b - a) / static_cast<double>(panels);
  for (std::int64_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    double q4 = 0.0;
    for (int k = 0; k < 4; ++k) q4 += GaussLegendre4::weights[k] * f(mid + 0.5 * h * GaussLegendre4::nodes[k]);
    q4 *= 0.5 * h;
    out.value += q4;
    if (estimate_error) {
      double q3 = 0.0;
      for (int k = 0; k < 3; ++k) q3 += GaussLegendre3::weights[k] * f(mid + 0.5 * h * GaussLegendre3::nodes[k]);
      q3 *= 0.5 * h;
      out.error += std::abs(q4 - q3);
    }
  }
  return out;
}

}  // namespace horocover
