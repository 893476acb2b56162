#include <cmath>

#include <Eigen/Eigenvalues>

#include "config.hpp"
#include "doctest.h"
#include "spectral.hpp"

using namespace horocover;

TEST_SUITE("spectral") {
  TEST_CASE("block power iteration agrees with a dense eigensolver") {
    const Cover cover = make_cover(parse_config("seed = 1\n"));
    UlamOptions opt;
    opt.cells = {6, 6, 6};
    opt.samples_per_cell = 6;
    const UlamOperator op(cover, CurvatureModel::constant(), opt, 3, 1);
    for (double w : {0.0, 0.25, 0.5}) {
      const Twist omega{{w}, 1};
      const UlamEigen e = op.leading_eigenvalue(omega);
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(op.dense(omega));
      double top = 0.0;
      for (const auto& v : solver.eigenvalues()) top = std::max(top, std::abs(v));
      CHECK(std::abs(e.lambda) == doctest::Approx(top).epsilon(1e-6));
    }
  }

  TEST_CASE("omega grid") {
    const auto g1 = omega_grid(1, 0.5, 0.25);
    CHECK(g1.size() == 5);
    CHECK(omega_grid(2, 0.2, 0.1).size() == 25);
  }
}
