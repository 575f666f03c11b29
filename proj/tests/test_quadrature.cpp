#include "doctest.h"

#include "deltaring/quadrature.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace deltaring;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 16, 32}) {
    const auto rule = gauss_legendre(n);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) ==
          doctest::Approx(2.0).epsilon(1e-14));
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("nodes are ascending and symmetric") {
  const auto rule = gauss_legendre(32);
  for (int i = 1; i < 32; ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
  for (int i = 0; i < 32; ++i)
    CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[31 - i]).epsilon(1e-15));
}

TEST_CASE("composite rule on an interval") {
  const auto rule = composite(gauss_legendre(32), 0.0, 3.0, 4);
  REQUIRE(rule.nodes.size() == 128);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * std::sin(7.0 * rule.nodes[i]);
  CHECK(s == doctest::Approx((1.0 - std::cos(21.0)) / 7.0).epsilon(1e-14));
}

TEST_CASE("invalid rules are rejected") {
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  CHECK_THROWS_AS(composite(gauss_legendre(4), 0.0, 1.0, 0), std::invalid_argument);
}
