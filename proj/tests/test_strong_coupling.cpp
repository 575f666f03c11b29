#include "doctest.h"
#include "support.hpp"

#include "deltaring/bae.hpp"
#include "deltaring/strong_coupling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace deltaring;
using std::numbers::pi;

namespace {

// One-body ring on N sites with an on-site barrier g_B/h at x = 0; the wrap
// bond carries a sign flip for antiperiodic orbitals. Lowest eigenvalues.
Eigen::VectorXd ring_levels(double xi_b, int N, bool antiperiodic, int count) {
  const double h = 1.0 / N;
  const double t = 0.5 / (h * h);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    H(i, i) = 2.0 * t;
    if (i + 1 < N) H(i, i + 1) = H(i + 1, i) = -t;
  }
  H(0, N - 1) = H(N - 1, 0) = antiperiodic ? t : -t;
  H(N / 2, N / 2) += xi_b / h;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  return es.eigenvalues().head(count);
}

// Richardson (p = 2) over N and 2N.
std::vector<double> ring_levels_extrapolated(double xi_b, bool antiperiodic, int count) {
  const auto coarse = ring_levels(xi_b, 400, antiperiodic, count);
  const auto fine = ring_levels(xi_b, 800, antiperiodic, count);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back((4.0 * fine(i) - coarse(i)) / 3.0);
  return out;
}

}  // namespace

TEST_CASE("barrier-free orbitals are doubly degenerate") {
  const auto anti = orbital_wavenumbers(0.0, 6);
  const auto peri = orbital_wavenumbers(0.0, 6, 1.0, OrbitalBoundary::periodic);
  for (int i = 0; i < 6; ++i) {
    CHECK(anti.kappas[i] == doctest::Approx((2 * (i / 2) + 1) * pi).epsilon(1e-14));
    CHECK(peri.kappas[i] == doctest::Approx(2 * (i / 2 + 1) * pi).epsilon(1e-14));
  }
  CHECK_FALSE(anti.bound_q);
}

TEST_CASE("hard-wall barrier limit") {
  const auto anti = orbital_wavenumbers(1e9, 6);
  const auto peri = orbital_wavenumbers(1e9, 6, 1.0, OrbitalBoundary::periodic);
  int n_even = 0;
  for (int i = 0; i < 6; ++i) {
    if (anti.parities[i] == OrbitalParity::even)
      CHECK(anti.kappas[i] == doctest::Approx(2 * (++n_even) * pi).epsilon(1e-8));
  }
  n_even = 0;
  for (int i = 0; i < 6; ++i) {
    if (peri.parities[i] == OrbitalParity::even)
      CHECK(peri.kappas[i] == doctest::Approx((2 * (++n_even) - 1) * pi).epsilon(1e-8));
  }
}

TEST_CASE("quantization conditions hold to 1e-12") {
  testing::Gen gen(41);
  for (int trial = 0; trial < 40; ++trial) {
    const double xb = gen.uniform(-1.9, 50.0);
    const double L = gen.uniform(0.5, 2.0);
    for (auto bc : {OrbitalBoundary::antiperiodic, OrbitalBoundary::periodic}) {
      const auto s = orbital_wavenumbers(xb, 10, L, bc);
      for (int i = 0; i < 10; ++i) {
        const double k = s.kappas[i];
        if (i > 0) CHECK(s.kappas[i - 1] <= k);
        const double s2 = std::sin(0.5 * k * L), c2 = std::cos(0.5 * k * L);
        if (s.parities[i] == OrbitalParity::odd) {
          CHECK(std::abs(bc == OrbitalBoundary::antiperiodic ? c2 : s2) < 1e-12 * (1 + k * L));
          continue;
        }
        const double residual = bc == OrbitalBoundary::antiperiodic
                                    ? k * c2 + (xb / L) * s2
                                    : k * s2 - (xb / L) * c2;
        CHECK(std::abs(residual) < 1e-12 * (k + std::abs(xb) / L));
      }
    }
  }
}

TEST_CASE("orbitals against a one-body finite-difference ring") {
  for (double xb : {0.7, 4.0 / std::sqrt(2.0), 9.0}) {
    for (bool anti : {true, false}) {
      const auto s = orbital_wavenumbers(xb, 6, 1.0,
                                         anti ? OrbitalBoundary::antiperiodic
                                              : OrbitalBoundary::periodic);
      const auto levels = ring_levels_extrapolated(xb, anti, 6);
      for (int i = 0; i < 6; ++i)
        CHECK(0.5 * s.kappas[i] * s.kappas[i] == doctest::Approx(levels[i]).epsilon(1e-4));
    }
  }
}

TEST_CASE("attractive barrier binds one orbital") {
  const double xb = -5.0;
  const auto anti = orbital_wavenumbers(xb, 5);
  REQUIRE(anti.bound_q);
  const auto levels = ring_levels_extrapolated(xb, true, 6);
  CHECK(-0.5 * *anti.bound_q * *anti.bound_q == doctest::Approx(levels[0]).epsilon(1e-3));
  for (int i = 0; i < 5; ++i)
    CHECK(0.5 * anti.kappas[i] * anti.kappas[i] == doctest::Approx(levels[i + 1]).epsilon(1e-4));
  // antiperiodic binding needs ξ_B < -2; periodic binds at any attraction
  CHECK_FALSE(orbital_wavenumbers(-1.5, 4).bound_q);
  CHECK(orbital_wavenumbers(-1.5, 4, 1.0, OrbitalBoundary::periodic).bound_q);
}

TEST_CASE("allowed pairs are parity matched and sorted") {
  const auto s = orbital_wavenumbers(4.0 / std::sqrt(2.0), 8);
  const auto pairs = allowed_pairs(s);
  REQUIRE_FALSE(pairs.empty());
  CHECK(pairs.front().eta1 == doctest::Approx(pi));
  CHECK(pairs.front().eta2 == doctest::Approx(3 * pi));
  CHECK_FALSE(pairs.front().barrier_coupled());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(s.parities[pairs[i].first] == s.parities[pairs[i].second]);
    CHECK(pairs[i].eta1 < pairs[i].eta2);
    if (i > 0) CHECK(pairs[i - 1].tonks_energy <= pairs[i].tonks_energy);
  }
}

TEST_CASE("expansion terms") {
  ExpansionParams ep{4.3, 9.97, 1e12, 2.0, 1.0};
  const auto far = expansion_energy(ep);
  CHECK(far.total == doctest::Approx(0.5 * (4.3 * 4.3 + 9.97 * 9.97)).epsilon(1e-10));
  CHECK(ep.g_tilde() == doctest::Approx(-4e-12));

  testing::Gen gen(43);
  for (int i = 0; i < 200; ++i) {
    const double e1 = gen.uniform(0.5, 30), e2 = gen.uniform(0.5, 30);
    const double xb = gen.uniform(0.1, 20), xi = gen.uniform(10, 1e4);
    const auto x = expansion_energy({e1, e2, xi, xb, 1.0});
    const auto y = expansion_energy({e2, e1, xi, xb, 1.0});
    CHECK(x.total == doctest::Approx(y.total).epsilon(1e-13));
    CHECK(x.total == doctest::Approx(x.leading + x.first + x.second).epsilon(1e-14));
  }
}

TEST_CASE("second-order term is positive over a repulsive sweep") {
  for (double xb : {0.2, 1.0, 2.828, 8.0, 30.0}) {
    const auto pairs = allowed_pairs(orbital_wavenumbers(xb, 10));
    for (std::size_t i = 0; i < std::min<std::size_t>(pairs.size(), 12); ++i)
    {
      const auto c = expansion_coefficients(pairs[i].eta1, pairs[i].eta2, xb);
      CHECK(c.c1 < 0.0);
      CHECK(c.c2 > 0.0);
    }
  }
}

TEST_CASE("expansion guards") {
  CHECK_THROWS_WITH_AS(expansion_coefficients(3.0, 9.0, 0.0),
                       "expansion singular at zero barrier", std::domain_error);
  CHECK_THROWS_AS(expansion_energy({3.0, 3.0, 100, 1.0, 1.0}), std::invalid_argument);
  CHECK_FALSE(expansion_energy({3.0, 9.0, 5.0, 1.0, 1.0}).trusted);
  CHECK_FALSE(expansion_energy({3.0, 9.0, 100.0, 0.05, 1.0}).trusted);
  CHECK(expansion_energy({3.0, 9.0, 100.0, 1.0, 1.0}).trusted);
  const auto half = expansion_energy({3.0, 9.0, 100.0, 1.0, 2.0});
  const auto unit = expansion_energy({3.0, 9.0, 100.0, 1.0, 1.0});
  CHECK(half.total == doctest::Approx(unit.total / 4));
}

TEST_CASE("expansion error on a barrier-coupled branch is third order") {
  const double xb = 4.0 / std::sqrt(2.0);
  const auto pairs = allowed_pairs(orbital_wavenumbers(xb, 8));
  const auto it = std::find_if(pairs.begin(), pairs.end(),
                               [](const OrbitalPair& p) { return p.barrier_coupled(); });
  REQUIRE(it != pairs.end());
  const auto roots = track_branch(xb, *it, {1000.0, 2000.0});
  auto diff = [&](std::size_t i, double xi) {
    return roots[i].energy - expansion_energy({it->eta1, it->eta2, xi, xb, 1.0}).total;
  };
  const double d1 = diff(0, 1000.0), d2 = diff(1, 2000.0);
  const double c2 = expansion_coefficients(it->eta1, it->eta2, xb).c2;
  CHECK(std::abs(d1) < 0.01 * c2 / (1000.0 * 1000.0));
  CHECK(d1 / d2 == doctest::Approx(8.0).epsilon(0.1));
}

TEST_CASE("branch tracking stays on exact roots") {
  const double xb = 1.0;
  const auto pairs = allowed_pairs(orbital_wavenumbers(xb, 8));
  const std::vector<double> xs{300.0, 5000.0, 120.0};
  const auto roots = track_branch(xb, pairs[1], xs);
  REQUIRE(roots.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::max(std::abs(roots[i].residual_1), std::abs(roots[i].residual_2)) < 1e-12);
    CHECK(roots[i].energy < pairs[1].tonks_energy);
  }
  CHECK(roots[2].energy < roots[0].energy);
  CHECK(roots[0].energy < roots[1].energy);
  CHECK_THROWS_AS(track_branch(0.0, pairs[1], xs), std::invalid_argument);
  CHECK_THROWS_AS(track_branch(xb, pairs[1], {-3.0}), std::invalid_argument);
}

TEST_CASE("ground root maps back to the lowest orbital pair") {
  const SystemParams p{1000.0, 4.0 / std::sqrt(2.0), 1.0};
  const auto r = scan_roots(p, {20.0, 800, 1e-12, 1e-6});
  REQUIRE_FALSE(r.roots.empty());
  CHECK(r.roots.front().k1 == doctest::Approx(3.13513).epsilon(1e-5));
  const auto pair = tonks_pair_of(r.roots.front(), p);
  CHECK(pair.eta1 == doctest::Approx(pi));
  CHECK(pair.eta2 == doctest::Approx(3 * pi));
  const auto second = tonks_pair_of(r.roots[1], p);
  CHECK(second.barrier_coupled());
}

TEST_CASE("coefficient fit reproduces the hard-core limit and first order") {
  const SystemParams base{0.0, 4.0 / std::sqrt(2.0), 1.0};
  const std::vector<double> xs{200, 400, 800, 1600, 3200};
  const auto pairs = allowed_pairs(orbital_wavenumbers(base.xi_b, 8));
  const auto even = *std::find_if(pairs.begin(), pairs.end(),
                                  [](const OrbitalPair& p) { return p.barrier_coupled(); });
  const auto fit = fit_coefficients(base, xs, even);
  const auto formula = expansion_coefficients(even.eta1, even.eta2, base.xi_b);
  CHECK(testing::rel_diff(fit.c0, even.tonks_energy) < 1e-6);
  CHECK(testing::rel_diff(fit.c1, formula.c1) < 1e-3);
  CHECK(testing::rel_diff(fit.c2, formula.c2) < 1e-2);
  CHECK(fit.residual < 1e-7 * fit.c0);
  CHECK(fit.roots.size() == xs.size());

  // odd-odd branch: orbitals with a node at the barrier see no ξ_B at first order
  const auto ground = fit_coefficients(base, xs);
  CHECK_FALSE(ground.branch.barrier_coupled());
  CHECK(testing::rel_diff(ground.c0, ground.branch.tonks_energy) < 1e-6);
  const double s = ground.branch.eta1 * ground.branch.eta1 +
                   ground.branch.eta2 * ground.branch.eta2;
  CHECK(testing::rel_diff(ground.c1, -2.0 * s) < 1e-3);
}

TEST_CASE("coefficient fit preconditions") {
  const SystemParams base{0.0, 2.0, 1.0};
  CHECK_THROWS_AS(fit_coefficients(base, {200, 400, 800}), std::invalid_argument);
  CHECK_THROWS_AS(fit_coefficients(base, {50, 400, 800, 1600}), std::invalid_argument);
}
