#include "doctest.h"
#include "support.hpp"

#include "deltaring/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace deltaring;
using std::numbers::pi;

namespace {

// Free odd-sector levels of the discrete operator: the sector is spanned by
// sin(θ1 i1 + θ2 i2) + sin(θ2 i1 + θ1 i2), θ = 2πn/N, one function per
// orbit {(n1,n2), (n2,n1), (-n1,-n2), (-n2,-n1)}; it vanishes for n1 = -n2.
std::vector<double> free_discrete_levels(int N, int count) {
  const double h = 1.0 / N;
  auto mu = [&](int n) { return (2.0 / (h * h)) * (1.0 - std::cos(2 * pi * n / N)); };
  std::set<std::pair<int, int>> seen;
  std::vector<double> levels;
  const int M = 6;
  for (int n1 = -M; n1 <= M; ++n1) {
    for (int n2 = -M; n2 <= M; ++n2) {
      if (n1 == -n2) continue;
      const std::pair<int, int> orbit[4] = {{n1, n2}, {n2, n1}, {-n1, -n2}, {-n2, -n1}};
      const auto rep = *std::min_element(std::begin(orbit), std::end(orbit));
      if (!seen.insert(rep).second) continue;
      levels.push_back(0.5 * (mu(n1) + mu(n2)));
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.resize(count);
  return levels;
}

std::vector<int> swap_permutation(int N) {
  std::vector<int> perm(N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) perm[i * N + j] = j * N + i;
  return perm;
}

std::vector<int> inversion_permutation(int N) {
  std::vector<int> perm(N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) perm[i * N + j] = ((N - i) % N) * N + (N - j) % N;
  return perm;
}

SparseOperator permutation_matrix(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) t.emplace_back(perm[i], i, 1.0);
  SparseOperator P(n, n);
  P.setFromTriplets(t.begin(), t.end());
  return P;
}

}  // namespace

TEST_CASE("Hamiltonian is symmetric and commutes with the grid mirrors") {
  const int N = 16;
  const auto H = build_hamiltonian(testing::reference_params(), N);
  CHECK((SparseOperator(H.transpose()) - H).norm() == 0.0);
  for (const auto& perm : {swap_permutation(N), inversion_permutation(N)}) {
    const auto P = permutation_matrix(perm);
    const SparseOperator commutator = H * P - P * H;
    CHECK(commutator.norm() < 1e-9 * H.norm());
  }
  CHECK_THROWS_AS(build_hamiltonian(testing::reference_params(), 15), std::invalid_argument);
}

TEST_CASE("delta lines are on-site terms of weight coupling / h") {
  const int N = 8;
  const SystemParams p{3.0, 5.0, 1.0};
  const auto H = build_hamiltonian(p, N);
  const double h = 1.0 / N, kin = 4.0 * 0.5 / (h * h);
  CHECK(H.coeff(1 * N + 2, 1 * N + 2) == doctest::Approx(kin));
  CHECK(H.coeff(2 * N + 2, 2 * N + 2) == doctest::Approx(kin + 3.0 / h));
  CHECK(H.coeff(4 * N + 1, 4 * N + 1) == doctest::Approx(kin + 5.0 / h));
  CHECK(H.coeff(4 * N + 4, 4 * N + 4) == doctest::Approx(kin + 3.0 / h + 10.0 / h));
}

TEST_CASE("symmetric basis is orthonormal and spans the odd bosonic sector") {
  for (int N : {8, 16, 32}) {
    const auto P = symmetric_basis(N);
    const SparseOperator gram = SparseOperator(P.transpose()) * P;
    SparseOperator identity(P.cols(), P.cols());
    identity.setIdentity();
    CHECK((gram - identity).norm() < 1e-12);
    const auto S = permutation_matrix(swap_permutation(N));
    const auto I = permutation_matrix(inversion_permutation(N));
    CHECK((S * P - P).norm() < 1e-12);
    CHECK((I * P + P).norm() < 1e-12);
    // rank of the projector: (N² + tr swap - tr inversion - tr both) / 4
    CHECK(P.cols() == (N * N - 4) / 4);
  }
}

TEST_CASE("free spectrum matches the discrete plane-wave levels") {
  for (int N : {32, 64}) {
    const auto H = build_hamiltonian({0.0, 0.0, 1.0}, N);
    const auto P = symmetric_basis(N);
    const SparseOperator reduced = SparseOperator(P.transpose()) * H * P;
    const auto pairs = lowest_eigenpairs(reduced, 8);
    const auto expected = free_discrete_levels(N, 8);
    for (int i = 0; i < 8; ++i)
      CHECK(pairs.values(i) == doctest::Approx(expected[i]).epsilon(1e-10));
  }
  // the discrete levels approach 2π²(n1² + n2²) with O(h²) error
  OracleConfig cfg;
  cfg.grid_n = 128;
  cfg.levels = 4;
  const auto r = odd_sector_spectrum({0.0, 0.0, 1.0}, cfg, true);
  const double continuum[] = {2 * pi * pi, 4 * pi * pi, 8 * pi * pi, 10 * pi * pi};
  for (int i = 0; i < 4; ++i)
    CHECK(r.energies[i] == doctest::Approx(continuum[i]).epsilon(1e-5));
}

TEST_CASE("Krylov and dense eigensolvers agree") {
  const auto H = build_hamiltonian(testing::reference_params(), 48);
  const auto P = symmetric_basis(48);
  const SparseOperator reduced = SparseOperator(P.transpose()) * H * P;
  const auto dense = lowest_eigenpairs(reduced, 10, 100000);
  const auto krylov = lowest_eigenpairs(reduced, 10, 0);
  for (int i = 0; i < 10; ++i)
    CHECK(krylov.values(i) == doctest::Approx(dense.values(i)).epsilon(1e-10));
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd v = krylov.vectors.col(i);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((reduced * v - krylov.values(i) * v).norm() < 1e-6 * std::abs(krylov.values(i)));
  }
}

TEST_CASE("eigenvectors satisfy both symmetries on the grid") {
  const auto s = odd_sector_ground_state(testing::reference_params(), 64);
  const int N = 64;
  double peak = 0.0;
  for (double v : s.psi) peak = std::max(peak, std::abs(v));
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double v = s.psi[i * N + j];
      CHECK(std::abs(s.psi[j * N + i] - v) < 1e-14 * peak);
      CHECK(std::abs(s.psi[((N - i) % N) * N + (N - j) % N] + v) < 1e-14 * peak);
    }
  }
}

TEST_CASE("reference ground level converges to the rapidity energy") {
  OracleConfig cfg;
  cfg.grid_n = 128;
  cfg.levels = 3;
  const auto r = odd_sector_spectrum(testing::reference_params(), cfg);
  CHECK(r.extrapolated);
  CHECK(r.coarse_n == 64);
  CHECK(r.energies[0] == doctest::Approx(28.428081).epsilon(2e-5));
  CHECK(std::abs(r.energies[0] - 28.428081) < r.estimated_error[0]);
  for (std::size_t i = 0; i < r.energies.size(); ++i) {
    CHECK(r.estimated_error[i] > 0.0);
    CHECK_FALSE(r.bound[i]);
    if (i > 0) CHECK(r.energies[i - 1] <= r.energies[i]);
  }
  cfg.extrapolate = false;
  const auto raw = odd_sector_spectrum(testing::reference_params(), cfg);
  CHECK_FALSE(raw.extrapolated);
  CHECK(raw.energies[0] == raw.fine[0]);
  CHECK(raw.energies[0] < r.energies[0]);
}

TEST_CASE("levels are nondecreasing in both repulsive couplings") {
  OracleConfig cfg;
  cfg.grid_n = 64;
  cfg.levels = 4;
  const double couplings[] = {0.5, 2.0, 8.0};
  std::vector<std::vector<double>> table;
  for (double xi : couplings)
    for (double xb : couplings) table.push_back(odd_sector_spectrum({xi, xb, 1.0}, cfg).energies);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int l = 0; l < 4; ++l) {
        if (a + 1 < 3) CHECK(table[a * 3 + b][l] <= table[(a + 1) * 3 + b][l] + 1e-9);
        if (b + 1 < 3) CHECK(table[a * 3 + b][l] <= table[a * 3 + b + 1][l] + 1e-9);
      }
    }
  }
}

TEST_CASE("strongly attractive barrier produces flagged bound levels") {
  OracleConfig cfg;
  cfg.grid_n = 64;
  cfg.levels = 3;
  CHECK_THROWS_AS(odd_sector_spectrum({4.0, -20.0, 1.0}, cfg), std::invalid_argument);
  const auto r = odd_sector_spectrum({4.0, -20.0, 1.0}, cfg, true);
  REQUIRE(r.energies[0] < 0.0);
  CHECK(r.bound[0]);
}

TEST_CASE("contact cusp report") {
  const auto p = testing::reference_params();
  const auto c = contact_cusp(odd_sector_ground_state(p, 128), p);
  CHECK(c.samples > 10);
  CHECK(c.expected == p.xi);
  CHECK(c.median_slope == doctest::Approx(p.xi).epsilon(0.25));
  const SystemParams smooth{0.0, 3.0, 1.0};
  const auto s = contact_cusp(odd_sector_ground_state(smooth, 128, true), smooth);
  CHECK(std::abs(s.median_slope) < 0.5);
}

TEST_CASE("oracle configuration checks") {
  CHECK_THROWS_AS(validate(OracleConfig{30, 4, true}), std::invalid_argument);
  CHECK_THROWS_AS(validate(OracleConfig{34, 0, true}), std::invalid_argument);
  CHECK_THROWS_AS(validate(OracleConfig{33, 4, true}), std::invalid_argument);
  CHECK_NOTHROW(validate(OracleConfig{34, 4, true}));
  const auto r = odd_sector_spectrum(testing::reference_params(), OracleConfig{34, 2, true});
  CHECK(r.coarse_n == 18);
}
