#include "deltaring/strong_coupling.hpp"
#include "deltaring/bae.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace deltaring {

namespace {

using std::numbers::pi;

constexpr double kHardCoreU = 1e-10;  // 1/ξ used for the hard-core end
constexpr double kMaxDu = 2e-3;

template <class F>
double bracketed_root(F f, double lo, double hi) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw NumericalError("orbital quantization root not bracketed");
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52),
      iters);
  return 0.5 * (r.first + r.second);
}

// n-th (1-based) even-parity wavenumber.
double even_orbital(double xi_b, int n, double L, OrbitalBoundary bc) {
  const double g = xi_b / L;
  if (bc == OrbitalBoundary::antiperiodic) {
    if (xi_b == 0.0) return (2 * n - 1) * pi / L;
    auto f = [&](double k) { return k * std::cos(0.5 * k * L) + g * std::sin(0.5 * k * L); };
    if (xi_b > 0.0) return bracketed_root(f, (2 * n - 1) * pi / L, 2 * n * pi / L);
    // Attractive: the root in (0, π/L) exists only above ξ_B = -2; below it
    // becomes the bound orbital and the real branch starts one interval up.
    const int shift = xi_b > -2.0 ? 0 : 1;
    const int m = n + shift;
    if (m == 1) return bracketed_root(f, 1e-9 * pi / L, pi / L);
    return bracketed_root(f, (2 * m - 2) * pi / L, (2 * m - 1) * pi / L);
  }
  if (xi_b == 0.0) return 2 * n * pi / L;
  auto f = [&](double k) { return k * std::sin(0.5 * k * L) - g * std::cos(0.5 * k * L); };
  if (xi_b > 0.0) return bracketed_root(f, (2 * n - 2) * pi / L, (2 * n - 1) * pi / L);
  return bracketed_root(f, (2 * n - 1) * pi / L, 2 * n * pi / L);
}

double odd_orbital(int n, double L, OrbitalBoundary bc) {
  return bc == OrbitalBoundary::antiperiodic ? (2 * n - 1) * pi / L
                                             : 2 * n * pi / L;
}

std::optional<double> bound_orbital(double xi_b, double L, OrbitalBoundary bc) {
  if (!(xi_b < 0.0)) return std::nullopt;
  const double depth = -xi_b / L;
  const double hi = 2.0 * depth + 4.0 / L;
  if (bc == OrbitalBoundary::antiperiodic) {
    if (!(xi_b < -2.0)) return std::nullopt;
    auto h = [&](double q) { return q - depth * std::tanh(0.5 * q * L); };
    return bracketed_root(h, 1e-9 / L, hi);
  }
  auto h = [&](double q) { return q * std::tanh(0.5 * q * L) - depth; };
  return bracketed_root(h, 0.0, hi);
}

ScatteringLengths lens_at(double u, double xi_b, double L) {
  ScatteringLengths lens;
  lens.a = -2.0 * L * u;
  lens.a_b = -L / xi_b;
  return lens;
}

struct BranchPoint {
  double u;
  double k1;
  double k2;
};

// Continue a root of the BAE from history.back() to coupling 1/ξ = target.
// Appends every accepted intermediate point to `history`.
void continue_to(std::vector<BranchPoint>& history, double target,
                 double xi_b, double L) {
  NewtonOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 40;
  opts.max_step = 0.02 / L;
  const double direction = target > history.back().u ? 1.0 : -1.0;
  double du = kMaxDu;
  while (history.back().u != target) {
    const auto& last = history.back();
    const double remaining = std::abs(target - last.u);
    const double step = std::min(du, remaining);
    const double u = step == remaining ? target : last.u + direction * step;
    double p1 = last.k1, p2 = last.k2;
    if (history.size() >= 2) {
      const auto& prev = history[history.size() - 2];
      const double slope_den = last.u - prev.u;
      if (slope_den != 0.0) {
        p1 += (last.k1 - prev.k1) / slope_den * (u - last.u);
        p2 += (last.k2 - prev.k2) / slope_den * (u - last.u);
      }
    }
    const auto nt = polish_root(p1, p2, lens_at(u, xi_b, L), L, opts);
    const bool ok = nt.converged && nt.k1 > 0.0 && nt.k2 > nt.k1 &&
                    std::max(std::abs(nt.k1 - p1), std::abs(nt.k2 - p2)) <
                        0.05 / L;
    if (ok) {
      history.push_back({u, nt.k1, nt.k2});
      du = std::min(kMaxDu, 2.0 * du);
    } else {
      du *= 0.5;
      if (du < 1e-14) throw NumericalError("branch discontinuity");
    }
  }
}

std::vector<BranchPoint> hard_core_start(double xi_b, double eta1, double eta2,
                                         double L) {
  NewtonOptions opts;
  opts.tol = 1e-12;
  opts.max_step = 0.02 / L;
  const auto nt =
      polish_root(eta1 / L, eta2 / L, lens_at(kHardCoreU, xi_b, L), L, opts);
  if (!nt.converged || std::abs(nt.k1 - eta1 / L) > 1e-3 / L ||
      std::abs(nt.k2 - eta2 / L) > 1e-3 / L)
    throw NumericalError("branch discontinuity");
  return {{kHardCoreU, nt.k1, nt.k2}};
}

}  // namespace

OrbitalSpectrum orbital_wavenumbers(double xi_b, int count, double ring_length,
                                    OrbitalBoundary boundary) {
  if (count < 2) throw std::invalid_argument("count must be >= 2");
  if (!(ring_length > 0.0)) throw std::invalid_argument("ring length must be positive");
  if (!std::isfinite(xi_b)) throw std::invalid_argument("xi_b must be finite");
  std::vector<std::pair<double, OrbitalParity>> merged;
  for (int n = 1; n <= count; ++n) {
    merged.emplace_back(even_orbital(xi_b, n, ring_length, boundary),
                        OrbitalParity::even);
    merged.emplace_back(odd_orbital(n, ring_length, boundary),
                        OrbitalParity::odd);
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  OrbitalSpectrum out;
  out.boundary = boundary;
  out.ring_length = ring_length;
  for (int i = 0; i < count; ++i) {
    out.kappas.push_back(merged[i].first);
    out.parities.push_back(merged[i].second);
  }
  out.bound_q = bound_orbital(xi_b, ring_length, boundary);
  return out;
}

std::vector<OrbitalPair> allowed_pairs(const OrbitalSpectrum& spectrum) {
  std::vector<OrbitalPair> pairs;
  const double L = spectrum.ring_length;
  const int n = static_cast<int>(spectrum.kappas.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (spectrum.parities[i] != spectrum.parities[j]) continue;
      OrbitalPair p;
      p.first = i;
      p.second = j;
      p.eta1 = spectrum.kappas[i] * L;
      p.eta2 = spectrum.kappas[j] * L;
      p.parity = spectrum.parities[i];
      p.tonks_energy = energy_of(spectrum.kappas[i], spectrum.kappas[j]);
      pairs.push_back(p);
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
    return x.tonks_energy < y.tonks_energy;
  });
  return pairs;
}

void validate(const ExpansionParams& ep) {
  if (!(ep.eta1 > 0.0) || !(ep.eta2 > 0.0))
    throw std::invalid_argument("orbital wavenumbers must be positive");
  if (ep.eta1 == ep.eta2)
    throw std::invalid_argument("the two orbitals must be distinct");
  if (!(ep.xi > 0.0) || !std::isfinite(ep.xi))
    throw std::invalid_argument("xi must be positive");
  if (!(ep.ring_length > 0.0))
    throw std::invalid_argument("ring length must be positive");
}

ExpansionCoefficients expansion_coefficients(double eta1, double eta2,
                                             double xi_b) {
  if (xi_b == 0.0) throw std::domain_error("expansion singular at zero barrier");
  auto eps = [xi_b](double e1, double e2) {
    const double s1 = e1 * e1, s2 = e2 * e2, b = xi_b;
    const double d = s1 + b * (2.0 + b);
    ExpansionCoefficients c;
    c.c0 = 0.5 * s1;
    c.c1 = -2.0 * s1 * (s1 + b * b) / d;
    const double inner = s1 * s1 * (s2 + 3.0 * b) +
                         b * b * (2.0 + b) * (3.0 * b * b + s2 * (2.0 + b)) +
                         2.0 * s1 * b * (s2 * (2.0 + b) + b * (5.0 + 3.0 * b));
    c.c2 = 2.0 * s1 * (s1 + b * b) * inner / (b * d * d * d);
    return c;
  };
  const auto x = eps(eta1, eta2);
  const auto y = eps(eta2, eta1);
  return {x.c0 + y.c0, x.c1 + y.c1, x.c2 + y.c2};
}

ExpansionEnergy expansion_energy(const ExpansionParams& ep) {
  validate(ep);
  const auto c = expansion_coefficients(ep.eta1, ep.eta2, ep.xi_b);
  const double unit = 1.0 / (ep.ring_length * ep.ring_length);
  ExpansionEnergy e;
  e.leading = c.c0 * unit;
  e.first = c.c1 / ep.xi * unit;
  e.second = c.c2 / (ep.xi * ep.xi) * unit;
  e.total = e.leading + e.first + e.second;
  e.trusted = ep.xi >= 10.0 && std::abs(ep.xi_b) >= 0.1;
  return e;
}

std::vector<RapidityPair> track_branch(double xi_b, const OrbitalPair& start,
                                       const std::vector<double>& xi_samples,
                                       double ring_length) {
  if (xi_b == 0.0) throw std::invalid_argument("xi_b must be nonzero");
  for (double xi : xi_samples)
    if (!(xi > 0.0) || !std::isfinite(xi))
      throw std::invalid_argument("xi samples must be positive");
  const double L = ring_length;
  std::vector<std::size_t> order(xi_samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
    return xi_samples[x] > xi_samples[y];
  });

  auto history = hard_core_start(xi_b, start.eta1, start.eta2, L);
  std::vector<RapidityPair> out(xi_samples.size());
  for (std::size_t idx : order) {
    const double u = 1.0 / xi_samples[idx];
    if (u > kHardCoreU) continue_to(history, u, xi_b, L);
    const auto& p = history.back();
    out[idx] = make_pair(p.k1, p.k2, lens_at(p.u, xi_b, L), L);
  }
  return out;
}

OrbitalPair tonks_pair_of(const RapidityPair& root, const SystemParams& params) {
  validate(params, true);
  const double L = params.ring_length;
  std::vector<BranchPoint> history{{1.0 / params.xi, root.k1, root.k2}};
  continue_to(history, kHardCoreU, params.xi_b, L);
  const double limit = energy_of(history.back().k1, history.back().k2);
  const int count =
      2 * static_cast<int>(std::ceil(history.back().k2 * L / pi)) + 4;
  const auto pairs = allowed_pairs(orbital_wavenumbers(params.xi_b, count, L));
  const auto best = std::min_element(
      pairs.begin(), pairs.end(), [limit](const auto& x, const auto& y) {
        return std::abs(x.tonks_energy - limit) < std::abs(y.tonks_energy - limit);
      });
  return *best;
}

CoefficientFit fit_coefficients(const SystemParams& params_base,
                                const std::vector<double>& xi_samples,
                                const OrbitalPair& branch) {
  if (xi_samples.size() < 4)
    throw std::invalid_argument("need at least 4 xi samples");
  for (double xi : xi_samples)
    if (!(xi >= 100.0)) throw std::invalid_argument("xi samples must be >= 100");
  const double L = params_base.ring_length;
  CoefficientFit fit;
  fit.branch = branch;
  fit.xi = xi_samples;
  fit.roots = track_branch(params_base.xi_b, branch, xi_samples, L);

  // Columns in the scaled variable ξ_min/ξ keep the normal equations tame.
  const double xi_min = *std::min_element(xi_samples.begin(), xi_samples.end());
  const Eigen::Index m = static_cast<Eigen::Index>(xi_samples.size());
  Eigen::MatrixXd A(m, 4);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = xi_min / xi_samples[i];
    A(i, 0) = 1.0;
    A(i, 1) = t;
    A(i, 2) = t * t;
    A(i, 3) = t * t * t;
    b(i) = fit.roots[i].energy * L * L;
  }
  const Eigen::VectorXd d = A.colPivHouseholderQr().solve(b);
  fit.c0 = d(0);
  fit.c1 = d(1) * xi_min;
  fit.c2 = d(2) * xi_min * xi_min;
  fit.c3 = d(3) * xi_min * xi_min * xi_min;
  fit.residual = (A * d - b).cwiseAbs().maxCoeff();
  return fit;
}

CoefficientFit fit_coefficients(const SystemParams& params_base,
                                const std::vector<double>& xi_samples) {
  const auto pairs = allowed_pairs(
      orbital_wavenumbers(params_base.xi_b, 8, params_base.ring_length));
  return fit_coefficients(params_base, xi_samples, pairs.front());
}

}  // namespace deltaring
