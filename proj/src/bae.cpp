#include "deltaring/bae.hpp"
#include "deltaring/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace deltaring {

namespace {

using Wide = long double;

template <class T>
T sinc(T x) {
  using std::abs, std::sin;
  if (abs(x) < T(1e-4)) {
    const T x2 = x * x;
    return T(1) - x2 / T(6) + x2 * x2 / T(120);
  }
  return sin(x) / x;
}

template <class T>
T bae1(T k1, T k2, T a, T ab, T L) {
  using std::sin, std::cos;
  const T s1 = sin(k1 * L / 2), c1 = cos(k1 * L / 2);
  const T s2 = sin(k2 * L / 2), c2 = cos(k2 * L / 2);
  return c1 * ((k2 * k2 * a * ab - 2) * s2 + k2 * (a + 2 * ab) * c2) +
         k1 * a * s1 * (k2 * ab * c2 - s2);
}

template <class T>
T bae2(T k1, T k2, T a, T L) {
  using std::sin, std::cos;
  const T s1 = sin(k1 * L / 2), c1 = cos(k1 * L / 2);
  const T s2 = sin(k2 * L / 2), c2 = cos(k2 * L / 2);
  return (k1 * k1 * a * s1 * s2 + 2 * k1 * s2 * c1) -
         (k2 * k2 * a * s1 * s2 + 2 * k2 * s1 * c2);
}

// bae2 / (k1 (k1 - k2)) rewritten so that both removable zeros cancel
// symbolically: sin(k1L/2) = k1 (L/2) sinc(k1L/2) and
// k1 s2 c1 - k2 s1 c2 = (k1 - k2) s1 c2 - k1 sin((k1 - k2)L/2).
template <class T>
T bae2_reduced(T k1, T k2, T a, T L) {
  using std::sin, std::cos;
  const T s2 = sin(k2 * L / 2), c2 = cos(k2 * L / 2);
  return (L / 2) * sinc(k1 * L / 2) * (a * s2 * (k1 + k2) + 2 * c2) -
         L * sinc((k1 - k2) * L / 2);
}

struct Residuals {
  Wide r1;
  Wide r2;
};

Residuals wide_residuals(Wide k1, Wide k2, const ScatteringLengths& lens,
                         double L) {
  return {bae1<Wide>(k1, k2, lens.a, lens.a_b, L),
          bae2<Wide>(k1, k2, lens.a, L)};
}

double original_residual(double k1, double k2, const ScatteringLengths& lens,
                         double L) {
  const auto r = wide_residuals(k1, k2, lens, L);
  return static_cast<double>(std::max(std::abs(r.r1), std::abs(r.r2)));
}

// The long-double iterate has to be stored as double; pick the neighbouring
// representable pair with the smallest residual.
std::pair<double, double> best_double(Wide k1, Wide k2,
                                      const ScatteringLengths& lens, double L) {
  const double b1 = static_cast<double>(k1);
  const double b2 = static_cast<double>(k2);
  std::pair<double, double> best{b1, b2};
  double best_res = original_residual(b1, b2, lens, L);
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (double c1 : {std::nextafter(b1, -inf), b1, std::nextafter(b1, inf)}) {
    for (double c2 : {std::nextafter(b2, -inf), b2, std::nextafter(b2, inf)}) {
      const double r = original_residual(c1, c2, lens, L);
      if (r < best_res) {
        best_res = r;
        best = {c1, c2};
      }
    }
  }
  return best;
}

template <class F>
bool newton_step(const F& f, Wide& k1, Wide& k2, double max_step) {
  const auto [f1, f2] = f(k1, k2);
  const Wide h1 = Wide(1e-6) * std::max<Wide>(1, std::abs(k1));
  const Wide h2 = Wide(1e-6) * std::max<Wide>(1, std::abs(k2));
  const auto p1 = f(k1 + h1, k2), m1 = f(k1 - h1, k2);
  const auto p2 = f(k1, k2 + h2), m2 = f(k1, k2 - h2);
  const Wide j11 = (p1.r1 - m1.r1) / (2 * h1);
  const Wide j21 = (p1.r2 - m1.r2) / (2 * h1);
  const Wide j12 = (p2.r1 - m2.r1) / (2 * h2);
  const Wide j22 = (p2.r2 - m2.r2) / (2 * h2);
  const Wide det = j11 * j22 - j12 * j21;
  if (det == 0 || !std::isfinite(static_cast<double>(det))) return false;
  Wide d1 = -(j22 * f1 - j12 * f2) / det;
  Wide d2 = -(-j21 * f1 + j11 * f2) / det;
  const Wide len = std::max(std::abs(d1), std::abs(d2));
  if (max_step > 0 && len > max_step) {
    d1 *= max_step / len;
    d2 *= max_step / len;
  }
  // Backtrack on the merit |f|² when a full step does not help.
  const Wide merit = f1 * f1 + f2 * f2;
  Wide t = 1;
  for (int i = 0; i < 12; ++i) {
    const auto trial = f(k1 + t * d1, k2 + t * d2);
    if (trial.r1 * trial.r1 + trial.r2 * trial.r2 < merit || i == 11) break;
    t /= 2;
  }
  k1 += t * d1;
  k2 += t * d2;
  return std::isfinite(static_cast<double>(k1)) &&
         std::isfinite(static_cast<double>(k2));
}

}  // namespace

void validate(const SearchWindow& window) {
  if (!(window.k_max > 0.0)) throw std::invalid_argument("k_max must be > 0");
  if (window.grid_n < 16) throw std::invalid_argument("grid_n must be >= 16");
  if (!(window.newton_tol > 0.0))
    throw std::invalid_argument("newton_tol must be > 0");
  if (!(window.dedup_tol > 0.0))
    throw std::invalid_argument("dedup_tol must be > 0");
}

double residual_bae1(double k1, double k2, const ScatteringLengths& lens,
                     double ring_length) {
  return bae1<double>(k1, k2, lens.a, lens.a_b, ring_length);
}

double residual_bae2(double k1, double k2, const ScatteringLengths& lens,
                     double ring_length) {
  return bae2<double>(k1, k2, lens.a, ring_length);
}

double residual_bae2_reduced(double k1, double k2, const ScatteringLengths& lens,
                             double ring_length) {
  return bae2_reduced<double>(k1, k2, lens.a, ring_length);
}

RapidityPair make_pair(double k1, double k2, const ScatteringLengths& lens,
                       double ring_length) {
  const auto r = wide_residuals(k1, k2, lens, ring_length);
  RapidityPair p;
  p.k1 = k1;
  p.k2 = k2;
  p.residual_1 = static_cast<double>(r.r1);
  p.residual_2 = static_cast<double>(r.r2);
  p.energy = energy_of(k1, k2);
  return p;
}

NewtonOutcome polish_root(double k1, double k2, const ScatteringLengths& lens,
                          double ring_length, const NewtonOptions& opts) {
  const Wide L = ring_length;
  const Wide a = lens.a, ab = lens.a_b;
  auto reduced = [&](Wide u, Wide v) {
    return Residuals{bae1<Wide>(u, v, a, ab, L), bae2_reduced<Wide>(u, v, a, L)};
  };
  auto original = [&](Wide u, Wide v) {
    return Residuals{bae1<Wide>(u, v, a, ab, L), bae2<Wide>(u, v, a, L)};
  };

  NewtonOutcome out;
  Wide u = k1, v = k2;
  int polish_left = -1;
  for (int it = 0; it < opts.max_iter; ++it) {
    out.iterations = it + 1;
    if (!newton_step(reduced, u, v, opts.max_step)) {
      // Near k1 = 0 or k1 = k2 the reduced system can be singular while the
      // original one is not.
      if (!newton_step(original, u, v, opts.max_step)) {
        out.reason = "singular Jacobian";
        break;
      }
    }
    const auto r = original(u, v);
    const double res =
        static_cast<double>(std::max(std::abs(r.r1), std::abs(r.r2)));
    if (polish_left < 0 && res < opts.tol) polish_left = 2;
    if (polish_left >= 0 && polish_left-- == 0) break;
  }
  const auto [d1, d2] = best_double(u, v, lens, ring_length);
  out.k1 = d1;
  out.k2 = d2;
  out.residual = original_residual(d1, d2, lens, ring_length);
  out.converged = std::isfinite(out.residual) && out.residual < opts.tol;
  if (!out.converged && out.reason.empty())
    out.reason = "residual above tolerance after " +
                 std::to_string(out.iterations) + " iterations";
  return out;
}

bool spurious_filter(const RapidityPair& pair, const SystemParams& params) {
  const auto lens = scattering_lengths(params);
  const EigenstateEvaluator ev(pair, lens, params.ring_length);
  const double bound = ev.coefficient_scale();
  const double L = params.ring_length;
  const double n2 = norm_squared(ev, 1);
  return std::isfinite(n2) && bound > 0.0 && n2 >= 1e-8 * bound * bound * L * L;
}

ScanResult scan_roots(const SystemParams& params, const SearchWindow& window,
                      bool allow_attractive) {
  validate(params, allow_attractive);
  validate(window);
  const auto lens = scattering_lengths(params);
  const double L = params.ring_length;
  const int n = window.grid_n;
  const double dk = window.k_max / n;

  // Lattice values on nodes k_i = i dk, i = 0..n.
  const int m = n + 1;
  std::vector<double> f1(static_cast<std::size_t>(m) * m);
  std::vector<double> f2(f1.size());
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double u = i * dk, v = j * dk;
      f1[i * m + j] = residual_bae1(u, v, lens, L);
      f2[i * m + j] = residual_bae2_reduced(u, v, lens, L);
    }
  }
  // Only the upper triangle is needed; cells below it mirror k1 <-> k2 and
  // are filled lazily for the diagonal cells.
  auto F1 = [&](int i, int j) {
    return i <= j ? f1[i * m + j] : residual_bae1(i * dk, j * dk, lens, L);
  };
  auto F2 = [&](int i, int j) {
    return i <= j ? f2[i * m + j]
                  : residual_bae2_reduced(i * dk, j * dk, lens, L);
  };
  auto changes_sign = [](double a, double b, double c, double d) {
    const double lo = std::min({a, b, c, d});
    const double hi = std::max({a, b, c, d});
    return lo <= 0.0 && hi >= 0.0;
  };

  ScanResult result;
  std::vector<RapidityPair> candidates;
  NewtonOptions opts;
  opts.tol = window.newton_tol;
  opts.max_step = 2.0 * dk;
  bool any_bracket = false;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (!changes_sign(F1(i, j), F1(i + 1, j), F1(i, j + 1), F1(i + 1, j + 1)))
        continue;
      if (!changes_sign(F2(i, j), F2(i + 1, j), F2(i, j + 1), F2(i + 1, j + 1)))
        continue;
      any_bracket = true;
      const double s1 = (i + 0.5) * dk, s2 = (j + 0.5) * dk;
      const auto nt = polish_root(s1, s2, lens, L, opts);
      if (!nt.converged) {
        result.dropped.push_back({s1, s2, "newton: " + nt.reason});
        continue;
      }
      double u = nt.k1, v = nt.k2;
      if (u > v) std::swap(u, v);
      if (!(u > window.dedup_tol)) {
        result.dropped.push_back({s1, s2, "converged onto k1 = 0"});
        continue;
      }
      if (!(v - u > window.dedup_tol)) {
        result.dropped.push_back({s1, s2, "converged onto the diagonal"});
        continue;
      }
      if (v > window.k_max) {
        result.dropped.push_back({s1, s2, "converged beyond k_max"});
        continue;
      }
      candidates.push_back(make_pair(u, v, lens, L));
    }
  }
  if (!any_bracket)
    result.warnings.push_back(
        "no sign change bracketed in the window; increase grid_n or k_max");

  std::sort(candidates.begin(), candidates.end(),
            [](const RapidityPair& x, const RapidityPair& y) {
              return x.k1 != y.k1 ? x.k1 < y.k1 : x.k2 < y.k2;
            });
  std::vector<RapidityPair> unique;
  for (const auto& c : candidates) {
    bool merged = false;
    for (auto& u : unique) {
      if (std::abs(u.k1 - c.k1) < window.dedup_tol &&
          std::abs(u.k2 - c.k2) < window.dedup_tol) {
        const double rc = std::max(std::abs(c.residual_1), std::abs(c.residual_2));
        const double ru = std::max(std::abs(u.residual_1), std::abs(u.residual_2));
        if (rc < ru) u = c;
        merged = true;
        break;
      }
    }
    if (!merged) unique.push_back(c);
  }

  std::vector<std::pair<RapidityPair, double>> kept;
  for (const auto& r : unique) {
    const EigenstateEvaluator ev(r, lens, L);
    const double bound = ev.coefficient_scale();
    const double n2 = norm_squared(ev, 1);
    if (!(std::isfinite(n2) && bound > 0.0 && n2 >= 1e-8 * bound * bound * L * L)) {
      result.dropped.push_back({r.k1, r.k2, "degenerate zero state"});
      continue;
    }
    kept.emplace_back(r, std::sqrt(n2));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) {
    return x.first.energy != y.first.energy ? x.first.energy < y.first.energy
                                            : x.first.k1 < y.first.k1;
  });
  for (const auto& [r, norm] : kept) {
    result.roots.push_back(r);
    result.norms.push_back(norm);
  }
  if (result.roots.empty() && any_bracket)
    result.warnings.push_back(
        "no root survived polishing; increase grid_n or k_max");
  return result;
}

ResidualFields residual_fields(const SystemParams& params, double k_max,
                               int n) {
  if (n < 2) throw std::invalid_argument("field grid needs n >= 2");
  if (!(k_max > 0.0)) throw std::invalid_argument("k_max must be > 0");
  const auto lens = scattering_lengths(params);
  const double L = params.ring_length;
  ResidualFields out;
  out.k.resize(n);
  for (int i = 0; i < n; ++i) out.k[i] = (i + 1) * k_max / n;
  out.residual_1.resize(static_cast<std::size_t>(n) * n);
  out.residual_2.resize(out.residual_1.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.residual_1[i * n + j] = residual_bae1(out.k[i], out.k[j], lens, L);
      out.residual_2[i * n + j] =
          residual_bae2_reduced(out.k[i], out.k[j], lens, L);
    }
  }
  return out;
}

}  // namespace deltaring
