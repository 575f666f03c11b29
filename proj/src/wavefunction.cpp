#include "deltaring/wavefunction.hpp"
#include "deltaring/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deltaring {

namespace {

constexpr int kNodesPerPanel = 32;

// SplitMix64 step; keeps probe sets identical across standard libraries.
std::uint64_t next_random(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform(std::uint64_t& state, double lo, double hi) {
  const double u = static_cast<double>(next_random(state) >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::vector<TrigTerm> interior_closed_form(double k1, double k2, double a,
                                           double ab, double L) {
  const double S = std::sin(0.5 * k1 * L);
  const double C = std::cos(0.5 * k1 * L);
  const double p = 0.5 * (k1 + k2);
  const double m = 0.5 * (k1 - k2);
  const double kk = k1 * k1 - k2 * k2;
  const double bracket_minus = 2.0 * k1 * ab * C +
                               (-2.0 + k1 * k1 * a * ab - k1 * k2 * a * ab) * S;
  const double bracket_plus = 2.0 * k1 * ab * C +
                              (-2.0 + k1 * k1 * a * ab + k1 * k2 * a * ab) * S;
  // {coef, sin in (x1-x2)?, freq, sin in (x1+x2)?, freq}
  return {
      {-kk * a * a * S, false, p, false, m},
      {kk * a * a * S, false, m, false, p},
      {2.0 * (k1 + k2) * a * S, true, m, false, p},
      {-2.0 * (k1 - k2) * a * S, true, p, false, m},
      {-(k1 + k2) * a * bracket_minus, false, p, true, m},
      {-4.0 * k1 * ab * C + 2.0 * (2.0 - k1 * k1 * a * ab + k1 * k2 * a * ab) * S,
       true, p, true, m},
      {-(k2 - k1) * a * bracket_plus, false, m, true, p},
      {4.0 * k1 * ab * C + 2.0 * (-2.0 + k1 * k1 * a * ab + k1 * k2 * a * ab) * S,
       true, m, true, p},
  };
}

std::vector<TrigTerm> straddle_closed_form(double k1, double k2, double a,
                                           double ab, double L) {
  const double S = std::sin(0.5 * k1 * L);
  const double C = std::cos(0.5 * k1 * L);
  const double p = 0.5 * (k1 + k2);
  const double m = 0.5 * (k1 - k2);
  return {
      {-k1 * (k1 + k2) * a * ab * (2.0 * C + (k1 - k2) * a * S), false, p, true,
       m},
      {-4.0 * k1 * (a + ab) * C +
           (4.0 + k2 * k2 * a * a + 2.0 * k1 * k2 * a * ab -
            k1 * k1 * a * (a + 2.0 * ab)) *
               S,
       true, p, true, m},
      {k1 * (k1 - k2) * a * ab * (2.0 * C + (k1 + k2) * a * S), false, m, true,
       p},
      {4.0 * k1 * (a + ab) * C +
           (-4.0 - k2 * k2 * a * a + 2.0 * k1 * k2 * a * ab +
            k1 * k1 * a * (a + 2.0 * ab)) *
               S,
       true, m, true, p},
  };
}

double sum_abs(const std::vector<TrigTerm>& terms) {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coef);
  return s;
}

}  // namespace

EigenstateEvaluator::EigenstateEvaluator(const RapidityPair& pair,
                                         const ScatteringLengths& lens,
                                         double ring_length)
    : pair_(pair), lens_(lens), ring_length_(ring_length) {
  if (!(ring_length > 0.0))
    throw std::invalid_argument("ring length must be positive");
  interior_ = interior_closed_form(pair.k1, pair.k2, lens.a, lens.a_b,
                                   ring_length);
  straddle_ = straddle_closed_form(pair.k1, pair.k2, lens.a, lens.a_b,
                                   ring_length);
}

EigenstateEvaluator::Local EigenstateEvaluator::eval_terms(
    const std::vector<TrigTerm>& terms, double u, double v) const {
  const double d = u - v;
  const double s = u + v;
  Local out{0.0, 0.0, 0.0};
  for (const auto& t : terms) {
    const double ad = t.diff_freq * d;
    const double bs = t.sum_freq * s;
    const double T = t.diff_sin ? std::sin(ad) : std::cos(ad);
    const double dT = t.diff_sin ? t.diff_freq * std::cos(ad)
                                 : -t.diff_freq * std::sin(ad);
    const double U = t.sum_sin ? std::sin(bs) : std::cos(bs);
    const double dU = t.sum_sin ? t.sum_freq * std::cos(bs)
                                : -t.sum_freq * std::sin(bs);
    out.value += t.coef * T * U;
    out.d_diff += t.coef * (dT * U + T * dU);
    out.d_sum += t.coef * (-dT * U + T * dU);
  }
  out.value *= scale_;
  out.d_diff *= scale_;
  out.d_sum *= scale_;
  return out;
}

double EigenstateEvaluator::eval_seed_interior(double x1, double x2) const {
  const double half = 0.5 * ring_length_;
  if (!(0.0 <= x1 && x1 <= x2 && x2 <= half))
    throw std::domain_error("point outside the 0 < x1 < x2 < L/2 seed");
  return eval_terms(interior_, x1, x2).value;
}

double EigenstateEvaluator::eval_seed_straddle(double x1, double x2) const {
  const double half = 0.5 * ring_length_;
  if (!(-half <= x1 && x1 <= 0.0 && 0.0 <= x2 && x2 <= half))
    throw std::domain_error("point outside the x1 < 0 < x2 seed");
  return eval_terms(straddle_, x1, x2).value;
}

double EigenstateEvaluator::wrap(double x) const {
  const double L = ring_length_;
  double y = std::fmod(x + 0.5 * L, L);
  if (y < 0.0) y += L;
  y -= 0.5 * L;
  return y >= 0.5 * L ? y - L : y;
}

Sector EigenstateEvaluator::sector_of(double x1, double x2) const {
  if (0.0 <= x1 && x1 <= x2) return Sector::seed_interior;
  if (0.0 <= x2 && x2 <= x1) return Sector::interior_swapped;
  if (x1 <= x2 && x2 <= 0.0) return Sector::inverted_lower;
  if (x2 <= x1 && x1 <= 0.0) return Sector::inverted_upper;
  if (x1 <= 0.0 && 0.0 <= x2) return Sector::seed_straddle;
  return Sector::straddle_swapped;
}

double EigenstateEvaluator::eval_closed_square(double x1, double x2) const {
  switch (sector_of(x1, x2)) {
    case Sector::seed_interior: return eval_terms(interior_, x1, x2).value;
    case Sector::interior_swapped: return eval_terms(interior_, x2, x1).value;
    case Sector::inverted_lower: return -eval_terms(interior_, -x2, -x1).value;
    case Sector::inverted_upper: return -eval_terms(interior_, -x1, -x2).value;
    case Sector::seed_straddle: return eval_terms(straddle_, x1, x2).value;
    case Sector::straddle_swapped: return eval_terms(straddle_, x2, x1).value;
  }
  return 0.0;
}

double EigenstateEvaluator::eval_psi(double x1, double x2) const {
  return eval_closed_square(wrap(x1), wrap(x2));
}

Gradient EigenstateEvaluator::gradient(double x1, double x2) const {
  x1 = wrap(x1);
  x2 = wrap(x2);
  switch (sector_of(x1, x2)) {
    case Sector::seed_interior: {
      const auto l = eval_terms(interior_, x1, x2);
      return {l.d_diff, l.d_sum};
    }
    case Sector::interior_swapped: {
      const auto l = eval_terms(interior_, x2, x1);
      return {l.d_sum, l.d_diff};
    }
    case Sector::inverted_lower: {
      const auto l = eval_terms(interior_, -x2, -x1);
      return {l.d_sum, l.d_diff};
    }
    case Sector::inverted_upper: {
      const auto l = eval_terms(interior_, -x1, -x2);
      return {l.d_diff, l.d_sum};
    }
    case Sector::seed_straddle: {
      const auto l = eval_terms(straddle_, x1, x2);
      return {l.d_diff, l.d_sum};
    }
    case Sector::straddle_swapped: {
      const auto l = eval_terms(straddle_, x2, x1);
      return {l.d_sum, l.d_diff};
    }
  }
  return {};
}

double EigenstateEvaluator::laplacian(double x1, double x2) const {
  x1 = wrap(x1);
  x2 = wrap(x2);
  // Every sector is a rigid image of a seed, so the Laplacian of the image is
  // the image of the seed Laplacian.
  auto seed_laplacian = [this](const std::vector<TrigTerm>& terms, double u,
                               double v) {
    double acc = 0.0;
    for (const auto& t : terms) {
      const double ad = t.diff_freq * (u - v);
      const double bs = t.sum_freq * (u + v);
      const double T = t.diff_sin ? std::sin(ad) : std::cos(ad);
      const double U = t.sum_sin ? std::sin(bs) : std::cos(bs);
      acc += -2.0 *
             (t.diff_freq * t.diff_freq + t.sum_freq * t.sum_freq) * t.coef *
             T * U;
    }
    return scale_ * acc;
  };
  switch (sector_of(x1, x2)) {
    case Sector::seed_interior: return seed_laplacian(interior_, x1, x2);
    case Sector::interior_swapped: return seed_laplacian(interior_, x2, x1);
    case Sector::inverted_lower: return -seed_laplacian(interior_, -x2, -x1);
    case Sector::inverted_upper: return -seed_laplacian(interior_, -x1, -x2);
    case Sector::seed_straddle: return seed_laplacian(straddle_, x1, x2);
    case Sector::straddle_swapped: return seed_laplacian(straddle_, x2, x1);
  }
  return 0.0;
}

double EigenstateEvaluator::norm_constant() const { return std::abs(scale_); }

double EigenstateEvaluator::coefficient_scale() const {
  return std::abs(scale_) * (sum_abs(interior_) + sum_abs(straddle_));
}

EigenstateEvaluator EigenstateEvaluator::with_scale(double scale) const {
  EigenstateEvaluator copy = *this;
  copy.scale_ = scale;
  return copy;
}

std::array<double, 6> sector_norms(const EigenstateEvaluator& ev, int quad_n) {
  if (quad_n < 1) throw std::invalid_argument("quad_n must be >= 1");
  const double half = 0.5 * ev.ring_length();
  const auto base = gauss_legendre(kNodesPerPanel);

  // ∫_{lo}^{hi} dy ∫_{inner_lo(y)}^{inner_hi(y)} dx |Ψ(map(x, y))|²
  auto triangle = [&](double lo, double hi, auto inner_limits, auto point) {
    const auto outer = composite(base, lo, hi, quad_n);
    double acc = 0.0;
    for (std::size_t i = 0; i < outer.nodes.size(); ++i) {
      const double y = outer.nodes[i];
      const auto [a, b] = inner_limits(y);
      const auto inner = composite(base, a, b, quad_n);
      double row = 0.0;
      for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
        const auto [x1, x2] = point(inner.nodes[j], y);
        const double v = ev.eval_psi(x1, x2);
        row += inner.weights[j] * v * v;
      }
      acc += outer.weights[i] * row;
    }
    return acc;
  };
  auto rectangle = [&](double lo1, double hi1, double lo2, double hi2) {
    const auto r1 = composite(base, lo1, hi1, quad_n);
    const auto r2 = composite(base, lo2, hi2, quad_n);
    double acc = 0.0;
    for (std::size_t i = 0; i < r1.nodes.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < r2.nodes.size(); ++j) {
        const double v = ev.eval_psi(r1.nodes[i], r2.nodes[j]);
        row += r2.weights[j] * v * v;
      }
      acc += r1.weights[i] * row;
    }
    return acc;
  };
  using P = std::pair<double, double>;
  std::array<double, 6> out{};
  // 1: 0 < x1 < x2 < L/2 (outer x2)
  out[0] = triangle(0.0, half, [](double y) { return P{0.0, y}; },
                    [](double x, double y) { return P{x, y}; });
  // 2: 0 < x2 < x1 < L/2 (outer x1)
  out[1] = triangle(0.0, half, [](double y) { return P{0.0, y}; },
                    [](double x, double y) { return P{y, x}; });
  // 3: -L/2 < x1 < x2 < 0 (outer x2)
  out[2] = triangle(-half, 0.0, [half](double y) { return P{-half, y}; },
                    [](double x, double y) { return P{x, y}; });
  // 4: -L/2 < x2 < x1 < 0 (outer x1)
  out[3] = triangle(-half, 0.0, [half](double y) { return P{-half, y}; },
                    [](double x, double y) { return P{y, x}; });
  out[4] = rectangle(-half, 0.0, 0.0, half);
  out[5] = rectangle(0.0, half, -half, 0.0);
  return out;
}

double norm_squared(const EigenstateEvaluator& ev, int quad_n) {
  const auto parts = sector_norms(ev, quad_n);
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

EigenstateEvaluator normalize(const EigenstateEvaluator& ev, int quad_n) {
  const double L = ev.ring_length();
  const double n2 = norm_squared(ev, quad_n);
  const double bound = ev.coefficient_scale();
  if (!(n2 >= 1e-8 * bound * bound * L * L) || !std::isfinite(n2))
    throw NumericalError("degenerate zero state");
  double factor = 1.0 / std::sqrt(n2);
  // Phase: amplitude at the wedge centroid (L/8, L/4) real-positive; fall
  // back to other interior points when the centroid sits on a node.
  const double probes[][2] = {{L / 8, L / 4},     {L / 10, L / 3},
                              {-L / 7, L / 5},    {L / 16, 3 * L / 8},
                              {-L / 3, L / 9}};
  for (const auto& pt : probes) {
    const double v = ev.eval_psi(pt[0], pt[1]);
    if (std::abs(v) * factor > 1e-9) {
      if (v < 0.0) factor = -factor;
      break;
    }
  }
  const double current = ev.phase() * ev.norm_constant();
  return ev.with_scale(current * factor);
}

ContractTolerances ContractTolerances::uniform(double tol) {
  ContractTolerances t;
  t.jump = tol;
  t.periodicity = tol;
  t.schrodinger = tol;
  return t;
}

double ContractReport::symmetry() const {
  return std::max({symmetry_bosonic, symmetry_inversion, symmetry_antidiagonal,
                   symmetry_translation});
}

double ContractReport::jump() const {
  return std::max({jump_diagonal, jump_barrier_x1, jump_barrier_x2});
}

bool ContractReport::passed() const {
  return symmetry() < tolerances.symmetry && jump() < tolerances.jump &&
         schrodinger < tolerances.schrodinger &&
         periodicity < tolerances.periodicity && node < tolerances.node;
}

namespace {

// One-sided 3-point derivative at t = 0 from the side `dir` (+1 / -1),
// Richardson-extrapolated over steps h and h/2.
template <class F>
double one_sided_derivative(const F& f, double h, int dir) {
  auto d = [&](double step) {
    const double s = dir * step;
    return dir * (-3.0 * f(0.0) + 4.0 * f(s) - f(2.0 * s)) / (2.0 * step);
  };
  const double coarse = d(h);
  const double fine = d(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

template <class F>
double second_derivative_8th(const F& f, double h) {
  static constexpr double c[] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0,
                                 8.0 / 315.0, -1.0 / 560.0};
  double acc = c[0] * f(0.0);
  for (int k = 1; k <= 4; ++k) acc += c[k] * (f(k * h) + f(-k * h));
  return acc / (h * h);
}

}  // namespace

ContractReport verify_contracts(const EigenstateEvaluator& ev,
                                const ContractTolerances& tol, int probes,
                                std::uint64_t seed) {
  if (probes < 1) throw std::invalid_argument("need at least one probe");
  ContractReport rep;
  rep.tolerances = tol;
  rep.probes = probes;
  const double L = ev.ring_length();
  const double half = 0.5 * L;
  const double k1 = ev.pair().k1;
  const double k2 = ev.pair().k2;
  const double kscale = std::max({std::abs(k1), std::abs(k2), 1.0 / L});
  const double a = ev.lens().a;
  const double ab = ev.lens().a_b;

  double peak = 0.0;
  {
    const auto grid = sample_grid(ev, 128);
    for (double v : grid.psi) peak = std::max(peak, std::abs(v));
  }
  std::uint64_t state = seed;
  std::vector<std::pair<double, double>> pts(probes);
  for (auto& p : pts) {
    p.first = uniform(state, -half, half);
    p.second = uniform(state, -half, half);
    peak = std::max(peak, std::abs(ev.eval_psi(p.first, p.second)));
  }
  rep.peak = peak;
  if (!(peak > 0.0)) throw NumericalError("degenerate zero state");

  const double margin = 0.02 * L;
  const double h_jump = 1e-4 * L;
  auto away = [&](double x) {
    return std::abs(x) > margin && std::abs(std::abs(x) - half) > margin;
  };
  auto draw_line_coordinate = [&]() {
    double x;
    do {
      x = uniform(state, -half, half);
    } while (!away(x));
    return x;
  };

  auto relative_jump = [&](double dplus, double dminus, double expected) {
    const double denom =
        std::max({std::abs(dplus), std::abs(dminus), std::abs(expected),
                  peak / L});
    return std::abs((dplus - dminus) - expected) / denom;
  };

  for (int i = 0; i < probes; ++i) {
    // contact line x1 = x2, derivative along x12 = x1 - x2
    {
      const double X = draw_line_coordinate();
      auto f = [&](double t) { return ev.eval_psi(X + 0.5 * t, X - 0.5 * t); };
      const double dp = one_sided_derivative(f, h_jump, +1);
      const double dm = one_sided_derivative(f, h_jump, -1);
      rep.jump_diagonal = std::max(
          rep.jump_diagonal, relative_jump(dp, dm, -(2.0 / a) * f(0.0)));
    }
    // barrier line x1 = 0
    {
      const double y = draw_line_coordinate();
      auto f = [&](double t) { return ev.eval_psi(t, y); };
      const double dp = one_sided_derivative(f, h_jump, +1);
      const double dm = one_sided_derivative(f, h_jump, -1);
      rep.jump_barrier_x1 = std::max(
          rep.jump_barrier_x1, relative_jump(dp, dm, -(2.0 / ab) * f(0.0)));
    }
    // barrier line x2 = 0, derivative in x2
    {
      const double x = draw_line_coordinate();
      auto f = [&](double t) { return ev.eval_psi(x, t); };
      const double dp = one_sided_derivative(f, h_jump, +1);
      const double dm = one_sided_derivative(f, h_jump, -1);
      rep.jump_barrier_x2 = std::max(
          rep.jump_barrier_x2, relative_jump(dp, dm, -(2.0 / ab) * f(0.0)));
    }
  }

  for (const auto& [x1, x2] : pts) {
    const double v = ev.eval_psi(x1, x2);
    rep.symmetry_bosonic =
        std::max(rep.symmetry_bosonic, std::abs(ev.eval_psi(x2, x1) - v) / peak);
    rep.symmetry_inversion = std::max(
        rep.symmetry_inversion, std::abs(ev.eval_psi(-x1, -x2) + v) / peak);
    rep.symmetry_antidiagonal = std::max(
        rep.symmetry_antidiagonal, std::abs(ev.eval_psi(-x2, -x1) + v) / peak);
    rep.symmetry_translation = std::max(
        {rep.symmetry_translation, std::abs(ev.eval_psi(x1 + L, x2) - v) / peak,
         std::abs(ev.eval_psi(x1, x2 + L) - v) / peak});
    rep.node = std::max(rep.node, std::abs(ev.eval_psi(x1, -x1)) / peak);
  }

  // Seam x = ±L/2: value and normal derivative must match across the wrap.
  for (int i = 0; i < probes; ++i) {
    const double y = draw_line_coordinate();
    auto left1 = [&](double t) { return ev.eval_closed_square(half + t, y); };
    auto right1 = [&](double t) { return ev.eval_closed_square(-half + t, y); };
    auto left2 = [&](double t) { return ev.eval_closed_square(y, half + t); };
    auto right2 = [&](double t) { return ev.eval_closed_square(y, -half + t); };
    const double grad_scale = peak * kscale;
    const double value_err =
        std::max(std::abs(left1(0.0) - right1(0.0)),
                 std::abs(left2(0.0) - right2(0.0))) / peak;
    const double deriv_err =
        std::max(std::abs(one_sided_derivative(left1, h_jump, -1) -
                          one_sided_derivative(right1, h_jump, +1)),
                 std::abs(one_sided_derivative(left2, h_jump, -1) -
                          one_sided_derivative(right2, h_jump, +1))) /
        grad_scale;
    rep.periodicity = std::max({rep.periodicity, value_err, deriv_err});
  }

  // Local Schrödinger equation away from every mirror line and the seam.
  {
    const double h = 0.05 / kscale;
    const double clearance = std::max(margin, 6.0 * h);
    const double E = std::max(ev.energy(), 1.0 / (L * L));
    int accepted = 0;
    for (int guard = 0; accepted < probes && guard < 100 * probes; ++guard) {
      const double x1 = uniform(state, -half, half);
      const double x2 = uniform(state, -half, half);
      const double lines[] = {x1, x2, (x1 - x2) / std::sqrt(2.0),
                              half - std::abs(x1), half - std::abs(x2)};
      bool ok = true;
      for (double d : lines) ok = ok && std::abs(d) > clearance;
      if (!ok) continue;
      ++accepted;
      const double lap =
          second_derivative_8th([&](double t) { return ev.eval_psi(x1 + t, x2); }, h) +
          second_derivative_8th([&](double t) { return ev.eval_psi(x1, x2 + t); }, h);
      const double res = std::abs(-0.5 * lap - ev.energy() * ev.eval_psi(x1, x2));
      rep.schrodinger = std::max(rep.schrodinger, res / (E * peak));
    }
  }
  return rep;
}

WavefunctionGrid sample_grid(const EigenstateEvaluator& ev, int n) {
  if (n < 2) throw std::invalid_argument("grid needs n >= 2");
  const double L = ev.ring_length();
  WavefunctionGrid grid;
  grid.n = n;
  grid.axis.resize(n);
  for (int i = 0; i < n; ++i) grid.axis[i] = -0.5 * L + i * L / n;
  grid.psi.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      grid.psi[static_cast<std::size_t>(i) * n + j] =
          ev.eval_psi(grid.axis[i], grid.axis[j]);
  return grid;
}

}  // namespace deltaring
