#pragma once

#include "deltaring/core.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace deltaring {

//! One product term c · T(α (x1 - x2)) · U(β (x1 + x2)), T, U in {cos, sin}.
struct TrigTerm {
  double coef = 0.0;
  bool diff_sin = false;
  double diff_freq = 0.0;
  bool sum_sin = false;
  double sum_freq = 0.0;
};

struct Gradient {
  double d1 = 0.0;
  double d2 = 0.0;
};

//! Coordinate sectors of the reconstruction table, in table order.
enum class Sector : int {
  seed_interior = 1,      //!< 0 < x1 < x2 < L/2
  interior_swapped = 2,   //!< 0 < x2 < x1 < L/2
  inverted_lower = 3,     //!< -L/2 < x1 < x2 < 0
  inverted_upper = 4,     //!< -L/2 < x2 < x1 < 0
  seed_straddle = 5,      //!< -L/2 < x1 < 0 < x2 < L/2
  straddle_swapped = 6,   //!< -L/2 < x2 < 0 < x1 < L/2
};

//! Closed-form two-boson eigenstate in the inversion-odd sector for one
//! rapidity pair. The two seed regions carry the explicit trigonometric
//! expressions; the other four sectors are their images under exchange and
//! point inversion. Points on a mirror line belong to the lowest-numbered
//! adjacent sector.
class EigenstateEvaluator {
public:
  EigenstateEvaluator(const RapidityPair& pair, const ScatteringLengths& lens,
                      double ring_length);

  //! Seed closed forms; the arguments must lie in the respective seed region
  //! (closure included), otherwise std::domain_error.
  double eval_seed_interior(double x1, double x2) const;
  double eval_seed_straddle(double x1, double x2) const;

  //! Full wavefunction; coordinates are first wrapped into [-L/2, L/2).
  double eval_psi(double x1, double x2) const;
  //! Sector dispatch on the closed square [-L/2, L/2]² without wrapping, so
  //! both sides of the x = ±L/2 seam can be evaluated.
  double eval_closed_square(double x1, double x2) const;
  double operator()(double x1, double x2) const { return eval_psi(x1, x2); }

  //! Analytic gradient inside the sector the point dispatches to.
  Gradient gradient(double x1, double x2) const;
  //! Analytic Laplacian, equal to -(k1² + k2²) Ψ away from mirror lines.
  double laplacian(double x1, double x2) const;

  Sector sector_of(double x1, double x2) const;
  double wrap(double x) const;

  const RapidityPair& pair() const { return pair_; }
  const ScatteringLengths& lens() const { return lens_; }
  double ring_length() const { return ring_length_; }
  double energy() const { return pair_.energy; }

  //! |overall factor| applied to the printed closed forms.
  double norm_constant() const;
  //! Sign of the overall factor (+1 or -1).
  int phase() const { return scale_ < 0.0 ? -1 : 1; }
  //! Σ|c_i| over both seed expressions, including the overall factor; an
  //! upper bound on |Ψ|.
  double coefficient_scale() const;

  EigenstateEvaluator with_scale(double scale) const;

  const std::vector<TrigTerm>& interior_terms() const { return interior_; }
  const std::vector<TrigTerm>& straddle_terms() const { return straddle_; }

private:
  struct Local {
    double value;
    double d_diff;  // derivative w.r.t. the first argument
    double d_sum;   // derivative w.r.t. the second argument
  };
  Local eval_terms(const std::vector<TrigTerm>& terms, double u,
                   double v) const;

  RapidityPair pair_;
  ScatteringLengths lens_;
  double ring_length_;
  double scale_ = 1.0;
  std::vector<TrigTerm> interior_;
  std::vector<TrigTerm> straddle_;
};

//! ∫∫ |Ψ|² over each of the six sectors (table order), composite
//! Gauss-Legendre with 32 nodes per panel and quad_n panels per axis per
//! sector.
std::array<double, 6> sector_norms(const EigenstateEvaluator& ev, int quad_n);
double norm_squared(const EigenstateEvaluator& ev, int quad_n);

//! Unit-normalized copy, phase fixed so that Ψ(L/8, L/4) > 0. Throws
//! NumericalError("degenerate zero state") for an identically vanishing
//! closed form.
EigenstateEvaluator normalize(const EigenstateEvaluator& ev, int quad_n = 4);

struct ContractTolerances {
  double symmetry = 1e-12;
  double jump = 1e-6;
  double schrodinger = 1e-8;
  double periodicity = 1e-8;
  double node = 1e-10;

  //! Physical contracts (jump, periodicity, Schrödinger) at `tol`; the
  //! exact-by-construction ones keep their defaults.
  static ContractTolerances uniform(double tol);
};

struct ContractReport {
  ContractTolerances tolerances;
  int probes = 0;
  double peak = 0.0;                 //!< max |Ψ| seen on the sample set
  double jump_diagonal = 0.0;        //!< relative, on x1 = x2
  double jump_barrier_x1 = 0.0;      //!< relative, on x1 = 0
  double jump_barrier_x2 = 0.0;      //!< relative, on x2 = 0
  double symmetry_bosonic = 0.0;     //!< |Ψ(x2,x1) - Ψ(x1,x2)| / peak
  double symmetry_inversion = 0.0;   //!< |Ψ(-x1,-x2) + Ψ| / peak
  double symmetry_antidiagonal = 0.0;//!< |Ψ(-x2,-x1) + Ψ| / peak
  double symmetry_translation = 0.0; //!< |Ψ(x1+L,x2) - Ψ|, |Ψ(x1,x2+L) - Ψ|
  double periodicity = 0.0;          //!< value + normal-derivative seam mismatch
  double schrodinger = 0.0;          //!< |-½∇²Ψ - EΨ| / (E peak)
  double node = 0.0;                 //!< max |Ψ(x,-x)| / peak

  double symmetry() const;
  double jump() const;
  bool passed() const;
};

//! Probes the closed form at a deterministic pseudo-random point set (seeded)
//! for jump conditions, symmetries, periodicity, the anti-diagonal node and
//! the local Schrödinger equation. Derivatives are finite differences
//! (one-sided 3-point with Richardson for jumps and seams, 8th-order central
//! for the Laplacian), independent of the analytic gradient.
ContractReport verify_contracts(const EigenstateEvaluator& ev,
                                const ContractTolerances& tol = {},
                                int probes = 128,
                                std::uint64_t seed = 20240611);

struct WavefunctionGrid {
  int n = 0;
  std::vector<double> axis;  //!< x values, -L/2 + i L/n
  std::vector<double> psi;   //!< row-major: psi[i * n + j] = Ψ(axis[i], axis[j])
};

WavefunctionGrid sample_grid(const EigenstateEvaluator& ev, int n);

}  // namespace deltaring
