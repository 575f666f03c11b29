#pragma once

#include "deltaring/core.hpp"

#include <string>
#include <vector>

namespace deltaring {

struct SearchWindow {
  double k_max = 0.0;        //!< upper bound on k2
  int grid_n = 800;          //!< lattice points per axis
  double newton_tol = 1e-12; //!< max |residual| accepted as a root
  double dedup_tol = 1e-6;   //!< roots closer than this are merged
};

void validate(const SearchWindow& window);

//! Left-hand side of the first Bethe Ansatz equation.
double residual_bae1(double k1, double k2, const ScatteringLengths& lens,
                     double ring_length);

//! LHS - RHS of the second Bethe Ansatz equation. Vanishes identically on
//! the diagonal k1 = k2 and on k1 = 0.
double residual_bae2(double k1, double k2, const ScatteringLengths& lens,
                     double ring_length);

//! residual_bae2 / (k1 (k1 - k2)), continued analytically onto k1 = 0 and
//! k1 = k2. Shares every off-diagonal, k1 != 0 zero with residual_bae2.
double residual_bae2_reduced(double k1, double k2, const ScatteringLengths& lens,
                             double ring_length);

RapidityPair make_pair(double k1, double k2, const ScatteringLengths& lens,
                       double ring_length);

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 60;
  //! Largest step in (k1, k2), max-norm; <= 0 means unlimited.
  double max_step = 0.0;
};

struct NewtonOutcome {
  bool converged = false;
  double k1 = 0.0;
  double k2 = 0.0;
  int iterations = 0;
  double residual = 0.0;  //!< max(|R1|, |R2|) of the original equations
  std::string reason;
};

//! Damped 2D Newton on (R1, reduced R2) with a central finite-difference
//! Jacobian (step 1e-6 max(1, |k|)), finished on the unreduced residuals.
NewtonOutcome polish_root(double k1, double k2, const ScatteringLengths& lens,
                          double ring_length, const NewtonOptions& opts = {});

struct ScanDiagnostic {
  double seed_k1 = 0.0;
  double seed_k2 = 0.0;
  std::string reason;
};

struct ScanResult {
  std::vector<RapidityPair> roots;  //!< sorted by energy, then k1
  std::vector<double> norms;        //!< unnormalized L² norm per root
  std::vector<ScanDiagnostic> dropped;
  std::vector<std::string> warnings;
};

//! All real roots with 0 < k1 < k2 <= k_max: sign-change bracketing on a
//! grid_n x grid_n lattice, Newton polishing, deduplication and removal of
//! roots whose wavefunction vanishes identically.
ScanResult scan_roots(const SystemParams& params, const SearchWindow& window,
                      bool allow_attractive = false);

//! True iff the closed-form state built from the pair is not identically
//! zero: ||Ψ||² >= 1e-8 (Σ|c_i|)² L², with c_i the closed-form term
//! coefficients.
bool spurious_filter(const RapidityPair& pair, const SystemParams& params);

//! Residual fields sampled on an n x n lattice over (0, k_max]², row-major in
//! k1, for plotting the two solution manifolds. The second field is the
//! reduced residual, so its zero set carries no trivial diagonal line.
struct ResidualFields {
  std::vector<double> k;  //!< shared axis values
  std::vector<double> residual_1;
  std::vector<double> residual_2;
};

ResidualFields residual_fields(const SystemParams& params, double k_max, int n);

}  // namespace deltaring
