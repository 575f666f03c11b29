#pragma once

#include "deltaring/core.hpp"

#include <optional>
#include <vector>

namespace deltaring {

enum class OrbitalParity { even, odd };

//! One-body boundary condition on the ring. Two hard-core bosons map onto
//! two fermions with antiperiodic orbitals; periodic orbitals solve the bare
//! one-body ring problem.
enum class OrbitalBoundary { antiperiodic, periodic };

struct OrbitalSpectrum {
  std::vector<double> kappas;  //!< ascending, > 0
  std::vector<OrbitalParity> parities;
  //! Decay constant q of the single bound orbital (κ = i q) for an attractive
  //! barrier, when one exists.
  std::optional<double> bound_q;
  OrbitalBoundary boundary = OrbitalBoundary::antiperiodic;
  double ring_length = 1.0;
};

//! Lowest `count` nonzero one-body wavenumbers of -½φ'' + g_B δ(x) φ = εφ,
//! merged over both parities.
//!   antiperiodic: odd κ = (2n-1)π/L, even κ cot(κL/2) = -ξ_B/L
//!   periodic:     odd κ = 2πn/L,     even κ tan(κL/2) =  ξ_B/L
OrbitalSpectrum orbital_wavenumbers(double xi_b, int count,
                                    double ring_length = 1.0,
                                    OrbitalBoundary boundary =
                                        OrbitalBoundary::antiperiodic);

//! Two distinct orbitals of equal parity (the odd bosonic sector needs
//! matched parities) with their Tonks energy ½(κ1² + κ2²).
struct OrbitalPair {
  int first = 0;   //!< index into the spectrum
  int second = 0;
  double eta1 = 0.0;  //!< κ1 L
  double eta2 = 0.0;  //!< κ2 L
  OrbitalParity parity = OrbitalParity::even;
  double tonks_energy = 0.0;

  //! Both orbitals feel the barrier (even parity).
  bool barrier_coupled() const { return parity == OrbitalParity::even; }
};

//! All parity-matched pairs from the spectrum, ascending in Tonks energy.
std::vector<OrbitalPair> allowed_pairs(const OrbitalSpectrum& spectrum);

struct ExpansionParams {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double xi = 0.0;
  double xi_b = 0.0;
  double ring_length = 1.0;
  //! Pseudopotential strength -ħ⁴/(μ² g); documentation only.
  double g_tilde() const { return -4.0 * ring_length / xi; }
};

void validate(const ExpansionParams& ep);

//! E = c0 + c1/ξ + c2/ξ², in units ħ²/(m L²).
struct ExpansionCoefficients {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

//! Coefficients of ε(η1, η2) + ε(η2, η1). Throws std::domain_error
//! ("expansion singular at zero barrier") at ξ_B = 0.
ExpansionCoefficients expansion_coefficients(double eta1, double eta2,
                                             double xi_b);

struct ExpansionEnergy {
  double leading = 0.0;  //!< ħ = m = 1 energies, each term scaled by 1/L²
  double first = 0.0;
  double second = 0.0;
  double total = 0.0;
  bool trusted = true;   //!< false below ξ = 10 or for |ξ_B| < 0.1
};

ExpansionEnergy expansion_energy(const ExpansionParams& ep);

//! Exact BAE roots along one adiabatic branch, continued in 1/ξ from the
//! hard-core limit (rapidities = orbital wavenumbers) down to each sample.
//! Result order follows `xi_samples`. Throws NumericalError("branch
//! discontinuity") when continuation cannot follow the branch.
std::vector<RapidityPair> track_branch(double xi_b, const OrbitalPair& start,
                                       const std::vector<double>& xi_samples,
                                       double ring_length = 1.0);

//! Follows an exact root at `params` to ξ → ∞ and returns the allowed
//! orbital pair whose Tonks energy is closest to the limit.
OrbitalPair tonks_pair_of(const RapidityPair& root, const SystemParams& params);

struct CoefficientFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;       //!< O(1/ξ³) remainder absorbed by the model
  double residual = 0.0; //!< max |E_exact - E_fit| over the samples
  std::vector<double> xi;
  std::vector<RapidityPair> roots;
  OrbitalPair branch;
};

//! Least-squares fit of E(ξ) = c0 + c1/ξ + c2/ξ² + c3/ξ³ to exact energies
//! on one tracked branch. Needs ≥ 4 samples, all ξ ≥ 100.
CoefficientFit fit_coefficients(const SystemParams& params_base,
                                const std::vector<double>& xi_samples,
                                const OrbitalPair& branch);

//! Same, on the lowest allowed (ground) branch.
CoefficientFit fit_coefficients(const SystemParams& params_base,
                                const std::vector<double>& xi_samples);

}  // namespace deltaring
