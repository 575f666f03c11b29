#pragma once

// Units: ħ = m = 1 throughout. Couplings enter as the dimensionless
// ξ = g/(ħ²/mL) and ξ_B = g_B/(ħ²/mL); lengths are in units of the ring
// length L (default 1), energies in ħ²/mL² when L = 1.

#include <stdexcept>
#include <string>

namespace deltaring {

//! Thrown when an iterative numerical method fails to deliver its contract.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SystemParams {
  double xi = 0.0;           //!< particle-particle coupling ξ
  double xi_b = 0.0;         //!< particle-barrier coupling ξ_B
  double ring_length = 1.0;  //!< L

  //! Physical couplings g and g_B for ħ = m = 1.
  double g() const { return xi / ring_length; }
  double g_b() const { return xi_b / ring_length; }

  bool repulsive() const { return xi > 0.0 && xi_b > 0.0; }
};

//! Throws std::invalid_argument unless L > 0 and couplings are finite. When
//! allow_attractive is false, additionally requires ξ > 0 and ξ_B > 0.
void validate(const SystemParams& params, bool allow_attractive = false);

struct ScatteringLengths {
  double a = 0.0;    //!< particle-particle, a = -ħ²/(μ g)
  double a_b = 0.0;  //!< particle-barrier, a_B = -ħ²/(m g_B)
  double mu = 0.5;   //!< reduced mass m/2
};

//! a = -2L/ξ, a_B = -L/ξ_B. Zero coupling has no finite scattering length.
ScatteringLengths scattering_lengths(const SystemParams& params);

//! E = (k1² + k2²)/2.
constexpr double energy_of(double k1, double k2) {
  return 0.5 * (k1 * k1 + k2 * k2);
}

struct RapidityPair {
  double k1 = 0.0;
  double k2 = 0.0;
  double residual_1 = 0.0;
  double residual_2 = 0.0;
  double energy = 0.0;
};

std::string describe(const SystemParams& params);

}  // namespace deltaring
