#include "deltaring/core.hpp"

#include <cmath>
#include <sstream>

namespace deltaring {

void validate(const SystemParams& params, bool allow_attractive) {
  if (!(params.ring_length > 0.0) || !std::isfinite(params.ring_length))
    throw std::invalid_argument("ring length must be positive");
  if (!std::isfinite(params.xi) || !std::isfinite(params.xi_b))
    throw std::invalid_argument("couplings must be finite");
  if (!allow_attractive && !(params.xi > 0.0 && params.xi_b > 0.0))
    throw std::invalid_argument(
        "couplings must be positive (attractive values need analytic "
        "continuation to be enabled)");
}

ScatteringLengths scattering_lengths(const SystemParams& params) {
  if (params.xi == 0.0 || params.xi_b == 0.0)
    throw std::invalid_argument(
        "scattering length undefined at zero coupling");
  ScatteringLengths lens;
  lens.mu = 0.5;
  lens.a = -1.0 / (lens.mu * params.g());
  lens.a_b = -1.0 / params.g_b();
  return lens;
}

std::string describe(const SystemParams& params) {
  std::ostringstream os;
  os.precision(17);
  os << "xi=" << params.xi << " xi_b=" << params.xi_b
     << " L=" << params.ring_length;
  return os.str();
}

}  // namespace deltaring
