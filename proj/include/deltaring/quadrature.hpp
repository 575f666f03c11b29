#pragma once

#include <vector>

namespace deltaring {

struct GaussLegendreRule {
  std::vector<double> nodes;    //!< on [-1, 1], ascending
  std::vector<double> weights;
};

//! n-point Gauss-Legendre rule (Newton iteration on P_n).
GaussLegendreRule gauss_legendre(int n);

//! Nodes and weights of a composite rule: `panels` equal panels on [lo, hi],
//! each carrying the given rule.
GaussLegendreRule composite(const GaussLegendreRule& rule, double lo, double hi,
                            int panels);

}  // namespace deltaring
