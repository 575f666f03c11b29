#pragma once

#include "deltaring/core.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace deltaring {

using SparseOperator = Eigen::SparseMatrix<double>;

struct OracleConfig {
  int grid_n = 512;       //!< points per axis, even
  int levels = 6;         //!< eigenvalues requested
  bool extrapolate = true;
};

void validate(const OracleConfig& cfg);

struct OracleResult {
  std::vector<double> energies;         //!< ascending
  std::vector<double> estimated_error;  //!< per level, > 0
  std::vector<bool> bound;              //!< negative-energy level
  std::vector<double> fine;             //!< raw levels at grid_n
  std::vector<double> coarse;           //!< raw levels at the companion grid
  int grid_n = 0;
  int coarse_n = 0;
  bool extrapolated = false;
};

//! Full two-particle Hamiltonian on the periodic N x N grid x = -L/2 + i L/N,
//! flattened as i1 * N + i2. Kinetic part is the 5-point Laplacian; each δ
//! line is an on-site term of weight (coupling)/h.
SparseOperator build_hamiltonian(const SystemParams& params, int grid_n);

//! Orthonormal columns spanning the grid functions that are even under
//! exchange and odd under point inversion. One column per orbit of the
//! four-element symmetry group that survives the projection.
SparseOperator symmetric_basis(int grid_n);

struct Eigenpairs {
  Eigen::VectorXd values;   //!< ascending
  Eigen::MatrixXd vectors;  //!< unit columns
};

//! Lowest `count` eigenpairs of a sparse symmetric operator. Dense solver up
//! to dimension `dense_limit`, shift-invert block Krylov with
//! Rayleigh-Ritz on the operator itself above it.
Eigenpairs lowest_eigenpairs(const SparseOperator& op, int count,
                             int dense_limit = 1200);

//! Lowest levels of the bosonic inversion-odd sector. The companion grid is
//! N/2 (rounded up to even); with `extrapolate` the levels are combined
//! assuming an O(h²) leading error. estimated_error is |E(N) - E(N/2)|.
OracleResult odd_sector_spectrum(const SystemParams& params,
                                 const OracleConfig& cfg,
                                 bool allow_attractive = false);

//! Ground state of the odd sector on the full grid, psi[i1 * N + i2].
struct GridState {
  int grid_n = 0;
  double energy = 0.0;
  std::vector<double> psi;
};

GridState odd_sector_ground_state(const SystemParams& params, int grid_n,
                                  bool allow_attractive = false);

//! Diagonal slope (ψ(j+1, j-1) - ψ(j, j)) / (h ψ(j, j)) L, median over
//! diagonal points where |ψ| exceeds a tenth of its diagonal maximum. A
//! contact δ of strength ξ gives ≈ ξ; a smooth state gives ≈ 0.
struct CuspReport {
  double median_slope = 0.0;
  double expected = 0.0;  //!< ξ
  int samples = 0;
};

CuspReport contact_cusp(const GridState& state, const SystemParams& params);

}  // namespace deltaring
