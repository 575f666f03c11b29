#include "deltaring/oracle.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace deltaring {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

constexpr int kBlock = 4;
constexpr std::uint64_t kStartSeed = 0x5eed5eedULL;

int companion_grid(int n) {
  const int half = n / 2;
  return half % 2 == 0 ? half : half + 1;
}

// Orthogonalize the columns of `block` against the first `used` columns of
// `basis` and among themselves (two passes of classical Gram-Schmidt).
// Columns that collapse are replaced by fresh random directions.
void orthonormalize(MatrixXd& block, const MatrixXd& basis, Eigen::Index used,
                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      auto col = block.col(c);
      const double before = col.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (used > 0) col -= basis.leftCols(used) * (basis.leftCols(used).transpose() * col);
        if (c > 0) col -= block.leftCols(c) * (block.leftCols(c).transpose() * col);
      }
      const double after = col.norm();
      if (after > 1e-10 * before && after > 0.0) {
        col /= after;
        break;
      }
      for (Eigen::Index r = 0; r < col.size(); ++r) col(r) = dist(rng);
    }
  }
}

Eigenpairs dense_eigenpairs(const SparseOperator& op, int count) {
  const MatrixXd dense = MatrixXd(op);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(dense);
  if (es.info() != Eigen::Success)
    throw NumericalError("dense eigensolver failed");
  return {es.eigenvalues().head(count), es.eigenvectors().leftCols(count)};
}

using Factor = Eigen::SimplicialLDLT<SparseOperator, Eigen::Lower,
                                     Eigen::AMDOrdering<int>>;

// Number of eigenvalues below the shift, by Sylvester inertia of the LDLᵀ
// factors; -1 when the factorization breaks down.
int count_below(Factor& factor, const SparseOperator& shifted) {
  factor.compute(shifted);
  if (factor.info() != Eigen::Success) return -1;
  const VectorXd d = factor.vectorD();
  if (!d.allFinite()) return -1;
  int neg = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i) < 0.0) ++neg;
  return neg;
}

Eigenpairs krylov_eigenpairs(const SparseOperator& op, int count) {
  const Eigen::Index n = op.rows();
  SparseOperator identity(n, n);
  identity.setIdentity();

  // Walk the shift down until the inertia shows no eigenvalue below it.
  double sigma = -1.0;
  Factor factor;
  for (int tries = 0;; ++tries) {
    const int below = count_below(factor, op - sigma * identity);
    if (below == 0) break;
    if (tries > 60)
      throw NumericalError("could not place the shift below the spectrum");
    sigma = sigma * 2.0 - 1.0;
  }

  std::mt19937_64 rng(kStartSeed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const Eigen::Index max_dim =
      std::min<Eigen::Index>(n, std::max<Eigen::Index>(40 * count + 120, 200));
  MatrixXd basis(n, max_dim);
  MatrixXd applied(n, max_dim);  // op * basis
  Eigen::Index used = 0;

  MatrixXd block(n, kBlock);
  for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = dist(rng);

  const double op_scale = std::max(1.0, std::abs(sigma));
  MatrixXd projected;
  for (;;) {
    const Eigen::Index take = std::min<Eigen::Index>(kBlock, max_dim - used);
    if (take <= 0) break;
    MatrixXd next = block.leftCols(take);
    orthonormalize(next, basis, used, rng);
    basis.middleCols(used, take) = next;
    applied.middleCols(used, take) = op * next;
    used += take;

    projected = basis.leftCols(used).transpose() * applied.leftCols(used);
    projected = 0.5 * (projected + projected.transpose()).eval();
    if (used >= count + kBlock) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(projected);
      bool done = true;
      for (int i = 0; i < count && done; ++i) {
        const VectorXd y = es.eigenvectors().col(i);
        const double theta = es.eigenvalues()(i);
        const VectorXd r =
            applied.leftCols(used) * y - theta * (basis.leftCols(used) * y);
        done = r.norm() <= 1e-9 * std::max({1.0, std::abs(theta), op_scale});
      }
      if (done) {
        Eigenpairs out;
        out.values = es.eigenvalues().head(count);
        out.vectors = basis.leftCols(used) * es.eigenvectors().leftCols(count);
        return out;
      }
    }
    block = factor.solve(next);
    if (factor.info() != Eigen::Success)
      throw NumericalError("shift-invert solve failed");
  }
  std::ostringstream msg;
  msg << "eigensolver did not converge: " << count << " levels, subspace "
      << used << " of " << n << ", shift " << sigma;
  throw NumericalError(msg.str());
}

SparseOperator reduced_hamiltonian(const SystemParams& params, int grid_n,
                                   SparseOperator* basis_out) {
  const SparseOperator full = build_hamiltonian(params, grid_n);
  SparseOperator basis = symmetric_basis(grid_n);
  SparseOperator reduced = SparseOperator(basis.transpose()) * full * basis;
  reduced.prune(0.0);
  if (basis_out) *basis_out = std::move(basis);
  return reduced;
}

std::vector<double> raw_levels(const SystemParams& params, int grid_n,
                               int levels) {
  const SparseOperator reduced = reduced_hamiltonian(params, grid_n, nullptr);
  if (levels > reduced.rows())
    throw std::invalid_argument("more levels requested than the sector holds");
  const auto pairs = lowest_eigenpairs(reduced, levels);
  return {pairs.values.data(), pairs.values.data() + pairs.values.size()};
}

}  // namespace

void validate(const OracleConfig& cfg) {
  if (cfg.grid_n < 32) throw std::invalid_argument("grid_n must be >= 32");
  if (cfg.grid_n % 2 != 0) throw std::invalid_argument("grid_n must be even");
  if (cfg.levels < 1) throw std::invalid_argument("levels must be >= 1");
}

SparseOperator build_hamiltonian(const SystemParams& params, int grid_n) {
  if (grid_n < 4 || grid_n % 2 != 0)
    throw std::invalid_argument("grid_n must be even");
  const int N = grid_n;
  const double h = params.ring_length / N;
  const double kinetic = 0.5 / (h * h);
  const int origin = N / 2;  // x = 0
  const Eigen::Index dim = static_cast<Eigen::Index>(N) * N;
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(dim) * 5);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(i) * N + j;
      double diag = 4.0 * kinetic;
      if (i == j) diag += params.g() / h;
      if (i == origin) diag += params.g_b() / h;
      if (j == origin) diag += params.g_b() / h;
      entries.emplace_back(row, row, diag);
      const int ip = (i + 1) % N, im = (i + N - 1) % N;
      const int jp = (j + 1) % N, jm = (j + N - 1) % N;
      entries.emplace_back(row, static_cast<Eigen::Index>(ip) * N + j, -kinetic);
      entries.emplace_back(row, static_cast<Eigen::Index>(im) * N + j, -kinetic);
      entries.emplace_back(row, static_cast<Eigen::Index>(i) * N + jp, -kinetic);
      entries.emplace_back(row, static_cast<Eigen::Index>(i) * N + jm, -kinetic);
    }
  }
  SparseOperator H(dim, dim);
  H.setFromTriplets(entries.begin(), entries.end());
  return H;
}

SparseOperator symmetric_basis(int grid_n) {
  if (grid_n < 4 || grid_n % 2 != 0)
    throw std::invalid_argument("grid_n must be even");
  const int N = grid_n;
  auto invert = [N](int i) { return (N - i) % N; };
  std::vector<char> seen(static_cast<std::size_t>(N) * N, 0);
  std::vector<Triplet> entries;
  int column = 0;
  for (int p = 0; p < N; ++p) {
    for (int q = 0; q < N; ++q) {
      if (seen[p * N + q]) continue;
      const std::pair<int, int> images[4] = {
          {p, q}, {q, p}, {invert(p), invert(q)}, {invert(q), invert(p)}};
      const double signs[4] = {1.0, 1.0, -1.0, -1.0};
      std::vector<std::pair<int, double>> weights;
      for (int k = 0; k < 4; ++k) {
        const int idx = images[k].first * N + images[k].second;
        seen[idx] = 1;
        auto it = std::find_if(weights.begin(), weights.end(),
                               [idx](const auto& w) { return w.first == idx; });
        if (it == weights.end())
          weights.emplace_back(idx, signs[k]);
        else
          it->second += signs[k];
      }
      double norm2 = 0.0;
      for (const auto& w : weights) norm2 += w.second * w.second;
      if (norm2 == 0.0) continue;
      const double inv = 1.0 / std::sqrt(norm2);
      for (const auto& w : weights)
        if (w.second != 0.0) entries.emplace_back(w.first, column, w.second * inv);
      ++column;
    }
  }
  SparseOperator P(static_cast<Eigen::Index>(N) * N, column);
  P.setFromTriplets(entries.begin(), entries.end());
  return P;
}

Eigenpairs lowest_eigenpairs(const SparseOperator& op, int count,
                             int dense_limit) {
  if (count < 1 || count > op.rows())
    throw std::invalid_argument("eigenpair count out of range");
  if (op.rows() <= dense_limit) return dense_eigenpairs(op, count);
  return krylov_eigenpairs(op, count);
}

OracleResult odd_sector_spectrum(const SystemParams& params,
                                 const OracleConfig& cfg,
                                 bool allow_attractive) {
  validate(params, allow_attractive);
  validate(cfg);
  OracleResult out;
  out.grid_n = cfg.grid_n;
  out.coarse_n = companion_grid(cfg.grid_n);
  out.extrapolated = cfg.extrapolate;
  out.fine = raw_levels(params, out.grid_n, cfg.levels);
  out.coarse = raw_levels(params, out.coarse_n, cfg.levels);
  const double r = static_cast<double>(out.grid_n) / out.coarse_n;
  const double w = r * r;
  for (int i = 0; i < cfg.levels; ++i) {
    const double f = out.fine[i];
    const double c = out.coarse[i];
    const double e = cfg.extrapolate ? (w * f - c) / (w - 1.0) : f;
    out.energies.push_back(e);
    out.estimated_error.push_back(
        std::max(std::abs(f - c), 1e-14 * std::max(1.0, std::abs(e))));
  }
  std::vector<std::size_t> order(out.energies.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
    return out.energies[x] < out.energies[y];
  });
  auto permute = [&](std::vector<double>& v) {
    std::vector<double> tmp(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) tmp[i] = v[order[i]];
    v = std::move(tmp);
  };
  permute(out.energies);
  permute(out.estimated_error);
  for (double e : out.energies) out.bound.push_back(e < 0.0);
  return out;
}

GridState odd_sector_ground_state(const SystemParams& params, int grid_n,
                                  bool allow_attractive) {
  validate(params, allow_attractive);
  SparseOperator basis;
  const SparseOperator reduced = reduced_hamiltonian(params, grid_n, &basis);
  const auto pairs = lowest_eigenpairs(reduced, 1);
  GridState state;
  state.grid_n = grid_n;
  state.energy = pairs.values(0);
  const VectorXd full = basis * pairs.vectors.col(0);
  state.psi.assign(full.data(), full.data() + full.size());
  return state;
}

CuspReport contact_cusp(const GridState& state, const SystemParams& params) {
  const int N = state.grid_n;
  const double h = params.ring_length / N;
  auto at = [&](int i, int j) {
    return state.psi[static_cast<std::size_t>((i + N) % N) * N + (j + N) % N];
  };
  double peak = 0.0;
  for (int j = 0; j < N; ++j) peak = std::max(peak, std::abs(at(j, j)));
  std::vector<double> slopes;
  for (int j = 0; j < N; ++j) {
    if (std::abs(j - N / 2) <= 1 || j <= 1 || j >= N - 1) continue;
    const double v = at(j, j);
    if (std::abs(v) < 0.1 * peak) continue;
    slopes.push_back((at(j + 1, j - 1) - v) / (h * v) * params.ring_length);
  }
  CuspReport rep;
  rep.expected = params.xi;
  rep.samples = static_cast<int>(slopes.size());
  if (!slopes.empty()) {
    std::nth_element(slopes.begin(), slopes.begin() + slopes.size() / 2,
                     slopes.end());
    rep.median_slope = slopes[slopes.size() / 2];
  }
  return rep;
}

}  // namespace deltaring
