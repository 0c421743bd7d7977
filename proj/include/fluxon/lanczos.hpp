#pragma once

// Lowest eigenpairs of a large sparse symmetric matrix.
//
// Block Lanczos on the shift-inverted operator (H - sigma)^-1 with full
// reorthogonalisation and explicit restarts. The shift must lie below the
// spectrum so that H - sigma is positive definite and can be factorised by a
// sparse LDL^T. Ritz pairs are extracted with H itself (Rayleigh-Ritz), so
// the reported residuals are residuals of the original problem.
//
// Near-degenerate clusters (fluxon states in distinct wells differ by MHz on
// a GHz scale) are resolved because the block size exceeds the cluster size.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include "fluxon/error.hpp"

namespace fluxon {

struct LanczosOptions {
  std::size_t block_size = 0;    ///< 0 selects wanted + 4
  std::size_t blocks = 10;       ///< Krylov blocks per restart cycle
  std::size_t max_restarts = 40;
  double tolerance = 1e-8;       ///< relative residual ||Hx - Ex|| / max(1, |E|)
  std::uint64_t seed = 20190517;
};

struct SparseEigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  ///< columns, unit Euclidean norm
  Eigen::VectorXd residuals;
  std::size_t restarts = 0;
};

namespace detail {

/// Orthonormalises the columns of `w` against `basis` (first `used` columns)
/// and against each other. Columns that collapse are replaced by fresh random
/// directions.
inline void orthonormalize_block(const Eigen::MatrixXd& basis, Eigen::Index used, Eigen::MatrixXd& w,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      const double before = w.col(c).norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (used > 0) {
          const Eigen::VectorXd coeff = basis.leftCols(used).transpose() * w.col(c);
          w.col(c).noalias() -= basis.leftCols(used) * coeff;
        }
        for (Eigen::Index p = 0; p < c; ++p) w.col(c) -= w.col(p).dot(w.col(c)) * w.col(p);
      }
      const double after = w.col(c).norm();
      if (after > 1e-10 * before && after > 0.0) {
        w.col(c) /= after;
        break;
      }
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, c) = uni(rng);
    }
  }
}

}  // namespace detail

inline SparseEigenpairs lowest_eigenpairs(const Eigen::SparseMatrix<double>& h, std::size_t wanted, double shift,
                                          const LanczosOptions& opts = {}) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n) throw Error(ErrorKind::invalid_params, "operator must be square");
  const Eigen::Index k = static_cast<Eigen::Index>(wanted);
  const Eigen::Index b = static_cast<Eigen::Index>(opts.block_size ? opts.block_size : wanted + 4);
  const Eigen::Index m = static_cast<Eigen::Index>(std::max<std::size_t>(opts.blocks, 2));
  if (k == 0 || b < k || b * m > n)
    throw Error(ErrorKind::invalid_params, "Krylov space does not fit the requested eigenpair count");

  Eigen::SparseMatrix<double> shifted = h;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
  if (factor.info() != Eigen::Success)
    throw Error(ErrorKind::no_convergence, "factorisation of the shifted operator failed");

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  Eigen::MatrixXd basis(n, b * m);
  Eigen::MatrixXd start(n, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < n; ++i) start(i, j) = uni(rng);

  SparseEigenpairs out;
  for (std::size_t cycle = 0; cycle <= opts.max_restarts; ++cycle) {
    detail::orthonormalize_block(basis, 0, start, rng);
    basis.leftCols(b) = start;
    for (Eigen::Index blk = 1; blk < m; ++blk) {
      Eigen::MatrixXd w = factor.solve(basis.middleCols((blk - 1) * b, b));
      if (factor.info() != Eigen::Success) throw Error(ErrorKind::no_convergence, "shift-invert solve failed");
      detail::orthonormalize_block(basis, blk * b, w, rng);
      basis.middleCols(blk * b, b) = w;
    }

    const Eigen::MatrixXd hv = h * basis;
    Eigen::MatrixXd projected = basis.transpose() * hv;
    projected = 0.5 * (projected + projected.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(projected);
    if (ritz.info() != Eigen::Success) throw Error(ErrorKind::no_convergence, "Rayleigh-Ritz step failed");

    const Eigen::MatrixXd y = ritz.eigenvectors().leftCols(b);
    start = basis * y;
    const Eigen::MatrixXd hx = hv * y;

    out.values = ritz.eigenvalues().head(k);
    out.residuals.resize(k);
    bool converged = true;
    for (Eigen::Index j = 0; j < k; ++j) {
      out.residuals(j) = (hx.col(j) - out.values(j) * start.col(j)).norm();
      if (out.residuals(j) > opts.tolerance * std::max(1.0, std::abs(out.values(j)))) converged = false;
    }
    out.restarts = cycle;
    if (converged) {
      out.vectors = start.leftCols(k);
      return out;
    }
  }
  throw Error(ErrorKind::no_convergence,
              "block Lanczos did not reach tolerance after " + std::to_string(opts.max_restarts) + " restarts");
}

}  // namespace fluxon
