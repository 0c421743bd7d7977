#pragma once

// Lowest eigenpairs of a real symmetric tridiagonal matrix by Sturm-sequence
// bisection followed by inverse iteration. Both stages run in long double:
// tunnelling splittings can sit eleven orders of magnitude below the
// operator norm of a fine finite-difference Laplacian.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fluxon/error.hpp"

namespace fluxon {

struct SymTridiagonal {
  std::vector<double> diag;  ///< n entries
  std::vector<double> off;   ///< n-1 entries, off[i] couples i and i+1

  std::size_t size() const noexcept { return diag.size(); }

  bool operator==(const SymTridiagonal&) const = default;
};

struct TridiagonalEigenpairs {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;  ///< unit Euclidean norm
  std::vector<double> residuals;             ///< ||T x - lambda x||
};

namespace detail {

using wide = long double;

/// Number of eigenvalues strictly below x.
inline std::size_t sturm_count(const SymTridiagonal& t, wide x, wide pivmin) {
  std::size_t count = 0;
  wide q = static_cast<wide>(t.diag[0]) - x;
  if (std::fabs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const wide e = t.off[i - 1];
    q = static_cast<wide>(t.diag[i]) - x - e * e / q;
    if (std::fabs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

/// LU factorisation with partial pivoting of (T - shift I), LAPACK gttrf style.
class ShiftedTridiagonalLU {
 public:
  ShiftedTridiagonalLU(const SymTridiagonal& t, wide shift, wide tiny) {
    const std::size_t n = t.size();
    dl_.assign(t.off.begin(), t.off.end());
    du_.assign(t.off.begin(), t.off.end());
    d_.resize(n);
    for (std::size_t i = 0; i < n; ++i) d_[i] = static_cast<wide>(t.diag[i]) - shift;
    du2_.assign(n > 2 ? n - 2 : 0, 0);
    swapped_.assign(n > 0 ? n - 1 : 0, false);

    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::fabs(d_[i]) >= std::fabs(dl_[i])) {
        if (d_[i] == 0) d_[i] = tiny;
        const wide fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        const wide fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const wide temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        swapped_[i] = true;
      }
    }
    for (auto& v : d_)
      if (std::fabs(v) < tiny) v = v < 0 ? -tiny : tiny;
  }

  void solve(std::vector<wide>& b) const {
    const std::size_t n = d_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const wide temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl_[i] * b[i];
      }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t i = n >= 2 ? n - 2 : 0; i-- > 0;)
      b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
  }

 private:
  std::vector<wide> dl_, d_, du_, du2_;
  std::vector<bool> swapped_;
};

}  // namespace detail

/// Lowest `k` eigenpairs, ascending. Eigenvectors are sign-fixed so that the
/// first component exceeding 1e-3 of the peak magnitude is positive.
inline TridiagonalEigenpairs lowest_eigenpairs(const SymTridiagonal& t, std::size_t k) {
  using detail::wide;
  const std::size_t n = t.size();
  if (n == 0 || t.off.size() + 1 != n) throw Error(ErrorKind::invalid_grid, "malformed tridiagonal matrix");
  if (k == 0 || k > n) throw Error(ErrorKind::invalid_params, "requested eigenpair count out of range");

  // Gershgorin interval.
  wide lo = std::numeric_limits<wide>::max();
  wide hi = std::numeric_limits<wide>::lowest();
  wide emax2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const wide r = (i > 0 ? std::fabs(static_cast<wide>(t.off[i - 1])) : 0) +
                   (i + 1 < n ? std::fabs(static_cast<wide>(t.off[i])) : 0);
    lo = std::min(lo, static_cast<wide>(t.diag[i]) - r);
    hi = std::max(hi, static_cast<wide>(t.diag[i]) + r);
    if (i + 1 < n) emax2 = std::max(emax2, static_cast<wide>(t.off[i]) * t.off[i]);
  }
  const wide eps = std::numeric_limits<wide>::epsilon();
  const wide norm = std::max(std::fabs(lo), std::fabs(hi));
  const wide pivmin = std::numeric_limits<wide>::min() * std::max<wide>(1, emax2);
  lo -= 2 * eps * norm + pivmin;
  hi += 2 * eps * norm + pivmin;

  TridiagonalEigenpairs out;
  out.values.reserve(k);
  std::vector<wide> values;
  wide lower = lo;
  for (std::size_t j = 0; j < k; ++j) {
    wide a = lower, b = hi;
    for (int it = 0; it < 256; ++it) {
      const wide mid = a + (b - a) / 2;
      if (mid <= a || mid >= b) break;
      if (detail::sturm_count(t, mid, pivmin) > j)
        b = mid;
      else
        a = mid;
      if (b - a <= 2 * eps * std::max(std::fabs(a), std::fabs(b)) + pivmin) break;
    }
    const wide lambda = a + (b - a) / 2;
    values.push_back(lambda);
    out.values.push_back(static_cast<double>(lambda));
    lower = a;
  }

  // Inverse iteration with reorthogonalisation against earlier vectors.
  std::mt19937_64 rng(0x5eedf10bULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const wide tiny = eps * norm;
  std::vector<std::vector<wide>> vecs;
  for (std::size_t j = 0; j < k; ++j) {
    detail::ShiftedTridiagonalLU lu(t, values[j], tiny);
    std::vector<wide> x(n);
    for (auto& v : x) v = 1 + static_cast<wide>(uni(rng)) / 4;
    for (int it = 0; it < 4; ++it) {
      lu.solve(x);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : vecs) {
          wide dot = 0;
          for (std::size_t i = 0; i < n; ++i) dot += u[i] * x[i];
          for (std::size_t i = 0; i < n; ++i) x[i] -= dot * u[i];
        }
      }
      wide nrm = 0;
      for (auto v : x) nrm += v * v;
      nrm = std::sqrt(nrm);
      if (!(nrm > 0) || !std::isfinite(static_cast<double>(nrm)))
        throw Error(ErrorKind::no_convergence, "inverse iteration broke down at index " + std::to_string(j));
      for (auto& v : x) v /= nrm;
    }
    wide peak = 0;
    for (auto v : x) peak = std::max(peak, std::fabs(v));
    for (auto v : x) {
      if (std::fabs(v) > peak / 1000) {
        if (v < 0)
          for (auto& w : x) w = -w;
        break;
      }
    }
    vecs.push_back(x);
  }

  out.vectors.reserve(k);
  out.residuals.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& x = vecs[j];
    wide r2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      wide y = (static_cast<wide>(t.diag[i]) - values[j]) * x[i];
      if (i > 0) y += static_cast<wide>(t.off[i - 1]) * x[i - 1];
      if (i + 1 < n) y += static_cast<wide>(t.off[i]) * x[i + 1];
      r2 += y * y;
    }
    out.residuals.push_back(static_cast<double>(std::sqrt(r2)));
    out.vectors.emplace_back(x.begin(), x.end());
  }
  return out;
}

}  // namespace fluxon
