#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "fluxon/circuit.hpp"
#include "fluxon/error.hpp"

namespace fluxon {

/// Uniform grid over a phase interval, endpoints included. Dirichlet
/// boundary values live on the two endpoints.
class PhaseGrid1D {
 public:
  PhaseGrid1D(double phi_min, double phi_max, std::size_t n) : phi_min_(phi_min), phi_max_(phi_max), n_(n) {
    if (n < 3) throw Error(ErrorKind::invalid_grid, "need at least 3 points, got " + std::to_string(n));
    if (!(phi_min < phi_max) || !std::isfinite(phi_min) || !std::isfinite(phi_max))
      throw Error(ErrorKind::invalid_grid, "phi_min must be below phi_max");
  }

  /// Default two-cell domain [-2 pi, 4 pi], symmetric about the barrier at pi.
  static PhaseGrid1D two_cell_default(std::size_t n = 2001) { return {-2.0 * pi, 4.0 * pi, n}; }

  /// Domain of half-width `half_width` centred on `center`.
  static PhaseGrid1D centered(double center, double half_width, std::size_t n) {
    return {center - half_width, center + half_width, n};
  }

  double phi_min() const noexcept { return phi_min_; }
  double phi_max() const noexcept { return phi_max_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t interior_size() const noexcept { return n_ - 2; }
  double spacing() const noexcept { return (phi_max_ - phi_min_) / static_cast<double>(n_ - 1); }
  double point(std::size_t i) const noexcept { return phi_min_ + spacing() * static_cast<double>(i); }

  /// Same interval with the spacing halved (2n-1 points, nested).
  PhaseGrid1D refined() const { return {phi_min_, phi_max_, 2 * n_ - 1}; }

  /// Index of the grid point closest to `phase`, clamped to the grid.
  std::size_t nearest_index(double phase) const noexcept {
    const double t = std::round((phase - phi_min_) / spacing());
    if (t <= 0.0) return 0;
    if (t >= static_cast<double>(n_ - 1)) return n_ - 1;
    return static_cast<std::size_t>(t);
  }

 private:
  double phi_min_;
  double phi_max_;
  std::size_t n_;
};

/// Tensor-product grid over (phi_f, phi_m). Flattened index is i_f * n_m + i_m.
struct PhaseGrid2D {
  PhaseGrid1D f;
  PhaseGrid1D m;

  std::size_t size() const noexcept { return f.size() * m.size(); }
  std::size_t index(std::size_t i_f, std::size_t i_m) const noexcept { return i_f * m.size() + i_m; }
  double cell_area() const noexcept { return f.spacing() * m.spacing(); }

  PhaseGrid2D refined() const { return {f.refined(), m.refined()}; }

  /// Each axis spans vertex +- half_width, where vertex = pi * Phi_Delta of
  /// that axis (the centre of its inductive parabola).
  static PhaseGrid2D centered_on(const FluxConfig& flux, std::size_t n, double half_width = 3.0 * pi) {
    return {PhaseGrid1D::centered(pi * flux.delta_f(), half_width, n),
            PhaseGrid1D::centered(pi * flux.delta_m(), half_width, n)};
  }
};

}  // namespace fluxon
