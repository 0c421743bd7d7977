#pragma once

// Finite-difference stationary Schroedinger problems on phase grids.
//
// Kinetic term 4 E_C n^2 with n = -i d/dphi becomes -4 E_C times the
// second central difference; Dirichlet boundary values are zero. The phase
// space is non-compact (inductive parabola), so a truncated domain with hard
// walls is the right model as long as the walls sit in forbidden regions.

#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fluxon/circuit.hpp"
#include "fluxon/error.hpp"
#include "fluxon/grid.hpp"
#include "fluxon/lanczos.hpp"
#include "fluxon/tridiagonal.hpp"

namespace fluxon {

/// Fluxon location in the three-cell SQUID.
enum class Well : int { L = 0, C = 1, R = 2 };

constexpr char well_name(Well w) noexcept { return w == Well::L ? 'L' : (w == Well::C ? 'C' : 'R'); }

/// |lambda, k, l>: fluxon cell and plasmon occupancies of junctions f and m.
struct StateLabel {
  Well well = Well::C;
  int k = 0;
  int l = 0;

  bool operator==(const StateLabel&) const = default;
};

/// Eigenpairs sampled on the full grid (boundary points included, zero).
/// Each state is normalised so that sum psi^2 * cell_volume = 1.
struct Spectrum {
  std::vector<double> energies;
  std::vector<std::vector<double>> states;
  std::vector<double> residuals;
  std::vector<std::optional<StateLabel>> labels;
  std::vector<double> boundary_weight;  ///< probability in the outer 5% band

  std::size_t size() const noexcept { return energies.size(); }

  /// Index of the state carrying `label`, if any.
  std::optional<std::size_t> find(const StateLabel& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] && *labels[i] == label) return i;
    return std::nullopt;
  }
};

// ---------------------------------------------------------------------------
// One dimension

template <class Potential>
SymTridiagonal discretize_1d(double ec, const PhaseGrid1D& grid, Potential&& potential) {
  const std::size_t n = grid.interior_size();
  const double h = grid.spacing();
  const double hop = -4.0 * ec / (h * h);
  SymTridiagonal t;
  t.diag.resize(n);
  t.off.assign(n - 1, hop);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = -2.0 * hop + potential(grid.point(i + 1));
  return t;
}

inline SymTridiagonal discretize_1d(const CircuitParams& p, double phi_delta, const PhaseGrid1D& grid) {
  return discretize_1d(p.ec, grid, [&](double x) { return potential_1d(p, phi_delta, x); });
}

/// Throws grid_too_narrow unless each end of the domain is walled off: the
/// largest potential within the outer 10% of the domain must exceed e_max.
template <class Potential>
void check_boundary_margin_1d(const PhaseGrid1D& grid, Potential&& potential, double e_max) {
  const std::size_t band = std::max<std::size_t>(2, grid.size() / 10);
  double left = -std::numeric_limits<double>::infinity();
  double right = left;
  for (std::size_t i = 0; i < band; ++i) {
    left = std::max(left, potential(grid.point(i)));
    right = std::max(right, potential(grid.point(grid.size() - 1 - i)));
  }
  if (!(left > e_max) || !(right > e_max))
    throw Error(ErrorKind::grid_too_narrow, "boundary potential (" + std::to_string(std::min(left, right)) +
                                               " GHz) below requested level " + std::to_string(e_max) + " GHz");
}

template <class Potential>
Spectrum spectrum_1d(double ec, const PhaseGrid1D& grid, std::size_t k, Potential&& potential) {
  if (k == 0 || k > grid.size() / 4)
    throw Error(ErrorKind::invalid_params, "level count must be in [1, n/4], got " + std::to_string(k));
  const SymTridiagonal t = discretize_1d(ec, grid, potential);
  const TridiagonalEigenpairs eig = lowest_eigenpairs(t, k);
  check_boundary_margin_1d(grid, potential, eig.values.back());

  const double scale = 1.0 / std::sqrt(grid.spacing());
  const std::size_t band = std::max<std::size_t>(1, grid.size() / 20);
  Spectrum s;
  s.energies = eig.values;
  s.residuals = eig.residuals;
  s.labels.assign(k, std::nullopt);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> psi(grid.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) psi[i + 1] = eig.vectors[j][i] * scale;
    double edge = 0.0;
    for (std::size_t i = 0; i < band; ++i)
      edge += (psi[i] * psi[i] + psi[grid.size() - 1 - i] * psi[grid.size() - 1 - i]) * grid.spacing();
    s.boundary_weight.push_back(edge);
    s.states.push_back(std::move(psi));
  }
  return s;
}

/// Lowest k levels of the two-cell SQUID at flux difference phi_delta.
inline Spectrum spectrum_1d(const CircuitParams& p, double phi_delta, std::size_t k, const PhaseGrid1D& grid) {
  return spectrum_1d(p.ec, grid, k, [&](double x) { return potential_1d(p, phi_delta, x); });
}

/// Trapezoidal inner product <a|w|b> on a 1D grid.
template <class Weight>
double grid_expectation(const PhaseGrid1D& grid, const std::vector<double>& a, const std::vector<double>& b,
                        Weight&& weight) {
  double sum = 0.0;
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    sum += w * a[i] * weight(grid.point(i)) * b[i];
  }
  return sum * grid.spacing();
}

// ---------------------------------------------------------------------------
// Two dimensions

/// 5-point-stencil operator on the interior points, flattened i_f * (n_m-2) + i_m.
template <class Potential2>
Eigen::SparseMatrix<double> discretize_2d(double ec, const PhaseGrid2D& grid, Potential2&& potential) {
  const std::size_t nf = grid.f.interior_size();
  const std::size_t nm = grid.m.interior_size();
  const double hf = -4.0 * ec / (grid.f.spacing() * grid.f.spacing());
  const double hm = -4.0 * ec / (grid.m.spacing() * grid.m.spacing());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(5 * nf * nm);
  const auto at = [nm](std::size_t i, std::size_t j) { return static_cast<Eigen::Index>(i * nm + j); };
  for (std::size_t i = 0; i < nf; ++i) {
    const double x = grid.f.point(i + 1);
    for (std::size_t j = 0; j < nm; ++j) {
      const double y = grid.m.point(j + 1);
      entries.emplace_back(at(i, j), at(i, j), -2.0 * hf - 2.0 * hm + potential(x, y));
      if (i > 0) entries.emplace_back(at(i, j), at(i - 1, j), hf);
      if (i + 1 < nf) entries.emplace_back(at(i, j), at(i + 1, j), hf);
      if (j > 0) entries.emplace_back(at(i, j), at(i, j - 1), hm);
      if (j + 1 < nm) entries.emplace_back(at(i, j), at(i, j + 1), hm);
    }
  }
  Eigen::SparseMatrix<double> h(static_cast<Eigen::Index>(nf * nm), static_cast<Eigen::Index>(nf * nm));
  h.setFromTriplets(entries.begin(), entries.end());
  h.makeCompressed();
  return h;
}

inline Eigen::SparseMatrix<double> discretize_2d(const CircuitParams& p, const FluxConfig& f,
                                                 const PhaseGrid2D& grid, double coupling = 1.0) {
  return discretize_2d(p.ec, grid, [&](double x, double y) { return potential_2d(p, f, x, y, coupling); });
}

/// A potential minimum of the three-cell landscape.
struct WellSite {
  Well label = Well::C;
  double phi_f = 0.0;
  double phi_m = 0.0;
  double energy = 0.0;
};

namespace detail {

inline bool polish_minimum(const CircuitParams& p, const FluxConfig& f, double& x, double& y) {
  for (int it = 0; it < 100; ++it) {
    const Gradient2 g = potential_2d_gradient(p, f, x, y);
    const Hessian2 hs = potential_2d_hessian(p, x, y);
    const double det = hs.ff * hs.mm - hs.fm * hs.fm;
    if (!(det > 0.0) || !(hs.ff > 0.0)) return false;
    const double dx = -(hs.mm * g.df - hs.fm * g.dm) / det;
    const double dy = -(hs.ff * g.dm - hs.fm * g.df) / det;
    x += dx;
    y += dy;
    if (std::abs(dx) + std::abs(dy) < 1e-14) break;
  }
  const Gradient2 g = potential_2d_gradient(p, f, x, y);
  const Hessian2 hs = potential_2d_hessian(p, x, y);
  const double scale = std::max({p.ejf, p.ejm, 1.0});
  return std::abs(g.df) + std::abs(g.dm) < 1e-9 * scale && hs.ff > 0.0 && hs.ff * hs.mm - hs.fm * hs.fm > 0.0;
}

}  // namespace detail

/// All local minima of potential_2d strictly inside the grid domain, sorted
/// by potential energy. Labels are left at their default.
inline std::vector<WellSite> find_minima_2d(const CircuitParams& p, const FluxConfig& f, const PhaseGrid2D& grid) {
  const double step = two_pi / 48.0;
  const auto count = [step](const PhaseGrid1D& g) {
    return static_cast<std::size_t>(std::ceil((g.phi_max() - g.phi_min()) / step)) + 1;
  };
  const std::size_t nf = count(grid.f), nm = count(grid.m);
  const double sf = (grid.f.phi_max() - grid.f.phi_min()) / static_cast<double>(nf - 1);
  const double sm = (grid.m.phi_max() - grid.m.phi_min()) / static_cast<double>(nm - 1);
  std::vector<double> u(nf * nm);
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t j = 0; j < nm; ++j)
      u[i * nm + j] = potential_2d(p, f, grid.f.phi_min() + sf * i, grid.m.phi_min() + sm * j);

  std::vector<WellSite> minima;
  for (std::size_t i = 1; i + 1 < nf; ++i) {
    for (std::size_t j = 1; j + 1 < nm; ++j) {
      const double c = u[i * nm + j];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          if ((di || dj) && u[(i + di) * nm + (j + dj)] < c) {
            is_min = false;
            break;
          }
      if (!is_min) continue;
      double x = grid.f.phi_min() + sf * i, y = grid.m.phi_min() + sm * j;
      if (!detail::polish_minimum(p, f, x, y)) continue;
      if (x <= grid.f.phi_min() || x >= grid.f.phi_max() || y <= grid.m.phi_min() || y >= grid.m.phi_max()) continue;
      const bool duplicate = std::any_of(minima.begin(), minima.end(), [&](const WellSite& w) {
        return std::abs(w.phi_f - x) + std::abs(w.phi_m - y) < 1e-6;
      });
      if (!duplicate) minima.push_back({Well::C, x, y, potential_2d(p, f, x, y)});
    }
  }
  std::sort(minima.begin(), minima.end(), [](const WellSite& a, const WellSite& b) { return a.energy < b.energy; });
  return minima;
}

/// Labels up to three wells by adjacency: C is the well nearest to both others, L is its
/// neighbour along phi_f (junction f separates left and centre cells), R its
/// neighbour along phi_m. Output is ordered L, C, R (missing ones skipped).
inline std::vector<WellSite> label_wells(std::vector<WellSite> wells) {
  const auto along_f = [](const WellSite& a, const WellSite& b) {
    return std::abs(a.phi_f - b.phi_f) > std::abs(a.phi_m - b.phi_m);
  };
  if (wells.empty() || wells.size() > 3) throw Error(ErrorKind::ambiguous_classification, "need 1 to 3 wells");
  if (wells.size() == 1) {
    wells[0].label = Well::C;
  } else if (wells.size() == 2) {
    auto& a = wells[0];
    auto& b = wells[1];
    if (along_f(a, b)) {
      (a.phi_f > b.phi_f ? a : b).label = Well::L;
      (a.phi_f > b.phi_f ? b : a).label = Well::C;
    } else {
      (a.phi_m < b.phi_m ? a : b).label = Well::R;
      (a.phi_m < b.phi_m ? b : a).label = Well::C;
    }
  } else {
    const auto dist = [&](std::size_t a, std::size_t b) {
      return std::hypot(wells[a].phi_f - wells[b].phi_f, wells[a].phi_m - wells[b].phi_m);
    };
    std::size_t c = 0;
    double reach = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 3; ++i) {
      const double r = std::max(dist(i, (i + 1) % 3), dist(i, (i + 2) % 3));
      if (r < reach) reach = r, c = i;
    }
    const std::size_t o1 = (c + 1) % 3, o2 = (c + 2) % 3;
    const bool f1 = along_f(wells[c], wells[o1]);
    const bool found = f1 != along_f(wells[c], wells[o2]);
    if (found) {
      wells[c].label = Well::C;
      wells[f1 ? o1 : o2].label = Well::L;
      wells[f1 ? o2 : o1].label = Well::R;
    }
    if (!found) throw Error(ErrorKind::ambiguous_classification, "three wells do not form an L-C-R chain");
  }
  std::sort(wells.begin(), wells.end(),
            [](const WellSite& a, const WellSite& b) { return static_cast<int>(a.label) < static_cast<int>(b.label); });
  return wells;
}

/// The one-fluxon wells: the global minimum plus the minima within `window`
/// GHz above it (at most three), labelled L/C/R.
inline std::vector<WellSite> one_fluxon_wells(const CircuitParams& p, const FluxConfig& f, const PhaseGrid2D& grid,
                                              double window = 3.0) {
  const std::vector<WellSite> minima = find_minima_2d(p, f, grid);
  if (minima.empty()) throw Error(ErrorKind::ambiguous_classification, "no potential minimum inside the grid");
  std::vector<WellSite> chosen;
  for (const auto& w : minima)
    if (w.energy <= minima.front().energy + window && chosen.size() < 3) chosen.push_back(w);
  return label_wells(std::move(chosen));
}

/// Re-locates labelled wells after a flux change by Newton polishing from
/// their previous positions.
inline std::vector<WellSite> track_wells(const CircuitParams& p, const FluxConfig& f,
                                         const std::vector<WellSite>& reference) {
  std::vector<WellSite> out;
  for (const auto& w : reference) {
    double x = w.phi_f, y = w.phi_m;
    if (!detail::polish_minimum(p, f, x, y))
      throw Error(ErrorKind::ambiguous_classification, std::string("well ") + well_name(w.label) + " vanished");
    out.push_back({w.label, x, y, potential_2d(p, f, x, y)});
  }
  return out;
}

/// Assigns |lambda, k, l> to a 2D state: lambda from the probability centroid,
/// k and l from sign changes along phi_f and phi_m through the state's peak
/// inside that well. Only occupancies 0 and 1 are supported.
inline StateLabel classify_state(const std::vector<double>& psi, const PhaseGrid2D& grid,
                                 const std::vector<WellSite>& wells) {
  if (wells.empty()) throw Error(ErrorKind::ambiguous_classification, "no wells given");
  if (psi.size() != grid.size()) throw Error(ErrorKind::invalid_params, "state does not match grid");

  double norm = 0.0, cf = 0.0, cm = 0.0;
  for (std::size_t i = 0; i < grid.f.size(); ++i) {
    for (std::size_t j = 0; j < grid.m.size(); ++j) {
      const double w = psi[grid.index(i, j)] * psi[grid.index(i, j)];
      norm += w;
      cf += w * grid.f.point(i);
      cm += w * grid.m.point(j);
    }
  }
  if (!(norm > 0.0)) throw Error(ErrorKind::ambiguous_classification, "zero state");
  cf /= norm;
  cm /= norm;

  double limit = pi;
  for (std::size_t a = 0; a < wells.size(); ++a)
    for (std::size_t b = a + 1; b < wells.size(); ++b)
      limit = std::min(limit, 0.5 * std::hypot(wells[a].phi_f - wells[b].phi_f, wells[a].phi_m - wells[b].phi_m));
  const WellSite* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& w : wells) {
    const double d = std::hypot(cf - w.phi_f, cm - w.phi_m);
    if (d < best_dist) {
      best_dist = d;
      best = &w;
    }
  }
  if (best_dist > limit)
    throw Error(ErrorKind::ambiguous_classification,
                "centroid (" + std::to_string(cf) + ", " + std::to_string(cm) + ") is not near any well");

  // Most of the probability must sit in the well's box; symmetric
  // combinations of two far wells can have their centroid anywhere.
  const auto in_box = [&](std::size_t i, std::size_t j) {
    return std::abs(grid.f.point(i) - best->phi_f) <= pi && std::abs(grid.m.point(j) - best->phi_m) <= pi;
  };
  double inside = 0.0;
  for (std::size_t i = 0; i < grid.f.size(); ++i)
    for (std::size_t j = 0; j < grid.m.size(); ++j)
      if (in_box(i, j)) inside += psi[grid.index(i, j)] * psi[grid.index(i, j)];
  if (inside < 0.5 * norm)
    throw Error(ErrorKind::ambiguous_classification,
                "only " + std::to_string(inside / norm) + " of the probability lies in well " + well_name(best->label));

  std::size_t pi_f = 0, pi_m = 0;
  double peak = 0.0;
  for (std::size_t i = 0; i < grid.f.size(); ++i)
    for (std::size_t j = 0; j < grid.m.size(); ++j)
      if (in_box(i, j) && std::abs(psi[grid.index(i, j)]) > peak) {
        peak = std::abs(psi[grid.index(i, j)]);
        pi_f = i;
        pi_m = j;
      }

  const double threshold = 0.05 * peak;
  const auto sign_changes = [&](bool along_f) {
    int changes = 0, last = 0;
    const std::size_t n = along_f ? grid.f.size() : grid.m.size();
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t i = along_f ? t : pi_f;
      const std::size_t j = along_f ? pi_m : t;
      if (!in_box(i, j)) continue;
      const double v = psi[grid.index(i, j)];
      if (std::abs(v) < threshold) continue;
      const int s = v > 0 ? 1 : -1;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  };
  const int k = sign_changes(true);
  const int l = sign_changes(false);
  if (k > 1 || l > 1)
    throw Error(ErrorKind::ambiguous_classification,
                "plasmon occupancy above 1 (" + std::to_string(k) + ", " + std::to_string(l) + ")");
  return {best->label, k, l};
}

struct Spectrum2dOptions {
  double coupling = 1.0;            ///< scale of the -E_L phi_f phi_m term
  double boundary_tolerance = 1e-6;  ///< max band probability of a classified state
  LanczosOptions lanczos{};
  std::optional<std::vector<WellSite>> wells;  ///< default: one_fluxon_wells
};

/// Lowest k levels of the three-cell SQUID, classified where possible.
/// Unclassifiable states (e.g. multi-fluxon wells) keep an empty label.
inline Spectrum spectrum_2d(const CircuitParams& p, const FluxConfig& f, std::size_t k, const PhaseGrid2D& grid,
                            const Spectrum2dOptions& opts = {}) {
  if (k == 0) throw Error(ErrorKind::invalid_params, "level count must be positive");
  const auto u = [&](double x, double y) { return potential_2d(p, f, x, y, opts.coupling); };
  const Eigen::SparseMatrix<double> h = discretize_2d(p.ec, grid, u);

  double u_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < grid.f.size(); ++i)
    for (std::size_t j = 1; j + 1 < grid.m.size(); ++j) u_min = std::min(u_min, u(grid.f.point(i), grid.m.point(j)));

  const SparseEigenpairs eig = lowest_eigenpairs(h, k, u_min - 1.0, opts.lanczos);

  const std::size_t nf = grid.f.interior_size(), nm = grid.m.interior_size();
  const double scale = 1.0 / std::sqrt(grid.cell_area());
  const std::size_t band_f = std::max<std::size_t>(1, grid.f.size() / 20);
  const std::size_t band_m = std::max<std::size_t>(1, grid.m.size() / 20);

  Spectrum s;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> psi(grid.size(), 0.0);
    for (std::size_t i = 0; i < nf; ++i)
      for (std::size_t j = 0; j < nm; ++j)
        psi[grid.index(i + 1, j + 1)] = eig.vectors(static_cast<Eigen::Index>(i * nm + j), static_cast<Eigen::Index>(c)) * scale;
    double peak = 0.0;
    std::size_t peak_at = 0;
    for (std::size_t q = 0; q < psi.size(); ++q)
      if (std::abs(psi[q]) > peak) {
        peak = std::abs(psi[q]);
        peak_at = q;
      }
    if (psi[peak_at] < 0.0)
      for (auto& v : psi) v = -v;
    double edge = 0.0;
    for (std::size_t i = 0; i < grid.f.size(); ++i)
      for (std::size_t j = 0; j < grid.m.size(); ++j)
        if (i < band_f || i + band_f >= grid.f.size() || j < band_m || j + band_m >= grid.m.size())
          edge += psi[grid.index(i, j)] * psi[grid.index(i, j)] * grid.cell_area();
    s.energies.push_back(eig.values(static_cast<Eigen::Index>(c)));
    s.residuals.push_back(eig.residuals(static_cast<Eigen::Index>(c)));
    s.boundary_weight.push_back(edge);
    s.states.push_back(std::move(psi));
  }

  const std::vector<WellSite> wells = opts.wells ? *opts.wells : one_fluxon_wells(p, f, grid);
  s.labels.assign(k, std::nullopt);
  for (std::size_t c = 0; c < k; ++c) {
    try {
      s.labels[c] = classify_state(s.states[c], grid, wells);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ambiguous_classification) throw;
    }
    if (s.labels[c] && s.boundary_weight[c] > opts.boundary_tolerance)
      throw Error(ErrorKind::grid_too_narrow, "classified state " + std::to_string(c) + " reaches the boundary");
  }

  // Ties in energy are ordered L, C, R.
  for (std::size_t c = 0; c + 1 < k; ++c) {
    const bool tie = std::abs(s.energies[c + 1] - s.energies[c]) <= 1e-12 * std::max(1.0, std::abs(s.energies[c]));
    if (tie && s.labels[c] && s.labels[c + 1] &&
        static_cast<int>(s.labels[c + 1]->well) < static_cast<int>(s.labels[c]->well)) {
      std::swap(s.energies[c], s.energies[c + 1]);
      std::swap(s.states[c], s.states[c + 1]);
      std::swap(s.residuals[c], s.residuals[c + 1]);
      std::swap(s.labels[c], s.labels[c + 1]);
      std::swap(s.boundary_weight[c], s.boundary_weight[c + 1]);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Grid convergence

struct ConvergenceReport {
  Spectrum spectrum;                  ///< finest run
  std::vector<double> extrapolated;   ///< Richardson, assuming second order
  double achieved = 0.0;              ///< max |E_fine - E_coarse| of the last step
  double order = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;             ///< resolution of the finest run
  std::size_t runs = 0;
};

/// Re-solves at doubling resolution (n -> 2n-1, nested grids) until the
/// lowest `levels` eigenvalues change by less than target_tol. The observed
/// order comes from the last three runs.
template <class SolveAt>
ConvergenceReport converge(SolveAt&& solve_at, std::size_t n0, double target_tol, std::size_t n_cap,
                           std::size_t levels = 0) {
  std::vector<std::vector<double>> history;
  std::vector<double> deltas;
  ConvergenceReport report;
  for (std::size_t n = n0; n <= n_cap; n = 2 * n - 1) {
    report.spectrum = solve_at(n);
    report.points = n;
    ++report.runs;
    const std::size_t use = levels ? std::min(levels, report.spectrum.size()) : report.spectrum.size();
    history.emplace_back(report.spectrum.energies.begin(), report.spectrum.energies.begin() + use);
    if (history.size() < 2) continue;
    const auto& fine = history.back();
    const auto& coarse = history[history.size() - 2];
    double delta = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) delta = std::max(delta, std::abs(fine[i] - coarse[i]));
    deltas.push_back(delta);
    report.achieved = delta;
    report.extrapolated.resize(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) report.extrapolated[i] = fine[i] + (fine[i] - coarse[i]) / 3.0;
    if (deltas.size() >= 2 && deltas.back() > 0.0)
      report.order = std::log2(deltas[deltas.size() - 2] / deltas.back());
    if (delta < target_tol) return report;
  }
  throw Error(ErrorKind::not_converging,
              "eigenvalues still moving by " + std::to_string(report.achieved) + " GHz at n=" +
                  std::to_string(report.points));
}

/// Richardson extrapolation of labelled energies from two second-order runs
/// whose spacings differ by `ratio` (h_coarse / h_fine). Returns one value per
/// state of `fine` (NaN where the label is missing on either side).
inline std::vector<double> richardson_by_label(const Spectrum& coarse, const Spectrum& fine, double ratio) {
  const double r2 = ratio * ratio;
  std::vector<double> out(fine.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (!fine.labels[i]) continue;
    if (const auto j = coarse.find(*fine.labels[i]))
      out[i] = (r2 * fine.energies[i] - coarse.energies[*j]) / (r2 - 1.0);
  }
  return out;
}

}  // namespace fluxon
