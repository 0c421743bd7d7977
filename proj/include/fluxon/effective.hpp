#pragma once

// Reduced models built from exact spectra: current matrix elements and the
// two-level description of the two-cell SQUID, and the fluxon qutrit coupled
// dispersively to the two plasma modes of the three-cell SQUID.

#include <array>
#include <cmath>
#include <string>

#include "fluxon/circuit.hpp"
#include "fluxon/error.hpp"
#include "fluxon/grid.hpp"
#include "fluxon/spectrum.hpp"

namespace fluxon {

/// Matrix elements of the loop current (pi - phi) / 2 pi, units Phi0/L.
struct CurrentElements {
  double i00 = 0.0;
  double i11 = 0.0;
  double i01 = 0.0;
};

inline CurrentElements current_elements(const Spectrum& s, const PhaseGrid1D& grid) {
  if (s.size() < 2) throw Error(ErrorKind::invalid_params, "need at least two states");
  if (s.states[0].size() != grid.size() || s.states[1].size() != grid.size())
    throw Error(ErrorKind::invalid_params, "states do not match the grid");
  const auto current = [](double x) { return (pi - x) / two_pi; };
  return {grid_expectation(grid, s.states[0], s.states[0], current),
          grid_expectation(grid, s.states[1], s.states[1], current),
          grid_expectation(grid, s.states[0], s.states[1], current)};
}

/// H = (delta/2) sigma_x + (epsilon/2) sigma_z around the degeneracy flux.
struct TwoLevelModel {
  double delta = 0.0;    ///< tunnelling splitting, GHz
  double epsilon = 0.0;  ///< bias, GHz
  double phi_delta_ref = 1.0;

  double gap() const noexcept { return std::hypot(delta, epsilon); }
};

/// Bias from the linearised flux dependence: epsilon = 2 |<0|I|1>| dPhi in
/// energy units, i.e. 8 pi^2 E_L |i01| dPhi in GHz. |i01| -> 1/2 deep in the
/// fluxon regime, which is the default.
inline TwoLevelModel two_level_fit(const CircuitParams& p, double phi_delta, double delta_at_degeneracy,
                                   double i01 = 0.5) {
  const double offset = phi_delta - 1.0;
  if (std::abs(offset) > 0.1)
    throw Error(ErrorKind::outside_linear_window, "|Phi_Delta - 1| = " + std::to_string(std::abs(offset)) + " > 0.1");
  return {delta_at_degeneracy, 8.0 * pi * pi * p.el * std::abs(i01) * offset, 1.0};
}

/// Closed-form order-of-magnitude couplings of a fluxon to the plasma modes.
struct DispersiveEstimate {
  double omega_pf = 0.0;
  double omega_pm = 0.0;
  double g_f = 0.0;
  double g_m = 0.0;
  double jz_f = 0.0;
  double jz_m = 0.0;
};

inline DispersiveEstimate dispersive_estimate(const CircuitParams& p) {
  DispersiveEstimate d;
  d.omega_pf = std::sqrt(8.0 * p.ejf * p.ec);
  d.omega_pm = std::sqrt(8.0 * p.ejm * p.ec);
  d.g_f = two_pi * p.el * std::sqrt(d.omega_pf / (2.0 * p.ejf));
  d.g_m = two_pi * p.el * std::sqrt(d.omega_pm / (2.0 * p.ejm));
  d.jz_f = 2.0 * d.g_f * d.g_f / d.omega_pf;
  d.jz_m = 2.0 * d.g_m * d.g_m / d.omega_pm;
  return d;
}

/// Qutrit energies eps[L, C, R] plus two plasma modes; mode f is shifted by
/// jz_f when the fluxon sits in R, mode m by jz_m when it sits in L.
struct QutritQubitModel {
  double omega_pf = 0.0;
  double omega_pm = 0.0;
  std::array<double, 3> eps{};
  double jz_f = 0.0;
  double jz_m = 0.0;
  double g_f = 0.0;
  double g_m = 0.0;
  std::array<double, 3> transition_f{};  ///< |w,0,0> -> |w,1,0> per well
  std::array<double, 3> transition_m{};  ///< |w,0,0> -> |w,0,1> per well

  double eps_of(Well w) const noexcept { return eps[static_cast<std::size_t>(w)]; }
};

/// jz is the full shift of the plasma transition frequency:
/// jz_f = f(R) - f(L), jz_m = m(L) - m(R).
inline QutritQubitModel extract_qutrit_qubit(const Spectrum& s, const CircuitParams* params = nullptr) {
  const auto energy = [&](Well w, int k, int l) {
    const auto i = s.find({w, k, l});
    if (!i)
      throw Error(ErrorKind::missing_states, std::string("state |") + well_name(w) + "," + std::to_string(k) + "," +
                                                 std::to_string(l) + "> not found");
    return s.energies[*i];
  };
  QutritQubitModel q;
  for (Well w : {Well::L, Well::C, Well::R}) {
    const auto idx = static_cast<std::size_t>(w);
    q.eps[idx] = energy(w, 0, 0);
    q.transition_f[idx] = energy(w, 1, 0) - q.eps[idx];
    q.transition_m[idx] = energy(w, 0, 1) - q.eps[idx];
  }
  q.omega_pf = q.transition_f[static_cast<std::size_t>(Well::L)];
  q.omega_pm = q.transition_m[static_cast<std::size_t>(Well::R)];
  q.jz_f = q.transition_f[static_cast<std::size_t>(Well::R)] - q.omega_pf;
  q.jz_m = q.transition_m[static_cast<std::size_t>(Well::L)] - q.omega_pm;
  if (params) {
    const DispersiveEstimate d = dispersive_estimate(*params);
    q.g_f = d.g_f;
    q.g_m = d.g_m;
  }
  return q;
}

/// Energy of |w, k, l> predicted by the dispersive model.
inline double reconstruct_energy(const QutritQubitModel& q, const StateLabel& label) {
  const double f = q.omega_pf + (label.well == Well::R ? q.jz_f : 0.0);
  const double m = q.omega_pm + (label.well == Well::L ? q.jz_m : 0.0);
  return q.eps_of(label.well) + label.k * f + label.l * m;
}

}  // namespace fluxon
