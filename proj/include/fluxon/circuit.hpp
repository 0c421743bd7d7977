#pragma once

// Physical parameters and potential-energy landscapes of the two- and
// three-cell SQUIDs.
//
// Units used throughout the library:
//   energies    E/h in GHz (so a frequency in GHz is also an energy),
//   time        ns (1 GHz x 1 ns = one cycle),
//   phases      radians,
//   fluxes      units of the flux quantum Phi0,
//   currents    units of Phi0/L.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fluxon/error.hpp"

namespace fluxon {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Energy scales of the circuit, all E/h in GHz.
struct CircuitParams {
  double ejf = 0.0;  ///< Josephson energy of junction f
  double ejm = 0.0;  ///< Josephson energy of junction m (three-cell only)
  double ec = 0.0;   ///< charging energy e^2/2C
  double el = 0.0;   ///< inductive energy Phi0^2 / (L (2 pi)^2)

  double beta_f() const noexcept { return ejf / el; }
  double beta_m() const noexcept { return ejm / el; }
};

/// Externally applied fluxes through the left, central and right cells.
struct FluxConfig {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phim = 0.0;

  double delta_f() const noexcept { return phi2 - phi1; }
  double sigma_f() const noexcept { return phi1 + phi2; }
  double delta_m() const noexcept { return phim - phi2; }
  double sigma_m() const noexcept { return phi2 + phim; }

  /// Builds the fluxes from the f-pair difference/sum and the m-cell flux.
  static FluxConfig from_delta_sigma(double delta_f, double sigma_f, double phim = 0.0) noexcept {
    return {0.5 * (sigma_f - delta_f), 0.5 * (sigma_f + delta_f), phim};
  }
};

/// Two-cell potential with the constant flux-sum term dropped:
/// U = E_J (1 - cos phi) + E_L (phi - pi Phi_Delta)^2.
inline double potential_1d(double ej, double el, double phi_delta, double phase) noexcept {
  const double d = phase - pi * phi_delta;
  return ej * (1.0 - std::cos(phase)) + el * d * d;
}

inline double potential_1d(const CircuitParams& p, double phi_delta, double phase) noexcept {
  return potential_1d(p.ejf, p.el, phi_delta, phase);
}

/// dU/dphi of the two-cell potential.
inline double potential_1d_slope(double ej, double el, double phi_delta, double phase) noexcept {
  return ej * std::sin(phase) + 2.0 * el * (phase - pi * phi_delta);
}

/// d^2U/dphi^2 of the two-cell potential.
inline double potential_1d_curvature(double ej, double el, double phase) noexcept {
  return ej * std::cos(phase) + 2.0 * el;
}

/// Flux-dependent constant of the three-cell Hamiltonian, obtained by
/// completing the squares of the inductive energy. Zero for the trapped-fluxon
/// configuration phi1 + phi2 = Phi0, phim = 0 and for zero applied flux.
inline double potential_2d_offset(const CircuitParams& p, const FluxConfig& f) noexcept {
  const double x1 = two_pi * f.phi1;
  const double x2 = two_pi * f.phi2;
  const double xm = two_pi * f.phim;
  return 0.25 * p.el * ((x1 + x2) * (x1 + x2) + (x2 + xm) * (x2 + xm) - 2.0 * x2 * x2);
}

/// Three-cell potential: both junction/inductive terms, the inductive coupling
/// -E_L phi_f phi_m scaled by `coupling`, and the constant offset.
inline double potential_2d(const CircuitParams& p, const FluxConfig& f, double phi_f, double phi_m,
                           double coupling = 1.0) noexcept {
  return potential_1d(p.ejf, p.el, f.delta_f(), phi_f) + potential_1d(p.ejm, p.el, f.delta_m(), phi_m) -
         coupling * p.el * phi_f * phi_m + potential_2d_offset(p, f);
}

struct Gradient2 {
  double df = 0.0;
  double dm = 0.0;
};

struct Hessian2 {
  double ff = 0.0;
  double fm = 0.0;
  double mm = 0.0;
};

inline Gradient2 potential_2d_gradient(const CircuitParams& p, const FluxConfig& f, double phi_f,
                                       double phi_m) noexcept {
  return {potential_1d_slope(p.ejf, p.el, f.delta_f(), phi_f) - p.el * phi_m,
          potential_1d_slope(p.ejm, p.el, f.delta_m(), phi_m) - p.el * phi_f};
}

inline Hessian2 potential_2d_hessian(const CircuitParams& p, double phi_f, double phi_m) noexcept {
  return {potential_1d_curvature(p.ejf, p.el, phi_f), -p.el, potential_1d_curvature(p.ejm, p.el, phi_m)};
}

/// Checks the regime of validity. Throws on non-positive energies; otherwise
/// returns human-readable warnings (empty when the parameters are in the
/// fluxon/quasi-classical regime).
inline std::vector<std::string> validate_params(const CircuitParams& p, const FluxConfig& f = {}) {
  if (!(p.ejf > 0.0) || !(p.ejm > 0.0) || !(p.ec > 0.0) || !(p.el > 0.0))
    throw Error(ErrorKind::invalid_params, "all energies must be strictly positive");
  if (!std::isfinite(p.ejf) || !std::isfinite(p.ejm) || !std::isfinite(p.ec) || !std::isfinite(p.el))
    throw Error(ErrorKind::invalid_params, "energies must be finite");
  if (!std::isfinite(f.phi1) || !std::isfinite(f.phi2) || !std::isfinite(f.phim))
    throw Error(ErrorKind::invalid_params, "fluxes must be finite");

  std::vector<std::string> warnings;
  if (p.beta_f() < 1.0) warnings.push_back("beta<1 for junction f: fluxon not well defined");
  if (p.beta_m() < 1.0) warnings.push_back("beta<1 for junction m: fluxon not well defined");
  if (p.ejf / p.ec < 1.0) warnings.push_back("E_Jf/E_C<1: quasi-classical description invalid");
  return warnings;
}

}  // namespace fluxon
