#pragma once

// Quasi-classical description of the two-cell SQUID: extrema of the
// potential, harmonic well energies, the WKB tunnelling amplitude and the
// asymptotic splitting of a renormalised cosine potential.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "fluxon/circuit.hpp"
#include "fluxon/error.hpp"

namespace fluxon {

/// The double well of the two-cell potential around the barrier top.
struct WellStructure {
  double phi_min_left = 0.0;
  double phi_min_right = 0.0;
  double phi_barrier = 0.0;
  double energy_left = 0.0;   ///< V(phi_min_left) + freq_left / 2
  double energy_right = 0.0;  ///< V(phi_min_right) + freq_right / 2
  double freq_left = 0.0;
  double freq_right = 0.0;
  double curvature_left = 0.0;
  double curvature_right = 0.0;
  double curvature_barrier = 0.0;
};

struct TurningPoints {
  double left = 0.0;
  double right = 0.0;
};

namespace detail {

/// Sign changes of `f` on [a, b] sampled at `step`, each polished to a root
/// by safeguarded Newton inside its bracket.
template <class F, class DF>
std::vector<double> bracketed_roots(F&& f, DF&& df, double a, double b, double step) {
  std::vector<double> roots;
  const auto n = static_cast<std::size_t>(std::ceil((b - a) / step));
  double x0 = a, f0 = f(a);
  if (f0 == 0.0) roots.push_back(a);
  for (std::size_t i = 1; i <= n; ++i) {
    const double x1 = std::min(b, a + step * static_cast<double>(i));
    const double f1 = f(x1);
    if (f1 == 0.0) {
      roots.push_back(x1);
    } else if (f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
      const double guess = x0 - f0 * (x1 - x0) / (f1 - f0);
      std::uintmax_t iters = 100;
      const double r = boost::math::tools::newton_raphson_iterate(
          [&](double x) { return std::make_pair(f(x), df(x)); }, guess, x0, x1,
          std::numeric_limits<double>::digits - 2, iters);
      roots.push_back(r);
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace detail

/// Harmonic frequency of a well with bottom at `phi_well`: sqrt(8 E_C V'').
inline double well_frequency(const CircuitParams& p, double phi_well) {
  const double curvature = potential_1d_curvature(p.ejf, p.el, phi_well);
  if (!(curvature > 0.0))
    throw Error(ErrorKind::not_a_well, "non-positive curvature at phase " + std::to_string(phi_well));
  return std::sqrt(8.0 * p.ec * curvature);
}

/// Solves E_J sin phi = 2 E_L (phi - pi Phi_Delta) on vertex +- 2 pi and keeps
/// the barrier maximum nearest the parabola vertex with its two minima.
inline WellStructure find_extrema(const CircuitParams& p, double phi_delta) {
  const double vertex = pi * phi_delta;
  const auto slope = [&](double x) { return potential_1d_slope(p.ejf, p.el, phi_delta, x); };
  const auto curv = [&](double x) { return potential_1d_curvature(p.ejf, p.el, x); };
  const std::vector<double> roots = detail::bracketed_roots(slope, curv, vertex - two_pi, vertex + two_pi, 0.01);

  std::vector<double> maxima, minima;
  for (double r : roots) (curv(r) < 0.0 ? maxima : minima).push_back(r);
  if (maxima.empty() || minima.size() < 2)
    throw Error(ErrorKind::no_double_well, "potential has no double well at Phi_Delta=" + std::to_string(phi_delta));

  const double top = *std::min_element(maxima.begin(), maxima.end(), [&](double a, double b) {
    return std::abs(a - vertex) < std::abs(b - vertex);
  });
  double left = -std::numeric_limits<double>::infinity();
  double right = std::numeric_limits<double>::infinity();
  for (double m : minima) {
    if (m < top) left = std::max(left, m);
    if (m > top) right = std::min(right, m);
  }
  if (!std::isfinite(left) || !std::isfinite(right))
    throw Error(ErrorKind::no_double_well, "barrier is not flanked by two minima");

  WellStructure w;
  w.phi_min_left = left;
  w.phi_min_right = right;
  w.phi_barrier = top;
  w.curvature_left = curv(left);
  w.curvature_right = curv(right);
  w.curvature_barrier = curv(top);
  w.freq_left = well_frequency(p, left);
  w.freq_right = well_frequency(p, right);
  w.energy_left = potential_1d(p, phi_delta, left) + 0.5 * w.freq_left;
  w.energy_right = potential_1d(p, phi_delta, right) + 0.5 * w.freq_right;
  return w;
}

/// Points on either side of the barrier where V = energy.
inline TurningPoints turning_points(const CircuitParams& p, double phi_delta, const WellStructure& w, double energy) {
  const auto g = [&](double x) { return potential_1d(p, phi_delta, x) - energy; };
  if (!(g(w.phi_barrier) > 0.0))
    throw Error(ErrorKind::level_above_barrier, "level " + std::to_string(energy) + " GHz is above the barrier top");
  if (!(g(w.phi_min_left) < 0.0) || !(g(w.phi_min_right) < 0.0))
    throw Error(ErrorKind::level_above_barrier, "level lies below a well bottom");
  const auto solve = [&](double lo, double hi) {
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::bisect(g, lo, hi, tol, iters);
    return 0.5 * (a + b);
  };
  return {solve(w.phi_min_left, w.phi_barrier), solve(w.phi_barrier, w.phi_min_right)};
}

struct WkbEstimate {
  double splitting = 0.0;  ///< GHz
  double action = 0.0;     ///< dimensionless tunnelling exponent
  double level = 0.0;      ///< E_gamma, GHz
  double frequency = 0.0;  ///< well frequency, GHz
  TurningPoints turning;
};

/// Under-barrier action int sqrt((V - E) / (4 E_C)) dphi between the turning
/// points. phi = c - r cos(theta) removes the square-root endpoint behaviour.
inline double tunnelling_action(const CircuitParams& p, double phi_delta, const TurningPoints& tp, double energy) {
  const double c = 0.5 * (tp.left + tp.right);
  const double r = 0.5 * (tp.right - tp.left);
  const auto integrand = [&](double theta) {
    const double x = c - r * std::cos(theta);
    const double gap = potential_1d(p, phi_delta, x) - energy;
    return gap > 0.0 ? std::sqrt(gap / (4.0 * p.ec)) * r * std::sin(theta) : 0.0;
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, 0.0, pi, 20, 1e-13, &err);
}

/// Ground-doublet splitting of the symmetric double well:
/// Delta = omega / (e sqrt(pi)) * exp(-action).
inline WkbEstimate wkb_estimate(const CircuitParams& p, double phi_delta) {
  const WellStructure w = find_extrema(p, phi_delta);
  const double scale = std::max(1.0, std::abs(w.energy_left));
  if (std::abs(w.energy_left - w.energy_right) > 1e-9 * scale)
    throw Error(ErrorKind::asymmetric_wells, "wells differ by " + std::to_string(w.energy_right - w.energy_left) + " GHz");
  WkbEstimate out;
  out.level = w.energy_left;
  out.frequency = w.freq_left;
  out.turning = turning_points(p, phi_delta, w, out.level);
  out.action = tunnelling_action(p, phi_delta, out.turning, out.level);
  out.splitting = out.frequency / (std::numbers::e * std::sqrt(pi)) * std::exp(-out.action);
  return out;
}

inline double wkb_splitting(const CircuitParams& p, double phi_delta) { return wkb_estimate(p, phi_delta).splitting; }

/// Josephson and charging energies of the equivalent cosine potential.
struct RenormalizedEnergies {
  double ej = 0.0;
  double ec = 0.0;
};

inline RenormalizedEnergies renormalized_energies(const CircuitParams& p) {
  const double beta = p.beta_f();
  if (!(beta > 1.0) || !std::isfinite(beta))
    throw Error(ErrorKind::invalid_beta, "beta must exceed 1, got " + std::to_string(beta));
  const double s = 1.0 - 1.0 / beta;
  return {p.ejf * (1.0 - pi * pi / (4.0 * beta) * s), p.ec / (s * s)};
}

/// Splitting of the lowest doublet in a deep cosine well,
/// 2 sqrt(2/pi) sqrt(8 Ej Ec) (8 Ej/Ec)^(1/4) exp(-sqrt(8 Ej/Ec)),
/// evaluated with the renormalised energies.
inline double asymptotic_splitting(const CircuitParams& p) {
  const RenormalizedEnergies r = renormalized_energies(p);
  const double ratio = 8.0 * r.ej / r.ec;
  return 2.0 * std::sqrt(2.0 / pi) * std::sqrt(8.0 * r.ej * r.ec) * std::pow(ratio, 0.25) * std::exp(-std::sqrt(ratio));
}

}  // namespace fluxon
