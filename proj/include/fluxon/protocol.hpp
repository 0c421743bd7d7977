#pragma once

// Time-domain behaviour of the reduced models: fluxon quantum beats, Ramsey
// calibration of the conditional delays and the position readout protocol.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fluxon/circuit.hpp"
#include "fluxon/effective.hpp"
#include "fluxon/error.hpp"
#include "fluxon/spectrum.hpp"

namespace fluxon {

struct BeatsTrace {
  std::vector<double> times;  ///< ns
  std::vector<double> p_left;
  std::vector<double> p_right;
};

/// Sample times 0, dt, 2 dt, ... up to t_max inclusive.
inline std::vector<double> time_grid(double t_max, double dt) {
  if (!(dt > 0.0) || !(t_max > 0.0) || !std::isfinite(t_max))
    throw Error(ErrorKind::invalid_params, "need dt > 0 and t_max > 0");
  const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = dt * static_cast<double>(i);
  return t;
}

/// Probability that a fluxon prepared in one cell is found in the other after
/// time t: (delta^2 / gap^2) sin^2(pi gap t).
inline double transfer_probability(const TwoLevelModel& m, double t) noexcept {
  const double gap = m.gap();
  if (!(gap > 0.0)) return 0.0;
  const double s = std::sin(pi * gap * t);
  return m.delta * m.delta / (gap * gap) * s * s;
}

/// Closed-form two-level evolution from a fluxon localised in `initial`.
inline BeatsTrace beats(const TwoLevelModel& m, double t_max, double dt, Well initial = Well::L) {
  if (initial == Well::C) throw Error(ErrorKind::invalid_params, "two-cell beats start in L or R");
  BeatsTrace tr;
  tr.times = time_grid(t_max, dt);
  for (double t : tr.times) {
    const double moved = transfer_probability(m, t);
    tr.p_left.push_back(initial == Well::L ? 1.0 - moved : moved);
    tr.p_right.push_back(initial == Well::L ? moved : 1.0 - moved);
  }
  return tr;
}

struct RamseyCalibration {
  double detuning = 0.0;  ///< GHz
  double jz = 0.0;        ///< GHz
  double delay = 0.0;     ///< ns
  long n = 0;
  double residual = 0.0;  ///< |n/delta - (n+1/2)/(delta+jz)| relative to the delay
};

/// Delay T = n/delta = (n + 1/2)/(delta + jz): after T the unshifted qubit has
/// completed n cycles and the shifted one n + 1/2. Requires delta = 2 n jz.
inline RamseyCalibration calibrate_delay(double jz, double detuning, double tolerance = 1e-9, long n_max = 100000) {
  if (!(jz > 0.0) || !(detuning > 0.0)) throw Error(ErrorKind::invalid_params, "jz and detuning must be positive");
  const double ideal = detuning / (2.0 * jz);
  RamseyCalibration best{detuning, jz, 0.0, 0, std::numeric_limits<double>::infinity()};
  for (long n : {static_cast<long>(std::floor(ideal)), static_cast<long>(std::ceil(ideal))}) {
    if (n < 1 || n > n_max) continue;
    const double t = static_cast<double>(n) / detuning;
    const double residual = std::abs(t - (static_cast<double>(n) + 0.5) / (detuning + jz)) / t;
    if (residual < best.residual) best = {detuning, jz, t, n, residual};
  }
  if (!(best.residual < tolerance))
    throw Error(ErrorKind::no_commensurate_delay,
                "detuning/(2 jz) = " + std::to_string(ideal) + " is not an integer (residual " +
                    std::to_string(best.residual) + ")");
  return best;
}

/// Excited-state population after pi/2 - delay - (pi/2)^-1:
/// P1 = sin^2(pi (detuning + shift) delay), shift = jz when the fluxon shifts
/// this qubit.
inline double ramsey_population(double detuning, double jz, bool shifted, double delay) {
  const double s = std::sin(pi * (detuning + (shifted ? jz : 0.0)) * delay);
  return s * s;
}

struct RamseyTrace {
  std::vector<double> delays;  ///< ns
  std::vector<double> p1_shifted;
  std::vector<double> p1_unshifted;
};

inline std::vector<double> ramsey_fringe(double detuning, double jz, bool shifted, const std::vector<double>& delays) {
  std::vector<double> out;
  out.reserve(delays.size());
  for (double t : delays) out.push_back(ramsey_population(detuning, jz, shifted, t));
  return out;
}

inline RamseyTrace ramsey_trace(double detuning, double jz, double t_max, double dt) {
  RamseyTrace tr;
  tr.delays = time_grid(t_max, dt);
  tr.p1_shifted = ramsey_fringe(detuning, jz, true, tr.delays);
  tr.p1_unshifted = ramsey_fringe(detuning, jz, false, tr.delays);
  return tr;
}

/// Qubit f flips only for a fluxon in R, qubit m only for one in L.
/// Both flipped is not a one-fluxon outcome and decodes to nullopt.
inline std::optional<Well> decode_position(int f_outcome, int m_outcome) {
  if (f_outcome == 0 && m_outcome == 0) return Well::C;
  if (f_outcome == 1 && m_outcome == 0) return Well::R;
  if (f_outcome == 0 && m_outcome == 1) return Well::L;
  return std::nullopt;
}

struct ProtocolScenario {
  double jz_f = 0.0073;       ///< GHz
  double jz_m = 0.0061;       ///< GHz
  double detuning_f = 0.0;    ///< GHz, 0 selects 2 jz_f
  double detuning_m = 0.0;    ///< GHz, 0 selects 2 jz_m
  double flip_noise = 0.0;    ///< symmetric bit-flip probability per qubit
};

struct ProtocolResult {
  Well position = Well::C;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  RamseyCalibration cal_f;
  RamseyCalibration cal_m;
  std::array<std::array<std::size_t, 2>, 2> histogram{};  ///< [f][m]
  std::vector<std::array<int, 2>> outcomes;
  std::vector<std::optional<Well>> decoded;
  std::size_t correct = 0;

  double accuracy() const noexcept { return shots ? static_cast<double>(correct) / static_cast<double>(shots) : 0.0; }
};

/// Random stream for one shot; seeding per shot makes shots independent of
/// evaluation order.
inline std::mt19937_64 shot_rng(std::uint64_t seed, std::uint64_t shot) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shot), static_cast<std::uint32_t>(shot >> 32)};
  return std::mt19937_64(seq);
}

/// Simulates one measurement per shot on each qubit with calibrated delays.
inline ProtocolResult run_protocol(const ProtocolScenario& sc, Well position, std::size_t shots, std::uint64_t seed) {
  if (shots == 0) throw Error(ErrorKind::invalid_params, "shots must be positive");
  if (!(sc.flip_noise >= 0.0 && sc.flip_noise <= 1.0))
    throw Error(ErrorKind::invalid_params, "flip noise must lie in [0, 1]");
  ProtocolResult r;
  r.position = position;
  r.shots = shots;
  r.seed = seed;
  r.cal_f = calibrate_delay(sc.jz_f, sc.detuning_f > 0.0 ? sc.detuning_f : 2.0 * sc.jz_f);
  r.cal_m = calibrate_delay(sc.jz_m, sc.detuning_m > 0.0 ? sc.detuning_m : 2.0 * sc.jz_m);
  const double p_f = ramsey_population(r.cal_f.detuning, sc.jz_f, position == Well::R, r.cal_f.delay);
  const double p_m = ramsey_population(r.cal_m.detuning, sc.jz_m, position == Well::L, r.cal_m.delay);

  std::uniform_real_distribution<double> uni(0.0, 1.0);
  r.outcomes.reserve(shots);
  r.decoded.reserve(shots);
  for (std::size_t s = 0; s < shots; ++s) {
    std::mt19937_64 rng = shot_rng(seed, s);
    int f = uni(rng) < p_f ? 1 : 0;
    int m = uni(rng) < p_m ? 1 : 0;
    if (uni(rng) < sc.flip_noise) f ^= 1;
    if (uni(rng) < sc.flip_noise) m ^= 1;
    r.outcomes.push_back({f, m});
    ++r.histogram[f][m];
    const auto d = decode_position(f, m);
    r.decoded.push_back(d);
    if (d && *d == position) ++r.correct;
  }
  return r;
}

}  // namespace fluxon
