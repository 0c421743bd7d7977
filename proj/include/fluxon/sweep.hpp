#pragma once

// Mode drivers: each turns a RunConfig into a SweepTable. Rows are computed
// independently (in parallel when threads > 1) and assembled in input order;
// a failing row records its error and leaves NaN values.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "fluxon/circuit.hpp"
#include "fluxon/config.hpp"
#include "fluxon/effective.hpp"
#include "fluxon/grid.hpp"
#include "fluxon/protocol.hpp"
#include "fluxon/semiclassics.hpp"
#include "fluxon/spectrum.hpp"
#include "fluxon/table.hpp"

namespace fluxon {

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct RowResult {
  std::vector<double> values;
  std::string error;
};

/// Evaluates row(i) for i in [0, n) on `threads` workers; output order is the
/// index order whatever the completion order.
inline std::vector<RowResult> parallel_rows(std::size_t n, std::size_t threads,
                                            const std::function<RowResult(std::size_t)>& row) {
  std::vector<RowResult> out(n);
  const auto guarded = [&](std::size_t i) {
    try {
      out[i] = row(i);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) guarded(i);
    });
  for (auto& th : pool) th.join();
  return out;
}

/// UTC timestamp, taken from SOURCE_DATE_EPOCH when that is set.
inline std::string run_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline PhaseGrid1D grid_1d(const RunConfig& c) { return {c.grid1d_min, c.grid1d_max, c.grid1d_n}; }

/// 2D grid fixed for the whole sweep, centred on the mid-sweep flux.
inline PhaseGrid2D grid_2d(const RunConfig& c, std::size_t n) {
  const double mid = 0.5 * (c.sweep_start + c.sweep_stop);
  return PhaseGrid2D::centered_on(FluxConfig::from_delta_sigma(mid, c.flux.sigma_f(), c.flux.phim), n,
                                  c.grid2d_half_width);
}

namespace detail {

inline std::string join_errors(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

inline ordered_json base_metadata(Mode mode, const RunConfig& c) {
  ordered_json m;
  m["tool"] = "fluxsim";
  m["version"] = std::string(version);
  m["mode"] = std::string(mode_name(mode));
  m["timestamp"] = run_timestamp();
  m["config"] = to_json(c);
  m["tolerances"] = {{"lanczos_relative_residual", LanczosOptions{}.tolerance},
                     {"tridiagonal", "bisection to 2 ulp (long double)"},
                     {"calibration_residual", 1e-9}};
  m["warnings"] = validate_params(c.params, c.flux);
  return m;
}

inline std::vector<std::string> level_columns(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back("e" + std::to_string(i));
  return out;
}

/// Failed rows are padded with NaN but keep their sweep coordinate `x`.
inline void fill_table(SweepTable& t, const std::vector<double>& x, std::vector<RowResult> rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    if (r.values.size() != t.columns.size()) {
      std::vector<double> v(t.columns.size(), nan_value);
      std::copy_n(r.values.begin(), std::min(r.values.size(), v.size()), v.begin());
      if (r.values.empty() && i < x.size()) v[0] = x[i];
      r.values = std::move(v);
    }
    t.add_row(std::move(r.values), std::move(r.error));
  }
}

}  // namespace detail

inline SweepTable sweep_spectrum_1d(const RunConfig& c) {
  SweepTable t;
  t.metadata = detail::base_metadata(Mode::spectrum1d, c);
  t.columns = {"phi_delta"};
  for (auto& name : detail::level_columns(c.levels)) t.columns.push_back(name);
  t.columns.push_back("gap");
  const auto x = c.sweep_points();
  const PhaseGrid1D grid = grid_1d(c);
  detail::fill_table(t, x, parallel_rows(x.size(), c.threads, [&](std::size_t i) {
                       RowResult r{{x[i]}, {}};
                       const Spectrum s = spectrum_1d(c.params, x[i], c.levels, grid);
                       r.values.insert(r.values.end(), s.energies.begin(), s.energies.end());
                       r.values.push_back(s.size() >= 2 ? s.energies[1] - s.energies[0] : nan_value);
                       return r;
                     }));
  return t;
}

inline SweepTable sweep_current(const RunConfig& c) {
  SweepTable t;
  t.metadata = detail::base_metadata(Mode::current, c);
  t.columns = {"phi_delta", "i00", "i11", "i01"};
  const auto x = c.sweep_points();
  const PhaseGrid1D grid = grid_1d(c);
  detail::fill_table(t, x, parallel_rows(x.size(), c.threads, [&](std::size_t i) {
                       const CurrentElements e = current_elements(spectrum_1d(c.params, x[i], 2, grid), grid);
                       return RowResult{{x[i], e.i00, e.i11, e.i01}, {}};
                     }));
  return t;
}

/// Splitting at the configured flux difference for ejf = beta * el:
/// exact (grid), WKB and asymptotic. `detailed` adds the WKB internals.
inline SweepTable sweep_beta(const RunConfig& c, bool detailed = false) {
  SweepTable t;
  t.metadata = detail::base_metadata(detailed ? Mode::wkb_compare : Mode::beta, c);
  t.columns = {"beta", "ejf", "delta_numeric", "delta_wkb", "delta_asymptotic"};
  if (detailed)
    for (const char* name : {"log_ratio_wkb", "log_ratio_asymptotic", "action", "level", "well_frequency",
                             "turning_left", "turning_right"})
      t.columns.push_back(name);
  const auto x = c.sweep_points();
  const PhaseGrid1D grid = grid_1d(c);
  const double phi_delta = c.flux.delta_f();
  detail::fill_table(t, x, parallel_rows(x.size(), c.threads, [&](std::size_t i) {
                       CircuitParams p = c.params;
                       p.ejf = x[i] * p.el;
                       std::vector<std::string> errors;
                       double numeric = nan_value, asym = nan_value;
                       WkbEstimate wkb{nan_value, nan_value, nan_value, nan_value, {nan_value, nan_value}};
                       try {
                         const Spectrum s = spectrum_1d(p, phi_delta, 2, grid);
                         numeric = s.energies[1] - s.energies[0];
                       } catch (const Error& e) {
                         errors.push_back(std::string("numeric: ") + e.what());
                       }
                       try {
                         wkb = wkb_estimate(p, phi_delta);
                       } catch (const Error& e) {
                         errors.push_back(std::string("wkb: ") + e.what());
                       }
                       try {
                         asym = asymptotic_splitting(p);
                       } catch (const Error& e) {
                         errors.push_back(std::string("asymptotic: ") + e.what());
                       }
                       RowResult r{{x[i], p.ejf, numeric, wkb.splitting, asym}, detail::join_errors(errors)};
                       if (detailed) {
                         for (double v : {std::log(wkb.splitting / numeric), std::log(asym / numeric), wkb.action,
                                          wkb.level, wkb.frequency, wkb.turning.left, wkb.turning.right})
                           r.values.push_back(v);
                       }
                       return r;
                     }));
  return t;
}

/// Labelled three-cell levels per flux point, plasma transitions and the
/// extracted dispersive shifts. With grid2d_coarse_n set, labelled energies
/// are Richardson-extrapolated from the two grids. Cells without a low-lying
/// well (e.g. no trapped fluxon) give NaN columns, not row errors.
inline SweepTable run_three_cell(const RunConfig& c) {
  SweepTable t;
  t.metadata = detail::base_metadata(Mode::spectrum2d, c);
  t.columns = {"phi_delta_f"};
  const std::vector<StateLabel> labels = {{Well::L, 0, 0}, {Well::C, 0, 0}, {Well::R, 0, 0},
                                          {Well::L, 1, 0}, {Well::C, 1, 0}, {Well::R, 1, 0},
                                          {Well::L, 0, 1}, {Well::C, 0, 1}, {Well::R, 0, 1}};
  for (const auto& l : labels)
    t.columns.push_back(std::string("E_") + well_name(l.well) + std::to_string(l.k) + std::to_string(l.l));
  for (const char* name : {"f_L", "f_C", "f_R", "m_L", "m_C", "m_R", "jz_f", "jz_m", "jz_f_estimate", "jz_m_estimate"})
    t.columns.push_back(name);
  for (auto& name : detail::level_columns(c.levels)) t.columns.push_back(name);

  const PhaseGrid2D fine = grid_2d(c, c.grid2d_n);
  const double mid = 0.5 * (c.sweep_start + c.sweep_stop);
  const std::vector<WellSite> reference =
      one_fluxon_wells(c.params, FluxConfig::from_delta_sigma(mid, c.flux.sigma_f(), c.flux.phim), fine);
  const DispersiveEstimate estimate = dispersive_estimate(c.params);
  t.metadata["wells"] = ordered_json::array();
  for (const auto& w : reference)
    t.metadata["wells"].push_back({{"label", std::string(1, well_name(w.label))}, {"phi_f", w.phi_f}, {"phi_m", w.phi_m}});
  t.metadata["richardson"] = c.grid2d_coarse_n > 0;

  const auto x = c.sweep_points();
  detail::fill_table(t, x, parallel_rows(x.size(), c.threads, [&](std::size_t i) {
    const FluxConfig f = FluxConfig::from_delta_sigma(x[i], c.flux.sigma_f(), c.flux.phim);
    Spectrum2dOptions opts;
    opts.wells = track_wells(c.params, f, reference);
    const Spectrum s = spectrum_2d(c.params, f, c.levels, fine, opts);
    std::vector<double> energies = s.energies;
    if (c.grid2d_coarse_n > 0) {
      const Spectrum coarse = spectrum_2d(c.params, f, c.levels, grid_2d(c, c.grid2d_coarse_n), opts);
      const double ratio = static_cast<double>(c.grid2d_n - 1) / static_cast<double>(c.grid2d_coarse_n - 1);
      const std::vector<double> extrapolated = richardson_by_label(coarse, s, ratio);
      for (std::size_t q = 0; q < energies.size(); ++q)
        if (!std::isnan(extrapolated[q])) energies[q] = extrapolated[q];
    }
    RowResult r{{x[i]}, {}};
    std::vector<std::string> missing;
    const auto energy_of = [&](const StateLabel& l) {
      const auto q = s.find(l);
      return q ? energies[*q] : nan_value;
    };
    for (const auto& l : labels) {
      r.values.push_back(energy_of(l));
      const bool expected = std::any_of(reference.begin(), reference.end(),
                                        [&](const WellSite& w) { return w.label == l.well; });
      if (expected && std::isnan(r.values.back()))
        missing.push_back(std::string("|") + well_name(l.well) + "," + std::to_string(l.k) + "," +
                          std::to_string(l.l) + ">");
    }
    for (int mode = 0; mode < 2; ++mode)
      for (int w = 0; w < 3; ++w) r.values.push_back(r.values[1 + 3 * (mode + 1) + w] - r.values[1 + w]);
    const double f_L = r.values[10], f_R = r.values[12], m_L = r.values[13], m_R = r.values[15];
    r.values.push_back(f_R - f_L);
    r.values.push_back(m_L - m_R);
    r.values.push_back(estimate.jz_f);
    r.values.push_back(estimate.jz_m);
    r.values.insert(r.values.end(), energies.begin(), energies.end());
    if (!missing.empty()) {
      std::string msg = "missing states:";
      for (const auto& m : missing) msg += " " + m;
      r.error = msg;
    }
    return r;
  }));
  return t;
}

/// Two-level fluxon beats at the configured flux difference; x-axis is time.
inline SweepTable sweep_beats(const RunConfig& c) {
  SweepTable t;
  t.metadata = detail::base_metadata(Mode::beats, c);
  t.columns = {"t_ns", "p_left", "p_right"};
  const PhaseGrid1D grid = grid_1d(c);
  const Spectrum s = spectrum_1d(c.params, 1.0, 2, grid);
  const CurrentElements e = current_elements(s, grid);
  const TwoLevelModel m = two_level_fit(c.params, c.flux.delta_f(), s.energies[1] - s.energies[0], e.i01);
  t.metadata["model"] = {{"delta_ghz", m.delta}, {"epsilon_ghz", m.epsilon}, {"i01", e.i01}};
  for (double time : c.sweep_points()) {
    const double moved = transfer_probability(m, time);
    t.add_row({time, 1.0 - moved, moved});
  }
  return t;
}

/// Ramsey fringes of one qubit; x-axis is the free-evolution delay.
inline SweepTable sweep_ramsey(const RunConfig& c) {
  SweepTable t;
  t.metadata = detail::base_metadata(Mode::ramsey, c);
  t.columns = {"dt_ns", "p1_shifted", "p1_unshifted"};
  const bool f = c.qubit == "f";
  const double jz = f ? c.jz_f_ghz : c.jz_m_ghz;
  const double detuning = (f ? c.detuning_f_ghz : c.detuning_m_ghz) > 0.0 ? (f ? c.detuning_f_ghz : c.detuning_m_ghz)
                                                                          : 2.0 * jz;
  try {
    const RamseyCalibration cal = calibrate_delay(jz, detuning);
    t.metadata["calibration"] = {{"n", cal.n}, {"delay_ns", cal.delay}, {"residual", cal.residual}};
  } catch (const Error& e) {
    t.metadata["calibration"] = {{"error", e.what()}};
  }
  for (double delay : c.sweep_points())
    t.add_row({delay, ramsey_population(detuning, jz, true, delay), ramsey_population(detuning, jz, false, delay)});
  return t;
}

/// One row per true fluxon position with the outcome histogram.
inline SweepTable sweep_protocol(const RunConfig& c) {
  SweepTable t;
  t.metadata = detail::base_metadata(Mode::protocol, c);
  t.columns = {"position", "shots",     "n00",       "n10",     "n01",      "n11",     "decoded_L",
               "decoded_C", "decoded_R", "invalid", "accuracy", "delay_f_ns", "delay_m_ns"};
  const ProtocolScenario sc{c.jz_f_ghz, c.jz_m_ghz, c.detuning_f_ghz, c.detuning_m_ghz, c.flip_noise};
  const Well positions[] = {Well::L, Well::C, Well::R};
  detail::fill_table(t, {0.0, 1.0, 2.0}, parallel_rows(3, c.threads, [&](std::size_t i) {
                       const ProtocolResult r = run_protocol(sc, positions[i], c.shots, c.seed);
                       std::array<double, 4> decoded{};
                       for (const auto& d : r.decoded) ++decoded[d ? static_cast<std::size_t>(*d) : 3];
                       return RowResult{{static_cast<double>(i), static_cast<double>(r.shots),
                                         static_cast<double>(r.histogram[0][0]), static_cast<double>(r.histogram[1][0]),
                                         static_cast<double>(r.histogram[0][1]), static_cast<double>(r.histogram[1][1]),
                                         decoded[0], decoded[1], decoded[2], decoded[3], r.accuracy(),
                                         r.cal_f.delay, r.cal_m.delay},
                                        {}};
                     }));
  t.metadata["positions"] = {"L", "C", "R"};
  return t;
}

inline SweepTable run_mode(Mode mode, const RunConfig& c) {
  switch (mode) {
    case Mode::spectrum1d: return sweep_spectrum_1d(c);
    case Mode::spectrum2d: return run_three_cell(c);
    case Mode::beta: return sweep_beta(c, false);
    case Mode::current: return sweep_current(c);
    case Mode::wkb_compare: return sweep_beta(c, true);
    case Mode::beats: return sweep_beats(c);
    case Mode::ramsey: return sweep_ramsey(c);
    case Mode::protocol: return sweep_protocol(c);
  }
  throw Error(ErrorKind::config, "unknown mode");
}

}  // namespace fluxon
