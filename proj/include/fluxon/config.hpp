#pragma once

// Run configuration: a flat JSON object of scalar keys, optionally layered on
// a named preset. Unknown keys are rejected so that typos never silently fall
// back to defaults.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluxon/circuit.hpp"
#include "fluxon/error.hpp"
#include "fluxon/grid.hpp"
#include "fluxon/table.hpp"

namespace fluxon {

inline constexpr std::string_view version = "0.1.0";

enum class Mode { spectrum1d, spectrum2d, beta, current, wkb_compare, beats, ramsey, protocol };

inline constexpr std::string_view mode_name(Mode m) noexcept {
  switch (m) {
    case Mode::spectrum1d: return "spectrum1d";
    case Mode::spectrum2d: return "spectrum2d";
    case Mode::beta: return "beta";
    case Mode::current: return "current";
    case Mode::wkb_compare: return "wkb-compare";
    case Mode::beats: return "beats";
    case Mode::ramsey: return "ramsey";
    case Mode::protocol: return "protocol";
  }
  return "unknown";
}

inline Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::spectrum1d, Mode::spectrum2d, Mode::beta, Mode::current, Mode::wkb_compare, Mode::beats,
                 Mode::ramsey, Mode::protocol})
    if (mode_name(m) == s) return m;
  throw Error(ErrorKind::config, "unknown mode '" + std::string(s) + "'");
}

/// Everything needed to reproduce a run. The sweep keys define the x-axis of
/// the selected mode: flux difference (spectrum1d, current, spectrum2d),
/// beta (beta, wkb-compare), time in ns (beats) or delay in ns (ramsey).
struct RunConfig {
  CircuitParams params{2.0, 2.0, 0.5, 0.15};
  FluxConfig flux{0.0, 1.0, 0.0};

  double grid1d_min = -2.0 * pi;
  double grid1d_max = 4.0 * pi;
  std::size_t grid1d_n = 2001;
  std::size_t grid2d_n = 201;
  std::size_t grid2d_coarse_n = 0;  ///< > 0 adds a coarse solve for Richardson extrapolation
  double grid2d_half_width = 3.0 * pi;

  double sweep_start = 0.9;
  double sweep_stop = 1.1;
  std::size_t sweep_steps = 81;
  bool sweep_log = false;

  std::size_t levels = 6;

  double jz_f_ghz = 0.0073;
  double jz_m_ghz = 0.0061;
  double detuning_f_ghz = 0.0;  ///< 0 selects 2 jz_f
  double detuning_m_ghz = 0.0;  ///< 0 selects 2 jz_m
  std::string qubit = "f";
  std::size_t shots = 1000;
  std::uint64_t seed = 1;
  double flip_noise = 0.0;

  std::size_t threads = 0;  ///< 0 selects the hardware concurrency
  std::string preset;

  /// Sweep abscissae; logarithmic spacing when sweep_log is set.
  std::vector<double> sweep_points() const {
    std::vector<double> x;
    if (sweep_steps == 1) return {sweep_start};
    for (std::size_t i = 0; i < sweep_steps; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(sweep_steps - 1);
      x.push_back(sweep_log ? std::exp(std::log(sweep_start) + t * (std::log(sweep_stop) - std::log(sweep_start)))
                            : sweep_start + t * (sweep_stop - sweep_start));
    }
    x.front() = sweep_start;
    x.back() = sweep_stop;
    return x;
  }
};

namespace detail {

struct Key {
  std::string_view name;
  enum Kind { number, count, boolean, text } kind;
};

inline constexpr Key config_keys[] = {
    {"ejf_ghz", Key::number},      {"ejm_ghz", Key::number},        {"ec_ghz", Key::number},
    {"el_ghz", Key::number},       {"phi1", Key::number},           {"phi2", Key::number},
    {"phim", Key::number},         {"grid1d_min", Key::number},     {"grid1d_max", Key::number},
    {"grid1d_n", Key::count},      {"grid2d_n", Key::count},        {"grid2d_coarse_n", Key::count},
    {"grid2d_half_width", Key::number}, {"sweep_start", Key::number}, {"sweep_stop", Key::number},
    {"sweep_steps", Key::count},   {"sweep_log", Key::boolean},     {"levels", Key::count},
    {"jz_f_ghz", Key::number},     {"jz_m_ghz", Key::number},       {"detuning_f_ghz", Key::number},
    {"detuning_m_ghz", Key::number}, {"qubit", Key::text},          {"shots", Key::count},
    {"seed", Key::count},          {"flip_noise", Key::number},     {"threads", Key::count},
};

}  // namespace detail

/// Config echo written into every output's metadata. The thread count is
/// left out: it never changes results.
inline ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["preset"] = c.preset;
  j["ejf_ghz"] = c.params.ejf;
  j["ejm_ghz"] = c.params.ejm;
  j["ec_ghz"] = c.params.ec;
  j["el_ghz"] = c.params.el;
  j["phi1"] = c.flux.phi1;
  j["phi2"] = c.flux.phi2;
  j["phim"] = c.flux.phim;
  j["grid1d_min"] = c.grid1d_min;
  j["grid1d_max"] = c.grid1d_max;
  j["grid1d_n"] = c.grid1d_n;
  j["grid2d_n"] = c.grid2d_n;
  j["grid2d_coarse_n"] = c.grid2d_coarse_n;
  j["grid2d_half_width"] = c.grid2d_half_width;
  j["sweep_start"] = c.sweep_start;
  j["sweep_stop"] = c.sweep_stop;
  j["sweep_steps"] = c.sweep_steps;
  j["sweep_log"] = c.sweep_log;
  j["levels"] = c.levels;
  j["jz_f_ghz"] = c.jz_f_ghz;
  j["jz_m_ghz"] = c.jz_m_ghz;
  j["detuning_f_ghz"] = c.detuning_f_ghz;
  j["detuning_m_ghz"] = c.detuning_m_ghz;
  j["qubit"] = c.qubit;
  j["shots"] = c.shots;
  j["seed"] = c.seed;
  j["flip_noise"] = c.flip_noise;
  return j;
}

/// Overlays the keys of a flat JSON object onto `c`.
inline void apply_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::config, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") continue;  // informational in echoed configs
    const auto* spec = std::find_if(std::begin(detail::config_keys), std::end(detail::config_keys),
                                    [&](const detail::Key& k) { return k.name == key; });
    if (spec == std::end(detail::config_keys)) throw Error(ErrorKind::config, "unknown key '" + key + "'");
    switch (spec->kind) {
      case detail::Key::number:
        if (!value.is_number()) throw Error(ErrorKind::config, "'" + key + "' must be a number");
        break;
      case detail::Key::count:
        if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0))
          throw Error(ErrorKind::config, "'" + key + "' must be a non-negative integer");
        break;
      case detail::Key::boolean:
        if (!value.is_boolean()) throw Error(ErrorKind::config, "'" + key + "' must be true or false");
        break;
      case detail::Key::text:
        if (!value.is_string()) throw Error(ErrorKind::config, "'" + key + "' must be a string");
        break;
    }
    const auto num = [&] { return value.get<double>(); };
    const auto cnt = [&] { return value.get<std::size_t>(); };
    if (key == "ejf_ghz") c.params.ejf = num();
    else if (key == "ejm_ghz") c.params.ejm = num();
    else if (key == "ec_ghz") c.params.ec = num();
    else if (key == "el_ghz") c.params.el = num();
    else if (key == "phi1") c.flux.phi1 = num();
    else if (key == "phi2") c.flux.phi2 = num();
    else if (key == "phim") c.flux.phim = num();
    else if (key == "grid1d_min") c.grid1d_min = num();
    else if (key == "grid1d_max") c.grid1d_max = num();
    else if (key == "grid1d_n") c.grid1d_n = cnt();
    else if (key == "grid2d_n") c.grid2d_n = cnt();
    else if (key == "grid2d_coarse_n") c.grid2d_coarse_n = cnt();
    else if (key == "grid2d_half_width") c.grid2d_half_width = num();
    else if (key == "sweep_start") c.sweep_start = num();
    else if (key == "sweep_stop") c.sweep_stop = num();
    else if (key == "sweep_steps") c.sweep_steps = cnt();
    else if (key == "sweep_log") c.sweep_log = value.get<bool>();
    else if (key == "levels") c.levels = cnt();
    else if (key == "jz_f_ghz") c.jz_f_ghz = num();
    else if (key == "jz_m_ghz") c.jz_m_ghz = num();
    else if (key == "detuning_f_ghz") c.detuning_f_ghz = num();
    else if (key == "detuning_m_ghz") c.detuning_m_ghz = num();
    else if (key == "qubit") c.qubit = value.get<std::string>();
    else if (key == "shots") c.shots = cnt();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "flip_noise") c.flip_noise = num();
    else if (key == "threads") c.threads = cnt();
  }
}

inline std::vector<std::string> preset_names() {
  return {"fig4", "fig5", "fig6", "fig7a", "fig7b", "fig8", "nofluxon"};
}

/// Named parameter sets. 1D presets set ejm = ejf (unused by the two-cell
/// model but kept valid).
inline RunConfig preset(std::string_view name) {
  RunConfig c;
  c.preset = std::string(name);
  const auto two_cell = [&](double ejf) {
    c.params = {ejf, ejf, 0.5, 0.15};
    c.flux = {0.0, 1.0, 0.0};
    c.sweep_start = 0.9;
    c.sweep_stop = 1.1;
    c.sweep_steps = 81;
    c.levels = 6;
  };
  const auto three_cell = [&] {
    c.params = {20.0, 22.0, 0.5, 0.15};
    c.levels = 12;
    c.grid2d_n = 201;
    c.grid2d_coarse_n = 141;
  };
  if (name == "fig4" || name == "fig7a") {
    two_cell(2.0);
  } else if (name == "fig5" || name == "fig7b") {
    two_cell(15.0);
  } else if (name == "fig6") {
    c.params = {1.0, 1.0, 1.0, 0.15};
    c.flux = {0.0, 1.0, 0.0};
    c.sweep_start = 1.0 / 0.15;
    c.sweep_stop = 100.0 / 0.15;
    c.sweep_steps = 81;
    c.sweep_log = true;
    c.levels = 2;
  } else if (name == "fig8") {
    three_cell();
    c.flux = {0.0, 1.0, 0.0};  // phi1 + phi2 = 1 traps one fluxon
    c.sweep_start = 0.8;
    c.sweep_stop = 1.2;
    c.sweep_steps = 21;
  } else if (name == "nofluxon") {
    three_cell();
    c.flux = {0.0, 0.0, 0.0};
    c.sweep_start = 0.0;
    c.sweep_stop = 0.0;
    c.sweep_steps = 1;
  } else {
    throw Error(ErrorKind::config, "unknown preset '" + std::string(name) + "'");
  }
  return c;
}

/// Rejects configurations that cannot run; called after all layers are applied.
inline void check_config(const RunConfig& c) {
  if (c.sweep_steps < 1) throw Error(ErrorKind::config, "sweep_steps must be at least 1");
  if (!std::isfinite(c.sweep_start) || !std::isfinite(c.sweep_stop))
    throw Error(ErrorKind::config, "sweep range must be finite");
  if (c.sweep_log && !(c.sweep_start > 0.0 && c.sweep_stop > 0.0))
    throw Error(ErrorKind::config, "logarithmic sweep needs a positive range");
  if (c.levels < 1) throw Error(ErrorKind::config, "levels must be at least 1");
  if (c.qubit != "f" && c.qubit != "m") throw Error(ErrorKind::config, "qubit must be \"f\" or \"m\"");
  if (c.shots < 1) throw Error(ErrorKind::config, "shots must be at least 1");
  if (!(c.flip_noise >= 0.0 && c.flip_noise <= 1.0)) throw Error(ErrorKind::config, "flip_noise must lie in [0, 1]");
  try {
    validate_params(c.params, c.flux);
    PhaseGrid1D(c.grid1d_min, c.grid1d_max, c.grid1d_n);
    PhaseGrid1D(-c.grid2d_half_width, c.grid2d_half_width, c.grid2d_n);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, e.what());
  }
  if (c.grid2d_coarse_n != 0 && (c.grid2d_coarse_n < 3 || c.grid2d_coarse_n >= c.grid2d_n))
    throw Error(ErrorKind::config, "grid2d_coarse_n must be 0 or in [3, grid2d_n)");
}

inline RunConfig load_config(const std::optional<std::string>& preset_name, const std::optional<std::string>& path) {
  RunConfig c = preset_name ? preset(*preset_name) : RunConfig{};
  if (path) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(*path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::config, *path + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::config, e.what());
    }
    apply_json(c, j);
  }
  return c;
}

}  // namespace fluxon
