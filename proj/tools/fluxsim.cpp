// fluxsim <mode> [--config file] [--preset name] [--out path] [--format csv|json] [--levels k] [--threads n]
//
// Exit codes: 0 success, 1 configuration error, 2 every row failed.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "fluxon/config.hpp"
#include "fluxon/sweep.hpp"
#include "fluxon/table.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fluxon SQUID simulator"};
  std::string mode_text;
  std::optional<std::string> config_path, preset_name;
  std::string out_path;
  std::string format_text = "csv";
  std::optional<std::size_t> levels, threads;

  app.add_option("mode", mode_text,
                 "spectrum1d | spectrum2d | beta | current | wkb-compare | beats | ramsey | protocol")
      ->required();
  app.add_option("--config", config_path, "flat JSON config file");
  app.add_option("--preset", preset_name, "fig4 | fig5 | fig6 | fig7a | fig7b | fig8 | nofluxon");
  app.add_option("--out", out_path, "output file (default: stdout, no manifest)");
  app.add_option("--format", format_text, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--levels", levels, "number of levels");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  fluxon::RunConfig config;
  fluxon::Mode mode{};
  try {
    mode = fluxon::parse_mode(mode_text);
    config = fluxon::load_config(preset_name, config_path);
    if (levels) config.levels = *levels;
    if (threads) config.threads = *threads;
    fluxon::check_config(config);
  } catch (const fluxon::Error& e) {
    std::cerr << "fluxsim: " << e.what() << "\n";
    return 1;
  }

  fluxon::SweepTable table;
  try {
    table = fluxon::run_mode(mode, config);
  } catch (const fluxon::Error& e) {
    std::cerr << "fluxsim: " << e.what() << "\n";
    return 2;
  }
  for (const auto& w : table.metadata["warnings"]) std::cerr << "fluxsim: warning: " << w.get<std::string>() << "\n";

  const auto format = format_text == "json" ? fluxon::Format::json : fluxon::Format::csv;
  try {
    if (out_path.empty())
      std::cout << fluxon::serialize(table, format);
    else
      fluxon::emit(table, format, out_path);
  } catch (const fluxon::Error& e) {
    std::cerr << "fluxsim: " << e.what() << "\n";
    return 2;
  }

  const std::size_t failed = table.failed_rows();
  if (failed > 0) std::cerr << "fluxsim: " << failed << " of " << table.rows.size() << " rows reported errors\n";
  return !table.rows.empty() && failed == table.rows.size() ? 2 : 0;
}
