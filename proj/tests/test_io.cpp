#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "fluxon/config.hpp"
#include "fluxon/sweep.hpp"
#include "fluxon/table.hpp"

using namespace fluxon;
namespace fs = std::filesystem;

namespace {

SweepTable sample_table() {
  SweepTable t;
  t.metadata["tool"] = "fluxsim";
  t.metadata["config"] = {{"a", 1.5}, {"b", "x"}};
  t.columns = {"x", "y", "z"};
  t.add_row({0.1, -2.5e-17, 3.0});
  t.add_row({std::nan(""), std::numeric_limits<double>::infinity(), 1.0 / 3.0}, "grid too narrow: at row 2, ok");
  t.add_row({1e300, -0.0, 7.0});
  return t;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fluxon_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Table, CsvRoundTripIsByteIdentical) {
  const std::string text = to_csv(sample_table());
  EXPECT_EQ(to_csv(parse_csv(text)), text);
  const SweepTable back = parse_csv(text);
  EXPECT_EQ(back.columns, sample_table().columns);
  EXPECT_TRUE(std::isnan(back.rows[1][0]));
  EXPECT_EQ(back.rows[0][1], -2.5e-17);
  EXPECT_EQ(back.errors[1], "grid too narrow: at row 2; ok");  // comma sanitised
  EXPECT_NE(text.find("x,y,z,error\n"), std::string::npos);
}

TEST(Table, JsonRoundTripIsByteIdentical) {
  SweepTable t = sample_table();
  t.rows[1][1] = 2.0;  // JSON has no infinity; non-finite values become null
  const std::string text = to_json_text(t);
  EXPECT_EQ(to_json_text(parse_json_text(text)), text);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["columns"].back(), "error");
  EXPECT_TRUE(j["rows"][1][0].is_null());
  EXPECT_TRUE(j["rows"][0].back().is_null());
  EXPECT_EQ(parse_json_text(text), t);
}

TEST(Table, EmptyTable) {
  SweepTable t;
  t.columns = {"a"};
  EXPECT_EQ(to_csv(t), "a,error\n");
  EXPECT_EQ(parse_csv(to_csv(t)), t);
  EXPECT_EQ(parse_json_text(to_json_text(t)), t);
  EXPECT_THROW(t.add_row({1.0, 2.0}), Error);
}

TEST(Table, MalformedInputRejected) {
  EXPECT_THROW(parse_csv("a,b\n1,2\n"), Error);
  EXPECT_THROW(parse_csv("a,error\n1,2,3\n"), Error);
  EXPECT_THROW(parse_csv("a,error\nfoo,\n"), Error);
  EXPECT_THROW(parse_csv(""), Error);
}

TEST(Manifest, KnownDigestAndUpdates) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const fs::path dir = scratch("manifest");
  const SweepTable t = sample_table();
  emit(t, Format::csv, dir / "b.csv");
  emit(t, Format::json, dir / "a.json");
  emit(t, Format::csv, dir / "b.csv");
  const auto m = nlohmann::json::parse(read_file(dir / "manifest.json"));
  ASSERT_EQ(m["files"].size(), 2u);
  EXPECT_EQ(m["files"][0]["path"], "a.json");
  EXPECT_EQ(m["files"][1]["path"], "b.csv");
  const std::string csv = read_file(dir / "b.csv");
  EXPECT_EQ(m["files"][1]["sha256"], sha256_hex(csv));
  EXPECT_EQ(m["files"][1]["bytes"], csv.size());
  fs::remove_all(dir);
}

TEST(Config, StrictKeysAndTypes) {
  RunConfig c;
  EXPECT_THROW(apply_json(c, nlohmann::json{{"ejf", 2.0}}), Error);
  EXPECT_THROW(apply_json(c, nlohmann::json{{"levels", -1}}), Error);
  EXPECT_THROW(apply_json(c, nlohmann::json{{"levels", 2.5}}), Error);
  EXPECT_THROW(apply_json(c, nlohmann::json{{"sweep_log", 1}}), Error);
  EXPECT_THROW(apply_json(c, nlohmann::json::array()), Error);
  apply_json(c, nlohmann::json{{"ejf_ghz", 3.0}, {"levels", 4}, {"qubit", "m"}, {"preset", "ignored"}});
  EXPECT_EQ(c.params.ejf, 3.0);
  EXPECT_EQ(c.levels, 4u);
  EXPECT_EQ(c.qubit, "m");
}

TEST(Config, EchoRoundTrips) {
  RunConfig c = preset("fig6");
  RunConfig d;
  apply_json(d, to_json(c));
  d.preset = c.preset;  // the preset name is informational and not re-applied
  EXPECT_EQ(to_json(d), to_json(c));
  EXPECT_EQ(d.sweep_points(), c.sweep_points());
}

TEST(Config, PresetsAreValid) {
  for (const auto& name : preset_names()) EXPECT_NO_THROW(check_config(preset(name))) << name;
  EXPECT_THROW(preset("nope"), Error);
  const RunConfig f6 = preset("fig6");
  const auto x = f6.sweep_points();
  EXPECT_NEAR(x.front() * 0.15, 1.0, 1e-12);
  EXPECT_NEAR(x.back() * 0.15, 100.0, 1e-12);
  EXPECT_NEAR(x[1] / x[0], x[2] / x[1], 1e-12);
}

TEST(Config, CheckRejectsBadValues) {
  RunConfig c;
  c.qubit = "q";
  EXPECT_THROW(check_config(c), Error);
  c = RunConfig{};
  c.params.ec = 0;
  EXPECT_THROW(check_config(c), Error);
  c = RunConfig{};
  c.grid2d_coarse_n = c.grid2d_n;
  EXPECT_THROW(check_config(c), Error);
  c = RunConfig{};
  c.sweep_log = true;
  c.sweep_start = 0;
  EXPECT_THROW(check_config(c), Error);
  EXPECT_THROW(load_config(std::nullopt, std::string("/nonexistent/cfg.json")), Error);
}

TEST(Modes, NamesRoundTrip) {
  for (Mode m : {Mode::spectrum1d, Mode::spectrum2d, Mode::beta, Mode::current, Mode::wkb_compare, Mode::beats,
                 Mode::ramsey, Mode::protocol})
    EXPECT_EQ(parse_mode(mode_name(m)), m);
  EXPECT_THROW(parse_mode("bogus"), Error);
}

TEST(Sweep, ParallelMatchesSerial) {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  RunConfig c = preset("fig4");
  c.sweep_steps = 9;
  c.grid1d_n = 801;
  c.levels = 3;
  c.threads = 1;
  const SweepTable serial = sweep_spectrum_1d(c);
  c.threads = 4;
  const SweepTable parallel = sweep_spectrum_1d(c);
  EXPECT_EQ(to_csv(serial), to_csv(parallel));
  EXPECT_EQ(serial.metadata["timestamp"], "1970-01-01T00:00:00Z");
  EXPECT_EQ(serial.failed_rows(), 0u);
  // Gap is minimal at the central point.
  const std::size_t gap = serial.column("gap");
  for (const auto& row : serial.rows) EXPECT_GE(row[gap], serial.rows[4][gap] - 1e-12);
}

TEST(Sweep, RowErrorsDoNotAbort) {
  RunConfig c = preset("fig4");
  c.grid1d_min = 2.5;
  c.grid1d_max = 3.8;
  c.grid1d_n = 201;
  c.sweep_steps = 3;
  const SweepTable t = sweep_spectrum_1d(c);
  EXPECT_EQ(t.failed_rows(), 3u);
  EXPECT_TRUE(std::isnan(t.rows[0][1]));
  EXPECT_EQ(t.rows[0][0], c.sweep_start);
}

TEST(Sweep, BetaSweepReportsPerMethodErrors) {
  RunConfig c = preset("fig6");
  c.sweep_start = 0.5;  // beta below one: no asymptotic estimate, no double well
  c.sweep_stop = 20.0;
  c.sweep_steps = 3;
  c.grid1d_n = 801;
  const SweepTable t = sweep_beta(c, true);
  EXPECT_NE(t.errors[0].find("asymptotic"), std::string::npos);
  EXPECT_TRUE(t.errors[2].empty()) << t.errors[2];
  EXPECT_EQ(t.columns.size(), 12u);
}

TEST(Sweep, LightModesRun) {
  RunConfig c = preset("fig4");
  c.sweep_start = 0.0;
  c.sweep_stop = 50.0;
  c.sweep_steps = 11;
  const SweepTable beats = run_mode(Mode::beats, c);
  EXPECT_EQ(beats.rows.size(), 11u);
  EXPECT_TRUE(beats.metadata.contains("model"));
  const SweepTable ramsey = run_mode(Mode::ramsey, c);
  EXPECT_EQ(ramsey.metadata["calibration"]["n"], 1);
  c.shots = 50;
  const SweepTable prot = run_mode(Mode::protocol, c);
  ASSERT_EQ(prot.rows.size(), 3u);
  for (const auto& row : prot.rows) EXPECT_EQ(row[prot.column("accuracy")], 1.0);
}
