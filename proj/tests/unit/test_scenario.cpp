#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "qdmol/scenario.hpp"

using namespace qdmol;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qdmol-scenario-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

// Small grid and a short fixed duration keep each run under a second.
json quick_rabi() {
  return {{"scenario", "rabi"}, {"grid", {{"points", {20, 20, 24}}}}, {"drive", {{"duration", 4.0}}}};
}

void expect_config_error(const json& doc, ErrorCode code, const std::string& field) {
  try {
    (void)config_from_json(doc);
    FAIL("expected an error for field " << field);
  } catch (const Error& e) {
    CHECK(e.code() == code);
    CHECK(e.field() == field);
  }
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config(R"({"scenario": "rabi"})");
  CHECK(c.scenario == ScenarioKind::kRabi);
  CHECK(c.seed == 1);
  CHECK(c.grid_points == std::array<std::size_t, 3>{48, 48, 64});
  CHECK(c.drive.amplitude == 1.5);
  CHECK(!c.drive_frequency);
  CHECK(c.resolved["material"]["effective_mass_ratio"] == 0.067);
  CHECK(c.resolved == config_from_json(c.resolved).resolved);
  for (const char* s : {"rabi", "hadamard", "cnot", "entangle", "decoherence", "readout-map", "coulomb-sweep",
                        "eigensolve"}) {
    CHECK(std::string(to_string(parse_config(std::string(R"({"scenario": ")") + s + "\"}").scenario)) == s);
  }
}

TEST_CASE("syntax errors carry line and column") {
  try {
    (void)parse_config("{\n  \"scenario\": \"rabi\",\n  \"seed\": ]\n}");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
  CHECK_QDMOL_ERROR(parse_config(""), ErrorCode::kConfig);
  CHECK_QDMOL_ERROR(parse_config("[1, 2]"), ErrorCode::kConfig);
}

TEST_CASE("schema violations name the field") {
  expect_config_error(json::object(), ErrorCode::kConfig, "scenario");
  expect_config_error({{"scenario", "teleport"}}, ErrorCode::kConfig, "scenario");
  expect_config_error({{"scenario", "rabi"}, {"colour", 1}}, ErrorCode::kConfig, "colour");
  expect_config_error({{"scenario", "rabi"}, {"drive", {{"amplitud", 1}}}}, ErrorCode::kConfig, "drive.amplitud");
  expect_config_error({{"scenario", "rabi"}, {"drive", {{"amplitude", "big"}}}}, ErrorCode::kConfig,
                      "drive.amplitude");
  expect_config_error({{"scenario", "rabi"}, {"grid", {{"points", {48, 48}}}}}, ErrorCode::kConfig, "grid.points");
  expect_config_error({{"scenario", "rabi"}, {"grid", {{"points", {8, 48, 64}}}}}, ErrorCode::kGridTooSmall,
                      "grid.points");
  expect_config_error({{"scenario", "rabi"}, {"dynamics", {{"dt", 0}}}}, ErrorCode::kInvalidArgument, "dynamics.dt");
  expect_config_error({{"scenario", "rabi"}, {"dynamics", {{"initial_state", "2"}}}}, ErrorCode::kInvalidArgument,
                      "dynamics.initial_state");
  expect_config_error({{"scenario", "entangle"}, {"dynamics", {{"initial_state", "00"}}}},
                      ErrorCode::kInvalidArgument, "dynamics.initial_state");
  expect_config_error({{"scenario", "cnot"}, {"drive", {{"frequency", 6.0}}}}, ErrorCode::kInvalidArgument,
                      "drive.frequency");
  expect_config_error({{"scenario", "rabi"}, {"decoherence", {{"transition_energy", 40}}}},
                      ErrorCode::kInvalidArgument, "decoherence.transition_energy");
  expect_config_error({{"scenario", "rabi"}, {"gate", {{"coupling", "magic"}}}}, ErrorCode::kConfig,
                      "gate.coupling");
  expect_config_error({{"scenario", "rabi"}, {"coulomb_sweep", {{"lateral_separations", {20.0}}}}},
                      ErrorCode::kInvalidArgument, "coulomb_sweep.lateral_separations");
  expect_config_error({{"scenario", "rabi"}, {"readout", {{"margin", 5.0}}}}, ErrorCode::kInvalidArgument,
                      "readout.margin");
  CHECK_NOTHROW(config_from_json({{"scenario", "rabi"}, {"qubit", {{"splitting", nullptr}}}}));
}

TEST_CASE("dotted parameter overrides") {
  const auto c = config_from_json(quick_rabi());
  const auto d = with_parameter(c, "drive.amplitude", 2.0);
  CHECK(d.drive.amplitude == 2.0);
  CHECK(c.drive.amplitude == 1.5);
  CHECK_QDMOL_ERROR(with_parameter(c, "drive.nope", 1), ErrorCode::kConfig);
  CHECK_QDMOL_ERROR(with_parameter(c, "drive", 1), ErrorCode::kConfig);
  CHECK_QDMOL_ERROR(with_parameter(c, "", 1), ErrorCode::kConfig);
  CHECK_QDMOL_ERROR(with_parameter(c, "drive.amplitude", -1.0), ErrorCode::kInvalidArgument);
}

TEST_CASE("rabi run writes its artifacts deterministically") {
  const auto c = config_from_json(quick_rabi());
  const auto a = scratch("a"), b = scratch("b");
  const auto out = run_scenario(c, a.string());
  run_scenario(c, b.string());
  for (const char* f : {"summary.json", "trajectory.csv", "amplitudes.csv", "schedule.json"}) {
    REQUIRE(fs::exists(a / f));
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
  CHECK(first_line(a / "trajectory.csv") == "t_ps,p0,p1");
  CHECK(first_line(a / "amplitudes.csv") == "t_ps,re0,im0,re1,im1");
  const auto summary = json::parse(slurp(a / "summary.json"));
  CHECK(summary["scenario"] == "rabi");
  CHECK(summary["config"] == c.resolved);
  CHECK(summary["results"]["duration_ps"] == 4.0);
  CHECK(out.files.size() == 4);
  CHECK(!fs::exists(a / "error.json"));
}

TEST_CASE("failures leave error.json and a later success clears it") {
  const auto dir = scratch("fail");
  auto doc = quick_rabi();
  doc["dynamics"] = {{"dt", 0.02}};
  const auto bad = config_from_json(doc);
  CHECK_QDMOL_ERROR(run_scenario(bad, dir.string()), ErrorCode::kStepTooLarge);
  const auto err = json::parse(slurp(dir / "error.json"));
  CHECK(err["error"]["code"] == "step-too-large");
  CHECK(err["error"]["exit_code"] == 3);
  run_scenario(config_from_json(quick_rabi()), dir.string());
  CHECK(!fs::exists(dir / "error.json"));
}

TEST_CASE("error documents") {
  const auto cfg = error_document(Error(ErrorCode::kConfig, "bad", "drive.amplitude"))["error"];
  CHECK(cfg["code"] == "config-error");
  CHECK(cfg["field"] == "drive.amplitude");
  CHECK(cfg["exit_code"] == 2);
  CHECK(error_document(Error(ErrorCode::kNoConvergence, "x"))["error"]["exit_code"] == 3);
  CHECK(error_document(std::runtime_error("boom"))["error"]["code"] == "internal");
  CHECK_QDMOL_ERROR(write_file_atomic("/proc/qdmol/forbidden.txt", "x"), ErrorCode::kIo);
}

TEST_CASE("sweep over a parameter") {
  const auto dir = scratch("sweep");
  const auto c = config_from_json(quick_rabi());
  const auto doc = run_sweep(c, "drive.amplitude", {1.0, 2.0}, dir.string());
  REQUIRE(doc["points"].size() == 2);
  CHECK(doc["points"][0]["status"] == "ok");
  CHECK(doc["points"][1]["results"]["drive_amplitude_mV_per_nm"] == 2.0);
  CHECK(fs::exists(dir / "point_000" / "summary.json"));
  CHECK(fs::exists(dir / "sweep.json"));
  CHECK_QDMOL_ERROR(run_sweep(c, "drive.amplitude", {1.0, -3.0}, dir.string()), ErrorCode::kInvalidArgument);
  CHECK_QDMOL_ERROR(run_sweep(c, "drive.amplitude", {}, dir.string()), ErrorCode::kConfig);
}

TEST_CASE("seed invariance") {
  const auto r = check_seed_invariance(config_from_json(quick_rabi()));
  CHECK(r["invariant"] == true);
  CHECK(r["seeds"] == json({1, 2, 3}));
  CHECK(r["max_relative_difference"].get<double>() <= 1e-3);
}

TEST_CASE("eigensolve scenario") {
  const auto dir = scratch("eig");
  const auto c = config_from_json({{"scenario", "eigensolve"}, {"grid", {{"points", {20, 20, 24}}}}});
  run_scenario(c, dir.string());
  CHECK(first_line(dir / "levels.csv") == "state,energy_meV,residual,localization_lower,localization_upper");
  fs::remove_all(dir.parent_path());
}
