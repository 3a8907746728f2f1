#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdmol/model.hpp"

namespace qdmol {

enum class ScenarioKind { kRabi, kHadamard, kCnot, kEntangle, kDecoherence, kReadoutMap, kCoulombSweep, kEigensolve };

const char* to_string(ScenarioKind kind);

// Fully resolved run description. Optional fields are derived at run time
// when absent (drive frequency from the qubit resonance, durations from
// calibration, ...).
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::kRabi;
  std::uint64_t seed = 1;

  GateGeometry gate;  // gate.control is the single-qubit molecule

  std::optional<double> qubit_splitting;  // meV; absent: the computed e1 - e0

  DriveField drive;                  // frequency 0 here means "from resonance"
  std::optional<double> drive_frequency;
  std::optional<double> drive_duration;

  std::array<std::size_t, 3> grid_points{48, 48, 64};
  double grid_padding = 8.0;
  double solver_tolerance = 1e-6;

  double dt = 0.002;
  std::size_t sample_every = 10;
  std::optional<std::string> initial_state;

  double control_splitting = 26.0;  // meV
  double target_splitting = 18.0;
  bool computed_coupling = false;   // false: conditional table with `conditional_shift`
  double conditional_shift = 10.0;

  std::optional<double> gamma;      // 1/s; absent: golden-rule rate
  double temperature = 0.0;
  double transition_energy = 26.0;  // meV, for the golden-rule rate
  std::size_t decoherence_sample_every = 500;
  bool compute_rate = true;

  double probe_height = 10.0;
  std::size_t map_points = 61;
  double map_margin = 10.0;

  std::vector<double> sweep_separations{30, 35, 40, 50, 60, 80};
  std::size_t coulomb_coarsen = 2;

  std::string output_directory = "out";

  nlohmann::json resolved;  // the merged document, defaults included
};

// Defaults of every section; `scenario` is the only required key.
nlohmann::json default_config_document();

// Parses JSON text. Throws Error(kConfig) on syntax errors (with line and
// column), unknown keys and type mismatches, and Error(kInvalidArgument)
// naming the field on invariant violations.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig config_from_json(const nlohmann::json& doc);

// Replaces the value at a dotted path ("drive.amplitude") and revalidates.
ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& path,
                              const nlohmann::json& value);

struct RunOutput {
  nlohmann::json summary;
  std::vector<std::string> files;  // written paths
};

// Runs the scenario and writes its artifacts into `directory` (created if
// needed) atomically. On failure an error.json is written there and the error
// is rethrown.
RunOutput run_scenario(const ScenarioConfig& cfg, const std::string& directory);

// Physics results of the scenario without writing anything.
nlohmann::json scenario_results(const ScenarioConfig& cfg);

// Re-runs with seeds seed, seed+1, seed+2 and compares every numeric result
// to `tolerance` relative (absolute floor 1e-8).
nlohmann::json check_seed_invariance(const ScenarioConfig& cfg, double tolerance = 1e-3);

// One run per value in `<directory>/point_<i>`, plus `<directory>/sweep.json`.
nlohmann::json run_sweep(const ScenarioConfig& cfg, const std::string& path,
                         const std::vector<nlohmann::json>& values, const std::string& directory);

nlohmann::json error_document(const std::exception& e);

void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace qdmol
