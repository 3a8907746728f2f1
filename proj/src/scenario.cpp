#include "qdmol/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "qdmol/basis.hpp"
#include "qdmol/coulomb.hpp"
#include "qdmol/decoherence.hpp"
#include "qdmol/dynamics.hpp"
#include "qdmol/eigensolver.hpp"
#include "qdmol/error.hpp"
#include "qdmol/gates.hpp"
#include "qdmol/grid.hpp"
#include "qdmol/parallel.hpp"
#include "qdmol/readout.hpp"
#include "qdmol/units.hpp"

namespace qdmol {

using nlohmann::json;

namespace {

struct ScenarioName {
  ScenarioKind kind;
  const char* name;
};

constexpr ScenarioName kScenarioNames[] = {
    {ScenarioKind::kRabi, "rabi"},
    {ScenarioKind::kHadamard, "hadamard"},
    {ScenarioKind::kCnot, "cnot"},
    {ScenarioKind::kEntangle, "entangle"},
    {ScenarioKind::kDecoherence, "decoherence"},
    {ScenarioKind::kReadoutMap, "readout-map"},
    {ScenarioKind::kCoulombSweep, "coulomb-sweep"},
    {ScenarioKind::kEigensolve, "eigensolve"},
};

ScenarioKind scenario_from_string(const std::string& s) {
  for (const auto& n : kScenarioNames)
    if (s == n.name) return n.kind;
  std::string known;
  for (const auto& n : kScenarioNames) known += std::string(known.empty() ? "" : ", ") + n.name;
  throw Error(ErrorCode::kConfig, "scenario: unknown scenario '" + s + "' (expected one of " + known + ")",
              "scenario");
}

bool is_two_qubit(ScenarioKind k) { return k == ScenarioKind::kCnot || k == ScenarioKind::kEntangle; }

constexpr double kDefaultDecoherenceDuration = 10000.0;  // ps

}  // namespace

const char* to_string(ScenarioKind kind) {
  for (const auto& n : kScenarioNames)
    if (n.kind == kind) return n.name;
  return "?";
}

json default_config_document() {
  return json{
      {"scenario", nullptr},
      {"seed", 1},
      {"geometry",
       {{"dot_lower", {{"width", 24.0}, {"height", 20.0}}},
        {"dot_upper", {{"width", 22.0}, {"height", 15.0}}},
        {"barrier_gap", 7.0},
        {"v_lateral", 1000.0},
        {"v_vertical", 240.0},
        {"target",
         {{"dot_lower", {{"width", 29.0}, {"height", 20.0}}},
          {"dot_upper", {{"width", 27.0}, {"height", 15.0}}},
          {"barrier_gap", 7.0}}},
        {"lateral_separation", kDefaultLateralSeparation},
        {"electrode_plane_gap", kDefaultElectrodePlaneGap},
        {"electrode_state", "floating"}}},
      {"material",
       {{"effective_mass_ratio", 0.067},
        {"dielectric_constant", 10.0},
        {"deformation_potential_ev", -6.8},
        {"mass_density", 5.4e3},
        {"sound_velocity", 3.4e3}}},
      {"qubit", {{"splitting", 24.81}}},
      {"drive", {{"amplitude", 1.5}, {"frequency", nullptr}, {"phase", 0.0}, {"duration", nullptr}}},
      {"grid", {{"points", {48, 48, 64}}, {"padding", 8.0}, {"tolerance", 1e-6}}},
      {"dynamics", {{"dt", 0.002}, {"sample_every", 10}, {"initial_state", nullptr}}},
      {"gate",
       {{"control_splitting", 26.0},
        {"target_splitting", 18.0},
        {"coupling", "nominal"},
        {"conditional_shift", 10.0}}},
      {"decoherence",
       {{"gamma", 1e7},
        {"temperature", 0.0},
        {"transition_energy", 26.0},
        {"sample_every", 500},
        {"compute_rate", true}}},
      {"readout", {{"probe_height", 10.0}, {"points", 61}, {"margin", 10.0}}},
      {"coulomb_sweep", {{"lateral_separations", {30.0, 35.0, 40.0, 50.0, 60.0, 80.0}}, {"coarsen", 2}}},
      {"eigensolve", {{"states", 2}}},
      {"output", {{"directory", "out"}}},
  };
}

namespace {

enum class Kind { kNumber, kInteger, kString, kBool, kNumberArray, kPoints, kNullableNumber, kNullableString };

Kind kind_of(const std::string& path, const json& dflt) {
  static const std::map<std::string, Kind> special = {
      {"scenario", Kind::kString},
      {"qubit.splitting", Kind::kNullableNumber},
      {"drive.frequency", Kind::kNullableNumber},
      {"drive.duration", Kind::kNullableNumber},
      {"decoherence.gamma", Kind::kNullableNumber},
      {"dynamics.initial_state", Kind::kNullableString},
      {"grid.points", Kind::kPoints},
      {"coulomb_sweep.lateral_separations", Kind::kNumberArray},
  };
  if (auto it = special.find(path); it != special.end()) return it->second;
  if (dflt.is_boolean()) return Kind::kBool;
  if (dflt.is_string()) return Kind::kString;
  if (dflt.is_number_integer()) return Kind::kInteger;
  return Kind::kNumber;
}

[[noreturn]] void type_error(const std::string& path, const char* expected, const json& got) {
  throw Error(ErrorCode::kConfig,
              path + ": expected " + expected + ", got " + std::string(got.type_name()), path);
}

void check_type(const std::string& path, const json& dflt, const json& v) {
  switch (kind_of(path, dflt)) {
    case Kind::kNumber:
      if (!v.is_number()) type_error(path, "a number", v);
      break;
    case Kind::kInteger:
      if (!v.is_number_integer()) type_error(path, "an integer", v);
      break;
    case Kind::kString:
      if (!v.is_string()) type_error(path, "a string", v);
      break;
    case Kind::kBool:
      if (!v.is_boolean()) type_error(path, "a boolean", v);
      break;
    case Kind::kNullableNumber:
      if (!v.is_null() && !v.is_number()) type_error(path, "a number or null", v);
      break;
    case Kind::kNullableString:
      if (!v.is_null() && !v.is_string()) type_error(path, "a string or null", v);
      break;
    case Kind::kNumberArray:
      if (!v.is_array()) type_error(path, "an array of numbers", v);
      for (const auto& e : v)
        if (!e.is_number()) type_error(path, "an array of numbers", v);
      break;
    case Kind::kPoints:
      if (!v.is_array() || v.size() != 3) type_error(path, "an array of three integers", v);
      for (const auto& e : v)
        if (!e.is_number_integer()) type_error(path, "an array of three integers", v);
      break;
  }
}

void merge_checked(json& base, const json& user, const std::string& prefix) {
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw Error(ErrorCode::kConfig, "unknown key '" + path + "'", path);
    json& slot = base[key];
    if (slot.is_object()) {
      if (!value.is_object()) type_error(path, "an object", value);
      merge_checked(slot, value, path);
    } else {
      check_type(path, slot, value);
      slot = value;
    }
  }
}

void require(bool ok, const std::string& field, const std::string& what,
             ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!ok) throw Error(code, field + ": " + what, field);
}

std::optional<double> opt_number(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::size_t non_negative(const json& v, const std::string& field) {
  const auto i = v.get<std::int64_t>();
  require(i >= 0, field, "must be >= 0");
  return static_cast<std::size_t>(i);
}

MoleculeGeometry molecule_from(const json& g, const json& dots, const Material& m, double x0) {
  return make_molecule(dots["dot_lower"]["width"].get<double>(), dots["dot_lower"]["height"].get<double>(),
                       dots["dot_upper"]["width"].get<double>(), dots["dot_upper"]["height"].get<double>(),
                       dots["barrier_gap"].get<double>(), g["v_lateral"].get<double>(),
                       g["v_vertical"].get<double>(), m, x0);
}

const std::vector<std::string>& initial_labels(bool two_qubit) {
  static const std::vector<std::string> one = {"0", "1"};
  static const std::vector<std::string> two = {"00", "01", "10", "11"};
  return two_qubit ? two : one;
}

}  // namespace

ScenarioConfig config_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kConfig, "config document must be a JSON object", "");
  }
  json merged = default_config_document();
  merge_checked(merged, doc, "");
  if (merged["scenario"].is_null()) {
    throw Error(ErrorCode::kConfig, "scenario: required key missing", "scenario");
  }

  ScenarioConfig c;
  c.scenario = scenario_from_string(merged["scenario"].get<std::string>());
  {
    const auto seed = merged["seed"].get<std::int64_t>();
    require(seed >= 0, "seed", "must be >= 0", ErrorCode::kConfig);
    c.seed = static_cast<std::uint64_t>(seed);
  }

  const json& mat = merged["material"];
  Material m;
  m.effective_mass_ratio = mat["effective_mass_ratio"].get<double>();
  m.dielectric_constant = mat["dielectric_constant"].get<double>();
  m.deformation_potential_ev = mat["deformation_potential_ev"].get<double>();
  m.mass_density = mat["mass_density"].get<double>();
  m.sound_velocity = mat["sound_velocity"].get<double>();
  m.validate();

  const json& geo = merged["geometry"];
  c.gate.lateral_separation = geo["lateral_separation"].get<double>();
  c.gate.electrode_plane_gap = geo["electrode_plane_gap"].get<double>();
  c.gate.electrode_state = electrode_state_from_string(geo["electrode_state"].get<std::string>());
  c.gate.control = molecule_from(geo, geo, m, 0.0);
  c.gate.target = molecule_from(geo, geo["target"], m, c.gate.lateral_separation);
  c.gate.validate();

  c.qubit_splitting = opt_number(merged["qubit"]["splitting"]);
  if (c.qubit_splitting) {
    require(std::isfinite(*c.qubit_splitting) && *c.qubit_splitting >= kMinSplitting, "qubit.splitting",
            "must be >= 0.1 meV");
  }

  const json& drv = merged["drive"];
  c.drive.amplitude = drv["amplitude"].get<double>();
  c.drive.phase = drv["phase"].get<double>();
  c.drive_frequency = opt_number(drv["frequency"]);
  c.drive_duration = opt_number(drv["duration"]);
  c.drive.frequency = c.drive_frequency.value_or(0.0);
  c.drive.validate();
  if (c.drive_frequency) {
    require(*c.drive_frequency > 0, "drive.frequency", "must be > 0 when given");
    require(!is_two_qubit(c.scenario), "drive.frequency",
            "must be null for two-qubit scenarios (the carrier is the conditional resonance)");
  }
  if (c.drive_duration) {
    require(std::isfinite(*c.drive_duration) && *c.drive_duration > 0, "drive.duration", "must be > 0");
  }

  const json& grid = merged["grid"];
  for (int a = 0; a < 3; ++a) {
    const auto n = grid["points"][static_cast<std::size_t>(a)].get<std::int64_t>();
    require(n >= static_cast<std::int64_t>(kMinGridPoints), "grid.points", "every axis needs >= 16 points",
            ErrorCode::kGridTooSmall);
    c.grid_points[static_cast<std::size_t>(a)] = static_cast<std::size_t>(n);
  }
  c.grid_padding = grid["padding"].get<double>();
  require(c.grid_padding >= kMinPadding, "grid.padding", "must be >= 8 nm", ErrorCode::kGridTooSmall);
  c.solver_tolerance = grid["tolerance"].get<double>();
  require(c.solver_tolerance > 0 && c.solver_tolerance < 1, "grid.tolerance", "must lie in (0, 1)");

  const json& dyn = merged["dynamics"];
  c.dt = dyn["dt"].get<double>();
  require(std::isfinite(c.dt) && c.dt > 0, "dynamics.dt", "must be > 0");
  c.sample_every = non_negative(dyn["sample_every"], "dynamics.sample_every");
  require(c.sample_every >= 1, "dynamics.sample_every", "must be >= 1");
  if (!dyn["initial_state"].is_null()) {
    c.initial_state = dyn["initial_state"].get<std::string>();
    const auto& labels = initial_labels(is_two_qubit(c.scenario));
    require(std::find(labels.begin(), labels.end(), *c.initial_state) != labels.end(),
            "dynamics.initial_state",
            std::string("must be a computational basis label (") +
                (is_two_qubit(c.scenario) ? "00, 01, 10, 11" : "0, 1") + ")");
    require(c.scenario != ScenarioKind::kEntangle, "dynamics.initial_state",
            "entangle always starts from (|00> + |10>)/sqrt(2)");
  }

  const json& gate = merged["gate"];
  c.control_splitting = gate["control_splitting"].get<double>();
  c.target_splitting = gate["target_splitting"].get<double>();
  require(c.control_splitting >= kMinSplitting, "gate.control_splitting", "must be >= 0.1 meV");
  require(c.target_splitting >= kMinSplitting, "gate.target_splitting", "must be >= 0.1 meV");
  const std::string coupling = gate["coupling"].get<std::string>();
  require(coupling == "nominal" || coupling == "computed", "gate.coupling",
          "expected \"nominal\" or \"computed\"", ErrorCode::kConfig);
  c.computed_coupling = coupling == "computed";
  c.conditional_shift = gate["conditional_shift"].get<double>();
  require(std::isfinite(c.conditional_shift), "gate.conditional_shift", "must be finite");

  const json& dec = merged["decoherence"];
  c.gamma = opt_number(dec["gamma"]);
  if (c.gamma) require(std::isfinite(*c.gamma) && *c.gamma >= 0, "decoherence.gamma", "must be >= 0");
  c.temperature = dec["temperature"].get<double>();
  require(std::isfinite(c.temperature) && c.temperature >= 0, "decoherence.temperature", "must be >= 0");
  c.transition_energy = dec["transition_energy"].get<double>();
  require(c.transition_energy > 0 && c.transition_energy < kOpticalPhononEnergy,
          "decoherence.transition_energy", "must lie in (0, 36) meV");
  c.decoherence_sample_every = non_negative(dec["sample_every"], "decoherence.sample_every");
  require(c.decoherence_sample_every >= 1, "decoherence.sample_every", "must be >= 1");
  c.compute_rate = dec["compute_rate"].get<bool>();
  require(c.gamma.has_value() || c.compute_rate, "decoherence.gamma",
          "null gamma requires compute_rate = true");

  const json& ro = merged["readout"];
  c.probe_height = ro["probe_height"].get<double>();
  require(std::isfinite(c.probe_height) && c.probe_height > 0, "readout.probe_height", "must be > 0");
  c.map_points = non_negative(ro["points"], "readout.points");
  require(c.map_points >= 2, "readout.points", "must be >= 2");
  c.map_margin = ro["margin"].get<double>();
  require(c.map_margin >= kReadoutMargin, "readout.margin", "must be >= 10 nm");

  const json& sw = merged["coulomb_sweep"];
  c.sweep_separations = sw["lateral_separations"].get<std::vector<double>>();
  require(!c.sweep_separations.empty(), "coulomb_sweep.lateral_separations", "must not be empty");
  const double widest = std::max(c.gate.control.max_width(), c.gate.target.max_width());
  for (double s : c.sweep_separations) {
    require(std::isfinite(s) && s > widest, "coulomb_sweep.lateral_separations",
            "every separation must exceed the widest dot");
  }
  c.coulomb_coarsen = non_negative(sw["coarsen"], "coulomb_sweep.coarsen");
  require(c.coulomb_coarsen >= 1, "coulomb_sweep.coarsen", "must be >= 1");

  const auto states = merged["eigensolve"]["states"].get<std::int64_t>();
  require(states >= 2 && states <= 8, "eigensolve.states", "must lie in [2, 8]");

  c.output_directory = merged["output"]["directory"].get<std::string>();
  require(!c.output_directory.empty(), "output.directory", "must not be empty", ErrorCode::kConfig);

  c.resolved = std::move(merged);
  return c;
}

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::kConfig,
                "syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                    ": " + e.what(),
                "");
  }
  return config_from_json(doc);
}

ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& path, const json& value) {
  json doc = cfg.resolved;
  json* node = &doc;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw Error(ErrorCode::kConfig, "empty parameter path", path);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i])) {
      throw Error(ErrorCode::kConfig, "unknown key '" + path + "'", path);
    }
    node = &(*node)[parts[i]];
  }
  if (node->is_object()) throw Error(ErrorCode::kConfig, path + ": cannot replace a whole section", path);
  *node = value;
  return config_from_json(doc);
}

// ---------------------------------------------------------------------------
// Output helpers

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory " + target.parent_path().string() + ": " + ec.message());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move " + tmp.string() + " into place");
  }
}

json error_document(const std::exception& e) {
  json err;
  if (const auto* q = dynamic_cast<const Error*>(&e)) {
    err = {{"code", to_string(q->code())},
           {"message", q->what()},
           {"field", q->field()},
           {"exit_code", q->is_numerical() ? 3 : 2}};
  } else {
    err = {{"code", "internal"}, {"message", e.what()}, {"field", ""}, {"exit_code", 3}};
  }
  return json{{"error", err}};
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  const std::size_t dim = traj.states.front().dim();
  std::string out = dim == 2 ? "t_ps,p0,p1\n" : "t_ps,p0,p1,p2,p3\n";
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    out += num(traj.times[n]);
    for (double p : traj.states[n].populations()) out += "," + num(p);
    out += "\n";
  }
  return out;
}

std::string amplitudes_csv(const Trajectory& traj) {
  const std::size_t dim = traj.states.front().dim();
  std::string out = "t_ps";
  for (std::size_t k = 0; k < dim; ++k) out += ",re" + std::to_string(k) + ",im" + std::to_string(k);
  out += "\n";
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    out += num(traj.times[n]);
    for (const auto& a : traj.states[n].amplitudes) out += "," + num(a.real()) + "," + num(a.imag());
    out += "\n";
  }
  return out;
}

const char* target_name(DriveTarget t) {
  switch (t) {
    case DriveTarget::kSingle: return "single";
    case DriveTarget::kControl: return "control";
    case DriveTarget::kTarget: return "target";
  }
  return "?";
}

std::string schedule_json(const PulseSchedule& s) {
  json segs = json::array();
  double start = 0.0;
  for (const auto& seg : s.segments) {
    segs.push_back({{"start_ps", start},
                    {"duration_ps", seg.duration},
                    {"amplitude_mV_per_nm", seg.drive.amplitude},
                    {"frequency_THz", seg.drive.frequency},
                    {"phase_rad", seg.drive.phase},
                    {"addressed", target_name(seg.target)},
                    {"electrodes", to_string(seg.electrodes)}});
    start += seg.duration;
  }
  return json{{"total_duration_ps", s.total_duration()}, {"segments", segs}}.dump(2) + "\n";
}

std::string density_csv(const DensityTrajectory& traj) {
  std::string out = "t_ps,p0,p1\n";
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    out += num(traj.times[n]) + "," + num(traj.states[n](0, 0).real()) + "," +
           num(traj.states[n](1, 1).real()) + "\n";
  }
  return out;
}

struct Artifacts {
  json results;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

EvolveOptions evolve_options(const ScenarioConfig& c) {
  EvolveOptions o;
  o.dt = c.dt;
  o.sample_every = c.sample_every;
  return o;
}

EvolveOptions endpoint_options(const ScenarioConfig& c) {
  EvolveOptions o = evolve_options(c);
  o.sample_every = 0;
  return o;
}

QubitBasis solve_molecule(const ScenarioConfig& c, const MoleculeGeometry& g) {
  const Grid3D grid = grid_for(g, c.grid_points, c.grid_padding);
  SolverOptions o;
  o.seed = c.seed;
  return build_basis(g, grid, o, c.solver_tolerance);
}

json basis_json(const QubitBasis& b, const MoleculeGeometry& g) {
  return {{"e0_meV", b.e0},
          {"e1_meV", b.e1},
          {"splitting_meV", b.e1 - b.e0},
          {"resonance_THz", b.resonance_thz},
          {"z00_nm", b.z00},
          {"z01_nm", b.z01},
          {"z11_nm", b.z11},
          {"dipole_origin_z_nm", b.dipole_origin_z},
          {"localization_psi0_lower", localization(b.psi0, g.dot_lower)},
          {"localization_psi1_upper", localization(b.psi1, g.dot_upper)}};
}

QubitParams operating_params(const ScenarioConfig& c, const QubitBasis& b) {
  QubitParams q = b.params();
  if (c.qubit_splitting) q.splitting = *c.qubit_splitting;
  return q;
}

json params_json(const QubitParams& q) {
  return {{"splitting_meV", q.splitting},
          {"resonance_THz", q.resonance_thz()},
          {"z00_nm", q.z00},
          {"z01_nm", q.z01},
          {"z11_nm", q.z11}};
}

json table_json(const CoulombTable& t) {
  return {{"u00_meV", t.u[0][0]},
          {"u01_meV", t.u[0][1]},
          {"u10_meV", t.u[1][0]},
          {"u11_meV", t.u[1][1]},
          {"effective_shift_meV", t.effective_shift()}};
}

json populations_json(const QuantumState& s) { return s.populations(); }

QuantumState initial(const ScenarioConfig& c, std::size_t dim, const std::string& dflt) {
  const std::string label = c.initial_state.value_or(dflt);
  const auto& labels = initial_labels(dim == 4);
  const auto it = std::find(labels.begin(), labels.end(), label);
  return QuantumState::basis(dim, static_cast<std::size_t>(it - labels.begin()));
}

double rabi_frequency(const QubitParams& q, double e_z) {
  return units::kElectronCharge * q.z01 * e_z / units::kHbar;  // rad/ps
}

// ---------------------------------------------------------------------------

void add_unitary_files(Artifacts& a, const Trajectory& traj, const PulseSchedule& sched) {
  a.files.emplace_back("trajectory.csv", trajectory_csv(traj));
  a.files.emplace_back("amplitudes.csv", amplitudes_csv(traj));
  a.files.emplace_back("schedule.json", schedule_json(sched));
}

Artifacts run_rabi(const ScenarioConfig& c) {
  const MoleculeGeometry& geom = c.gate.control;
  const QubitBasis b = solve_molecule(c, geom);
  const QubitParams q = operating_params(c, b);
  DriveField drive = c.drive;
  drive.frequency = c.drive_frequency.value_or(q.resonance_thz());

  json calib;
  double duration = 0.0;
  try {
    const CalibratedGate x = make_x(q, drive.amplitude, endpoint_options(c));
    calib = {{"t_pi_ps", x.schedule.total_duration()}, {"residual", x.residual}};
    duration = c.drive_duration.value_or(2.0 * x.schedule.total_duration());
  } catch (const Error& e) {
    if (!c.drive_duration || e.code() == ErrorCode::kStepTooLarge) throw;
    calib = {{"t_pi_ps", nullptr}, {"error", e.what()}};
    duration = *c.drive_duration;
  }
  PulseSchedule sched;
  sched.segments.push_back({drive, duration, DriveTarget::kSingle});
  const Trajectory traj = evolve(one_qubit_system(q), initial(c, 2, "0"), sched, evolve_options(c));

  std::size_t best = 0;
  for (std::size_t n = 0; n < traj.states.size(); ++n)
    if (traj.states[n].populations()[1] > traj.states[best].populations()[1]) best = n;

  Artifacts a;
  a.results = {{"basis", basis_json(b, geom)},
               {"qubit", params_json(q)},
               {"drive_frequency_THz", drive.frequency},
               {"drive_amplitude_mV_per_nm", drive.amplitude},
               {"rabi_frequency_per_ps", rabi_frequency(q, drive.amplitude)},
               {"rabi_to_carrier_ratio", rabi_frequency(q, drive.amplitude) / (2.0 * units::kPi * drive.frequency)},
               {"t_pi_seed_ps", pi_pulse_seed(q.z01, drive.amplitude)},
               {"calibration", calib},
               {"duration_ps", duration},
               {"p1_max", traj.states[best].populations()[1]},
               {"t_at_p1_max_ps", traj.times[best]},
               {"final_populations", populations_json(traj.final_state())}};
  add_unitary_files(a, traj, sched);
  return a;
}

Artifacts run_hadamard(const ScenarioConfig& c) {
  const MoleculeGeometry& geom = c.gate.control;
  const QubitBasis b = solve_molecule(c, geom);
  const QubitParams q = operating_params(c, b);
  const EvolveOptions ends = endpoint_options(c);
  const CalibratedGate h = make_hadamard(q, c.drive.amplitude, ends);
  PulseSchedule sched = h.schedule;
  if (c.drive_duration) sched.segments.front().duration = *c.drive_duration;
  if (c.drive_frequency) sched.segments.front().drive.frequency = *c.drive_frequency;
  sched.segments.front().drive.phase = c.drive.phase;

  const auto system = one_qubit_system(q);
  const auto from0 = evolve(system, QuantumState::basis(2, 0), sched, ends).final_state();
  const auto from1 = evolve(system, QuantumState::basis(2, 1), sched, ends).final_state();
  PulseSchedule twice = sched;
  twice.append(sched);
  const auto hh = evolve(system, QuantumState::basis(2, 0), twice, ends).final_state();
  const Trajectory traj = evolve(system, initial(c, 2, "0"), sched, evolve_options(c));

  Artifacts a;
  a.results = {{"basis", basis_json(b, geom)},
               {"qubit", params_json(q)},
               {"t_half_pi_ps", sched.total_duration()},
               {"calibration_residual", h.residual},
               {"output_phase_rad", h.output_phase},
               {"populations_from_0", populations_json(from0)},
               {"populations_from_1", populations_json(from1)},
               {"hh_p1_from_0", hh.populations()[1]},
               {"final_populations", populations_json(traj.final_state())}};
  add_unitary_files(a, traj, sched);
  return a;
}

struct TwoQubitSetup {
  QubitBasis control_basis, target_basis;
  QubitParams control, target;
  CoulombTable coupled, uncoupled;
};

TwoQubitSetup two_qubit_setup(const ScenarioConfig& c) {
  TwoQubitSetup s;
  s.control_basis = solve_molecule(c, c.gate.control);
  s.target_basis = solve_molecule(c, c.gate.target);
  s.control = s.control_basis.params().with_splitting(c.control_splitting);
  s.target = s.target_basis.params().with_splitting(c.target_splitting);
  s.coupled = c.computed_coupling
                  ? build_coulomb_table(s.control_basis, s.target_basis, c.gate.control.material.dielectric_constant,
                                        c.coulomb_coarsen)
                  : CoulombTable::conditional(c.conditional_shift);
  GateGeometry grounded = c.gate;
  grounded.electrode_state = ElectrodeState::kGrounded;
  s.uncoupled = screened_interaction(grounded, s.coupled);
  return s;
}

json two_qubit_json(const ScenarioConfig& c, const TwoQubitSetup& s) {
  const auto res = conditional_resonances(s.control, s.target, s.coupled);
  return {{"control_basis", basis_json(s.control_basis, c.gate.control)},
          {"target_basis", basis_json(s.target_basis, c.gate.target)},
          {"control", params_json(s.control)},
          {"target", params_json(s.target)},
          {"coupled_table", table_json(s.coupled)},
          {"uncoupled_table", table_json(s.uncoupled)},
          {"screening_factor", plate_screening_factor(c.gate.lateral_separation, c.gate.electrode_plane_gap)},
          {"resonances_THz",
           {{"target_plus", res.target_plus},
            {"target_minus", res.target_minus},
            {"control_plus", res.control_plus},
            {"control_minus", res.control_minus}}}};
}

PulseSchedule cnot_schedule(const ScenarioConfig& c, const TwoQubitSetup& s, double* residual) {
  const CalibratedGate g = make_cnot(s.control, s.target, s.coupled, c.drive.amplitude, endpoint_options(c));
  PulseSchedule sched = g.schedule;
  if (c.drive_duration) sched.segments.front().duration = *c.drive_duration;
  sched.segments.front().drive.phase = c.drive.phase;
  if (residual) *residual = g.residual;
  return sched;
}

constexpr std::size_t kCnotPerm[4] = {0, 1, 3, 2};

Artifacts run_cnot(const ScenarioConfig& c) {
  const TwoQubitSetup s = two_qubit_setup(c);
  double residual = 0.0;
  const PulseSchedule sched = cnot_schedule(c, s, &residual);
  const EvolveOptions ends = endpoint_options(c);
  const auto on = two_qubit_system(s.control, s.target, s.coupled);
  const auto off = two_qubit_system(s.control, s.target, s.uncoupled);

  json table = json::array();
  double worst = 1.0, off_change = 0.0;
  for (std::size_t in = 0; in < 4; ++in) {
    const auto out = evolve(on, QuantumState::basis(4, in), sched, ends).final_state().populations();
    worst = std::min(worst, out[kCnotPerm[in]]);
    table.push_back({{"input", initial_labels(true)[in]}, {"populations", out}});
    const auto idle = evolve(off, QuantumState::basis(4, in), sched, ends).final_state().populations();
    for (std::size_t k = 0; k < 4; ++k) off_change = std::max(off_change, std::abs(idle[k] - (k == in ? 1.0 : 0.0)));
  }
  const Trajectory traj = evolve(on, initial(c, 4, "10"), sched, evolve_options(c));

  Artifacts a;
  a.results = two_qubit_json(c, s);
  a.results["t_cnot_ps"] = sched.total_duration();
  a.results["calibration_residual"] = residual;
  a.results["truth_table"] = table;
  a.results["truth_table_fidelity"] = worst;
  a.results["uncoupled_max_population_change"] = off_change;
  a.results["final_populations"] = populations_json(traj.final_state());
  add_unitary_files(a, traj, sched);
  return a;
}

Artifacts run_entangle(const ScenarioConfig& c) {
  const TwoQubitSetup s = two_qubit_setup(c);
  double residual = 0.0;
  const PulseSchedule sched = cnot_schedule(c, s, &residual);
  const auto on = two_qubit_system(s.control, s.target, s.coupled);
  QuantumState psi = QuantumState::basis(4, 0);
  psi.amplitudes[2] = 1.0;
  psi.amplitudes /= std::sqrt(2.0);
  const Trajectory traj = evolve(on, psi, sched, evolve_options(c));

  GateContext ctx;
  ctx.control = s.control;
  ctx.target = s.target;
  ctx.coupled = s.coupled;
  ctx.uncoupled = s.uncoupled;
  ctx.e_z = c.drive.amplitude;
  ctx.evolve = endpoint_options(c);
  const PulseSchedule circuit = compile({{GateKind::kH, DriveTarget::kControl}, {GateKind::kCNOT, DriveTarget::kTarget}}, ctx);
  const auto bell = evolve(two_qubit_system(s.control, s.target, s.coupled, s.uncoupled), QuantumState::basis(4, 0),
                           circuit, ctx.evolve)
                        .final_state();

  Artifacts a;
  a.results = two_qubit_json(c, s);
  a.results["t_cnot_ps"] = sched.total_duration();
  a.results["calibration_residual"] = residual;
  a.results["final_populations"] = populations_json(traj.final_state());
  a.results["h_cnot_from_00_populations"] = populations_json(bell);
  a.results["h_cnot_duration_ps"] = circuit.total_duration();
  add_unitary_files(a, traj, sched);
  return a;
}

Artifacts run_decoherence(const ScenarioConfig& c) {
  const MoleculeGeometry& geom = c.gate.control;
  const QubitBasis b = solve_molecule(c, geom);
  const QubitParams q = operating_params(c, b);

  Artifacts a;
  a.results["basis"] = basis_json(b, geom);
  a.results["qubit"] = params_json(q);
  PhononEnvironment env;
  env.material = geom.material;
  env.temperature = c.temperature;
  env.transition_energy = c.transition_energy;
  std::optional<double> golden;
  if (c.compute_rate) {
    const PhononRate r = phonon_rate(env, b.psi1, b.psi0);
    golden = r.rate;
    a.results["golden_rule"] = {{"rate_per_s", r.rate},
                                {"zero_temperature_rate_per_s", r.zero_temperature_rate},
                                {"angular_integral", r.angular_integral},
                                {"prefactor_per_s", r.prefactor},
                                {"wavenumber_per_nm", r.wavenumber},
                                {"thermal_factor", r.thermal_factor},
                                {"angular_nodes", r.nodes},
                                {"last_relative_change", r.last_change},
                                {"grid_resolution_qh", r.resolution}};
  }
  const double gamma = c.gamma ? *c.gamma : *golden;
  const double occupation = bose_occupation(q.splitting, c.temperature);

  DriveField drive = c.drive;
  drive.frequency = c.drive_frequency.value_or(q.resonance_thz());
  PulseSchedule sched;
  sched.segments.push_back({drive, c.drive_duration.value_or(kDefaultDecoherenceDuration), DriveTarget::kSingle});
  DissipativeOptions opt;
  opt.evolve = evolve_options(c);
  opt.evolve.sample_every = c.decoherence_sample_every;
  opt.thermal_occupation = occupation;
  const DensityMatrix rho0 = pure_density(initial(c, 2, "0"));
  const DensityTrajectory damped = dissipative_evolve(q, rho0, sched, gamma, opt);
  const DensityTrajectory clean = dissipative_evolve(q, rho0, sched, 0.0, opt);

  double trace_error = 0.0, min_population = 1.0, max_angle = 0.0;
  for (std::size_t n = 0; n < damped.states.size(); ++n) {
    const auto& r = damped.states[n];
    trace_error = std::max(trace_error, std::abs(r.trace().real() - 1.0));
    min_population = std::min({min_population, r(0, 0).real(), r(1, 1).real()});
    max_angle = std::max(max_angle, bures_angle_to_pure(r, clean.states[n]));
  }
  double t_pi = 0.0;
  try {
    t_pi = make_x(q, drive.amplitude, endpoint_options(c)).schedule.total_duration();
    a.results["t_pi_ps"] = t_pi;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoConvergence) throw;
    a.results["t_pi_ps"] = nullptr;
  }
  a.results["gamma_per_s"] = gamma;
  a.results["thermal_occupation"] = occupation;
  a.results["thermal_factor"] = 1.0 + occupation;
  a.results["duration_ps"] = sched.total_duration();
  a.results["final_p1_damped"] = damped.states.back()(1, 1).real();
  a.results["final_p1_unitary"] = clean.states.back()(1, 1).real();
  a.results["final_bures_angle_rad"] = bures_angle_to_pure(damped.states.back(), clean.states.back());
  a.results["max_bures_angle_rad"] = max_angle;
  a.results["max_trace_error"] = trace_error;
  a.results["min_population"] = min_population;
  a.results["lifetime_to_t_pi_ratio"] =
      (gamma > 0 && t_pi > 0) ? json(1.0 / (gamma * units::ps_to_s(t_pi))) : json(nullptr);
  a.files.emplace_back("trajectory.csv", density_csv(damped));
  a.files.emplace_back("schedule.json", schedule_json(sched));
  return a;
}

Artifacts run_readout(const ScenarioConfig& c) {
  const MoleculeGeometry& geom = c.gate.control;
  const QubitBasis b = solve_molecule(c, geom);
  const double eps = geom.material.dielectric_constant;
  const PlaneSpec plane = default_readout_plane(geom, c.map_points, c.map_margin);
  const Vec3 probe = default_probe(geom, c.probe_height);
  const Vec3 mirrored{geom.axis_x(), geom.axis_y(), geom.z_bottom() - c.probe_height};
  const PotentialMap m0 = potential_map(b.psi0, eps, plane, probe);
  const PotentialMap m1 = potential_map(b.psi1, eps, plane, probe);

  std::string csv = "x_nm,z_nm,v0_mV,v1_mV,delta_mV\n";
  for (std::size_t j = 0; j < plane.v_points; ++j)
    for (std::size_t i = 0; i < plane.u_points; ++i) {
      csv += num(plane.u(i)) + "," + num(plane.v(j)) + "," + num(m0.at(i, j)) + "," + num(m1.at(i, j)) + "," +
             num(m1.at(i, j) - m0.at(i, j)) + "\n";
    }
  Artifacts a;
  a.results = {{"basis", basis_json(b, geom)},
               {"probe_nm", {probe.x, probe.y, probe.z}},
               {"v0_probe_mV", m0.probe_value},
               {"v1_probe_mV", m1.probe_value},
               {"contrast_mV", m1.probe_value - m0.probe_value},
               {"mirrored_probe_nm", {mirrored.x, mirrored.y, mirrored.z}},
               {"mirrored_contrast_mV", readout_contrast(b, geom, eps, mirrored)},
               {"map", {{"orientation", to_string(plane.orientation)},
                        {"offset_nm", plane.offset},
                        {"u_range_nm", {plane.u_min, plane.u_max}},
                        {"v_range_nm", {plane.v_min, plane.v_max}},
                        {"points", {plane.u_points, plane.v_points}}}}};
  a.files.emplace_back("map.csv", csv);
  return a;
}

Artifacts run_coulomb_sweep(const ScenarioConfig& c) {
  const QubitBasis bc = solve_molecule(c, c.gate.control);
  const QubitBasis bt = solve_molecule(c, c.gate.target);
  const double eps = c.gate.control.material.dielectric_constant;
  std::string csv = "lateral_separation_nm,u00_meV,u01_meV,u10_meV,u11_meV,shift_meV,u00_point_meV,screening_factor\n";
  json rows = json::array();
  for (double s : c.sweep_separations) {
    const Vec3 offset{s - c.gate.lateral_separation, 0.0, 0.0};
    const CoulombTable t = build_coulomb_table(bc, bt, eps, c.coulomb_coarsen, offset);
    const double point = coulomb_point_estimate(charge_cloud(bc.psi0), charge_cloud(bt.psi0, offset), eps);
    const double f = plate_screening_factor(s, c.gate.electrode_plane_gap);
    csv += num(s) + "," + num(t.u[0][0]) + "," + num(t.u[0][1]) + "," + num(t.u[1][0]) + "," + num(t.u[1][1]) + "," +
           num(t.effective_shift()) + "," + num(point) + "," + num(f) + "\n";
    json row = table_json(t);
    row["lateral_separation_nm"] = s;
    row["u00_point_meV"] = point;
    row["screening_factor"] = f;
    rows.push_back(row);
  }
  const CoulombTable at = build_coulomb_table(bc, bt, eps, c.coulomb_coarsen);
  double umax = 0.0;
  for (const auto& r : at.u)
    for (double v : r) umax = std::max(umax, v);
  GateGeometry grounded = c.gate;
  grounded.electrode_state = ElectrodeState::kGrounded;
  const CoulombTable screened = screened_interaction(grounded, at);
  double screened_max = 0.0;
  for (const auto& r : screened.u)
    for (double v : r) screened_max = std::max(screened_max, v);

  Artifacts a;
  a.results = {{"control_basis", basis_json(bc, c.gate.control)},
               {"target_basis", basis_json(bt, c.gate.target)},
               {"table", table_json(at)},
               {"lateral_separation_nm", c.gate.lateral_separation},
               {"electrode_plane_gap_nm", c.gate.electrode_plane_gap},
               {"grounded_max_meV", screened_max},
               {"required_separation_ratio", required_separation_ratio(umax)},
               {"separation_ratio", c.gate.lateral_separation / c.gate.electrode_plane_gap},
               {"sweep", rows}};
  a.files.emplace_back("coulomb.csv", csv);
  return a;
}

Artifacts run_eigensolve(const ScenarioConfig& c) {
  const MoleculeGeometry& geom = c.gate.control;
  const Grid3D grid = grid_for(geom, c.grid_points, c.grid_padding);
  SolverOptions o;
  o.seed = c.seed;
  const auto states = c.resolved["eigensolve"]["states"].get<std::size_t>();
  const EigenResult r = solve_lowest(discretize(geom, grid), states, c.solver_tolerance, o);
  const QubitBasis b = basis_from_states(geom, r);
  std::string csv = "state,energy_meV,residual,localization_lower,localization_upper\n";
  for (std::size_t n = 0; n < r.energies.size(); ++n) {
    csv += std::to_string(n) + "," + num(r.energies[n]) + "," + num(r.residuals[n]) + "," +
           num(localization(r.states[n], geom.dot_lower)) + "," + num(localization(r.states[n], geom.dot_upper)) +
           "\n";
  }
  Artifacts a;
  a.results = {{"basis", basis_json(b, geom)},
               {"energies_meV", r.energies},
               {"grid_points", grid.points},
               {"grid_spacing_nm", {grid.spacing(0), grid.spacing(1), grid.spacing(2)}}};
  a.files.emplace_back("levels.csv", csv);
  return a;
}

Artifacts compute(const ScenarioConfig& c) {
  switch (c.scenario) {
    case ScenarioKind::kRabi: return run_rabi(c);
    case ScenarioKind::kHadamard: return run_hadamard(c);
    case ScenarioKind::kCnot: return run_cnot(c);
    case ScenarioKind::kEntangle: return run_entangle(c);
    case ScenarioKind::kDecoherence: return run_decoherence(c);
    case ScenarioKind::kReadoutMap: return run_readout(c);
    case ScenarioKind::kCoulombSweep: return run_coulomb_sweep(c);
    case ScenarioKind::kEigensolve: return run_eigensolve(c);
  }
  throw Error(ErrorCode::kConfig, "unhandled scenario");
}

}  // namespace

json scenario_results(const ScenarioConfig& cfg) { return compute(cfg).results; }

RunOutput run_scenario(const ScenarioConfig& cfg, const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory.empty() ? cfg.output_directory : directory);
  try {
    Artifacts a = compute(cfg);
    RunOutput out;
    json names = json::array();
    for (const auto& [name, contents] : a.files) {
      write_file_atomic((dir / name).string(), contents);
      out.files.push_back((dir / name).string());
      names.push_back(name);
    }
    names.push_back("summary.json");
    out.summary = {{"scenario", to_string(cfg.scenario)},
                   {"config", cfg.resolved},
                   {"results", a.results},
                   {"files", names}};
    write_file_atomic((dir / "summary.json").string(), out.summary.dump(2) + "\n");
    out.files.push_back((dir / "summary.json").string());
    std::error_code ec;
    fs::remove(dir / "error.json", ec);
    return out;
  } catch (const std::exception& e) {
    try {
      write_file_atomic((dir / "error.json").string(), error_document(e).dump(2) + "\n");
    } catch (...) {
    }
    throw;
  }
}

namespace {

void compare_numeric(const json& a, const json& b, const std::string& path, double tol, json& mismatches,
                     double& worst) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    const double diff = std::abs(x - y);
    const double scale = std::max({std::abs(x), std::abs(y), 1e-8 / tol});
    const double rel = diff / scale;
    worst = std::max(worst, rel);
    if (rel > tol) mismatches.push_back({{"path", path}, {"values", {x, y}}, {"relative", rel}});
  } else if (a.is_object() && b.is_object()) {
    for (const auto& [k, v] : a.items())
      if (b.contains(k)) compare_numeric(v, b[k], path.empty() ? k : path + "." + k, tol, mismatches, worst);
  } else if (a.is_array() && b.is_array() && a.size() == b.size()) {
    for (std::size_t i = 0; i < a.size(); ++i)
      compare_numeric(a[i], b[i], path + "[" + std::to_string(i) + "]", tol, mismatches, worst);
  }
}

}  // namespace

json check_seed_invariance(const ScenarioConfig& cfg, double tolerance) {
  std::vector<json> results;
  json seeds = json::array();
  for (std::uint64_t k = 0; k < 3; ++k) {
    const ScenarioConfig c = with_parameter(cfg, "seed", cfg.seed + k);
    results.push_back(compute(c).results);
    seeds.push_back(c.seed);
  }
  json mismatches = json::array();
  double worst = 0.0;
  for (std::size_t k = 1; k < results.size(); ++k) compare_numeric(results[0], results[k], "", tolerance, mismatches, worst);
  return {{"seeds", seeds},
          {"tolerance", tolerance},
          {"max_relative_difference", worst},
          {"invariant", mismatches.empty()},
          {"mismatches", mismatches}};
}

json run_sweep(const ScenarioConfig& cfg, const std::string& path, const std::vector<json>& values,
               const std::string& directory) {
  namespace fs = std::filesystem;
  if (values.empty()) throw Error(ErrorCode::kConfig, "sweep needs at least one value", "values");
  std::vector<ScenarioConfig> points;
  for (const auto& v : values) points.push_back(with_parameter(cfg, path, v));
  const fs::path root(directory.empty() ? cfg.output_directory : directory);
  std::vector<json> entries(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "point_%03zu", i);
    json e = {{"value", values[i]}, {"directory", name}};
    try {
      e["status"] = "ok";
      e["results"] = run_scenario(points[i], (root / name).string()).summary["results"];
    } catch (const std::exception& ex) {
      e["status"] = "error";
      e["error"] = error_document(ex)["error"];
    }
    entries[i] = std::move(e);
  });
  json doc = {{"parameter", path}, {"scenario", to_string(cfg.scenario)}, {"points", entries}};
  write_file_atomic((root / "sweep.json").string(), doc.dump(2) + "\n");
  return doc;
}

}  // namespace qdmol
