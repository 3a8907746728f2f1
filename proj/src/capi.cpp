#include "qdmol/qdmol.h"

#include <fstream>
#include <sstream>
#include <string>

#include "qdmol/coulomb.hpp"
#include "qdmol/decoherence.hpp"
#include "qdmol/error.hpp"
#include "qdmol/gates.hpp"
#include "qdmol/scenario.hpp"

struct qdmol_config {
  qdmol::ScenarioConfig cfg;
  std::string text;
};

struct qdmol_result {
  nlohmann::json doc;
  std::string text;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_error_json;

qdmol_status status_of(const std::exception& e) {
  if (const auto* q = dynamic_cast<const qdmol::Error*>(&e)) return static_cast<qdmol_status>(q->code());
  return QDMOL_INTERNAL;
}

template <class F>
qdmol_status guarded(F&& f) {
  g_last_error.clear();
  g_last_error_json.clear();
  try {
    f();
    return QDMOL_OK;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    g_last_error_json = qdmol::error_document(e).dump();
    return status_of(e);
  } catch (...) {
    g_last_error = "unknown failure";
    g_last_error_json = R"({"error":{"code":"internal","message":"unknown failure","field":"","exit_code":3}})";
    return QDMOL_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (!p) throw qdmol::Error(qdmol::ErrorCode::kInvalidArgument, std::string(name) + " must not be null", name);
}

}  // namespace

extern "C" {

const char* qdmol_version(void) { return "1.0.0"; }

const char* qdmol_status_name(qdmol_status status) {
  if (status == QDMOL_OK) return "ok";
  if (status == QDMOL_INTERNAL) return "internal";
  if (status >= QDMOL_INVALID_ARGUMENT && status <= QDMOL_IO)
    return qdmol::to_string(static_cast<qdmol::ErrorCode>(status));
  return "unknown";
}

int qdmol_exit_code(qdmol_status status) {
  switch (status) {
    case QDMOL_OK: return 0;
    case QDMOL_INVALID_ARGUMENT:
    case QDMOL_CONFIG:
    case QDMOL_GRID_TOO_SMALL:
    case QDMOL_IO: return 2;
    default: return 3;
  }
}

const char* qdmol_last_error(void) { return g_last_error.c_str(); }
const char* qdmol_last_error_json(void) { return g_last_error_json.c_str(); }

qdmol_status qdmol_config_parse(const char* json_text, qdmol_config** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = nullptr;
    auto* c = new qdmol_config{qdmol::parse_config(json_text), {}};
    *out = c;
  });
}

qdmol_status qdmol_config_load(const char* path, qdmol_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qdmol::Error(qdmol::ErrorCode::kIo, std::string("cannot read ") + path, "config");
    std::stringstream ss;
    ss << in.rdbuf();
    *out = new qdmol_config{qdmol::parse_config(ss.str()), {}};
  });
}

qdmol_status qdmol_config_set(qdmol_config* cfg, const char* path, const char* json_value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(path, "path");
    need(json_value, "json_value");
    nlohmann::json v;
    try {
      v = nlohmann::json::parse(json_value);
    } catch (const nlohmann::json::parse_error& e) {
      throw qdmol::Error(qdmol::ErrorCode::kConfig, std::string(path) + ": value is not valid JSON", path);
    }
    cfg->cfg = qdmol::with_parameter(cfg->cfg, path, v);
  });
}

qdmol_status qdmol_config_set_output(qdmol_config* cfg, const char* directory) {
  return guarded([&] {
    need(cfg, "cfg");
    need(directory, "directory");
    cfg->cfg = qdmol::with_parameter(cfg->cfg, "output.directory", directory);
  });
}

qdmol_status qdmol_config_to_json(const qdmol_config* cfg, const char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    auto* mut = const_cast<qdmol_config*>(cfg);
    mut->text = cfg->cfg.resolved.dump(2);
    *out = mut->text.c_str();
  });
}

void qdmol_config_free(qdmol_config* cfg) { delete cfg; }

qdmol_status qdmol_run(const qdmol_config* cfg, qdmol_result** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = nullptr;
    auto run = qdmol::run_scenario(cfg->cfg, cfg->cfg.output_directory);
    *out = new qdmol_result{std::move(run.summary), {}};
  });
}

qdmol_status qdmol_result_summary(const qdmol_result* result, const char** out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    auto* mut = const_cast<qdmol_result*>(result);
    mut->text = result->doc.dump(2);
    *out = mut->text.c_str();
  });
}

void qdmol_result_free(qdmol_result* result) { delete result; }

qdmol_status qdmol_sweep(const qdmol_config* cfg, const char* path, const char* values_json, qdmol_result** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(path, "path");
    need(values_json, "values_json");
    need(out, "out");
    *out = nullptr;
    nlohmann::json values;
    try {
      values = nlohmann::json::parse(values_json);
    } catch (const nlohmann::json::parse_error&) {
      throw qdmol::Error(qdmol::ErrorCode::kConfig, "sweep values are not valid JSON", "values");
    }
    if (!values.is_array()) throw qdmol::Error(qdmol::ErrorCode::kConfig, "sweep values must be a JSON array", "values");
    std::vector<nlohmann::json> list(values.begin(), values.end());
    *out = new qdmol_result{qdmol::run_sweep(cfg->cfg, path, list, cfg->cfg.output_directory), {}};
  });
}

qdmol_status qdmol_check_seed_invariance(const qdmol_config* cfg, double tolerance, int* invariant,
                                         qdmol_result** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(invariant, "invariant");
    if (!(tolerance > 0)) throw qdmol::Error(qdmol::ErrorCode::kInvalidArgument, "tolerance must be > 0", "tolerance");
    auto report = qdmol::check_seed_invariance(cfg->cfg, tolerance);
    *invariant = report["invariant"].get<bool>() ? 1 : 0;
    if (out) *out = new qdmol_result{std::move(report), {}};
  });
}

qdmol_status qdmol_potential_at(const qdmol_config* cfg, double x, double y, double z, double* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = qdmol::potential_at(cfg->cfg.gate.control, {x, y, z});
  });
}

qdmol_status qdmol_pi_pulse_seed(double z01_nm, double field_mv_per_nm, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = qdmol::pi_pulse_seed(z01_nm, field_mv_per_nm);
  });
}

qdmol_status qdmol_plate_screening_factor(double lateral_nm, double gap_nm, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = qdmol::plate_screening_factor(lateral_nm, gap_nm);
  });
}

qdmol_status qdmol_thermal_factor(double energy_mev, double temperature_k, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = 1.0 + qdmol::bose_occupation(energy_mev, temperature_k);
  });
}

}  // extern "C"
