// Command-line front end; talks to the simulator only through the C API.

#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdmol/qdmol.h"

namespace {

int fail(qdmol_status status) {
  std::fprintf(stderr, "%s\n", qdmol_last_error_json());
  return qdmol_exit_code(status);
}

int usage_error(const std::string& message) {
  const nlohmann::json doc = {
      {"error", {{"code", "config-error"}, {"message", message}, {"field", ""}, {"exit_code", 2}}}};
  std::fprintf(stderr, "%s\n", doc.dump().c_str());
  return 2;
}

struct Loaded {
  qdmol_config* cfg = nullptr;
  ~Loaded() { qdmol_config_free(cfg); }
};

struct Held {
  qdmol_result* res = nullptr;
  ~Held() { qdmol_result_free(res); }
};

// Accepts either a JSON array ("[1, 2]") or a comma separated list of JSON
// literals ("1,2" or "floating,grounded" for bare words).
std::string values_to_json(const std::string& list) {
  const auto first = list.find_first_not_of(" \t");
  if (first != std::string::npos && list[first] == '[') return list;
  nlohmann::json out = nlohmann::json::array();
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto end = list.find(',', start);
    std::string item = list.substr(start, end == std::string::npos ? std::string::npos : end - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) {
      auto parsed = nlohmann::json::parse(item, nullptr, false);
      out.push_back(parsed.is_discarded() ? nlohmann::json(item) : parsed);
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charge-qubit simulator for stacked asymmetric quantum-dot molecules"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qdmol_version());

  std::string config_path, out_dir, param, values;
  bool check_seeds = false;
  double seed_tolerance = 1e-3;

  auto* run = app.add_subcommand("run", "Run the scenario named in the config");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output.directory)");
  run->add_flag("--check-seed-invariance", check_seeds,
                "Also rerun with seeds s, s+1, s+2 and compare every numeric result");
  run->add_option("--seed-tolerance", seed_tolerance, "Relative tolerance of the seed check");

  auto* validate = app.add_subcommand("validate", "Parse and validate a config, print the resolved document");
  validate->add_option("--config", config_path, "JSON config file")->required();

  auto* sweep = app.add_subcommand("sweep", "Run the scenario once per value of one parameter");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--param", param, "Dotted config path, e.g. drive.amplitude")->required();
  sweep->add_option("--values", values, "Comma separated values or a JSON array")->required();
  sweep->add_option("--out", out_dir, "Output directory (overrides output.directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }

  Loaded loaded;
  if (auto st = qdmol_config_load(config_path.c_str(), &loaded.cfg); st != QDMOL_OK) return fail(st);
  if (!out_dir.empty()) {
    if (auto st = qdmol_config_set_output(loaded.cfg, out_dir.c_str()); st != QDMOL_OK) return fail(st);
  }

  if (validate->parsed()) {
    const char* text = nullptr;
    if (auto st = qdmol_config_to_json(loaded.cfg, &text); st != QDMOL_OK) return fail(st);
    std::printf("%s\n", text);
    return 0;
  }

  if (sweep->parsed()) {
    std::string list;
    try {
      list = values_to_json(values);
    } catch (const std::exception& e) {
      return usage_error(std::string("--values: ") + e.what());
    }
    Held res;
    if (auto st = qdmol_sweep(loaded.cfg, param.c_str(), list.c_str(), &res.res); st != QDMOL_OK) return fail(st);
    const char* text = nullptr;
    qdmol_result_summary(res.res, &text);
    std::printf("%s\n", text);
    const auto doc = nlohmann::json::parse(text);
    for (const auto& p : doc["points"]) {
      if (p["status"] != "ok") return p["error"]["exit_code"].get<int>();
    }
    return 0;
  }

  Held res;
  if (auto st = qdmol_run(loaded.cfg, &res.res); st != QDMOL_OK) return fail(st);
  const char* text = nullptr;
  qdmol_result_summary(res.res, &text);
  std::printf("%s\n", text);

  if (check_seeds) {
    Held report;
    int invariant = 0;
    if (auto st = qdmol_check_seed_invariance(loaded.cfg, seed_tolerance, &invariant, &report.res); st != QDMOL_OK)
      return fail(st);
    const char* rtext = nullptr;
    qdmol_result_summary(report.res, &rtext);
    std::fprintf(stderr, "%s\n", rtext);
    if (!invariant) return 3;
  }
  return 0;
}
