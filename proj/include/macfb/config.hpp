#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "macfb/experiments.hpp"

// Run configuration: one JSON document with nested sections.
//
//   {
//     "system": {"N": 32, "L_T": 2, "L_R": 4, "snr_db": 10, "s": 4, "R_q": 12},
//     "run":    {"trials": 10000, "codebooks_per_point": 10, "seed": 1,
//                "workers": 1, "strategies": ["antenna", "no_csit"]},
//     "sweep":  {"param": "snr_db", "values": [-5, 0, 5], "auto_s": false}
//   }
//
// Every key is optional; missing keys keep their defaults. Unknown keys are
// rejected so that typos do not silently fall back to defaults.

namespace macfb::config {

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  int N = 32;
  int L_T = 2;
  int L_R = 4;
  double snr_db = 10.0;
  int s = 4;
  int R_q = 12;

  int trials = 10000;
  int codebooks_per_point = 10;
  std::uint64_t seed = 1;
  int workers = 1;
  std::vector<strategies::Strategy> strategies;  // empty: command default

  std::string sweep_param = experiments::kParamSnrDb;
  std::vector<double> sweep_values;  // empty: command default
  bool auto_s = false;

  strategies::SystemConfig system() const;
  /// Range checks with the offending field named in the ConfigError.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

/// Overlays the keys present in j onto base.
RunConfig from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig from_json(const nlohmann::ordered_json& j, RunConfig base = {});
nlohmann::ordered_json to_json(const RunConfig& cfg);

RunConfig load(const std::filesystem::path& path, RunConfig base = {});
void save(const std::filesystem::path& path, const RunConfig& cfg);

}  // namespace macfb::config
