#include "macfb/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace macfb::config {

namespace {

using nlohmann::json;

void reject_unknown(const json& section, const std::string& prefix, const std::set<std::string>& known) {
  if (!section.is_object()) throw ConfigError(prefix, "expected an object");
  for (const auto& item : section.items()) {
    if (!known.count(item.key())) {
      throw ConfigError(prefix.empty() ? item.key() : prefix + "." + item.key(), "unknown key");
    }
  }
}

template <typename T>
void read(const json& section, const std::string& prefix, const char* key, T& out) {
  if (!section.contains(key)) return;
  const std::string field = prefix + "." + key;
  try {
    const json& v = section.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(field, "expected a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) {
          out = v.get<T>();
        } else if (v.get<std::int64_t>() >= 0) {
          out = static_cast<T>(v.get<std::int64_t>());
        } else {
          throw ConfigError(field, "expected a nonnegative integer");
        }
      } else {
        out = v.get<T>();
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(field, "expected a number");
      out = v.get<T>();
    } else {
      out = v.get<T>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& field, const std::string& message)
    : std::invalid_argument(field + ": " + message), field_(field) {}

strategies::SystemConfig RunConfig::system() const {
  strategies::SystemConfig c;
  c.N = N;
  c.L_T = L_T;
  c.L_R = L_R;
  c.rho = experiments::db_to_linear(snr_db);
  c.s = s;
  c.R_q = R_q;
  return c;
}

void RunConfig::validate() const {
  if (N < 1) throw ConfigError("system.N", "must be >= 1");
  if (L_T < 1) throw ConfigError("system.L_T", "must be >= 1");
  if (L_R < 1) throw ConfigError("system.L_R", "must be >= 1");
  if (!std::isfinite(snr_db)) throw ConfigError("system.snr_db", "must be finite");
  if (s < 1) throw ConfigError("system.s", "must be >= 1");
  if (R_q < 0 || R_q > strategies::kMaxQuantizationBits) throw ConfigError("system.R_q", "must lie in [0, 16]");
  if (trials < 1) throw ConfigError("run.trials", "must be >= 1");
  if (codebooks_per_point < 1) throw ConfigError("run.codebooks_per_point", "must be >= 1");
  if (workers < 1) throw ConfigError("run.workers", "must be >= 1");
  if (sweep_param != experiments::kParamSnrDb && sweep_param != experiments::kParamRq &&
      sweep_param != experiments::kParamS && sweep_param != experiments::kParamN) {
    throw ConfigError("sweep.param", "must be one of snr_db, R_q, s, N");
  }
  for (std::size_t i = 1; i < sweep_values.size(); ++i) {
    if (!(sweep_values[i] > sweep_values[i - 1])) throw ConfigError("sweep.values", "must be strictly increasing");
  }
}

RunConfig from_json(const json& j, RunConfig base) {
  reject_unknown(j, "", {"system", "run", "sweep"});
  RunConfig c = std::move(base);
  if (j.contains("system")) {
    const json& sys = j.at("system");
    reject_unknown(sys, "system", {"N", "L_T", "L_R", "snr_db", "s", "R_q"});
    read(sys, "system", "N", c.N);
    read(sys, "system", "L_T", c.L_T);
    read(sys, "system", "L_R", c.L_R);
    read(sys, "system", "snr_db", c.snr_db);
    read(sys, "system", "s", c.s);
    read(sys, "system", "R_q", c.R_q);
  }
  if (j.contains("run")) {
    const json& run = j.at("run");
    reject_unknown(run, "run", {"trials", "codebooks_per_point", "seed", "workers", "strategies"});
    read(run, "run", "trials", c.trials);
    read(run, "run", "codebooks_per_point", c.codebooks_per_point);
    read(run, "run", "seed", c.seed);
    read(run, "run", "workers", c.workers);
    if (run.contains("strategies")) {
      const json& list = run.at("strategies");
      if (!list.is_array()) throw ConfigError("run.strategies", "expected an array of names");
      c.strategies.clear();
      for (const auto& name : list) {
        if (!name.is_string()) throw ConfigError("run.strategies", "expected an array of names");
        try {
          c.strategies.push_back(strategies::parse_strategy(name.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          throw ConfigError("run.strategies", e.what());
        }
      }
    }
  }
  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    reject_unknown(sw, "sweep", {"param", "values", "auto_s"});
    read(sw, "sweep", "param", c.sweep_param);
    if (sw.contains("values")) {
      const json& list = sw.at("values");
      if (!list.is_array()) throw ConfigError("sweep.values", "expected an array of numbers");
      c.sweep_values.clear();
      for (const auto& v : list) {
        if (!v.is_number()) throw ConfigError("sweep.values", "expected an array of numbers");
        c.sweep_values.push_back(v.get<double>());
      }
    }
    read(sw, "sweep", "auto_s", c.auto_s);
  }
  c.validate();
  return c;
}

RunConfig from_json(const nlohmann::ordered_json& j, RunConfig base) {
  return from_json(json::parse(j.dump()), std::move(base));
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["system"] = {{"N", c.N}, {"L_T", c.L_T}, {"L_R", c.L_R}, {"snr_db", c.snr_db}, {"s", c.s}, {"R_q", c.R_q}};
  nlohmann::ordered_json names = nlohmann::ordered_json::array();
  for (auto s : c.strategies) names.push_back(std::string(strategies::to_string(s)));
  j["run"] = {{"trials", c.trials},
              {"codebooks_per_point", c.codebooks_per_point},
              {"seed", c.seed},
              {"workers", c.workers},
              {"strategies", names}};
  j["sweep"] = {{"param", c.sweep_param}, {"values", c.sweep_values}, {"auto_s", c.auto_s}};
  return j;
}

RunConfig load(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
  }
  return from_json(j, std::move(base));
}

void save(const std::filesystem::path& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(cfg).dump(2) << '\n';
}

}  // namespace macfb::config
