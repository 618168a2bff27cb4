#include "compest_tools/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <compest/error.hpp>
#include <compest/population.hpp>

namespace compest::tools {

namespace {

using nlohmann::json;

const char* mode_name(ErrorMode m) {
  return m == ErrorMode::employed_to_unemployed ? "employed_to_unemployed" : "unemployed_to_employed";
}

ErrorMode mode_from(const std::string& s) {
  if (s == "employed_to_unemployed") return ErrorMode::employed_to_unemployed;
  if (s == "unemployed_to_employed") return ErrorMode::unemployed_to_employed;
  throw ConfigError("measurement_error.mode must be employed_to_unemployed or unemployed_to_employed, got '" + s + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

const std::vector<std::string> kTopLevel{"months",     "seed",          "parallel",          "output",
                                         "populations", "rate_targets", "estimators",        "ak",
                                         "alpha_step", "sigma_source",  "measurement_error", "optimizer",
                                         "audit_draws"};

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(kTopLevel.begin(), kTopLevel.end(), key) == kTopLevel.end()) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  ExperimentConfig c;
  read(j, "months", c.months);
  read(j, "seed", c.seed);
  read(j, "parallel", c.parallel);
  std::string path;
  if (j.contains("output")) {
    read(j, "output", path);
    c.output = path;
  }
  read(j, "populations", c.populations);
  if (j.contains("rate_targets")) {
    read(j, "rate_targets", path);
    c.rate_targets = path;
  }
  read(j, "estimators", c.estimators);
  if (j.contains("ak")) {
    const json& ak = j.at("ak");
    std::array<double, 2> a{c.ak_parameters[0], c.ak_parameters[2]};
    std::array<double, 2> k{c.ak_parameters[1], c.ak_parameters[3]};
    read(ak, "a", a);
    read(ak, "k", k);
    c.ak_parameters = {a[0], k[0], a[1], k[1]};
  }
  read(j, "alpha_step", c.alpha_step);
  read(j, "sigma_source", c.sigma_source);
  if (j.contains("measurement_error")) {
    const json& me = j.at("measurement_error");
    read(me, "enabled", c.measurement_error);
    std::string mode = mode_name(c.error.mode);
    read(me, "mode", mode);
    c.error.mode = mode_from(mode);
    read(me, "fraction", c.error.fraction);
    read(me, "cap", c.error.cap);
  }
  if (j.contains("optimizer")) {
    const json& opt = j.at("optimizer");
    read(opt, "restarts", c.optimizer_restarts);
    read(opt, "tolerance", c.optimizer_tolerance);
    read(opt, "max_evaluations", c.optimizer_max_evaluations);
  }
  read(j, "audit_draws", c.audit_draws);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c, bool include_output) {
  json j;
  j["months"] = c.months;
  j["seed"] = c.seed;
  j["parallel"] = c.parallel;
  if (include_output) j["output"] = c.output.string();
  j["populations"] = c.populations;
  j["rate_targets"] = c.rate_targets.string();
  j["estimators"] = c.estimators;
  j["ak"] = {{"a", {c.ak_parameters[0], c.ak_parameters[2]}}, {"k", {c.ak_parameters[1], c.ak_parameters[3]}}};
  j["alpha_step"] = c.alpha_step;
  j["sigma_source"] = c.sigma_source;
  j["measurement_error"] = {{"enabled", c.measurement_error},
                            {"mode", mode_name(c.error.mode)},
                            {"fraction", c.error.fraction},
                            {"cap", c.error.cap}};
  j["optimizer"] = {{"restarts", c.optimizer_restarts},
                    {"tolerance", c.optimizer_tolerance},
                    {"max_evaluations", c.optimizer_max_evaluations}};
  j["audit_draws"] = c.audit_draws;
  return j.dump(2) + "\n";
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> out;
  if (c.months < 2) out.push_back("months must be at least 2");
  if (c.parallel < 1) out.push_back("parallel must be at least 1");
  if (c.populations.empty()) out.push_back("populations must not be empty");
  for (int v : c.populations) {
    if (v < 1 || v > 3) out.push_back("population variant " + std::to_string(v) + " is not 1, 2 or 3");
  }
  for (const auto& e : c.estimators) {
    const auto& k = known_estimators();
    if (std::find(k.begin(), k.end(), e) == k.end()) out.push_back("unknown estimator '" + e + "'");
  }
  if (std::find(c.estimators.begin(), c.estimators.end(), "direct") == c.estimators.end()) {
    out.push_back("estimators must include 'direct' (the relative-MSE baseline)");
  }
  if (!(c.alpha_step > 0.0 && c.alpha_step <= 1.0)) out.push_back("alpha_step must lie in (0, 1]");
  if (c.sigma_source != "exact" && c.sigma_source != "estimated") out.push_back("sigma_source must be exact or estimated");
  if (!(c.error.fraction >= 0.0 && c.error.fraction <= 1.0)) out.push_back("measurement_error.fraction must lie in [0, 1]");
  if (c.error.cap < 0) out.push_back("measurement_error.cap must be nonnegative");
  if (c.optimizer_restarts < 0) out.push_back("optimizer.restarts must be nonnegative");
  if (!(c.optimizer_tolerance > 0.0)) out.push_back("optimizer.tolerance must be positive");
  if (c.optimizer_max_evaluations < 1) out.push_back("optimizer.max_evaluations must be positive");
  for (int r : c.audit_draws) {
    if (r < 1 || r > RotationDesign{}.draws()) out.push_back("audit draw " + std::to_string(r) + " is out of range");
  }
  if (!c.rate_targets.empty()) {
    try {
      const RateTargets t = read_rate_targets(c.rate_targets);
      if (t.months() < c.months) {
        out.push_back("rate target file has " + std::to_string(t.months()) + " months, config needs " +
                      std::to_string(c.months));
      }
    } catch (const std::exception& e) {
      out.push_back(std::string("rate targets: ") + e.what());
    }
  } else if (c.months > default_rate_targets().months()) {
    out.push_back("the packaged rate series has " + std::to_string(default_rate_targets().months()) +
                  " months; supply rate_targets for longer runs");
  }
  return out;
}

}  // namespace compest::tools
