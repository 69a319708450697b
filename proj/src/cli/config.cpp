#include "config.hpp"

#include <set>

#include <yaml-cpp/yaml.h>

namespace bdisim::cli {

namespace {

void check_keys(const YAML::Node& node, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!node) return;
  if (!node.IsMap()) {
    throw ConfigError("section '" + section + "' must be a mapping");
  }
  for (const auto& kv : node) {
    std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in section '" + section + "'");
    }
  }
}

template <typename T>
void read(const YAML::Node& node, const std::string& section,
          const std::string& key, T& out) {
  if (!node || !node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + section + "." + key + "'");
  }
}

sim::Granularity parse_granularity(const std::string& token,
                                   const std::string& where) {
  auto g = sim::granularity_from_name(token);
  if (!g) {
    throw ConfigError("unknown granularity '" + token + "' in " + where +
                      " (expected ama, acli, or aclp)");
  }
  return *g;
}

}  // namespace

ToolConfig load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  check_keys(root, "(top level)", {"scenario", "execution", "sweep", "output"});

  ToolConfig cfg;

  YAML::Node sc = root["scenario"];
  check_keys(sc, "scenario",
             {"leader_radius_m", "formation_radius_m", "comm_range_m",
              "max_speed_mps", "leader_period_s", "followers",
              "arena_radius_m"});
  read(sc, "scenario", "leader_radius_m", cfg.scenario.leader_radius);
  read(sc, "scenario", "formation_radius_m", cfg.scenario.formation_radius);
  read(sc, "scenario", "comm_range_m", cfg.scenario.comm_range);
  read(sc, "scenario", "max_speed_mps", cfg.scenario.v_max);
  read(sc, "scenario", "leader_period_s", cfg.scenario.leader_period);
  read(sc, "scenario", "followers", cfg.scenario.n_followers);
  read(sc, "scenario", "arena_radius_m", cfg.scenario.arena_radius);

  YAML::Node ex = root["execution"];
  check_keys(ex, "execution",
             {"granularity", "frequency_hz", "drift", "duration_s", "seed"});
  if (ex && ex["granularity"]) {
    cfg.scenario.granularity = parse_granularity(
        ex["granularity"].as<std::string>(), "execution.granularity");
  }
  read(ex, "execution", "frequency_hz", cfg.scenario.frequency);
  read(ex, "execution", "drift", cfg.scenario.drift);
  read(ex, "execution", "duration_s", cfg.scenario.duration);
  read(ex, "execution", "seed", cfg.seed);

  YAML::Node sw = root["sweep"];
  check_keys(sw, "sweep",
             {"granularities", "frequencies_hz", "drifts", "repetitions",
              "base_seed"});
  if (sw && sw["granularities"]) {
    for (const auto& item : sw["granularities"]) {
      cfg.sweep.granularities.push_back(parse_granularity(
          item.as<std::string>(), "sweep.granularities"));
    }
  }
  if (sw && sw["frequencies_hz"]) {
    cfg.sweep.frequencies = sw["frequencies_hz"].as<std::vector<double>>();
  }
  if (sw && sw["drifts"]) {
    cfg.sweep.drifts = sw["drifts"].as<std::vector<double>>();
  }
  read(sw, "sweep", "repetitions", cfg.sweep.repetitions);
  read(sw, "sweep", "base_seed", cfg.sweep.base_seed);

  YAML::Node out = root["output"];
  check_keys(out, "output", {"path"});
  read(out, "output", "path", cfg.output_path);

  try {
    cfg.scenario.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.sweep.repetitions <= 0) {
    throw ConfigError("sweep.repetitions must be positive");
  }
  return cfg;
}

}  // namespace bdisim::cli
