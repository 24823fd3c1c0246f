#pragma once

#include <map>
#include <string>
#include <vector>

#include "agsyn/io.hpp"
#include "agsyn/motion.hpp"

namespace agsyn {

inline Environment environment_from_json(const json& j, const std::string& origin = "<environment>") {
  try {
    Environment env;
    env.regions = j.at("regions").get<std::vector<std::string>>();
    env.doors = j.at("doors").get<std::vector<std::string>>();
    for (const auto& p : j.at("adjacency")) {
      if (!p.is_array() || p.size() != 2) throw InputError("adjacency entry must be [from, to]");
      env.adjacency.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
    for (const auto& e : j.at("door_map")) {
      auto key = std::make_pair(e.at("from").get<std::string>(), e.at("to").get<std::string>());
      if (env.door_map.count(key)) throw InputError("door map lists " + key.first + "->" + key.second + " twice");
      env.door_map[key] = e.at("doors").get<std::vector<std::string>>();
    }
    if (j.contains("initial")) env.initial = j.at("initial").get<std::map<std::string, std::string>>();
    env.validate();
    return env;
  } catch (const json::exception& e) {
    throw InputError(origin + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(origin + ": " + e.what());
  }
}

inline Environment load_environment(const std::string& path) { return environment_from_json(load_json_file(path), path); }

/// Per-agent labelings: {agent: {event: [regions]}}.
inline std::map<std::string, Labeling> load_labelings(const std::string& path) {
  auto j = load_json_file(path);
  try {
    return j.get<std::map<std::string, Labeling>>();
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline std::vector<DoorChange> load_door_schedule(const std::string& path) {
  auto j = load_json_file(path);
  std::vector<DoorChange> out;
  try {
    for (const auto& e : j) {
      auto state = e.at("state").get<std::string>();
      if (state != "open" && state != "closed") throw InputError("door state must be \"open\" or \"closed\"");
      out.push_back({e.at("step").get<int>(), e.at("door").get<std::string>(), state == "open"});
    }
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
  return out;
}

}  // namespace agsyn
