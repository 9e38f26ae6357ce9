#pragma once

// Scenario configuration: a JSON document with four sections.
//
//   {
//     "map":        {"image": "italy.pgm", "grey": {"255": "habitable", ...}},
//     "cities":     {"vicinity_radius": 6, "list": [{"name": "Roma", "x": 167, "y": 197}, ...]},
//     "params":     {"sensor_offset": 9, "sensor_angle": 45, ...},
//     "experiment": {"nutrient": "low", "runs": 20, "steps": 6192, ...}
//   }
//
// Relative paths resolve against the directory of the config file. Every
// omitted key takes the default listed in ModelParams / Scenario, and
// dump_scenario() writes all of them back out.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slimenet/error.hpp"
#include "slimenet/habitat.hpp"

namespace slimenet {

struct ModelParams {
  double sensor_offset = 9.0;   ///< cells
  double sensor_angle = 45.0;   ///< degrees
  double rotation_angle = 45.0; ///< degrees
  double deposit = 5.0;
  double damping = 0.9;
  double nutrient_low = 2.55;
  double nutrient_high = 255.0;
  int growth_window = 9;
  int growth_min = 1;
  int growth_max = 10;
  int shrink_window = 5;
  int shrink_max = 24;
  bool shrink_count_includes_self = true;
  int adaptation_interval = 2;
  double coverage = 0.5;  ///< initial fraction of habitable cells occupied

  void validate() const {
    auto fail = [](const char* field, const char* what) { throw ValidationError(what, std::string("params.") + field); };
    if (!(sensor_offset >= 1)) fail("sensor_offset", "must be >= 1");
    if (!(sensor_angle > 0 && sensor_angle < 180)) fail("sensor_angle", "must be in (0, 180)");
    if (!(rotation_angle > 0 && rotation_angle < 180)) fail("rotation_angle", "must be in (0, 180)");
    if (!(deposit > 0)) fail("deposit", "must be positive");
    if (!(damping > 0 && damping <= 1)) fail("damping", "must be in (0, 1]");
    if (!(nutrient_low >= 0)) fail("nutrient_low", "must be non-negative");
    if (!(nutrient_high >= 0)) fail("nutrient_high", "must be non-negative");
    if (growth_window < 1 || growth_window % 2 == 0) fail("growth_window", "must be a positive odd number");
    if (shrink_window < 1 || shrink_window % 2 == 0) fail("shrink_window", "must be a positive odd number");
    if (growth_min < 0) fail("growth_min", "must be non-negative");
    if (growth_max < growth_min) fail("growth_max", "must be >= growth_min");
    if (shrink_max < 0) fail("shrink_max", "must be non-negative");
    if (adaptation_interval < 1) fail("adaptation_interval", "must be >= 1");
    if (!(coverage > 0 && coverage <= 1)) fail("coverage", "must be in (0, 1]");
  }
};

enum class Nutrient { Low, High };

inline const char* to_string(Nutrient n) { return n == Nutrient::Low ? "low" : "high"; }

/// Default snapshot schedule (steps).
inline const std::vector<int>& default_snapshot_schedule() {
  static const std::vector<int> s{10, 91, 272, 576, 1924, 6192};
  return s;
}

struct Scenario {
  HabitatMap habitat;
  std::filesystem::path map_path;
  GreyMapping grey = default_grey_mapping();
  CitySet cities;
  Nutrient nutrient = Nutrient::Low;
  ModelParams params;
  int runs = 20;
  int steps = 6192;
  std::vector<int> snapshot_steps;  ///< default: the standard schedule clipped to [0, steps]
  std::uint64_t base_seed = 1;
  int dilation = 1;                 ///< occupancy dilation used for edge extraction
  std::string root;                 ///< growth root; default "Roma" when present, else the first city
  std::optional<std::filesystem::path> road_graph;
  std::string snapshot_format = "png";

  double stimulus() const { return nutrient == Nutrient::Low ? params.nutrient_low : params.nutrient_high; }

  void validate() const {
    params.validate();
    validate_cities(cities, habitat);
    if (runs < 1) throw ValidationError("must be >= 1", "experiment.runs");
    if (steps < 0) throw ValidationError("must be non-negative", "experiment.steps");
    for (int s : snapshot_steps)
      if (s < 0 || s > steps) throw ValidationError("snapshot step " + std::to_string(s) + " outside [0, steps]", "experiment.snapshot_steps");
    if (dilation < 0) throw ValidationError("must be non-negative", "experiment.dilation");
    if (!cities.empty() && !cities.find(root)) throw ValidationError("unknown city '" + root + "'", "experiment.root");
    if (snapshot_format != "png" && snapshot_format != "pgm")
      throw ValidationError("must be 'png' or 'pgm'", "experiment.snapshot_format");
  }
};

namespace detail {

template <class T>
T get_or(const nlohmann::json& obj, const char* key, T fallback, const std::string& section) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("wrong type", section + "." + key);
  }
}

inline void reject_unknown_keys(const nlohmann::json& obj, const std::string& section,
                                std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }))
      throw ValidationError("unknown key", section.empty() ? it.key() : section + "." + it.key());
  }
}

inline const nlohmann::json& section(const nlohmann::json& doc, const char* name) {
  static const nlohmann::json empty = nlohmann::json::object();
  if (!doc.contains(name)) return empty;
  if (!doc.at(name).is_object()) throw ValidationError("must be an object", name);
  return doc.at(name);
}

}  // namespace detail

inline ModelParams params_from_json(const nlohmann::json& p) {
  using detail::get_or;
  detail::reject_unknown_keys(p, "params",
                              {"sensor_offset", "sensor_angle", "rotation_angle", "deposit", "damping", "nutrient_low",
                               "nutrient_high", "growth_window", "growth_min", "growth_max", "shrink_window",
                               "shrink_max", "shrink_count_includes_self", "adaptation_interval", "coverage"});
  ModelParams m;
  const std::string s = "params";
  m.sensor_offset = get_or(p, "sensor_offset", m.sensor_offset, s);
  m.sensor_angle = get_or(p, "sensor_angle", m.sensor_angle, s);
  m.rotation_angle = get_or(p, "rotation_angle", m.rotation_angle, s);
  m.deposit = get_or(p, "deposit", m.deposit, s);
  m.damping = get_or(p, "damping", m.damping, s);
  m.nutrient_low = get_or(p, "nutrient_low", m.nutrient_low, s);
  m.nutrient_high = get_or(p, "nutrient_high", m.nutrient_high, s);
  m.growth_window = get_or(p, "growth_window", m.growth_window, s);
  m.growth_min = get_or(p, "growth_min", m.growth_min, s);
  m.growth_max = get_or(p, "growth_max", m.growth_max, s);
  m.shrink_window = get_or(p, "shrink_window", m.shrink_window, s);
  m.shrink_max = get_or(p, "shrink_max", m.shrink_max, s);
  m.shrink_count_includes_self = get_or(p, "shrink_count_includes_self", m.shrink_count_includes_self, s);
  m.adaptation_interval = get_or(p, "adaptation_interval", m.adaptation_interval, s);
  m.coverage = get_or(p, "coverage", m.coverage, s);
  m.validate();
  return m;
}

inline nlohmann::json to_json(const ModelParams& m) {
  return {{"sensor_offset", m.sensor_offset},
          {"sensor_angle", m.sensor_angle},
          {"rotation_angle", m.rotation_angle},
          {"deposit", m.deposit},
          {"damping", m.damping},
          {"nutrient_low", m.nutrient_low},
          {"nutrient_high", m.nutrient_high},
          {"growth_window", m.growth_window},
          {"growth_min", m.growth_min},
          {"growth_max", m.growth_max},
          {"shrink_window", m.shrink_window},
          {"shrink_max", m.shrink_max},
          {"shrink_count_includes_self", m.shrink_count_includes_self},
          {"adaptation_interval", m.adaptation_interval},
          {"coverage", m.coverage}};
}

/// Builds and validates a Scenario. `base_dir` anchors relative paths.
inline Scenario load_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".") {
  using detail::get_or;
  if (!doc.is_object()) throw ValidationError("scenario must be a JSON object", "scenario");
  detail::reject_unknown_keys(doc, "", {"map", "cities", "params", "experiment"});
  Scenario sc;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : std::filesystem::absolute(base_dir / path).lexically_normal();
  };

  const auto& map = detail::section(doc, "map");
  detail::reject_unknown_keys(map, "map", {"image", "grey"});
  if (!map.contains("image")) throw ValidationError("required", "map.image");
  sc.map_path = resolve(get_or<std::string>(map, "image", "", "map"));
  if (map.contains("grey")) {
    sc.grey.clear();
    for (auto it = map["grey"].begin(); it != map["grey"].end(); ++it) {
      int level = -1;
      try {
        level = std::stoi(it.key());
      } catch (const std::logic_error&) {
        throw ValidationError("grey level '" + it.key() + "' is not an integer", "map.grey");
      }
      if (level < 0 || level > 255) throw ValidationError("grey level out of range", "map.grey");
      if (!it.value().is_string()) throw ValidationError("class must be a string", "map.grey");
      sc.grey[level] = cell_class_from_string(it.value().get<std::string>());
    }
  }
  sc.habitat = load_map(sc.map_path, sc.grey);

  const auto& cities = detail::section(doc, "cities");
  detail::reject_unknown_keys(cities, "cities", {"vicinity_radius", "list"});
  sc.cities.vicinity_radius =
      get_or(cities, "vicinity_radius", default_vicinity_radius(sc.habitat.width(), sc.habitat.height()), "cities");
  if (cities.contains("list")) {
    if (!cities["list"].is_array()) throw ValidationError("must be an array", "cities.list");
    for (const auto& c : cities["list"]) {
      if (!c.is_object() || !c.contains("name") || !c.contains("x") || !c.contains("y"))
        throw ValidationError("each city needs name, x and y", "cities.list");
      try {
        sc.cities.cities.push_back({c["name"].get<std::string>(), c["x"].get<int>(), c["y"].get<int>()});
      } catch (const nlohmann::json::exception&) {
        throw ValidationError("wrong type in city entry", "cities.list");
      }
    }
  }

  sc.params = params_from_json(detail::section(doc, "params"));

  const auto& ex = detail::section(doc, "experiment");
  detail::reject_unknown_keys(ex, "experiment",
                              {"nutrient", "runs", "steps", "snapshot_steps", "base_seed", "dilation", "root",
                               "road_graph", "snapshot_format"});
  const auto nutrient = get_or<std::string>(ex, "nutrient", "low", "experiment");
  if (nutrient == "low") sc.nutrient = Nutrient::Low;
  else if (nutrient == "high") sc.nutrient = Nutrient::High;
  else throw ValidationError("must be 'low' or 'high'", "experiment.nutrient");
  sc.runs = get_or(ex, "runs", sc.runs, "experiment");
  sc.steps = get_or(ex, "steps", sc.steps, "experiment");
  if (ex.contains("snapshot_steps")) {
    sc.snapshot_steps = get_or(ex, "snapshot_steps", std::vector<int>{}, "experiment");
  } else {
    for (int s : default_snapshot_schedule())
      if (s <= sc.steps) sc.snapshot_steps.push_back(s);
  }
  std::sort(sc.snapshot_steps.begin(), sc.snapshot_steps.end());
  sc.snapshot_steps.erase(std::unique(sc.snapshot_steps.begin(), sc.snapshot_steps.end()), sc.snapshot_steps.end());
  sc.base_seed = get_or<std::uint64_t>(ex, "base_seed", sc.base_seed, "experiment");
  sc.dilation = get_or(ex, "dilation", sc.dilation, "experiment");
  const std::string default_root = sc.cities.find("Roma") ? "Roma" : (sc.cities.empty() ? "" : sc.cities.cities.front().name);
  sc.root = get_or<std::string>(ex, "root", default_root, "experiment");
  if (ex.contains("road_graph")) sc.road_graph = resolve(get_or<std::string>(ex, "road_graph", "", "experiment"));
  sc.snapshot_format = get_or<std::string>(ex, "snapshot_format", sc.snapshot_format, "experiment");

  sc.validate();
  return sc;
}

inline Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), "scenario");
  }
  return load_scenario(doc, std::filesystem::absolute(path).parent_path());
}

/// Canonical, fully defaulted form. Loading it back yields the same Scenario.
inline nlohmann::json dump_scenario(const Scenario& sc) {
  nlohmann::json grey = nlohmann::json::object();
  for (const auto& [level, cls] : sc.grey) grey[std::to_string(level)] = to_string(cls);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : sc.cities.cities) list.push_back({{"name", c.name}, {"x", c.x}, {"y", c.y}});
  nlohmann::json ex{{"nutrient", to_string(sc.nutrient)},
                    {"runs", sc.runs},
                    {"steps", sc.steps},
                    {"snapshot_steps", sc.snapshot_steps},
                    {"base_seed", sc.base_seed},
                    {"dilation", sc.dilation},
                    {"root", sc.root},
                    {"snapshot_format", sc.snapshot_format}};
  if (sc.road_graph) ex["road_graph"] = sc.road_graph->string();
  return {{"map", {{"image", sc.map_path.string()}, {"grey", grey}}},
          {"cities", {{"vicinity_radius", sc.cities.vicinity_radius}, {"list", list}}},
          {"params", to_json(sc.params)},
          {"experiment", ex}};
}

}  // namespace slimenet
