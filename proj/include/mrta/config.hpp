#pragma once

// Scenario config file I/O (JSON with one section per concern) and the
// scenario digest used to pair trials across topologies.
//
//   {
//     "seed": 1, "policy": "ibr",
//     "fleet":  {"n_depots": 5, "n_agents": 15, "layout": "ring",
//                "depots": [[x, y], ...], "sensing_radius_km": 5,
//                "speed_km_per_min": 0.1},
//     "time":   {"horizon_steps": 720, "step_minutes": 1},
//     "tasks":  {"p_new": 0.5, "window_w_min": 30, "initial_tasks": null,
//                "conflict_level": "mid", "conflict_box": [x0, y0, x1, y1]},
//     "travel": {"scale": "half_width", "abort_on_expiry": false},
//     "comm":   {"topology": "complete", "edges": [[observer, observed], ...]},
//     "ibr":    {"max_rounds": 10}
//   }
//
// Every key is optional. Unknown keys are rejected.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mrta/comm_graph.hpp"
#include "mrta/world.hpp"

namespace mrta {

using Json = nlohmann::json;

/// Parses a topology name: complete, empty, ring, star, star:<center>,
/// removal:<k> (first k edges of the directed removal sequence),
/// directed:<g> (the removal-sequence graph with g information groups), or
/// explicit / edge-removal, which take their edges from `edges`.
inline TopologySpec parse_topology(std::string_view name, const std::vector<Edge>& edges = {}) {
  TopologySpec spec;
  auto suffix = [&](std::string_view prefix) -> std::optional<std::size_t> {
    if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
    const std::string digits(name.substr(prefix.size()));
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw InvalidConfig("bad topology '" + std::string(name) + "'");
    }
    return std::stoul(digits);
  };
  if (name == "complete") {
    spec.kind = TopologyKind::kComplete;
  } else if (name == "empty") {
    spec.kind = TopologyKind::kEmpty;
  } else if (name == "ring") {
    spec.kind = TopologyKind::kRing;
  } else if (name == "star") {
    spec.kind = TopologyKind::kStar;
  } else if (auto c = suffix("star:")) {
    spec.kind = TopologyKind::kStar;
    spec.center = *c;
  } else if (auto k = suffix("removal:")) {
    const auto& seq = directed_removal_sequence();
    if (*k > seq.size()) throw InvalidConfig("removal sequence has only " + std::to_string(seq.size()) + " edges");
    spec.kind = TopologyKind::kEdgeRemoval;
    spec.edges.assign(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(*k));
  } else if (auto g = suffix("directed:")) {
    // One information group per step along the removal sequence on five
    // hubs; directed:5 is full isolation.
    if (*g < 1 || *g > 5) throw InvalidConfig("directed:<g> needs 1 <= g <= 5");
    if (*g == 5) {
      spec.kind = TopologyKind::kEmpty;
    } else {
      const auto& seq = directed_removal_sequence();
      spec.kind = TopologyKind::kEdgeRemoval;
      spec.edges.assign(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(*g - 1));
    }
  } else if (name == "explicit") {
    spec.kind = TopologyKind::kExplicit;
    spec.edges = edges;
  } else if (name == "edge-removal") {
    spec.kind = TopologyKind::kEdgeRemoval;
    spec.edges = edges;
  } else {
    throw InvalidConfig("unknown topology '" + std::string(name) + "'");
  }
  return spec;
}

inline ConflictLevel parse_conflict_level(std::string_view s) {
  if (s == "low") return ConflictLevel::kLow;
  if (s == "mid") return ConflictLevel::kMid;
  if (s == "high") return ConflictLevel::kHigh;
  if (s == "custom") return ConflictLevel::kCustom;
  throw InvalidConfig("unknown conflict level '" + std::string(s) + "'");
}

namespace detail {

inline void reject_unknown(const Json& obj, std::string_view section,
                           std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) throw InvalidConfig("section '" + std::string(section) + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw InvalidConfig("unknown key '" + key + "' in section '" + std::string(section) + "'");
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) out = it->get<T>();
}

inline std::vector<Edge> read_edges(const Json& arr) {
  std::vector<Edge> out;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2) throw InvalidConfig("edges must be [observer, observed] pairs");
    out.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
  }
  return out;
}

}  // namespace detail

inline ScenarioConfig scenario_from_json(const Json& j) {
  ScenarioConfig cfg;
  try {
    detail::reject_unknown(j, "<root>", {"seed", "policy", "fleet", "time", "tasks", "travel", "comm", "ibr"});
    detail::read(j, "seed", cfg.seed);
    detail::read(j, "policy", cfg.policy);

    if (auto f = j.find("fleet"); f != j.end()) {
      detail::reject_unknown(*f, "fleet", {"n_depots", "n_agents", "layout", "depots", "sensing_radius_km",
                                           "speed_km_per_min"});
      detail::read(*f, "n_depots", cfg.n_depots);
      detail::read(*f, "n_agents", cfg.n_agents);
      detail::read(*f, "layout", cfg.depot_layout);
      detail::read(*f, "sensing_radius_km", cfg.sensing_radius);
      detail::read(*f, "speed_km_per_min", cfg.speed_km_per_min);
      if (auto d = f->find("depots"); d != f->end()) {
        cfg.depot_layout = "custom";
        for (const auto& p : *d) cfg.depots.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
    }
    if (auto t = j.find("time"); t != j.end()) {
      detail::reject_unknown(*t, "time", {"horizon_steps", "step_minutes"});
      detail::read(*t, "horizon_steps", cfg.horizon);
      detail::read(*t, "step_minutes", cfg.step_minutes);
    }
    if (auto t = j.find("tasks"); t != j.end()) {
      detail::reject_unknown(*t, "tasks", {"p_new", "window_w_min", "initial_tasks", "conflict_level", "conflict_box"});
      detail::read(*t, "p_new", cfg.p_new);
      detail::read(*t, "window_w_min", cfg.window_w);
      if (auto n = t->find("initial_tasks"); n != t->end() && !n->is_null()) cfg.initial_tasks = n->get<std::size_t>();
      if (auto c = t->find("conflict_level"); c != t->end()) cfg.conflict_level = parse_conflict_level(c->get<std::string>());
      if (auto b = t->find("conflict_box"); b != t->end()) {
        if (!b->is_array() || b->size() != 4) throw InvalidConfig("conflict_box must be [x_min, y_min, x_max, y_max]");
        cfg.conflict_box = {(*b)[0].get<double>(), (*b)[1].get<double>(), (*b)[2].get<double>(), (*b)[3].get<double>()};
        cfg.conflict_level = ConflictLevel::kCustom;
      }
    }
    if (auto t = j.find("travel"); t != j.end()) {
      detail::reject_unknown(*t, "travel", {"scale", "abort_on_expiry"});
      std::string scale = "half_width";
      detail::read(*t, "scale", scale);
      if (scale == "half_width") cfg.scale = ScaleConvention::kHalfWidth;
      else if (scale == "stddev") cfg.scale = ScaleConvention::kTrueStddev;
      else throw InvalidConfig("travel.scale must be 'half_width' or 'stddev'");
      detail::read(*t, "abort_on_expiry", cfg.abort_on_expiry);
    }
    if (auto c = j.find("comm"); c != j.end()) {
      detail::reject_unknown(*c, "comm", {"topology", "edges"});
      std::vector<Edge> edges;
      if (auto e = c->find("edges"); e != c->end()) edges = detail::read_edges(*e);
      std::string name = c->contains("topology") ? c->at("topology").get<std::string>()
                                                 : (edges.empty() ? "complete" : "explicit");
      cfg.topology = parse_topology(name, edges);
      cfg.topology_name = name;
    }
    if (auto r = j.find("ibr"); r != j.end()) {
      detail::reject_unknown(*r, "ibr", {"max_rounds"});
      detail::read(*r, "max_rounds", cfg.ibr_max_rounds);
    }
  } catch (const Json::exception& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  return cfg;
}

inline Json to_json(const ScenarioConfig& cfg) {
  Json j;
  j["seed"] = cfg.seed;
  j["policy"] = cfg.policy;
  Json fleet = {{"n_depots", cfg.n_depots},
                {"n_agents", cfg.n_agents},
                {"layout", cfg.depot_layout},
                {"sensing_radius_km", cfg.sensing_radius},
                {"speed_km_per_min", cfg.speed_km_per_min}};
  if (cfg.depot_layout == "custom") {
    Json pts = Json::array();
    for (const Point& p : cfg.depots) pts.push_back({p.x, p.y});
    fleet["depots"] = pts;
  }
  j["fleet"] = fleet;
  j["time"] = {{"horizon_steps", cfg.horizon}, {"step_minutes", cfg.step_minutes}};
  Json tasks = {{"p_new", cfg.p_new},
                {"window_w_min", cfg.window_w},
                {"conflict_level", to_string(cfg.conflict_level)}};
  tasks["initial_tasks"] = cfg.initial_tasks ? Json(*cfg.initial_tasks) : Json(nullptr);
  if (cfg.conflict_level == ConflictLevel::kCustom) {
    const Box& b = cfg.conflict_box;
    tasks["conflict_box"] = {b.x_min, b.y_min, b.x_max, b.y_max};
  }
  j["tasks"] = tasks;
  j["travel"] = {{"scale", cfg.scale == ScaleConvention::kHalfWidth ? "half_width" : "stddev"},
                 {"abort_on_expiry", cfg.abort_on_expiry}};
  Json comm = {{"topology", cfg.topology_name}};
  if (!cfg.topology.edges.empty() &&
      (cfg.topology.kind == TopologyKind::kExplicit ||
       (cfg.topology.kind == TopologyKind::kEdgeRemoval && cfg.topology_name == "edge-removal"))) {
    Json edges = Json::array();
    for (const Edge& e : cfg.topology.edges) edges.push_back({e.observer, e.observed});
    comm["edges"] = edges;
  }
  j["comm"] = comm;
  j["ibr"] = {{"max_rounds", cfg.ibr_max_rounds}};
  return j;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const Json::exception& e) {
    throw InvalidConfig("config '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hash of every scenario parameter except topology, policy and seed, so
/// trials differing only in those can be paired.
inline std::uint64_t scenario_digest(const ScenarioConfig& cfg) {
  Json j = to_json(cfg);
  j.erase("comm");
  j.erase("policy");
  j.erase("seed");
  return fnv1a(j.dump());
}

}  // namespace mrta
