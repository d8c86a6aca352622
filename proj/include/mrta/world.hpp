#pragma once

// Hubs, agents, tasks, scenario parameters and the task generator.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mrta/comm_graph.hpp"
#include "mrta/stochastics.hpp"

namespace mrta {

using AgentIndex = std::size_t;
using TaskIndex = std::size_t;

class InvalidConfig : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool valid() const noexcept { return x_min <= x_max && y_min <= y_max; }
  friend bool operator==(const Box&, const Box&) = default;
};

struct Hub {
  HubIndex id = 0;
  Point location;
  double sensing_radius = 0.0;

  /// Closed sensing ball.
  bool senses(Point p) const noexcept { return distance(location, p) <= sensing_radius; }
};

enum class TaskStatus { kPending, kInProgress, kCompleted, kExpired };

struct Task {
  TaskIndex id = 0;
  double arrival = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  Point location;
  TaskStatus status = TaskStatus::kPending;
  double completed_at = 0.0;  // meaningful only when status == kCompleted

  bool terminal() const noexcept {
    return status == TaskStatus::kCompleted || status == TaskStatus::kExpired;
  }
};

enum class AgentMode { kIdle, kEnRoute, kWaiting, kReturning };

inline constexpr auto kIdleAction = static_cast<TaskIndex>(-1);

struct AgentState {
  AgentIndex id = 0;
  HubIndex hub = 0;
  AgentMode mode = AgentMode::kIdle;
  TaskIndex action = kIdleAction;
  double arrive_at = 0.0;   // kEnRoute
  double service_at = 0.0;  // kWaiting
  double return_at = 0.0;   // kReturning
  double dispatched_at = 0.0;
  std::vector<std::pair<double, TaskIndex>> action_history;  // (step, action) on change
};

enum class ConflictLevel { kLow, kMid, kHigh, kCustom };

inline const char* to_string(ConflictLevel c) {
  switch (c) {
    case ConflictLevel::kLow: return "low";
    case ConflictLevel::kMid: return "mid";
    case ConflictLevel::kHigh: return "high";
    case ConflictLevel::kCustom: return "custom";
  }
  return "custom";
}

/// Synthetic city: a 12 km x 12 km square.
inline constexpr double kAreaSide = 12.0;
inline constexpr double kRingRadius = 3.5;
inline constexpr double kMidBoxSide = 8.0;
inline constexpr double kHighBoxSide = 4.0;

struct ScenarioConfig {
  std::size_t n_depots = 5;
  std::size_t n_agents = 15;
  std::size_t horizon = 720;  // steps
  double step_minutes = 1.0;
  double p_new = 0.5;
  double window_w = 30.0;  // minutes
  std::optional<std::size_t> initial_tasks;  // defaults to ceil(1.5 n)
  ConflictLevel conflict_level = ConflictLevel::kMid;
  Box conflict_box;  // used when conflict_level == kCustom
  std::string depot_layout = "ring";  // "ring", "grid" or "custom"
  std::vector<Point> depots;  // used when depot_layout == "custom"
  double sensing_radius = 5.0;  // km
  double speed_km_per_min = 0.1;
  ScaleConvention scale = ScaleConvention::kHalfWidth;
  std::string topology_name = "complete";
  TopologySpec topology;
  std::size_t ibr_max_rounds = 10;
  bool abort_on_expiry = false;
  std::string policy = "ibr";
  std::uint64_t seed = 1;

  double window_steps() const { return window_w / step_minutes; }
  double speed_per_step() const { return speed_km_per_min * step_minutes; }
  std::size_t initial_task_count() const {
    return initial_tasks.value_or(
        static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(n_agents))));
  }
};

inline std::vector<Point> depot_positions(const ScenarioConfig& cfg) {
  const std::size_t n = cfg.n_depots;
  const Point center{kAreaSide / 2, kAreaSide / 2};
  std::vector<Point> out;
  if (cfg.depot_layout == "custom") {
    if (cfg.depots.size() != n) {
      throw InvalidConfig("custom depot layout lists " + std::to_string(cfg.depots.size()) +
                          " points for " + std::to_string(n) + " depots");
    }
    return cfg.depots;
  }
  if (cfg.depot_layout == "ring") {
    if (n == 1) return {center};
    for (std::size_t h = 0; h < n; ++h) {
      const double angle =
          std::numbers::pi / 2 + 2 * std::numbers::pi * static_cast<double>(h) / static_cast<double>(n);
      out.push_back({center.x + kRingRadius * std::cos(angle),
                     center.y + kRingRadius * std::sin(angle)});
    }
    return out;
  }
  if (cfg.depot_layout == "grid") {
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    const std::size_t rows = (n + cols - 1) / cols;
    for (std::size_t h = 0; h < n; ++h) {
      const std::size_t r = h / cols;
      const std::size_t c = h % cols;
      out.push_back({kAreaSide * (static_cast<double>(c) + 0.5) / static_cast<double>(cols),
                     kAreaSide * (static_cast<double>(r) + 0.5) / static_cast<double>(rows)});
    }
    return out;
  }
  throw InvalidConfig("unknown depot layout '" + cfg.depot_layout + "'");
}

inline Point centroid(const std::vector<Point>& pts) {
  Point c;
  for (const Point& p : pts) {
    c.x += p.x;
    c.y += p.y;
  }
  if (!pts.empty()) {
    c.x /= static_cast<double>(pts.size());
    c.y /= static_cast<double>(pts.size());
  }
  return c;
}

/// Task sampling region. Higher conflict shrinks it around the depot centroid.
inline Box task_region(const ScenarioConfig& cfg) {
  auto around = [&](double side) {
    const Point c = centroid(depot_positions(cfg));
    return Box{c.x - side / 2, c.y - side / 2, c.x + side / 2, c.y + side / 2};
  };
  switch (cfg.conflict_level) {
    case ConflictLevel::kLow: return Box{0.0, 0.0, kAreaSide, kAreaSide};
    case ConflictLevel::kMid: return around(kMidBoxSide);
    case ConflictLevel::kHigh: return around(kHighBoxSide);
    case ConflictLevel::kCustom: return cfg.conflict_box;
  }
  return cfg.conflict_box;
}

inline void validate(const ScenarioConfig& cfg) {
  if (cfg.n_depots == 0) throw InvalidConfig("n_depots must be at least 1");
  if (cfg.n_agents == 0) throw InvalidConfig("n_agents must be at least 1");
  if (!(cfg.step_minutes > 0)) throw InvalidConfig("step_minutes must be positive");
  if (!(cfg.p_new >= 0 && cfg.p_new <= 1)) throw InvalidConfig("p_new must lie in [0, 1]");
  if (!(cfg.window_w > 0)) throw InvalidConfig("window_w must be positive");
  if (!(cfg.sensing_radius > 0)) throw InvalidConfig("sensing_radius must be positive");
  if (!(cfg.speed_km_per_min > 0)) throw InvalidConfig("speed must be positive");
  if (cfg.ibr_max_rounds < 1) throw InvalidConfig("ibr_max_rounds must be at least 1");
  if (!task_region(cfg).valid()) throw InvalidConfig("task region is empty");
  (void)depot_positions(cfg);
  try {
    (void)make_topology(cfg.topology, cfg.n_depots);
  } catch (const InvalidTopology& e) {
    throw InvalidConfig(std::string("topology: ") + e.what());
  }
}

inline std::vector<Hub> make_hubs(const ScenarioConfig& cfg) {
  std::vector<Hub> hubs;
  const auto pts = depot_positions(cfg);
  for (HubIndex h = 0; h < pts.size(); ++h) hubs.push_back({h, pts[h], cfg.sensing_radius});
  return hubs;
}

/// Agents are dealt to depots round-robin so counts differ by at most one.
inline std::vector<AgentState> make_agents(const ScenarioConfig& cfg) {
  std::vector<AgentState> agents(cfg.n_agents);
  for (AgentIndex i = 0; i < cfg.n_agents; ++i) {
    agents[i].id = i;
    agents[i].hub = i % cfg.n_depots;
  }
  return agents;
}

/// Task revealed at `t`: window start in [t + w/2, t + w], duration in
/// [w/2, w], location uniform over the task region. Draw order is fixed.
inline Task sample_task(const ScenarioConfig& cfg, const Box& region, double t, TaskIndex id,
                        SeededRng& rng) {
  const double w = cfg.window_steps();
  Task k;
  k.id = id;
  k.arrival = t;
  k.window_start = rng.uniform(t + w / 2, t + w);
  k.window_end = k.window_start + rng.uniform(w / 2, w);
  k.location = {rng.uniform(region.x_min, region.x_max), rng.uniform(region.y_min, region.y_max)};
  return k;
}

inline std::vector<Task> generate_initial_tasks(const ScenarioConfig& cfg, SeededRng& rng) {
  const Box region = task_region(cfg);
  if (!region.valid()) throw InvalidConfig("task region is empty");
  std::vector<Task> tasks;
  const std::size_t n = cfg.initial_task_count();
  tasks.reserve(n);
  for (TaskIndex k = 0; k < n; ++k) tasks.push_back(sample_task(cfg, region, 0.0, k, rng));
  return tasks;
}

/// One Bernoulli(p_new) draw per step, then the task draws on success.
inline std::optional<Task> maybe_spawn_task(const ScenarioConfig& cfg, std::size_t t,
                                            TaskIndex next_id, SeededRng& rng) {
  if (!rng.bernoulli(cfg.p_new)) return std::nullopt;
  return sample_task(cfg, task_region(cfg), static_cast<double>(t), next_id, rng);
}

inline double mean_travel_time(const Hub& hub, Point task_location, double speed_per_step) {
  if (!(speed_per_step > 0)) throw InvalidParameter("mean_travel_time: speed must be positive");
  return distance(hub.location, task_location) / speed_per_step;
}

/// A non-idle action chosen at a planning step.
struct Selection {
  AgentIndex agent = 0;
  double step = 0.0;
  TaskIndex task = 0;
};

/// Everything a trial knows at one instant: static geometry, task and agent
/// records, and the log of past selections.
struct WorldState {
  double clock = 0.0;
  std::vector<Hub> hubs;
  std::vector<AgentState> agents;
  std::vector<Task> tasks;
  std::vector<Selection> selections;
  // first_selected[k][h]: earliest step at which an agent of hub h chose k.
  std::vector<std::vector<double>> first_selected;

  void add_task(Task k) {
    k.id = tasks.size();
    tasks.push_back(k);
    first_selected.emplace_back(hubs.size(), std::numeric_limits<double>::infinity());
  }

  void record_selection(AgentIndex i, double step, TaskIndex k) {
    selections.push_back({i, step, k});
    double& first = first_selected[k][agents[i].hub];
    if (step < first) first = step;
  }
};

}  // namespace mrta
