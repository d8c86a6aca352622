#pragma once

// Local information: which tasks an agent sees, which of those it believes
// are still unattempted, and which past actions it has observed.

#include <algorithm>
#include <vector>

#include "mrta/comm_graph.hpp"
#include "mrta/world.hpp"

namespace mrta {

struct ObservedAction {
  AgentIndex agent = 0;
  double step = 0.0;
  TaskIndex task = 0;

  friend bool operator==(const ObservedAction&, const ObservedAction&) = default;
};

struct LocalView {
  AgentIndex agent = 0;
  std::vector<TaskIndex> visible_tasks;    // ascending
  std::vector<TaskIndex> available_tasks;  // ascending, subset of visible_tasks
  std::vector<ObservedAction> observed_actions;
};

/// Agents observed by an agent at `agent_hub`: everyone at an observed hub,
/// plus everyone at the same hub.
inline std::vector<AgentIndex> neighborhood(const CommGraph& g, HubIndex agent_hub,
                                            const std::vector<HubIndex>& hub_of) {
  std::vector<AgentIndex> out;
  for (AgentIndex j = 0; j < hub_of.size(); ++j)
    if (g.sees(agent_hub, hub_of[j])) out.push_back(j);
  return out;
}

inline std::vector<TaskIndex> visible_tasks(AgentIndex agent, double t, const WorldState& world) {
  const Hub& hub = world.hubs[world.agents[agent].hub];
  std::vector<TaskIndex> out;
  for (const Task& k : world.tasks)
    if (k.arrival <= t && hub.senses(k.location)) out.push_back(k.id);
  return out;
}

/// True when some agent the given hub observes selected `task` before `t`.
inline bool attempt_observed(const WorldState& world, const CommGraph& g, HubIndex hub,
                             TaskIndex task, double t) {
  const auto& first = world.first_selected[task];
  for (HubIndex h = 0; h < first.size(); ++h)
    if (first[h] < t && g.sees(hub, h)) return true;
  return false;
}

/// Visible tasks whose deadline has not passed and that no observed agent
/// has attempted. Completion by unobserved agents stays unknown.
inline std::vector<TaskIndex> available_tasks(AgentIndex agent, double t, const WorldState& world,
                                              const CommGraph& g) {
  const HubIndex hub = world.agents[agent].hub;
  std::vector<TaskIndex> out;
  for (TaskIndex k : visible_tasks(agent, t, world)) {
    if (world.tasks[k].window_end < t) continue;
    if (attempt_observed(world, g, hub, k, t)) continue;
    out.push_back(k);
  }
  return out;
}

inline std::vector<ObservedAction> observed_actions(AgentIndex agent, double t,
                                                    const WorldState& world, const CommGraph& g) {
  const HubIndex hub = world.agents[agent].hub;
  std::vector<ObservedAction> out;
  for (const Selection& s : world.selections)
    if (s.step < t && g.sees(hub, world.agents[s.agent].hub)) out.push_back({s.agent, s.step, s.task});
  return out;
}

inline LocalView local_view(AgentIndex agent, double t, const WorldState& world,
                            const CommGraph& g) {
  return {agent, visible_tasks(agent, t, world), available_tasks(agent, t, world, g),
          observed_actions(agent, t, world, g)};
}

}  // namespace mrta
