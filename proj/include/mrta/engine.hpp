#pragma once

// Discrete-time trial loop.
//
// Per step t = 1..T: spawn, fire events due by t, expire overdue pending
// tasks, plan for agents that were idle at t-1, dispatch. Event times are
// continuous; planning happens only at integer steps.

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrta/comm_graph.hpp"
#include "mrta/config.hpp"
#include "mrta/information.hpp"
#include "mrta/metrics.hpp"
#include "mrta/policies.hpp"
#include "mrta/stochastics.hpp"
#include "mrta/world.hpp"

namespace mrta {

// RNG stream ids within one trial seed.
inline constexpr std::uint64_t kTaskStream = 1;
inline constexpr std::uint64_t kPlanStream = 2;
inline constexpr std::uint64_t kTravelStream = 3;

enum class Leg : std::uint64_t { kOutbound = 0, kReturn = 1 };

/// Travel draws are keyed by (agent, task, leg) rather than drawn from a
/// shared sequence, so a given dispatch sees the same travel time under
/// every policy and topology.
inline double sample_leg(std::uint64_t seed, AgentIndex agent, TaskIndex task, Leg leg,
                         const EpanechnikovDist& d) {
  SeededRng rng(seed, combine_stream(kTravelStream,
                                     combine_stream(agent, combine_stream(task, static_cast<std::uint64_t>(leg)))));
  return epan_sample(d, rng);
}

enum class ArrivalOutcome { kCompleted, kFoundCompleted, kLate };

/// Outcome of reaching a task at `arrival`. A claimed task (in progress or
/// done) is a wasted trip; otherwise the deadline decides.
inline ArrivalOutcome resolve_arrival(const Task& task, double arrival) {
  if (task.status == TaskStatus::kCompleted || task.status == TaskStatus::kInProgress) {
    return ArrivalOutcome::kFoundCompleted;
  }
  if (arrival > task.window_end) return ArrivalOutcome::kLate;
  return ArrivalOutcome::kCompleted;
}

/// Forward time including any wait for the window to open.
inline double forward_time(double dispatch_t, double tau, double window_start) {
  return tau + std::max(window_start - dispatch_t - tau, 0.0);
}

struct StepTrace {
  std::size_t t = 0;
  bool planned = false;
  double planning_wall_time = 0.0;
  std::vector<std::pair<AgentIndex, TaskIndex>> new_assignments;
  std::vector<TaskIndex> completions;
  std::vector<TaskIndex> expirations;
};

struct TrialOptions {
  bool keep_history = false;          // fill TrialResult::actions / at_hub / steps
  std::ostream* trace_log = nullptr;  // one JSON object per step
};

struct TrialResult {
  TrialRecord record;
  std::vector<Task> tasks;
  std::vector<StepTrace> steps;
  // actions[t][i] = a_i(t) and at_hub[t][i] = (p_i(t) is the hub), t = 0..T.
  std::vector<std::vector<TaskIndex>> actions;
  std::vector<std::vector<bool>> at_hub;
  std::vector<AgentState> agents;
};

class TrialEngine {
public:
  TrialEngine(ScenarioConfig cfg, PlanFn policy, std::string policy_name)
      : cfg_(std::move(cfg)),
        policy_(std::move(policy)),
        policy_name_(std::move(policy_name)),
        graph_(make_topology(cfg_.topology, cfg_.n_depots)),
        task_rng_(cfg_.seed, kTaskStream),
        plan_rng_(cfg_.seed, kPlanStream) {
    validate(cfg_);
    world_.hubs = make_hubs(cfg_);
    world_.agents = make_agents(cfg_);
    idle_since_.assign(cfg_.n_agents, 0);
  }

  TrialResult run(const TrialOptions& opts = {}) {
    TrialResult out;
    for (Task k : generate_initial_tasks(cfg_, task_rng_)) add_task(k);
    if (opts.keep_history) snapshot(out, 0);

    for (std::size_t t = 1; t <= cfg_.horizon; ++t) {
      StepTrace st;
      st.t = t;
      world_.clock = static_cast<double>(t);
      if (auto k = maybe_spawn_task(cfg_, t, world_.tasks.size(), task_rng_)) add_task(*k);
      fire_events(static_cast<double>(t), st);
      for (Task& k : world_.tasks) {
        if (k.status == TaskStatus::kPending && k.window_end < static_cast<double>(t)) {
          k.status = TaskStatus::kExpired;
          st.expirations.push_back(k.id);
        }
      }
      if (opts.keep_history) record_hub_presence(out);
      plan(t, st);
      if (opts.keep_history) {
        record_actions(out);
        out.steps.push_back(st);
      }
      if (opts.trace_log) write_trace(*opts.trace_log, st);
      if (st.planned) step_times_.push_back(st.planning_wall_time);
    }

    for (Task& k : world_.tasks)
      if (k.status != TaskStatus::kCompleted) k.status = TaskStatus::kExpired;

    TrialRecord& r = out.record;
    r.cfg_digest = scenario_digest(cfg_);
    r.policy = policy_name_;
    r.topology = cfg_.topology_name;
    r.gamma = information_group_number(graph_);
    r.seed = cfg_.seed;
    r.n_tasks = world_.tasks.size();
    for (const Task& k : world_.tasks) r.n_completed += k.status == TaskStatus::kCompleted;
    r.fraction_late = fraction_late(r.n_tasks, r.n_completed);
    r.welfare = static_cast<double>(r.n_completed);
    r.per_step_times = step_times_;
    r.mean_planning_time = mean(step_times_);
    r.p_new = cfg_.p_new;
    r.window_w = cfg_.window_w;
    r.n_depots = cfg_.n_depots;
    r.n_agents = cfg_.n_agents;
    r.conflict_level = to_string(cfg_.conflict_level);
    out.tasks = world_.tasks;
    out.agents = world_.agents;
    return out;
  }

  const CommGraph& graph() const { return graph_; }

private:
  enum class EventKind { kArrive = 0, kServiceComplete = 1, kReturned = 2, kAbort = 3 };

  struct Event {
    double time;
    AgentIndex agent;
    EventKind kind;
    // Later events compare greater; ties go to the lower agent index.
    bool operator>(const Event& o) const {
      if (time != o.time) return time > o.time;
      return agent > o.agent;
    }
  };

  void add_task(Task k) {
    world_.add_task(k);
    std::vector<bool> vis(world_.hubs.size());
    for (const Hub& h : world_.hubs) vis[h.id] = h.senses(k.location);
    visible_.push_back(std::move(vis));
  }

  void set_action(AgentState& a, double step, TaskIndex k) {
    a.action = k;
    a.action_history.emplace_back(step, k);
  }

  void fire_events(double now, StepTrace& st) {
    while (!events_.empty() && events_.top().time <= now) {
      const Event ev = events_.top();
      events_.pop();
      AgentState& a = world_.agents[ev.agent];
      switch (ev.kind) {
        case EventKind::kArrive: {
          Task& k = world_.tasks[a.action];
          const auto outcome = resolve_arrival(k, ev.time);
          const double tau_back = return_leg_[ev.agent];
          if (outcome != ArrivalOutcome::kCompleted) {
            start_return(a, ev.time + tau_back);
            break;
          }
          const double service = std::max(ev.time, k.window_start);
          k.status = TaskStatus::kInProgress;
          if (service <= ev.time) {
            complete(k, service, st);
            start_return(a, service + tau_back);
          } else {
            a.mode = AgentMode::kWaiting;
            a.service_at = service;
            events_.push({service, ev.agent, EventKind::kServiceComplete});
          }
          break;
        }
        case EventKind::kServiceComplete:
          complete(world_.tasks[a.action], ev.time, st);
          start_return(a, ev.time + return_leg_[ev.agent]);
          break;
        case EventKind::kAbort:
          start_return(a, ev.time + (ev.time - a.dispatched_at));
          break;
        case EventKind::kReturned:
          a.mode = AgentMode::kIdle;
          set_action(a, now, kIdleAction);
          idle_since_[ev.agent] = static_cast<std::size_t>(now);
          break;
      }
    }
  }

  void complete(Task& k, double at, StepTrace& st) {
    k.status = TaskStatus::kCompleted;
    k.completed_at = at;
    st.completions.push_back(k.id);
  }

  void start_return(AgentState& a, double at) {
    a.mode = AgentMode::kReturning;
    a.return_at = at;
    events_.push({at, a.id, EventKind::kReturned});
  }

  PlanningProblem build_problem(std::size_t t) const {
    PlanningProblem pb;
    pb.t = static_cast<double>(t);
    pb.graph = graph_;
    pb.deadline.reserve(world_.tasks.size());
    for (const Task& k : world_.tasks) pb.deadline.push_back(k.window_end);
    const double now = static_cast<double>(t);
    for (const AgentState& a : world_.agents) {
      // Only agents whose action at t-1 was idle are planned.
      if (a.mode != AgentMode::kIdle || idle_since_[a.id] >= t) continue;
      pb.agents.push_back(a.id);
      pb.hubs.push_back(a.hub);
      const Hub& hub = world_.hubs[a.hub];
      std::vector<SuccessProbTable::Entry> row;
      for (const Task& k : world_.tasks) {
        if (k.arrival > now || !visible_[k.id][a.hub] || k.window_end < now) continue;
        if (attempt_observed(world_, graph_, a.hub, k.id, now)) continue;
        row.push_back({k.id, success_probability(hub, k, now, cfg_.speed_per_step(), cfg_.scale)});
      }
      pb.probs.add_row(a.id, std::move(row));
    }
    return pb;
  }

  void plan(std::size_t t, StepTrace& st) {
    PlanningProblem pb = build_problem(t);
    if (pb.size() == 0) return;
    const auto start = std::chrono::steady_clock::now();
    const AssignmentProfile x = policy_(pb, plan_rng_);
    const auto stop = std::chrono::steady_clock::now();
    st.planned = true;
    st.planning_wall_time = std::chrono::duration<double>(stop - start).count();

    if (x.choices.size() != pb.size()) throw std::logic_error("policy returned a profile of the wrong size");
    for (std::size_t i = 0; i < pb.size(); ++i) {
      const TaskIndex k = x.choices[i];
      if (k == kIdleAction) continue;
      if (std::isnan(pb.probs.at(pb.agents[i], k))) {
        throw std::logic_error("policy chose a task outside the agent's available set");
      }
      dispatch(pb.agents[i], k, t);
      st.new_assignments.emplace_back(pb.agents[i], k);
    }
  }

  void dispatch(AgentIndex i, TaskIndex k, std::size_t t) {
    AgentState& a = world_.agents[i];
    const Task& task = world_.tasks[k];
    const double now = static_cast<double>(t);
    const double mu = mean_travel_time(world_.hubs[a.hub], task.location, cfg_.speed_per_step());
    const auto dist = travel_distribution(mu, cfg_.scale);
    const double tau = sample_leg(cfg_.seed, i, k, Leg::kOutbound, dist);
    return_leg_.resize(world_.agents.size());
    return_leg_[i] = sample_leg(cfg_.seed, i, k, Leg::kReturn, dist);

    world_.record_selection(i, now, k);
    set_action(a, now, k);
    a.mode = AgentMode::kEnRoute;
    a.dispatched_at = now;
    a.arrive_at = now + tau;
    if (cfg_.abort_on_expiry && a.arrive_at > task.window_end) {
      events_.push({task.window_end, i, EventKind::kAbort});
    } else {
      events_.push({a.arrive_at, i, EventKind::kArrive});
    }
  }

  void snapshot(TrialResult& out, std::size_t) {
    out.at_hub.emplace_back(world_.agents.size(), true);
    out.actions.emplace_back(world_.agents.size(), kIdleAction);
  }

  void record_hub_presence(TrialResult& out) {
    std::vector<bool> hub(world_.agents.size());
    for (const AgentState& a : world_.agents) hub[a.id] = a.mode == AgentMode::kIdle;
    out.at_hub.push_back(std::move(hub));
  }

  void record_actions(TrialResult& out) {
    std::vector<TaskIndex> act(world_.agents.size());
    for (const AgentState& a : world_.agents) act[a.id] = a.action;
    out.actions.push_back(std::move(act));
  }

  void write_trace(std::ostream& os, const StepTrace& st) {
    nlohmann::json j = {{"t", st.t},
                        {"planned", st.planned},
                        {"planning_wall_time_s", st.planning_wall_time},
                        {"completions", st.completions},
                        {"expirations", st.expirations}};
    nlohmann::json assigned = nlohmann::json::array();
    for (const auto& [i, k] : st.new_assignments) assigned.push_back({i, k});
    j["new_assignments"] = assigned;
    os << j.dump() << '\n';
  }

  ScenarioConfig cfg_;
  PlanFn policy_;
  std::string policy_name_;
  CommGraph graph_;
  SeededRng task_rng_;
  SeededRng plan_rng_;
  WorldState world_;
  std::vector<std::vector<bool>> visible_;  // visible_[task][hub]
  std::vector<std::size_t> idle_since_;     // step at which the agent last became idle
  std::vector<double> return_leg_;
  std::vector<double> step_times_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
};

inline TrialResult run_trial_detailed(const ScenarioConfig& cfg, const std::string& policy,
                                      const TrialOptions& opts = {}) {
  TrialEngine engine(cfg, make_policy(policy, {cfg.ibr_max_rounds}), policy);
  return engine.run(opts);
}

inline TrialRecord run_trial(const ScenarioConfig& cfg, const std::string& policy) {
  return run_trial_detailed(cfg, policy).record;
}

}  // namespace mrta
