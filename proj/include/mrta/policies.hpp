#pragma once

// Allocation policies for idle agents: iterative best response (IBR),
// earliest due date (EDD), per-group Hungarian matching, and a uniform
// random floor.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mrta/comm_graph.hpp"
#include "mrta/hungarian.hpp"
#include "mrta/information.hpp"
#include "mrta/stochastics.hpp"
#include "mrta/world.hpp"

namespace mrta {

/// p_ik(t) = F_hk(deadline - t) for the agent's hub h; zero once the
/// deadline has been reached.
inline double success_probability(const Hub& hub, const Task& task, double t, double speed_per_step,
                                  ScaleConvention conv = ScaleConvention::kHalfWidth) {
  const double slack = task.window_end - t;
  if (slack <= 0.0) return 0.0;
  const double mu = mean_travel_time(hub, task.location, speed_per_step);
  return epan_cdf(travel_distribution(mu, conv), slack);
}

/// p_ik(t) for every (idle agent, available task) pair. Rows follow the
/// order of `agents`; each row is sorted by task index.
class SuccessProbTable {
public:
  struct Entry {
    TaskIndex task;
    double p;
  };

  void add_row(AgentIndex agent, std::vector<Entry> row) {
    std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.task < b.task; });
    row_of_[agent] = rows_.size();
    rows_.push_back(std::move(row));
  }

  /// Probability for (agent, task); NaN when the pair is absent.
  double at(AgentIndex agent, TaskIndex task) const {
    const auto it = row_of_.find(agent);
    if (it == row_of_.end()) return std::numeric_limits<double>::quiet_NaN();
    const auto& row = rows_[it->second];
    const auto e = std::lower_bound(row.begin(), row.end(), task,
                                    [](const Entry& a, TaskIndex k) { return a.task < k; });
    if (e == row.end() || e->task != task) return std::numeric_limits<double>::quiet_NaN();
    return e->p;
  }

  const std::vector<Entry>& row(std::size_t local) const { return rows_[local]; }
  std::size_t size() const { return rows_.size(); }

private:
  std::map<AgentIndex, std::size_t> row_of_;
  std::vector<std::vector<Entry>> rows_;
};

/// Snapshot handed to a policy at one planning step. Entries of `agents`,
/// `hubs` and `probs` rows are parallel; `probs.row(i)` lists exactly the
/// tasks available to agents[i].
struct PlanningProblem {
  double t = 0.0;
  std::vector<AgentIndex> agents;  // idle agents, ascending
  std::vector<HubIndex> hubs;
  SuccessProbTable probs;
  std::vector<double> deadline;  // indexed by TaskIndex
  CommGraph graph;

  std::size_t size() const { return agents.size(); }
  bool observes(std::size_t i, std::size_t j) const { return graph.sees(hubs[i], hubs[j]); }
};

/// Choice per idle agent, parallel to PlanningProblem::agents.
struct AssignmentProfile {
  std::vector<TaskIndex> choices;

  explicit AssignmentProfile(std::size_t n = 0) : choices(n, kIdleAction) {}
  friend bool operator==(const AssignmentProfile&, const AssignmentProfile&) = default;
};

namespace detail {

inline double row_prob(const SuccessProbTable& probs, std::size_t local, TaskIndex k) {
  const auto& row = probs.row(local);
  const auto e = std::lower_bound(row.begin(), row.end(), k,
                                  [](const SuccessProbTable::Entry& a, TaskIndex t) { return a.task < t; });
  return (e != row.end() && e->task == k) ? e->p : std::numeric_limits<double>::quiet_NaN();
}

// Best success probability among agents other than `self` that `self`
// observes and that currently choose `k`.
inline double best_other(const PlanningProblem& pb, const AssignmentProfile& x, std::size_t self,
                         TaskIndex k) {
  double best = 0.0;
  for (std::size_t j = 0; j < pb.size(); ++j) {
    if (j == self || x.choices[j] != k || !pb.observes(self, j)) continue;
    best = std::max(best, row_prob(pb.probs, j, k));
  }
  return best;
}

}  // namespace detail

/// W_i(x) = sum over i's available tasks of the best success probability
/// among observed choosers (agent i included).
inline double local_welfare(const PlanningProblem& pb, std::size_t agent, const AssignmentProfile& x) {
  double w = 0.0;
  for (const auto& [k, p_self] : pb.probs.row(agent)) {
    double best = x.choices[agent] == k ? p_self : 0.0;
    best = std::max(best, detail::best_other(pb, x, agent, k));
    w += best;
  }
  return w;
}

/// Sum over all tasks of the best success probability among all choosers.
/// Coincides with every local welfare under the complete graph.
inline double global_welfare(const PlanningProblem& pb, const AssignmentProfile& x) {
  std::map<TaskIndex, double> best;
  for (std::size_t i = 0; i < pb.size(); ++i) {
    if (x.choices[i] == kIdleAction) continue;
    double& b = best[x.choices[i]];
    b = std::max(b, detail::row_prob(pb.probs, i, x.choices[i]));
  }
  double w = 0.0;
  for (const auto& [k, p] : best) w += p;
  return w;
}

/// U_i((k, x_-i)) - U_i((idle, x_-i)); zero for idle.
inline double marginal_utility(const PlanningProblem& pb, std::size_t agent, TaskIndex k,
                               const AssignmentProfile& x) {
  if (k == kIdleAction) return 0.0;
  const double p = detail::row_prob(pb.probs, agent, k);
  if (std::isnan(p)) return 0.0;
  return std::max(0.0, p - detail::best_other(pb, x, agent, k));
}

/// Optional instrumentation for ibr_plan.
struct IbrTrace {
  std::size_t sweeps = 0;
  bool converged = false;
  std::vector<std::size_t> order;
  std::vector<AssignmentProfile> after_switch;  // profile after every change
  std::vector<AssignmentProfile> after_sweep;
};

/// Iterative best response over the idle agents in a random order.
///
/// Each agent's scan starts from idle with utility 0; its current choice is
/// kept on ties, then the lowest task index wins. Stops after a sweep with
/// no change or after `max_rounds` sweeps.
inline AssignmentProfile ibr_plan(const PlanningProblem& pb, std::size_t max_rounds, SeededRng& rng,
                                  IbrTrace* trace = nullptr) {
  if (max_rounds < 1) throw InvalidParameter("ibr_plan: max_rounds must be at least 1");
  const std::size_t n = pb.size();
  AssignmentProfile x(n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  if (trace) trace->order = order;

  // choosers[k]: local agents currently choosing task k.
  std::map<TaskIndex, std::vector<std::size_t>> choosers;
  auto competitor = [&](std::size_t i, TaskIndex k) {
    double best = 0.0;
    const auto it = choosers.find(k);
    if (it == choosers.end()) return best;
    for (std::size_t j : it->second)
      if (j != i && pb.observes(i, j)) best = std::max(best, detail::row_prob(pb.probs, j, k));
    return best;
  };

  for (std::size_t round = 0; round < max_rounds; ++round) {
    bool changed = false;
    for (std::size_t i : order) {
      TaskIndex best_task = kIdleAction;
      double best_u = 0.0;
      const TaskIndex current = x.choices[i];
      const auto& row = pb.probs.row(i);
      if (current != kIdleAction) {
        const double u = std::max(0.0, detail::row_prob(pb.probs, i, current) - competitor(i, current));
        if (u > best_u) {
          best_task = current;
          best_u = u;
        }
      }
      for (const auto& [k, p] : row) {
        if (p <= best_u) continue;
        const double u = p - competitor(i, k);
        if (u > best_u) {
          best_task = k;
          best_u = u;
        }
      }
      if (best_task != current) {
        if (current != kIdleAction) std::erase(choosers[current], i);
        if (best_task != kIdleAction) choosers[best_task].push_back(i);
        x.choices[i] = best_task;
        changed = true;
        if (trace) trace->after_switch.push_back(x);
      }
    }
    if (trace) {
      trace->sweeps = round + 1;
      trace->after_sweep.push_back(x);
    }
    if (!changed) {
      if (trace) trace->converged = true;
      break;
    }
  }
  return x;
}

/// Earliest due date: agents in index order take the available task with
/// the smallest deadline that no agent they observe has taken this step.
inline AssignmentProfile edd_plan(const PlanningProblem& pb) {
  AssignmentProfile x(pb.size());
  for (std::size_t i = 0; i < pb.size(); ++i) {
    TaskIndex best = kIdleAction;
    for (const auto& [k, p] : pb.probs.row(i)) {
      bool taken = false;
      for (std::size_t j = 0; j < i && !taken; ++j) taken = x.choices[j] == k && pb.observes(i, j);
      if (taken) continue;
      if (best == kIdleAction || pb.deadline[k] < pb.deadline[best]) best = k;
    }
    x.choices[i] = best;
  }
  return x;
}

/// One maximum-weight matching per information group, weight p_ik(t).
/// Tasks an agent cannot see are forbidden pairs, not zero-weight ones.
inline AssignmentProfile hungarian_plan(const PlanningProblem& pb) {
  AssignmentProfile x(pb.size());
  if (pb.size() == 0) return x;
  const auto group_of_hub = information_groups(pb.graph);
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < pb.size(); ++i) members[group_of_hub[pb.hubs[i]]].push_back(i);

  for (const auto& [group, agents] : members) {
    std::vector<TaskIndex> tasks;
    for (std::size_t i : agents)
      for (const auto& e : pb.probs.row(i)) tasks.push_back(e.task);
    std::sort(tasks.begin(), tasks.end());
    tasks.erase(std::unique(tasks.begin(), tasks.end()), tasks.end());
    if (tasks.empty()) continue;

    std::vector<std::vector<double>> w(agents.size(), std::vector<double>(tasks.size()));
    for (std::size_t a = 0; a < agents.size(); ++a)
      for (std::size_t c = 0; c < tasks.size(); ++c) w[a][c] = detail::row_prob(pb.probs, agents[a], tasks[c]);

    const auto result = max_weight_assignment(w);
    for (std::size_t a = 0; a < agents.size(); ++a)
      if (result.row_to_col[a]) x.choices[agents[a]] = tasks[*result.row_to_col[a]];
  }
  return x;
}

/// Uniform over available tasks and idle.
inline AssignmentProfile random_plan(const PlanningProblem& pb, SeededRng& rng) {
  AssignmentProfile x(pb.size());
  for (std::size_t i = 0; i < pb.size(); ++i) {
    const auto& row = pb.probs.row(i);
    const auto pick = rng.below(row.size() + 1);
    if (pick < row.size()) x.choices[i] = row[pick].task;
  }
  return x;
}

class PolicyUnavailable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using PlanFn = std::function<AssignmentProfile(const PlanningProblem&, SeededRng&)>;

struct PolicyOptions {
  std::size_t ibr_max_rounds = 10;
};

inline const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names = {"ibr", "edd", "hungarian", "random", "scoba"};
  return names;
}

/// Looks a policy up by name. "scoba" is reserved but has no implementation.
inline PlanFn make_policy(std::string_view name, const PolicyOptions& opts = {}) {
  if (name == "ibr") {
    if (opts.ibr_max_rounds < 1) throw InvalidParameter("ibr_max_rounds must be at least 1");
    return [rounds = opts.ibr_max_rounds](const PlanningProblem& pb, SeededRng& rng) {
      return ibr_plan(pb, rounds, rng);
    };
  }
  if (name == "edd") return [](const PlanningProblem& pb, SeededRng&) { return edd_plan(pb); };
  if (name == "hungarian") return [](const PlanningProblem& pb, SeededRng&) { return hungarian_plan(pb); };
  if (name == "random") return [](const PlanningProblem& pb, SeededRng& rng) { return random_plan(pb, rng); };
  if (name == "scoba") throw PolicyUnavailable("policy 'scoba' is registered but not implemented");
  throw InvalidParameter("unknown policy '" + std::string(name) + "'");
}

}  // namespace mrta
