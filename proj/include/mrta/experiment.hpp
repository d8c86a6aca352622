#pragma once

// Parameter sweeps and the topology study: many paired trials fanned out
// over a worker pool, written as CSV in a fixed order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mrta/config.hpp"
#include "mrta/engine.hpp"
#include "mrta/metrics.hpp"

namespace mrta {

struct SweepSpec {
  ScenarioConfig base;
  std::string axis;  // p_new, window_w, fleet, conflict_level, topology
  std::vector<Json> values;
  std::size_t trials = 100;
  std::vector<std::string> policies = {"ibr", "edd", "hungarian"};
  std::string output_path;
  std::size_t workers = 1;
};

/// Depot/drone pairs of the fleet sweep.
inline const std::vector<std::string>& fleet_presets() {
  static const std::vector<std::string> presets = {"5/15", "5/50", "5/100", "6/60", "10/100"};
  return presets;
}

inline void apply_axis(ScenarioConfig& cfg, const std::string& axis, const Json& value) {
  try {
    if (axis == "p_new") {
      cfg.p_new = value.get<double>();
    } else if (axis == "window_w") {
      cfg.window_w = value.get<double>();
    } else if (axis == "fleet") {
      const auto s = value.get<std::string>();
      const auto slash = s.find('/');
      if (slash == std::string::npos) throw InvalidConfig("fleet value must look like 'depots/drones', got " + s);
      cfg.n_depots = std::stoul(s.substr(0, slash));
      cfg.n_agents = std::stoul(s.substr(slash + 1));
      if (cfg.topology.kind == TopologyKind::kStar && cfg.topology.center >= cfg.n_depots) cfg.topology.center = 0;
    } else if (axis == "conflict_level") {
      cfg.conflict_level = parse_conflict_level(value.get<std::string>());
    } else if (axis == "topology") {
      const auto name = value.get<std::string>();
      cfg.topology = parse_topology(name);
      cfg.topology_name = name;
    } else {
      throw InvalidConfig("unknown sweep axis '" + axis + "'");
    }
  } catch (const Json::exception& e) {
    throw InvalidConfig("sweep value for axis '" + axis + "': " + e.what());
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidConfig*>(&e)) throw;
    throw InvalidConfig("sweep value for axis '" + axis + "': " + e.what());
  }
}

inline SweepSpec sweep_from_json(const Json& j) {
  SweepSpec spec;
  try {
    detail::reject_unknown(j, "<sweep>", {"base", "axis", "values", "trials", "policies", "output", "workers"});
    if (auto b = j.find("base"); b != j.end()) spec.base = scenario_from_json(*b);
    detail::read(j, "axis", spec.axis);
    if (auto v = j.find("values"); v != j.end()) spec.values = v->get<std::vector<Json>>();
    detail::read(j, "trials", spec.trials);
    detail::read(j, "policies", spec.policies);
    detail::read(j, "output", spec.output_path);
    detail::read(j, "workers", spec.workers);
  } catch (const Json::exception& e) {
    throw InvalidConfig(std::string("sweep spec: ") + e.what());
  }
  return spec;
}

inline SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open sweep spec '" + path + "'");
  try {
    return sweep_from_json(Json::parse(in, nullptr, true, true));
  } catch (const Json::exception& e) {
    throw InvalidConfig("sweep spec '" + path + "': " + e.what());
  }
}

/// One trial to run; seeds are base seed + trial index, shared by every
/// policy and axis value.
struct TrialJob {
  ScenarioConfig cfg;
  std::string policy;
};

inline std::vector<TrialRecord> run_jobs(const std::vector<TrialJob>& jobs, std::size_t workers) {
  std::vector<TrialRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out[i] = run_trial(jobs[i].cfg, jobs[i].policy);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, jobs.size()));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline void validate(const SweepSpec& spec) {
  if (spec.trials < 1) throw InvalidConfig("trials must be at least 1");
  if (spec.values.empty()) throw InvalidConfig("sweep needs at least one axis value");
  if (spec.policies.empty()) throw InvalidConfig("sweep needs at least one policy");
  for (const auto& p : spec.policies) {
    if (p == "scoba") throw PolicyUnavailable("policy 'scoba' is registered but not implemented");
    (void)make_policy(p);
  }
  for (const auto& v : spec.values) {
    ScenarioConfig cfg = spec.base;
    apply_axis(cfg, spec.axis, v);
    validate(cfg);
  }
}

/// Rows ordered by axis value, then policy, then trial.
inline std::vector<TrialJob> sweep_jobs(const SweepSpec& spec) {
  validate(spec);
  std::vector<TrialJob> jobs;
  for (const auto& v : spec.values) {
    ScenarioConfig cfg = spec.base;
    apply_axis(cfg, spec.axis, v);
    for (const auto& policy : spec.policies) {
      for (std::size_t trial = 0; trial < spec.trials; ++trial) {
        ScenarioConfig c = cfg;
        c.seed = spec.base.seed + trial;
        jobs.push_back({std::move(c), policy});
      }
    }
  }
  return jobs;
}

inline std::vector<TrialRecord> run_sweep(const SweepSpec& spec) {
  return run_jobs(sweep_jobs(spec), spec.workers);
}

/// Graphs of the topology study: the directed family directed:1..5 (one
/// information group per step of the removal sequence) and the undirected
/// family.
inline std::vector<std::string> topology_study_graphs(std::size_t n_hubs) {
  std::vector<std::string> names;
  if (n_hubs == 5) {
    for (int g = 1; g <= 5; ++g) names.push_back("directed:" + std::to_string(g));
  }
  for (const char* n : {"complete", "star", "ring", "empty"}) names.emplace_back(n);
  return names;
}

inline SweepSpec topology_study_spec(const SweepSpec& base_spec) {
  SweepSpec spec = base_spec;
  spec.axis = "topology";
  spec.values.clear();
  for (const auto& name : topology_study_graphs(spec.base.n_depots)) spec.values.emplace_back(name);
  return spec;
}

inline std::vector<TrialRecord> run_topology_study(const SweepSpec& base_spec) {
  return run_sweep(topology_study_spec(base_spec));
}

inline void write_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << csv_header() << '\n';
  for (const auto& r : records) os << csv_row(r) << '\n';
}

inline void write_csv(const std::string& path, const std::vector<TrialRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out, records);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace mrta
