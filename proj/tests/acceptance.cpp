// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mrta/comm_graph.hpp"
#include "mrta/engine.hpp"
#include "mrta/experiment.hpp"
#include "mrta/hungarian.hpp"
#include "mrta/metrics.hpp"
#include "mrta/policies.hpp"
#include "mrta/stochastics.hpp"
#include "oracles.hpp"

namespace {

using namespace mrta;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string experiment(const std::string& name) { return std::string(MRTA_SOURCE_DIR) + "/experiments/" + name; }

void check_epanechnikov() {
  const auto start = Clock::now();
  const auto d = epan_from_mean(9.0);
  const double b = d.half_width;
  bool ok = epan_cdf(d, d.mu) == 0.5 && epan_cdf(d, d.mu - b) == 0.0 && epan_cdf(d, d.mu + b) == 1.0;
  const double half = epan_cdf(d, d.mu + b / 2);
  ok = ok && std::abs(half - 0.84375) <= 1e-12;

  SeededRng rng(2024, 1);
  constexpr int kN = 1'000'000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double x = epan_sample(d, rng);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / kN;
  const double sd = std::sqrt(sq / kN - mean * mean);
  const double sd_target = b / std::sqrt(5.0);
  const double mean_err = std::abs(mean - d.mu) / d.mu;
  const double sd_err = std::abs(sd - sd_target) / sd_target;
  const double secs = seconds_since(start);
  ok = ok && mean_err < 0.01 && sd_err < 0.01 && secs < 5.0;
  report(ok, "epanechnikov",
         fmt("cdf(mu+b/2)=%.15f mean_err=%.5f sd_err=%.5f time=%.2fs", half, mean_err, sd_err, secs));
}

void check_hungarian() {
  const auto start = Clock::now();
  std::mt19937_64 gen(99);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 1 + gen() % 6;
    const std::size_t cols = 1 + gen() % 6;
    std::vector<std::vector<double>> w(rows, std::vector<double>(cols));
    // Dyadic weights sum exactly, so equality is exact.
    for (auto& row : w)
      for (double& x : row) x = static_cast<double>(gen() % 1025) / 1024.0;
    if (max_weight_assignment(w).total != oracle::max_assignment(w)) ++mismatches;
  }
  const double secs = seconds_since(start);
  report(mismatches == 0 && secs < 10.0, "hungarian-oracle",
         fmt("100 instances, %d mismatches, time=%.2fs", mismatches, secs));
}

void check_ibr_properties() {
  const auto start = Clock::now();
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int decreasing = 0;
  int unconverged = 0;
  int deviations = 0;
  std::size_t max_sweeps = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 6;
    const std::size_t m = 1 + gen() % 6;
    const std::size_t hubs = 1 + gen() % 3;
    std::vector<std::vector<double>> p(n, std::vector<double>(m));
    for (auto& row : p)
      for (double& x : row) x = gen() % 5 == 0 ? std::nan("") : u(gen);
    std::vector<HubIndex> hub_of(n);
    for (auto& h : hub_of) h = gen() % hubs;
    const auto pb = oracle::make_problem(p, hub_of, make_complete(hubs));

    SeededRng rng(static_cast<std::uint64_t>(trial), kPlanStream);
    IbrTrace trace;
    const auto x = ibr_plan(pb, 10, rng, &trace);

    double prev = 0.0;
    for (const auto& profile : trace.after_switch) {
      const double w = global_welfare(pb, profile);
      if (w < prev - 1e-12) ++decreasing;
      prev = w;
    }
    prev = 0.0;
    for (const auto& profile : trace.after_sweep) {
      const double w = global_welfare(pb, profile);
      if (w < prev - 1e-12) ++decreasing;
      prev = w;
    }
    if (!trace.converged) ++unconverged;
    max_sweeps = std::max(max_sweeps, trace.sweeps);

    for (std::size_t i = 0; i < n; ++i) {
      const double current = marginal_utility(pb, i, x.choices[i], x);
      for (TaskIndex k = 0; k < m; ++k) {
        if (std::isnan(p[i][k])) continue;
        if (marginal_utility(pb, i, k, x) > current + 1e-12) {
          ++deviations;
          break;
        }
      }
    }
  }
  const double secs = seconds_since(start);
  report(decreasing == 0 && unconverged == 0 && deviations == 0 && secs < 30.0, "ibr-game-properties",
         fmt("200 instances, welfare drops=%d unconverged=%d improving deviations=%d max sweeps=%zu time=%.2fs",
             decreasing, unconverged, deviations, max_sweeps, secs));
}

void check_information_groups() {
  bool ok = information_group_number(make_topology({TopologyKind::kComplete, 0, {}}, 5)) == 1 &&
            information_group_number(make_topology({TopologyKind::kEmpty, 0, {}}, 5)) == 5;
  std::vector<std::size_t> gammas;
  for (std::size_t g = 1; g <= 5; ++g) {
    const auto graph = make_topology(parse_topology("directed:" + std::to_string(g)), 5);
    const std::size_t gamma = information_group_number(graph);
    ok = ok && gamma == oracle::min_partition(graph);
    gammas.push_back(gamma);
  }
  ok = ok && gammas == std::vector<std::size_t>{1, 2, 3, 4, 5};

  std::mt19937_64 gen(5);
  int mismatches = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen() % 6;
    CommGraph g(n);
    const auto density = gen() % 4;
    for (HubIndex a = 0; a < n; ++a)
      for (HubIndex b = 0; b < n; ++b)
        if (a != b && gen() % 4 <= density) g.add({a, b});
    mismatches += information_group_number(g) != oracle::min_partition(g);
  }
  ok = ok && mismatches == 0;
  report(ok, "information-group-number",
         fmt("removal sequence gamma=%zu,%zu,%zu,%zu,%zu; random graphs vs oracle: %d mismatches", gammas[0],
             gammas[1], gammas[2], gammas[3], gammas[4], mismatches));
}

void check_constraints() {
  const auto base = load_scenario(experiment("nominal.json"));
  int violations = 0;
  std::string first;
  for (const char* policy : {"ibr", "edd", "hungarian"}) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      ScenarioConfig cfg = base;
      cfg.seed = seed;
      TrialOptions opts;
      opts.keep_history = true;
      const auto v = oracle::constraint_violation(run_trial_detailed(cfg, policy, opts));
      if (!v.empty()) {
        if (first.empty()) first = std::string(policy) + ": " + v;
        ++violations;
      }
    }
  }
  report(violations == 0, "constraint-enforcement",
         fmt("300 nominal trials (100 per policy), %d with violations %s", violations, first.c_str()));
}

using Means = std::map<std::string, std::vector<double>>;  // policy -> mean per axis value

Means mean_fraction_late(const SweepSpec& spec, const std::vector<TrialRecord>& rows) {
  Means out;
  std::size_t i = 0;
  for (std::size_t v = 0; v < spec.values.size(); ++v) {
    for (const auto& policy : spec.policies) {
      double sum = 0.0;
      for (std::size_t t = 0; t < spec.trials; ++t) sum += rows[i++].fraction_late;
      out[policy].push_back(sum / static_cast<double>(spec.trials));
    }
  }
  return out;
}

std::string describe(const Means& m) {
  std::string s;
  for (const auto& [policy, xs] : m) {
    s += policy + "=";
    for (std::size_t i = 0; i < xs.size(); ++i) s += fmt(i ? "/%.4f" : "%.4f", xs[i]);
    s += " ";
  }
  return s;
}

std::string csv_without_timing(const std::vector<TrialRecord>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  std::istringstream in(os.str());
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells[kTimingColumn] = "-";
    for (std::size_t c = 0; c < cells.size(); ++c) out += (c ? "," : "") + cells[c];
    out += '\n';
  }
  return out;
}

void check_trends_and_costs() {
  const auto start = Clock::now();
  const auto p_spec = load_sweep(experiment("sweep_p_new.json"));
  const auto w_spec = load_sweep(experiment("sweep_window.json"));
  const auto p_rows = run_sweep(p_spec);
  const auto w_rows = run_sweep(w_spec);
  const double secs = seconds_since(start);
  const Means p = mean_fraction_late(p_spec, p_rows);
  const Means w = mean_fraction_late(w_spec, w_rows);

  bool p_ok = true;
  bool w_ok = true;
  for (const auto& policy : p_spec.policies) {
    const auto& xs = p.at(policy);
    const auto& ys = w.at(policy);
    for (std::size_t i = 1; i < xs.size(); ++i) p_ok = p_ok && xs[i] > xs[i - 1];
    for (std::size_t i = 1; i < ys.size(); ++i) w_ok = w_ok && ys[i] < ys[i - 1];
  }
  report(p_ok && secs < 600, "trend-p_new", describe(p) + fmt("time=%.1fs", secs));
  report(w_ok && secs < 600, "trend-window", describe(w));

  // Nominal: p_new = 0.5 in the first block of the p_new sweep.
  const double ibr = p.at("ibr")[0];
  const double edd = p.at("edd")[0];
  const double hun = p.at("hungarian")[0];
  report(ibr <= edd && ibr <= hun, "ibr-competitive", fmt("nominal fraction late ibr=%.4f edd=%.4f hungarian=%.4f", ibr, edd, hun));

  std::map<std::string, std::vector<double>> times;
  for (std::size_t i = 0; i < p_spec.policies.size() * p_spec.trials; ++i)
    times[p_rows[i].policy].push_back(p_rows[i].mean_planning_time);
  const double t_ibr = mean(times["ibr"]);
  const double t_edd = mean(times["edd"]);
  const double t_hun = mean(times["hungarian"]);
  auto within = [](double a, double b) { return a > 0 && b > 0 && a <= 10 * b && b <= 10 * a; };
  report(within(t_ibr, t_edd) && within(t_ibr, t_hun), "planning-cost",
         fmt("mean per-step planning time ibr=%.3gs edd=%.3gs hungarian=%.3gs", t_ibr, t_edd, t_hun));

  SweepSpec again = p_spec;
  again.workers = 2;
  const bool same = csv_without_timing(p_rows) == csv_without_timing(run_sweep(again));
  report(same, "determinism", fmt("p_new sweep rerun (%zu rows, 2 workers) identical modulo timing", p_rows.size()));
}

void check_efficiency_ratio_shape() {
  auto spec = load_sweep(experiment("topology_nominal.json"));
  spec.policies = {"ibr"};
  spec = topology_study_spec(spec);
  spec.values.resize(5);  // directed:1..5
  const auto rows = run_sweep(spec);
  std::vector<std::vector<TrialRecord>> by_graph(5);
  for (std::size_t g = 0; g < 5; ++g)
    by_graph[g].assign(rows.begin() + static_cast<std::ptrdiff_t>(g * spec.trials),
                       rows.begin() + static_cast<std::ptrdiff_t>((g + 1) * spec.trials));
  std::vector<double> ratio(5);
  bool ok = true;
  for (std::size_t g = 0; g < 5; ++g) {
    ratio[g] = efficiency_ratio(by_graph[g], by_graph[0]);
    ok = ok && by_graph[g][0].gamma == g + 1;
    if (g < 4) ok = ok && ratio[g] >= 0.95;
  }
  ok = ok && ratio[3] - ratio[4] >= 0.04;
  report(ok, "efficiency-ratio",
         fmt("ibr, 100 paired trials, gamma 1..5: %.4f %.4f %.4f %.4f %.4f (drop 4->5 %.4f)", ratio[0], ratio[1],
             ratio[2], ratio[3], ratio[4], ratio[3] - ratio[4]));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> checks = {check_epanechnikov,   check_hungarian,    check_ibr_properties,
                                                     check_information_groups, check_constraints, check_trends_and_costs,
                                                     check_efficiency_ratio_shape};
  for (const auto& check : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      report(false, "exception", e.what());
    }
  }
  std::printf("%d failing\n", failures);
  return failures == 0 ? 0 : 1;
}
