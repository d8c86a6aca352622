// mrta: run task-allocation sweeps and inspect configs from the command line.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrta/comm_graph.hpp"
#include "mrta/config.hpp"
#include "mrta/engine.hpp"
#include "mrta/experiment.hpp"

namespace {

struct SweepFlags {
  std::string spec_file;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::size_t workers = 0;
  std::vector<std::string> policies;
};

void add_sweep_flags(CLI::App* cmd, SweepFlags& f) {
  cmd->add_option("spec-file", f.spec_file, "Sweep spec (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--trials", f.trials, "Trials per (value, policy); overrides the spec");
  cmd->add_option("--seed", f.seed, "Base seed; overrides the spec")->each([&](const std::string&) { f.seed_set = true; });
  cmd->add_option("--out", f.out, "Output CSV path; overrides the spec");
  cmd->add_option("--workers", f.workers, "Concurrent trials");
  cmd->add_option("--policies", f.policies, "Policies to run, comma separated")->delimiter(',');
}

mrta::SweepSpec resolve(const SweepFlags& f) {
  mrta::SweepSpec spec = mrta::load_sweep(f.spec_file);
  if (f.trials) spec.trials = f.trials;
  if (f.seed_set) spec.base.seed = f.seed;
  if (!f.out.empty()) spec.output_path = f.out;
  if (f.workers) spec.workers = f.workers;
  if (!f.policies.empty()) spec.policies = f.policies;
  if (spec.output_path.empty()) throw mrta::InvalidConfig("no output path: set \"output\" or pass --out");
  return spec;
}

void write_results(const mrta::SweepSpec& spec, const std::vector<mrta::TrialRecord>& rows) {
  const std::filesystem::path out(spec.output_path);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  mrta::write_csv(spec.output_path, rows);
  std::cerr << "wrote " << rows.size() << " rows to " << spec.output_path << '\n';
}

// Edge list: "a->b" tokens separated by commas, whitespace or newlines,
// '#' starts a comment. Edges are observer->observed.
std::vector<mrta::Edge> parse_edge_list(const std::string& text) {
  std::vector<mrta::Edge> edges;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    line = line.substr(0, line.find('#'));
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream toks(line);
    std::string tok;
    while (toks >> tok) {
      const auto arrow = tok.find("->");
      if (arrow == std::string::npos) throw mrta::InvalidConfig("bad edge '" + tok + "', expected a->b");
      try {
        edges.push_back({std::stoul(tok.substr(0, arrow)), std::stoul(tok.substr(arrow + 2))});
      } catch (const std::logic_error&) {
        throw mrta::InvalidConfig("bad edge '" + tok + "', expected a->b");
      }
    }
  }
  return edges;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot task allocation simulator"};
  app.require_subcommand(1);

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("run-sweep", "Run a parameter sweep and write one CSV row per trial");
  add_sweep_flags(sweep, sweep_flags);

  SweepFlags topo_flags;
  auto* topo = app.add_subcommand("run-topology", "Run every policy over the topology study graphs");
  add_sweep_flags(topo, topo_flags);

  std::string config_file;
  auto* check = app.add_subcommand("validate-config", "Check a scenario config or sweep spec");
  check->add_option("file", config_file, "Config file (JSON)")->required()->check(CLI::ExistingFile);

  std::string edge_arg;
  std::size_t hubs = 0;
  auto* gamma = app.add_subcommand("gamma", "Print the information group number of a graph");
  gamma->add_option("edge-list", edge_arg,
                    "Edge list file or inline list of observer->observed edges, or a topology name")
      ->required();
  gamma->add_option("--hubs", hubs, "Number of hubs (default: largest index + 1)");

  std::string trial_config;
  std::string trial_policy;
  std::string trace_path;
  auto* trial = app.add_subcommand("run-trial", "Run one trial and print its CSV row");
  trial->add_option("config", trial_config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
  trial->add_option("--policy", trial_policy, "Policy name (default: the config's)");
  trial->add_option("--trace", trace_path, "Write one JSON line per step to this file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      const auto spec = resolve(sweep_flags);
      write_results(spec, mrta::run_sweep(spec));
    } else if (*topo) {
      const auto spec = resolve(topo_flags);
      write_results(spec, mrta::run_topology_study(spec));
    } else if (*check) {
      std::ifstream in(config_file);
      const auto j = mrta::Json::parse(in, nullptr, true, true);
      if (j.contains("base") || j.contains("axis")) {
        auto spec = mrta::sweep_from_json(j);
        if (spec.axis.empty()) spec = mrta::topology_study_spec(spec);
        mrta::validate(spec);
        std::cout << "sweep ok: axis " << spec.axis << ", " << spec.values.size() << " values x "
                  << spec.policies.size() << " policies x " << spec.trials << " trials = "
                  << spec.values.size() * spec.policies.size() * spec.trials << " rows\n";
      } else {
        const auto cfg = mrta::scenario_from_json(j);
        mrta::validate(cfg);
        const auto g = mrta::make_topology(cfg.topology, cfg.n_depots);
        std::cout << mrta::to_json(cfg).dump(2) << '\n'
                  << "gamma " << mrta::information_group_number(g) << '\n';
      }
    } else if (*gamma) {
      mrta::CommGraph g;
      std::string text = edge_arg;
      if (std::filesystem::is_regular_file(edge_arg)) {
        std::ifstream in(edge_arg);
        text.assign(std::istreambuf_iterator<char>(in), {});
      }
      bool named = !text.empty() && std::isalpha(static_cast<unsigned char>(text.front()));
      if (named) {
        if (hubs == 0) throw mrta::InvalidConfig("--hubs is required with a topology name");
        g = mrta::make_topology(mrta::parse_topology(text), hubs);
      } else {
        const auto edges = parse_edge_list(text);
        std::size_t n = hubs;
        for (const auto& e : edges) n = std::max(n, std::max(e.observer, e.observed) + 1);
        if (hubs && n > hubs) throw mrta::InvalidConfig("edge index exceeds --hubs");
        if (n == 0) throw mrta::InvalidConfig("empty edge list needs --hubs");
        g = mrta::make_topology({mrta::TopologyKind::kExplicit, 0, edges}, n);
      }
      std::cout << mrta::information_group_number(g) << '\n';
    } else if (*trial) {
      const auto cfg = mrta::load_scenario(trial_config);
      const std::string policy = trial_policy.empty() ? cfg.policy : trial_policy;
      mrta::TrialOptions opts;
      std::ofstream trace;
      if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) throw std::runtime_error("cannot write '" + trace_path + "'");
        opts.trace_log = &trace;
      }
      const auto result = mrta::run_trial_detailed(cfg, policy, opts);
      std::cout << mrta::csv_header() << '\n' << mrta::csv_row(result.record) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
