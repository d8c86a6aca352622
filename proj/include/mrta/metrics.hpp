#pragma once

// Per-trial records, the evaluation metrics and the CSV row schema.

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrta {

class InvalidPairing : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct TrialRecord {
  std::uint64_t cfg_digest = 0;  // scenario hash, topology and seed excluded
  std::string policy;
  std::string topology;
  std::size_t gamma = 0;
  std::uint64_t seed = 0;
  std::size_t n_tasks = 0;
  std::size_t n_completed = 0;
  double fraction_late = 0.0;
  double mean_planning_time = 0.0;  // seconds
  std::vector<double> per_step_times;
  double welfare = 0.0;  // realized completions
  // Scenario columns echoed into the CSV.
  double p_new = 0.0;
  double window_w = 0.0;
  std::size_t n_depots = 0;
  std::size_t n_agents = 0;
  std::string conflict_level;
};

/// 1 - completed / tasks, with 0 for an empty task set.
inline double fraction_late(std::size_t n_tasks, std::size_t n_completed) {
  if (n_tasks == 0) return 0.0;
  return 1.0 - static_cast<double>(n_completed) / static_cast<double>(n_tasks);
}

inline double fraction_late(const TrialRecord& r) { return fraction_late(r.n_tasks, r.n_completed); }

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Mean realized welfare under a graph over the mean under the complete
/// graph. Records must pair up by position: same scenario, same seed.
inline double efficiency_ratio(const std::vector<TrialRecord>& under_graph,
                               const std::vector<TrialRecord>& under_complete) {
  if (under_graph.empty() || under_complete.empty()) {
    throw InvalidPairing("efficiency_ratio: empty record list");
  }
  if (under_graph.size() != under_complete.size()) {
    throw InvalidPairing("efficiency_ratio: record lists differ in length");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < under_graph.size(); ++i) {
    const auto& a = under_graph[i];
    const auto& b = under_complete[i];
    if (a.cfg_digest != b.cfg_digest) throw InvalidPairing("efficiency_ratio: scenario digests differ");
    if (a.seed != b.seed) throw InvalidPairing("efficiency_ratio: seeds are not paired");
    num += a.welfare;
    den += b.welfare;
  }
  if (den == 0.0) throw InvalidPairing("efficiency_ratio: zero welfare under the complete graph");
  return num / den;
}

/// Order statistics over a sample; independent of input order.
struct Summary {
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  std::size_t n = 0;
};

inline double quantile_sorted(const std::vector<double>& s, double q) {
  if (s.empty()) return 0.0;
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

inline Summary summarize(std::vector<double> xs) {
  Summary out;
  out.n = xs.size();
  if (xs.empty()) return out;
  std::sort(xs.begin(), xs.end());
  out.mean = mean(xs);
  out.q1 = quantile_sorted(xs, 0.25);
  out.median = quantile_sorted(xs, 0.5);
  out.q3 = quantile_sorted(xs, 0.75);
  return out;
}

// CSV schema. Column order is part of the file format.
inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "policy",  "topology",      "gamma",    "seed",         "n_tasks",
      "n_completed", "fraction_late", "welfare", "mean_planning_time_s", "p_new",
      "window_w_min", "n_depots",  "n_agents", "conflict_level"};
  return cols;
}

inline constexpr std::size_t kTimingColumn = 8;

inline std::string csv_header() {
  std::string out;
  for (const auto& c : csv_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

inline std::string csv_row(const TrialRecord& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << r.policy << ',' << r.topology << ',' << r.gamma << ',' << r.seed << ',' << r.n_tasks << ','
     << r.n_completed << ',' << r.fraction_late << ',' << r.welfare << ',' << r.mean_planning_time << ','
     << r.p_new << ',' << r.window_w << ',' << r.n_depots << ',' << r.n_agents << ',' << r.conflict_level;
  return os.str();
}

}  // namespace mrta
