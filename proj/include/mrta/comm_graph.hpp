#pragma once

// Directed communication graph over hubs.
//
// An edge (observer, observed) means agents at `observer` see the actions of
// agents at `observed`. Self-observation is implicit and never stored.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mrta {

using HubIndex = std::size_t;

struct Edge {
  HubIndex observer = 0;
  HubIndex observed = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class InvalidTopology : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class CommGraph {
public:
  CommGraph() = default;
  explicit CommGraph(std::size_t n_hubs) : n_(n_hubs), adj_(n_hubs * n_hubs, false) {}

  std::size_t n_hubs() const noexcept { return n_; }

  void add(Edge e) {
    check(e);
    if (e.observer != e.observed) adj_[e.observer * n_ + e.observed] = true;
  }

  void remove(Edge e) {
    check(e);
    if (!observes(e.observer, e.observed) || e.observer == e.observed) {
      throw InvalidTopology("edge " + std::to_string(e.observer) + "->" +
                            std::to_string(e.observed) + " is not in the graph");
    }
    adj_[e.observer * n_ + e.observed] = false;
  }

  /// Stored edge test; false on the diagonal.
  bool observes(HubIndex observer, HubIndex observed) const {
    return adj_[observer * n_ + observed];
  }

  /// Observation including the implicit self-loop.
  bool sees(HubIndex observer, HubIndex observed) const {
    return observer == observed || observes(observer, observed);
  }

  std::size_t edge_count() const {
    return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), true));
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (HubIndex a = 0; a < n_; ++a)
      for (HubIndex b = 0; b < n_; ++b)
        if (observes(a, b)) out.push_back({a, b});
    return out;
  }

  /// Hubs whose actions `h` observes (its incoming information).
  std::vector<HubIndex> in_neighbors(HubIndex h) const {
    std::vector<HubIndex> out;
    for (HubIndex o = 0; o < n_; ++o)
      if (observes(h, o)) out.push_back(o);
    return out;
  }

  friend bool operator==(const CommGraph&, const CommGraph&) = default;

private:
  void check(Edge e) const {
    if (e.observer >= n_ || e.observed >= n_) {
      throw InvalidTopology("edge " + std::to_string(e.observer) + "->" +
                            std::to_string(e.observed) + " out of range for " +
                            std::to_string(n_) + " hubs");
    }
  }

  std::size_t n_ = 0;
  std::vector<bool> adj_;
};

enum class TopologyKind { kComplete, kStar, kRing, kEmpty, kEdgeRemoval, kExplicit };

/// Named topology. `center` is used by kStar, `edges` by kEdgeRemoval (edges
/// deleted from the complete graph, in order) and kExplicit (edges kept).
struct TopologySpec {
  TopologyKind kind = TopologyKind::kComplete;
  HubIndex center = 0;
  std::vector<Edge> edges;

  friend bool operator==(const TopologySpec&, const TopologySpec&) = default;
};

/// The directed removal sequence taking five hubs from one information group
/// to four; removing every edge then gives five. In information-flow notation
/// (1-based, a->b is the stored edge (observer b, observed a)) the removals
/// are 1->2, 3->1 and 4->3. Removing 3->4 as the third edge instead would
/// merge hubs 1 and 4 and leave three groups.
inline const std::vector<Edge>& directed_removal_sequence() {
  static const std::vector<Edge> seq = {{1, 0}, {0, 2}, {2, 3}};
  return seq;
}

inline CommGraph make_complete(std::size_t n) {
  CommGraph g(n);
  for (HubIndex a = 0; a < n; ++a)
    for (HubIndex b = 0; b < n; ++b)
      if (a != b) g.add({a, b});
  return g;
}

inline CommGraph make_topology(const TopologySpec& spec, std::size_t n_hubs) {
  if (n_hubs == 0) throw InvalidTopology("topology needs at least one hub");
  switch (spec.kind) {
    case TopologyKind::kComplete:
      return make_complete(n_hubs);
    case TopologyKind::kEmpty:
      return CommGraph(n_hubs);
    case TopologyKind::kStar: {
      if (spec.center >= n_hubs) {
        throw InvalidTopology("star center " + std::to_string(spec.center) + " out of range");
      }
      CommGraph g(n_hubs);
      for (HubIndex h = 0; h < n_hubs; ++h) {
        if (h == spec.center) continue;
        g.add({spec.center, h});
        g.add({h, spec.center});
      }
      return g;
    }
    case TopologyKind::kRing: {
      CommGraph g(n_hubs);
      if (n_hubs == 1) return g;
      for (HubIndex h = 0; h < n_hubs; ++h) {
        const HubIndex next = (h + 1) % n_hubs;
        g.add({h, next});
        g.add({next, h});
      }
      return g;
    }
    case TopologyKind::kEdgeRemoval: {
      CommGraph g = make_complete(n_hubs);
      for (const Edge& e : spec.edges) g.remove(e);
      return g;
    }
    case TopologyKind::kExplicit: {
      CommGraph g(n_hubs);
      for (const Edge& e : spec.edges) {
        if (e.observer == e.observed) throw InvalidTopology("self-loop in explicit edge list");
        g.add(e);
      }
      return g;
    }
  }
  throw InvalidTopology("unknown topology kind");
}

/// Two hubs share an information group when they observe each other and
/// observe the same hubs outside the pair. This relation is an equivalence,
/// so its classes partition the hubs.
inline bool same_information_group(const CommGraph& g, HubIndex a, HubIndex b) {
  if (a == b) return true;
  if (!g.observes(a, b) || !g.observes(b, a)) return false;
  for (HubIndex o = 0; o < g.n_hubs(); ++o) {
    if (o == a || o == b) continue;
    if (g.observes(a, o) != g.observes(b, o)) return false;
  }
  return true;
}

/// Group label per hub, labels numbered in order of first appearance.
inline std::vector<std::size_t> information_groups(const CommGraph& g) {
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(g.n_hubs(), kUnset);
  std::size_t next = 0;
  for (HubIndex h = 0; h < g.n_hubs(); ++h) {
    if (label[h] != kUnset) continue;
    label[h] = next;
    for (HubIndex o = h + 1; o < g.n_hubs(); ++o)
      if (label[o] == kUnset && same_information_group(g, h, o)) label[o] = next;
    ++next;
  }
  return label;
}

inline std::size_t information_group_number(const CommGraph& g) {
  const auto labels = information_groups(g);
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

}  // namespace mrta
