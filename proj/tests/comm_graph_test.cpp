#include "mrta/comm_graph.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "mrta/information.hpp"
#include "oracles.hpp"

namespace mrta {
namespace {

using oracle::valid_block;

std::size_t brute_force_gamma(const CommGraph& g) { return oracle::min_partition(g); }

CommGraph named(TopologyKind kind, std::size_t n, HubIndex center = 0) {
  return make_topology({kind, center, {}}, n);
}

TEST(MakeTopology, EdgeCounts) {
  EXPECT_EQ(named(TopologyKind::kComplete, 5).edge_count(), 20u);
  EXPECT_EQ(named(TopologyKind::kEmpty, 5).edge_count(), 0u);
  EXPECT_EQ(named(TopologyKind::kStar, 5, 2).edge_count(), 8u);
  EXPECT_EQ(named(TopologyKind::kRing, 5).edge_count(), 10u);
  EXPECT_EQ(make_topology({TopologyKind::kEdgeRemoval, 0, {{0, 1}}}, 5).edge_count(), 19u);
}

TEST(MakeTopology, StarIsBidirectionalCenterOnly) {
  const auto g = named(TopologyKind::kStar, 4, 1);
  for (HubIndex h : {0u, 2u, 3u}) {
    EXPECT_TRUE(g.observes(1, h));
    EXPECT_TRUE(g.observes(h, 1));
  }
  EXPECT_FALSE(g.observes(0, 2));
  EXPECT_FALSE(g.observes(3, 2));
}

TEST(MakeTopology, RingFollowsIndexOrder) {
  const auto g = named(TopologyKind::kRing, 5);
  EXPECT_TRUE(g.observes(0, 1));
  EXPECT_TRUE(g.observes(1, 0));
  EXPECT_TRUE(g.observes(4, 0));
  EXPECT_FALSE(g.observes(0, 2));
}

TEST(MakeTopology, Errors) {
  EXPECT_THROW(named(TopologyKind::kStar, 5, 5), InvalidTopology);
  EXPECT_THROW(make_topology({TopologyKind::kEdgeRemoval, 0, {{0, 7}}}, 5), InvalidTopology);
  // Removing the same edge twice is an invalid removal.
  EXPECT_THROW(make_topology({TopologyKind::kEdgeRemoval, 0, {{0, 1}, {0, 1}}}, 5), InvalidTopology);
  EXPECT_THROW(make_topology({TopologyKind::kComplete, 0, {}}, 0), InvalidTopology);
  EXPECT_THROW(make_topology({TopologyKind::kExplicit, 0, {{1, 1}}}, 3), InvalidTopology);
}

TEST(InformationGroupNumber, NamedTopologies) {
  EXPECT_EQ(information_group_number(named(TopologyKind::kComplete, 5)), 1u);
  EXPECT_EQ(information_group_number(named(TopologyKind::kEmpty, 5)), 5u);
  EXPECT_EQ(information_group_number(make_topology({TopologyKind::kEdgeRemoval, 0, {{1, 0}}}, 5)), 2u);
  EXPECT_EQ(information_group_number(named(TopologyKind::kRing, 5)), brute_force_gamma(named(TopologyKind::kRing, 5)));
  EXPECT_EQ(information_group_number(named(TopologyKind::kStar, 5)), brute_force_gamma(named(TopologyKind::kStar, 5)));
  EXPECT_EQ(information_group_number(named(TopologyKind::kComplete, 1)), 1u);
}

TEST(InformationGroupNumber, RemovalSequenceRaisesGammaOneStepAtATime) {
  const auto& seq = directed_removal_sequence();
  std::vector<std::size_t> gammas;
  for (std::size_t k = 0; k <= seq.size(); ++k) {
    const auto g = make_topology({TopologyKind::kEdgeRemoval, 0, {seq.begin(), seq.begin() + k}}, 5);
    gammas.push_back(information_group_number(g));
    EXPECT_EQ(gammas.back(), brute_force_gamma(g));
  }
  gammas.push_back(information_group_number(named(TopologyKind::kEmpty, 5)));
  EXPECT_EQ(gammas, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
}

TEST(InformationGroupNumber, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + gen() % 6;
    CommGraph g = make_complete(n);
    // Sparse, dense and near-complete graphs all appear.
    const double keep = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    for (HubIndex a = 0; a < n; ++a)
      for (HubIndex b = 0; b < n; ++b)
        if (a != b && std::uniform_real_distribution<double>(0.0, 1.0)(gen) > keep) g.remove({a, b});
    const auto gamma = information_group_number(g);
    ASSERT_EQ(gamma, brute_force_gamma(g)) << "trial " << trial;
    ASSERT_GE(gamma, 1u);
    ASSERT_LE(gamma, n);
  }
}

TEST(InformationGroups, LabelsAreValidGroups) {
  const auto g = make_topology({TopologyKind::kEdgeRemoval, 0, directed_removal_sequence()}, 5);
  const auto labels = information_groups(g);
  std::vector<std::vector<HubIndex>> parts(information_group_number(g));
  for (HubIndex h = 0; h < labels.size(); ++h) parts[labels[h]].push_back(h);
  for (const auto& p : parts) EXPECT_TRUE(valid_block(g, p));
}

TEST(Neighborhood, SelfHubAlwaysIncluded) {
  const std::vector<HubIndex> hub_of = {0, 0, 1, 1, 2, 2};
  EXPECT_EQ(neighborhood(named(TopologyKind::kEmpty, 3), 1, hub_of), (std::vector<AgentIndex>{2, 3}));
  EXPECT_EQ(neighborhood(named(TopologyKind::kComplete, 3), 1, hub_of), (std::vector<AgentIndex>{0, 1, 2, 3, 4, 5}));
}

TEST(Neighborhood, StarLeafSeesOwnHubAndCenter) {
  const std::vector<HubIndex> hub_of = {0, 1, 2, 3, 0, 1, 2, 3};
  const auto g = named(TopologyKind::kStar, 4, 0);
  // Oracle: agents whose hub is the leaf itself or the center.
  std::vector<AgentIndex> expected;
  for (AgentIndex j = 0; j < hub_of.size(); ++j)
    if (hub_of[j] == 2 || hub_of[j] == 0) expected.push_back(j);
  EXPECT_EQ(neighborhood(g, 2, hub_of), expected);
  EXPECT_EQ(neighborhood(g, 0, hub_of).size(), hub_of.size());
}

}  // namespace
}  // namespace mrta
