#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "mprecon/topology.hpp"

using namespace mprecon;

TEST(Gnp, DefaultEdgeProbability) {
  EXPECT_NEAR(default_edge_prob(10), 0.4605, 1e-4);
  EXPECT_DOUBLE_EQ(default_edge_prob(2), std::log(2.0));
}

TEST(Gnp, SameSeedSameGraph) {
  EXPECT_EQ(gen_gnp(30, 0.2, 7).adjacency, gen_gnp(30, 0.2, 7).adjacency);
  EXPECT_NE(gen_gnp(30, 0.2, 7).adjacency, gen_gnp(30, 0.2, 8).adjacency);
}

TEST(Gnp, ConnectedAndSimple) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Graph g = gen_gnp(40, default_edge_prob(40), seed);
    ASSERT_TRUE(is_connected(g.adjacency));
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
      const auto& nb = g.adjacency[v];
      ASSERT_EQ(std::set<std::uint32_t>(nb.begin(), nb.end()).size(), nb.size());
      for (auto u : nb) {
        ASSERT_NE(u, v);
        ASSERT_NE(std::find(g.adjacency[u].begin(), g.adjacency[u].end(), v), g.adjacency[u].end());
      }
    }
  }
}

TEST(Gnp, MeanDegree) {
  double total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) total += 2.0 * gen_gnp(100, default_edge_prob(100), seed).edge_count() / 100;
  const double mean = total / 100;
  // Expected degree (n-1)p = 99 * 2 ln(100) / 100.
  EXPECT_NEAR(mean, 2 * std::log(100.0), 0.1 * 2 * std::log(100.0));
}

TEST(Gnp, DisconnectedAfterRetries) {
  try {
    gen_gnp(50, 0.001, 1, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::disconnected_after_retries);
  }
}

TEST(Trees, StarAndCompleteShapes) {
  const RootedTree star = star_tree(6);
  EXPECT_EQ(star.edge_count(), 6u);
  EXPECT_EQ(tree_height(star), 1u);
  EXPECT_EQ(star.party_leaf.size(), 6u);
  const RootedTree bin = complete_tree(2, 3);
  EXPECT_EQ(bin.adjacency.size(), 15u);
  EXPECT_EQ(bin.edge_count(), 14u);
  EXPECT_EQ(tree_height(bin), 3u);
  EXPECT_EQ(bin.party_leaf.size(), 8u);
}

TEST(Trees, RandomTreesAreValid) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const RootedTree t = random_tree(1 + rng.below(40), rng);
    ASSERT_NO_THROW(validate_tree(t));
  }
}

TEST(Trees, RejectsCycles) {
  RootedTree t;
  t.adjacency = adjacency_from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
  t.root = 0;
  t.party_leaf = {1};
  try {
    validate_tree(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::malformed_tree);
  }
}

TEST(TopologyFile, RoundTrip) {
  const Graph g = gen_gnp(12, 0.4, 3);
  std::stringstream ss;
  write_topology(ss, g.adjacency);
  EXPECT_EQ(read_topology(ss).adjacency, g.adjacency);
}

TEST(TopologyFile, ParsesCommentsAndRejectsGarbage) {
  std::istringstream ok("# triangle\nn 3\n0 1\n1 2\n# tail\n2 0\n");
  EXPECT_EQ(read_topology(ok).edge_count(), 3u);
  std::istringstream bad("n 3\n0 7\n");
  EXPECT_THROW(read_topology(bad), Error);
}
