#include <sstream>

#include <gtest/gtest.h>

#include "sedlqr/error.h"
#include "sedlqr/topology.h"

namespace sedlqr {
namespace {

void ExpectMetric(const Topology& t) {
  const int n = t.agent_count();
  for (int i = 0; i < n; ++i) {
    EXPECT_EQ(t.distance(i, i), 0);
    for (int j = 0; j < n; ++j) {
      EXPECT_EQ(t.distance(i, j), t.distance(j, i));
      if (!t.reachable(i, j)) continue;
      for (int k = 0; k < n; ++k) {
        if (t.reachable(i, k) && t.reachable(k, j)) {
          EXPECT_LE(t.distance(i, j), t.distance(i, k) + t.distance(k, j));
        }
      }
    }
  }
}

TEST(Cycle, Distances) {
  const Topology t = Topology::Cycle(6, 1, 1);
  EXPECT_EQ(t.distance(0, 3), 3);
  EXPECT_EQ(t.distance(0, 5), 1);
  ExpectMetric(t);
}

TEST(Cycle, ClosedFormAllPairs) {
  for (int n : {3, 7, 100}) {
    const Topology t = Topology::Cycle(n, 1, 1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int d = std::abs(i - j);
        EXPECT_EQ(t.distance(i, j), std::min(d, n - d));
      }
    }
  }
  EXPECT_EQ(Topology::Cycle(100, 1, 1).diameter(), 50);
}

TEST(Cycle, Triangle) {
  const Topology t = Topology::Cycle(3, 1, 1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(t.distance(i, j), i == j ? 0 : 1);
  }
}

TEST(Cycle, TooSmall) {
  try {
    Topology::Cycle(2, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidTopology);
    EXPECT_EQ(e.name(), "invalid-topology");
  }
}

TEST(Grid, Distances) {
  EXPECT_EQ(Topology::Grid(2, 2, 1, 1).distance(0, 3), 2);
  const Topology g = Topology::Grid(10, 10, 1, 1);
  EXPECT_EQ(g.agent_count(), 100);
  EXPECT_EQ(g.diameter(), 18);
  for (int a = 0; a < 100; ++a) {
    for (int b = 0; b < 100; ++b) {
      EXPECT_EQ(g.distance(a, b), std::abs(a / 10 - b / 10) + std::abs(a % 10 - b % 10));
    }
  }
  EXPECT_EQ(Topology::Grid(1, 5, 1, 1).distance(0, 4), 4);
  EXPECT_THROW(Topology::Grid(0, 3, 1, 1), Error);
  ExpectMetric(Topology::Grid(4, 5, 1, 1));
}

TEST(EdgeList, PathStarEmpty) {
  const Topology path =
      Topology::FromEdgeList(4, {{0, 1}, {1, 2}, {2, 3}}, {1, 1, 1, 1}, {1, 1, 1, 1});
  EXPECT_EQ(path.distance(0, 3), 3);

  const Topology empty = Topology::FromEdgeList(3, {}, {1, 1, 1}, {1, 1, 1});
  EXPECT_FALSE(empty.connected());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) EXPECT_EQ(empty.distance(i, j), Topology::kUnreachable);
    }
  }

  const Topology star = Topology::FromEdgeList(
      5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, std::vector<int>(5, 1), std::vector<int>(5, 1));
  EXPECT_EQ(star.distance(1, 2), 2);
  ExpectMetric(star);
}

TEST(EdgeList, DuplicatesAndBadEdges) {
  const Topology t =
      Topology::FromEdgeList(3, {{0, 1, 2.0}, {1, 0, 5.0}, {1, 2}}, {1, 1, 1}, {1, 1, 1});
  ASSERT_EQ(t.edges().size(), 2u);
  EXPECT_DOUBLE_EQ(t.edges()[0].weight, 2.0);
  try {
    Topology::FromEdgeList(3, {{0, 3}}, {1, 1, 1}, {1, 1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidEdge);
  }
  EXPECT_THROW(Topology::FromEdgeList(3, {{0, 1}}, {1, 1}, {1, 1, 1}), Error);
}

TEST(Topology, HeterogeneousDims) {
  const Topology t = Topology::Cycle(4, 1, 1).WithDims({1, 2, 3, 1}, {0, 1, 2, 1});
  EXPECT_EQ(t.n_x(), 7);
  EXPECT_EQ(t.n_u(), 4);
  EXPECT_EQ(t.state_offset(2), 3);
  EXPECT_EQ(t.input_offset(3), 3);
  EXPECT_THROW(t.distance(0, 4), Error);
}

TEST(EdgeListFile, RoundTrip) {
  std::istringstream in("# bus data\nN=4\n0 1 0.5\n1 2\n\n2 3 1e-6\n");
  const EdgeList el = ParseEdgeList(in);
  EXPECT_EQ(el.n, 4);
  ASSERT_EQ(el.edges.size(), 3u);
  EXPECT_DOUBLE_EQ(el.edges[2].weight, 1e-6);
  const Topology t = Topology::FromEdgeList(el.n, el.edges, {1, 1, 1, 1}, {1, 1, 1, 1});
  std::ostringstream out;
  WriteEdgeList(out, t);
  std::istringstream back(out.str());
  const EdgeList el2 = ParseEdgeList(back);
  ASSERT_EQ(el2.edges.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(el2.edges[k].i, el.edges[k].i);
    EXPECT_EQ(el2.edges[k].weight, el.edges[k].weight);
  }
  std::istringstream bad("0 1\n");
  EXPECT_THROW(ParseEdgeList(bad), Error);
}

}  // namespace
}  // namespace sedlqr
