#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "dpgraph/apsp.hpp"
#include "dpgraph/errors.hpp"
#include "dpgraph/partition.hpp"
#include "oracles.hpp"

using namespace dpg;

namespace {

// Brute-force boundary: scan every arc once.
BoundarySet scan_boundary(const WeightedGraph& g, const Partition& p) {
  std::vector<std::set<VertexId>> s(p.k);
  for (const Edge& e : g.edges()) {
    const auto a = p.assignment[e.src], b = p.assignment[e.dst];
    if (a != b) {
      s[a].insert(e.src);
      s[b].insert(e.dst);
    }
  }
  BoundarySet out(p.k);
  for (std::uint32_t c = 0; c < p.k; ++c) out[c].assign(s[c].begin(), s[c].end());
  return out;
}

std::vector<DistanceBlock> closed_components(const WeightedGraph& g, const Partition& p) {
  std::vector<DistanceBlock> out;
  for (auto& comp : p.components()) out.push_back(floyd_warshall_dense(DistanceBlock::induced(g, comp)));
  return out;
}

WeightedGraph path_graph(VertexId n) {
  std::vector<Edge> e;
  for (VertexId v = 0; v + 1 < n; ++v) e.push_back({v, v + 1, 1 + v % 7});
  return WeightedGraph(n, e, false);
}

void check_cover(const Partition& p, VertexId n) {
  REQUIRE(p.assignment.size() == n);
  std::size_t total = 0;
  for (auto& c : p.components()) total += c.size();
  CHECK(total == n);
  for (auto a : p.assignment) CHECK(a < p.k);
}

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("kway_partition trivial k") {
  WeightedGraph g = gen_er(60, 0.05, 1);
  Partition one = kway_partition(g, 1, 0);
  CHECK(std::all_of(one.assignment.begin(), one.assignment.end(), [](auto a) { return a == 0; }));
  CHECK(find_boundary(g, one)[0].empty());

  Partition all = kway_partition(g, 60, 0);
  std::set<std::uint32_t> ids(all.assignment.begin(), all.assignment.end());
  CHECK(ids.size() == 60);
  BoundarySet b = find_boundary(g, all);
  std::vector<char> has_edge(60, 0);
  for (const Edge& e : g.edges()) has_edge[e.src] = has_edge[e.dst] = 1;
  for (VertexId v = 0; v < 60; ++v) CHECK((b[all.assignment[v]].size() == 1) == bool(has_edge[v]));

  CHECK_THROWS_AS(kway_partition(g, 61, 0), ArgumentError);
  CHECK_THROWS_AS(kway_partition(g, 0, 0), ArgumentError);
}

TEST_CASE("two disjoint cliques split with zero cut") {
  std::vector<Edge> e;
  for (VertexId a = 0; a < 50; ++a)
    for (VertexId b = 0; b < 50; ++b)
      if (a != b) {
        e.push_back({a, b, 1});
        e.push_back({a + 50, b + 50, 1});
      }
  WeightedGraph g(100, e);
  Partition p = kway_partition(g, 2, 3);
  std::size_t cut = 0;
  for (const Edge& x : g.edges()) cut += p.assignment[x.src] != p.assignment[x.dst];
  CHECK(cut == 0);
  for (auto& b : find_boundary(g, p)) CHECK(b.empty());
}

TEST_CASE("find_boundary small cases") {
  WeightedGraph g(2, {{0, 1, 4}});
  Partition single{{0, 0}, 1};
  CHECK(find_boundary(g, single)[0].empty());
  Partition split{{0, 1}, 2};
  BoundarySet b = find_boundary(g, split);
  CHECK(b[0] == std::vector<VertexId>{0});
  CHECK(b[1] == std::vector<VertexId>{1});
}

TEST_CASE("find_boundary matches edge scan on ER(200, 0.05)") {
  WeightedGraph g = gen_er(200, 0.05, 17);
  Partition p = kway_partition(g, 4, 17);
  CHECK(find_boundary(g, p) == scan_boundary(g, p));
}

TEST_CASE("property: partitions cover, balance and match the edge scan") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const VertexId n = 20 + static_cast<VertexId>(rng() % 1980);
    WeightedGraph g = (t % 2) ? gen_er(n, 3.0 / n, rng()) : gen_nws(n, 4, 0.02, rng());
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 16);
    Partition p = kway_partition(g, k, rng());
    check_cover(p, n);
    const double cap = std::ceil(double(n) / k) * 1.1;
    for (auto& c : p.components()) CHECK(double(c.size()) <= cap);
    CHECK(find_boundary(g, p) == scan_boundary(g, p));
  }
}

TEST_CASE("kway_partition is deterministic per seed") {
  WeightedGraph g = gen_nws(500, 6, 0.05, 2);
  CHECK(kway_partition(g, 5, 9).assignment == kway_partition(g, 5, 9).assignment);
}

TEST_CASE("boundary graph with one cross edge") {
  WeightedGraph g(4, {{0, 1, 2}, {1, 2, 9}, {2, 3, 2}});
  Partition p{{0, 0, 1, 1}, 2};
  BoundarySet b = find_boundary(g, p);
  BoundaryGraph bg = build_boundary_graph(g, p, b, closed_components(g, p));
  CHECK(bg.vertices == std::vector<VertexId>{1, 2});
  REQUIRE(bg.graph.num_edges() == 1);
  CHECK(bg.graph.edges()[0] == Edge{0, 1, 9});
}

TEST_CASE("boundary graph virtual edge carries the intra distance") {
  // Component {0,1,2} has boundary {0,2} joined internally by 0->1->2 (3+4).
  WeightedGraph g(5, {{0, 1, 3}, {1, 2, 4}, {2, 3, 1}, {4, 0, 1}});
  Partition p{{0, 0, 0, 1, 1}, 2};
  BoundarySet b = find_boundary(g, p);
  CHECK(b[0] == std::vector<VertexId>{0, 2});
  BoundaryGraph bg = build_boundary_graph(g, p, b, closed_components(g, p));
  const auto& v = bg.vertices;
  const auto x = std::find(v.begin(), v.end(), 0) - v.begin(), y = std::find(v.begin(), v.end(), 2) - v.begin();
  bool found = false;
  for (const Edge& e : bg.graph.edges())
    if (e.src == VertexId(x) && e.dst == VertexId(y)) found = e.w == 7;
  CHECK(found);
}

TEST_CASE("boundary graph keeps the minimum of cross and virtual arcs") {
  // 0 and 1 share a component and are both boundary; the direct arc 0->1:10
  // loses to nothing internally, but an intra path 0->2->1 costs 4.
  WeightedGraph g(4, {{0, 1, 10}, {0, 2, 2}, {2, 1, 2}, {1, 3, 1}, {3, 0, 1}});
  Partition p{{0, 0, 0, 1}, 2};
  BoundaryGraph bg = build_boundary_graph(g, p, find_boundary(g, p), closed_components(g, p));
  auto d = bg.graph.dense_adjacency();
  const VertexId m = bg.graph.num_vertices();
  CHECK(d[0 * m + 1] == 4);
}

TEST_CASE("boundary graph requires every intra block") {
  WeightedGraph g(4, {{0, 1, 2}, {1, 2, 9}, {2, 3, 2}});
  Partition p{{0, 0, 1, 1}, 2};
  auto intra = closed_components(g, p);
  intra.pop_back();
  CHECK_THROWS_AS(build_boundary_graph(g, p, find_boundary(g, p), intra), ConsistencyError);
}

TEST_CASE("property: boundary graph preserves boundary pair distances") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const VertexId n = 30 + static_cast<VertexId>(rng() % 371);
    WeightedGraph g = gen_er(n, 2.5 / n, rng());
    Partition p = kway_partition(g, 2 + static_cast<std::uint32_t>(rng() % 4), rng());
    BoundaryGraph bg = build_boundary_graph(g, p, find_boundary(g, p), closed_components(g, p));
    auto full = oracle::floyd(g);
    auto sub = oracle::floyd(bg.graph);
    const std::size_t m = bg.vertices.size();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        REQUIRE(sub[i * m + j] == full[std::size_t{bg.vertices[i]} * n + bg.vertices[j]]);
  }
}

TEST_CASE("boundary graph on 300 vertices, k=3") {
  WeightedGraph g = gen_er(300, 0.01, 31);
  Partition p = kway_partition(g, 3, 31);
  BoundaryGraph bg = build_boundary_graph(g, p, find_boundary(g, p), closed_components(g, p));
  auto full = oracle::floyd(g);
  auto sub = oracle::floyd(bg.graph);
  const std::size_t m = bg.vertices.size();
  bool same = true;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      same &= sub[i * m + j] == full[std::size_t{bg.vertices[i]} * 300 + bg.vertices[j]];
  CHECK(same);
}

TEST_CASE("hierarchy of a graph that fits one tile") {
  WeightedGraph g = gen_er(100, 0.05, 1);
  PartitionHierarchy h = build_hierarchy(g, 128, 0);
  REQUIRE(h.depth() == 1);
  CHECK(h.levels[0].components.size() == 1);
  CHECK(h.levels[0].terminal());
  CHECK(h.top().num_vertices() == 0);
}

TEST_CASE("hierarchy of a path cuts at most six vertices") {
  const std::uint32_t tile = 64;
  WeightedGraph g = path_graph(4 * tile);
  HierarchyOptions o;
  o.k_fn = [](std::uint32_t, std::uint32_t) { return 4u; };
  PartitionHierarchy h = build_hierarchy(g, tile, 0, o);
  REQUIRE_FALSE(h.levels[0].terminal());
  CHECK(h.levels[0].components.size() == 4);
  CHECK(h.levels[0].num_boundary() <= 6);
  CHECK(h.top().num_vertices() <= tile);
}

TEST_CASE("hierarchy of a sparse ring graph, tile 256") {
  WeightedGraph g = gen_nws(5000, 4, 0.002, 3);
  HierarchyOptions o;
  o.weighted = false;
  PartitionHierarchy h = build_hierarchy(g, 256, 3, o);
  CHECK(h.depth() >= 1);
  CHECK_FALSE(h.blocked_top);
  CHECK(h.top().num_vertices() <= 256);
  for (std::size_t l = 0; l < h.depth(); ++l) {
    const auto& lv = h.levels[l];
    for (auto& c : lv.components) CHECK(c.size() <= 256);
    if (l + 1 < h.depth()) {
      // Next level's vertices are exactly this level's boundary.
      std::vector<VertexId> bnd;
      for (auto& b : lv.boundaries)
        for (VertexId v : b) bnd.push_back(lv.vertices[v]);
      std::sort(bnd.begin(), bnd.end());
      CHECK(bnd == h.levels[l + 1].vertices);
      CHECK(h.levels[l + 1].vertices.size() < lv.vertices.size());
    }
  }
}

TEST_CASE("ER(5000, 0.002) is an expander: no level shrinks") {
  // Mean degree 20 (in plus out): nearly every vertex keeps a cut arc under
  // any 40-way split, so the boundary never drops below 90% of the level.
  WeightedGraph g = gen_er(5000, 0.002, 3);
  HierarchyOptions o;
  o.weighted = false;
  CHECK_THROWS_AS(build_hierarchy(g, 256, 3, o), RecursionError);
  o.stall = StallPolicy::BlockedTop;
  PartitionHierarchy h = build_hierarchy(g, 256, 3, o);
  CHECK(h.blocked_top);
  CHECK(h.depth() == 1);
  CHECK(h.levels[0].terminal());
}

TEST_CASE("property: every hierarchy level respects the tile bound") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 12; ++t) {
    const VertexId n = 100 + static_cast<VertexId>(rng() % 1900);
    WeightedGraph g = t % 3 == 0 ? gen_nws(n, 4, 0.01, rng()) : gen_er(n, 1.5 / n, rng());
    const std::uint32_t tile = 64u << (rng() % 3);
    HierarchyOptions o;
    o.stall = StallPolicy::BlockedTop;
    PartitionHierarchy h = build_hierarchy(g, tile, rng(), o);
    for (std::size_t l = 0; l < h.depth(); ++l) {
      if (h.blocked_top && l + 1 == h.depth()) continue;
      for (auto& c : h.levels[l].components) CHECK(c.size() <= tile);
    }
  }
}

TEST_CASE("strict stall policy raises on a non-shrinking level") {
  // A dense expander keeps nearly every vertex on the boundary.
  WeightedGraph g = gen_er(600, 0.2, 4);
  HierarchyOptions o;
  o.stall = StallPolicy::Strict;
  o.weighted = false;
  CHECK_THROWS_AS(build_hierarchy(g, 64, 0, o), RecursionError);
  o.stall = StallPolicy::BlockedTop;
  CHECK(build_hierarchy(g, 64, 0, o).blocked_top);
}

TEST_CASE("default branching rule") {
  CHECK(default_branching(1000, 256) == 8);
  CHECK(default_branching(256, 256) == 2);
}

}  // TEST_SUITE
