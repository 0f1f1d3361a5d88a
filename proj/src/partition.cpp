#include "dpgraph/partition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>

#include "dpgraph/errors.hpp"

namespace dpg {

std::vector<std::vector<VertexId>> Partition::components() const {
  std::vector<std::vector<VertexId>> out(k);
  for (VertexId v = 0; v < assignment.size(); ++v) out[assignment[v]].push_back(v);
  return out;
}

namespace {

// BFS from `src` over unvisited vertices; appends to `order` and returns the
// last vertex reached.
VertexId bfs_collect(const Adjacency& adj, VertexId src, std::vector<char>& seen,
                     std::vector<VertexId>* order) {
  std::deque<VertexId> q{src};
  seen[src] = 1;
  VertexId last = src;
  while (!q.empty()) {
    const VertexId u = q.front();
    q.pop_front();
    last = u;
    if (order) order->push_back(u);
    for (VertexId w : adj[u])
      if (!seen[w]) {
        seen[w] = 1;
        q.push_back(w);
      }
  }
  return last;
}

// Concatenated BFS orders of all connected pieces, each started from a
// pseudo-peripheral vertex. The first piece is located from a seeded vertex.
std::vector<VertexId> peripheral_order(const Adjacency& adj, std::uint64_t seed) {
  const auto n = static_cast<VertexId>(adj.size());
  std::vector<VertexId> order;
  order.reserve(n);
  std::vector<char> placed(n, 0);
  std::mt19937_64 rng(seed);
  VertexId start = static_cast<VertexId>(rng() % n);
  VertexId next_unplaced = 0;
  while (order.size() < n) {
    std::vector<char> probe = placed;
    const VertexId far = bfs_collect(adj, start, probe, nullptr);
    bfs_collect(adj, far, placed, &order);
    while (next_unplaced < n && placed[next_unplaced]) ++next_unplaced;
    start = next_unplaced;
  }
  return order;
}

}  // namespace

Partition GreedyGrowStrategy::partition(const Adjacency& adj, std::uint32_t k, std::uint64_t seed,
                                        const PartitionOptions& opts) const {
  const auto n = static_cast<std::uint32_t>(adj.size());
  if (k < 1 || k > n)
    throw ArgumentError("k must lie in [1, n]; got k=" + std::to_string(k) + " n=" + std::to_string(n));
  constexpr std::uint32_t kUnassigned = ~std::uint32_t{0};
  Partition p{std::vector<std::uint32_t>(n, kUnassigned), k};

  const std::vector<VertexId> order = peripheral_order(adj, seed);
  std::vector<VertexId> rank(n);
  for (VertexId i = 0; i < n; ++i) rank[order[i]] = i;

  // Grow each part by repeatedly taking the frontier vertex with the most
  // arcs into the part; ties go to the earlier vertex in `order`.
  std::vector<std::uint32_t> size(k, 0);
  std::vector<std::uint32_t> conn(n, 0);
  std::size_t cursor = 0;
  for (std::uint32_t c = 0; c < k; ++c) {
    const std::uint32_t target = n / k + (c < n % k ? 1 : 0);
    using Entry = std::pair<std::uint32_t, std::int64_t>;  // (conn, -rank)
    std::priority_queue<Entry> heap;
    std::vector<VertexId> touched;
    while (size[c] < target) {
      VertexId v;
      while (!heap.empty()) {
        const auto [cn, nr] = heap.top();
        const VertexId cand = order[static_cast<std::size_t>(-nr)];
        if (p.assignment[cand] == kUnassigned && conn[cand] == cn) break;
        heap.pop();
      }
      if (heap.empty()) {
        while (p.assignment[order[cursor]] != kUnassigned) ++cursor;
        v = order[cursor];
      } else {
        v = order[static_cast<std::size_t>(-heap.top().second)];
        heap.pop();
      }
      p.assignment[v] = c;
      ++size[c];
      for (VertexId w : adj[v])
        if (p.assignment[w] == kUnassigned) {
          if (conn[w] == 0) touched.push_back(w);
          ++conn[w];
          heap.emplace(conn[w], -static_cast<std::int64_t>(rank[w]));
        }
    }
    for (VertexId w : touched) conn[w] = 0;
  }

  const auto ideal = static_cast<std::uint32_t>((n + k - 1) / k);
  auto cap = static_cast<std::uint32_t>(std::floor(ideal * (1.0 + opts.imbalance)));
  if (opts.max_component > 0) cap = std::min(cap, opts.max_component);
  cap = std::max(cap, ideal);

  std::vector<std::uint32_t> count(k, 0);
  std::vector<std::uint32_t> seen_parts;
  for (std::uint32_t pass = 0; pass < opts.refine_passes; ++pass) {
    bool moved = false;
    for (VertexId v : order) {
      const std::uint32_t own = p.assignment[v];
      seen_parts.clear();
      for (VertexId w : adj[v]) {
        const std::uint32_t c = p.assignment[w];
        if (count[c]++ == 0) seen_parts.push_back(c);
      }
      std::uint32_t best = own;
      for (std::uint32_t c : seen_parts)
        if (c != own && (best == own || count[c] > count[best] || (count[c] == count[best] && c < best)))
          best = c;
      if (best != own && count[best] > count[own] && size[best] < cap && size[own] > 1) {
        p.assignment[v] = best;
        --size[own];
        ++size[best];
        moved = true;
      }
      for (std::uint32_t c : seen_parts) count[c] = 0;
    }
    if (!moved) break;
  }
  return p;
}

const PartitionStrategy& default_strategy() {
  static const GreedyGrowStrategy strategy;
  return strategy;
}

Partition kway_partition(const WeightedGraph& g, std::uint32_t k, std::uint64_t seed,
                         const PartitionOptions& opts) {
  return default_strategy().partition(undirected_adjacency(g), k, seed, opts);
}

BoundarySet find_boundary(const WeightedGraph& g, const Partition& p) {
  if (p.assignment.size() != g.num_vertices()) throw ArgumentError("partition does not cover the graph");
  std::vector<char> mark(g.num_vertices(), 0);
  for (const Edge& e : g.edges())
    if (p.assignment[e.src] != p.assignment[e.dst]) mark[e.src] = mark[e.dst] = 1;
  BoundarySet out(p.k);
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    if (mark[v]) out[p.assignment[v]].push_back(v);
  return out;
}

namespace {

// Virtual arcs between boundary vertices of one component.
using VirtualFn = std::function<void(std::uint32_t comp, std::vector<Edge>& out)>;

// Shared by the public builder and the hierarchy: `next` maps a vertex of g
// to its boundary-graph index (or kNotBoundary); `virtual_arcs` appends
// virtual arcs already expressed in boundary-graph indices.
WeightedGraph assemble_boundary_graph(const WeightedGraph& g, const Partition& p,
                                      const std::vector<VertexId>& next, std::uint32_t nb,
                                      const VirtualFn& virtual_arcs) {
  std::vector<Edge> arcs;
  for (const Edge& e : g.edges())
    if (p.assignment[e.src] != p.assignment[e.dst]) arcs.push_back({next[e.src], next[e.dst], e.w});
  for (std::uint32_t c = 0; c < p.k; ++c) virtual_arcs(c, arcs);
  std::sort(arcs.begin(), arcs.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst, a.w) < std::tie(b.src, b.dst, b.w);
  });
  arcs.erase(std::unique(arcs.begin(), arcs.end(),
                         [](const Edge& a, const Edge& b) { return a.src == b.src && a.dst == b.dst; }),
             arcs.end());
  return WeightedGraph(nb, std::move(arcs), true);
}

}  // namespace

BoundaryGraph build_boundary_graph(const WeightedGraph& g, const Partition& p,
                                   const BoundarySet& boundaries,
                                   const std::vector<DistanceBlock>& intra) {
  if (intra.size() != p.k)
    throw ConsistencyError("expected " + std::to_string(p.k) + " intra blocks, got " +
                           std::to_string(intra.size()));
  BoundaryGraph out;
  std::vector<VertexId> next(g.num_vertices(), HierarchyLevel::kNotBoundary);
  for (const auto& b : boundaries) out.vertices.insert(out.vertices.end(), b.begin(), b.end());
  std::sort(out.vertices.begin(), out.vertices.end());
  for (VertexId i = 0; i < out.vertices.size(); ++i) next[out.vertices[i]] = i;
  const auto nb = static_cast<std::uint32_t>(out.vertices.size());
  out.graph = assemble_boundary_graph(g, p, next, nb, [&](std::uint32_t c, std::vector<Edge>& arcs) {
    const auto& bc = boundaries[c];
    for (VertexId v : bc)
      if (!intra[c].contains(v))
        throw ConsistencyError("intra block of component " + std::to_string(c) + " lacks vertex " +
                               std::to_string(v));
    for (VertexId a : bc)
      for (VertexId b : bc) {
        if (a == b) continue;
        const Weight w = intra[c].at(intra[c].index_of(a), intra[c].index_of(b));
        if (w < kInf) arcs.push_back({next[a], next[b], w});
      }
  });
  return out;
}

std::uint32_t default_branching(std::uint32_t n, std::uint32_t max_tile) {
  return (n + max_tile - 1) / max_tile * 2;
}

namespace {

// Closes every component of a level graph; arcs are bucketed per component.
void close_components(HierarchyLevel& level, const WeightedGraph& lg, std::uint32_t max_tile) {
  const std::size_t k = level.components.size();
  std::vector<std::uint32_t> slot(lg.num_vertices());
  for (const auto& comp : level.components)
    for (std::uint32_t i = 0; i < comp.size(); ++i) slot[comp[i]] = i;
  std::vector<std::vector<Edge>> bucket(k);
  for (const Edge& e : lg.edges()) {
    const std::uint32_t c = level.partition.assignment[e.src];
    if (c == level.partition.assignment[e.dst]) bucket[c].push_back(e);
  }
  level.intra.assign(k, DistanceBlock{});
  level.intra_stats.assign(k, ClosureStats{});
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(k); ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    std::vector<VertexId> ids;
    ids.reserve(level.components[c].size());
    for (VertexId v : level.components[c]) ids.push_back(level.vertices[v]);
    DistanceBlock b(std::move(ids));
    for (const Edge& e : bucket[c]) {
      Weight& s = b.at(slot[e.src], slot[e.dst]);
      s = std::min(s, e.w);
    }
    level.intra_stats[c] = b.dim() > max_tile ? blocked_floyd_warshall(b, max_tile) : floyd_warshall(b);
    level.intra[c] = std::move(b);
  }
}

// Structure-only virtual arcs: weight 1 wherever b is reachable from a inside
// the component.
void reachability_arcs(const HierarchyLevel& level, std::uint32_t c,
                       std::vector<Edge>& arcs, std::vector<std::vector<VertexId>>& out_adj,
                       std::vector<std::uint32_t>& stamp, std::uint32_t& epoch) {
  const auto& part = level.partition.assignment;
  for (VertexId a : level.boundaries[c]) {
    ++epoch;
    std::deque<VertexId> q{a};
    stamp[a] = epoch;
    while (!q.empty()) {
      const VertexId u = q.front();
      q.pop_front();
      for (VertexId w : out_adj[u])
        if (part[w] == c && stamp[w] != epoch) {
          stamp[w] = epoch;
          q.push_back(w);
        }
    }
    for (VertexId b : level.boundaries[c])
      if (b != a && stamp[b] == epoch) arcs.push_back({level.local_to_next[a], level.local_to_next[b], 1});
  }
}

HierarchyLevel terminal_level(std::vector<VertexId> vertices) {
  HierarchyLevel level;
  const auto n = static_cast<std::uint32_t>(vertices.size());
  level.vertices = std::move(vertices);
  level.partition = Partition{std::vector<std::uint32_t>(n, 0), 1};
  level.components.assign(1, {});
  level.components[0].resize(n);
  for (VertexId v = 0; v < n; ++v) level.components[0][v] = v;
  level.boundaries.assign(1, {});
  level.local_to_next.assign(n, HierarchyLevel::kNotBoundary);
  level.boundary_graph = WeightedGraph(0, {}, true);
  level.k_requested = 1;
  return level;
}

}  // namespace

PartitionHierarchy build_hierarchy(const WeightedGraph& g, std::uint32_t max_tile, std::uint64_t seed,
                                   const HierarchyOptions& opts) {
  if (max_tile < 2) throw ArgumentError("max_tile must be at least 2");
  if (!(opts.max_shrink > 0.0 && opts.max_shrink <= 1.0)) throw ArgumentError("max_shrink must lie in (0, 1]");
  const PartitionStrategy& strategy = opts.strategy ? *opts.strategy : default_strategy();
  PartitionHierarchy h;
  h.max_tile = max_tile;

  std::vector<VertexId> vertices(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) vertices[v] = v;
  WeightedGraph current = g;

  for (std::uint32_t depth = 0;; ++depth) {
    const auto n = static_cast<std::uint32_t>(vertices.size());
    if (n <= max_tile) {
      HierarchyLevel level = terminal_level(std::move(vertices));
      if (opts.weighted) close_components(level, current, max_tile);
      h.levels.push_back(std::move(level));
      return h;
    }

    const Adjacency adj = undirected_adjacency(current);
    const std::uint32_t k_min = (n + max_tile - 1) / max_tile;
    std::uint32_t k = std::clamp(opts.k_fn(n, max_tile), k_min, n);
    PartitionOptions popts = opts.partition;
    popts.max_component = popts.max_component ? std::min(popts.max_component, max_tile) : max_tile;

    HierarchyLevel level;
    bool accepted = false;
    while (true) {
      Partition p = strategy.partition(adj, k, seed + depth, popts);
      BoundarySet bs = find_boundary(current, p);
      std::size_t nb = 0;
      for (const auto& b : bs) nb += b.size();
      if (nb < n && static_cast<double>(nb) <= opts.max_shrink * n) {
        level.partition = std::move(p);
        level.boundaries = std::move(bs);
        level.k_requested = k;
        accepted = true;
        break;
      }
      if (k / 2 < k_min || k / 2 == k) break;
      k /= 2;
    }
    if (!accepted) {
      if (opts.stall == StallPolicy::Strict)
        throw RecursionError("boundary graph does not shrink at level " + std::to_string(depth) +
                             " (" + std::to_string(n) + " vertices)");
      HierarchyLevel top = terminal_level(std::move(vertices));
      if (opts.weighted) close_components(top, current, max_tile);
      h.levels.push_back(std::move(top));
      h.blocked_top = true;
      return h;
    }

    level.vertices = std::move(vertices);
    level.components = level.partition.components();
    level.local_to_next.assign(n, HierarchyLevel::kNotBoundary);
    for (const auto& b : level.boundaries)
      level.next_to_local.insert(level.next_to_local.end(), b.begin(), b.end());
    std::sort(level.next_to_local.begin(), level.next_to_local.end());
    for (VertexId i = 0; i < level.next_to_local.size(); ++i) level.local_to_next[level.next_to_local[i]] = i;
    const auto nb = static_cast<std::uint32_t>(level.next_to_local.size());

    if (opts.weighted) {
      close_components(level, current, max_tile);
      level.boundary_graph = assemble_boundary_graph(
          current, level.partition, level.local_to_next, nb, [&](std::uint32_t c, std::vector<Edge>& arcs) {
            const DistanceBlock& blk = level.intra[c];
            const auto& comp = level.components[c];
            // Components are sorted, so the block index of a vertex is its
            // position inside the component list.
            for (VertexId a : level.boundaries[c]) {
              const auto ia = static_cast<std::uint32_t>(
                  std::lower_bound(comp.begin(), comp.end(), a) - comp.begin());
              for (VertexId b : level.boundaries[c]) {
                if (a == b) continue;
                const auto ib = static_cast<std::uint32_t>(
                    std::lower_bound(comp.begin(), comp.end(), b) - comp.begin());
                const Weight w = blk.at(ia, ib);
                if (w < kInf) arcs.push_back({level.local_to_next[a], level.local_to_next[b], w});
              }
            }
          });
    } else {
      std::vector<std::vector<VertexId>> out_adj(n);
      for (const Edge& e : current.edges()) out_adj[e.src].push_back(e.dst);
      std::vector<std::uint32_t> stamp(n, 0);
      std::uint32_t epoch = 0;
      level.boundary_graph = assemble_boundary_graph(
          current, level.partition, level.local_to_next, nb, [&](std::uint32_t c, std::vector<Edge>& arcs) {
            reachability_arcs(level, c, arcs, out_adj, stamp, epoch);
          });
    }

    std::vector<VertexId> next_vertices(nb);
    for (VertexId i = 0; i < nb; ++i) next_vertices[i] = level.vertices[level.next_to_local[i]];
    current = level.boundary_graph;
    const bool done = nb <= max_tile;
    h.levels.push_back(std::move(level));
    if (done) return h;
    vertices = std::move(next_vertices);
  }
}

}  // namespace dpg
