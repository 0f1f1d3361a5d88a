#include "dpgraph/apsp.hpp"

#include <algorithm>

#include "dpgraph/errors.hpp"

namespace dpg {

namespace {

std::uint32_t position_in(const std::vector<VertexId>& sorted, VertexId v) {
  return static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

std::vector<VertexId> to_global(const HierarchyLevel& level, const std::vector<VertexId>& local) {
  std::vector<VertexId> out(local.size());
  for (std::size_t i = 0; i < local.size(); ++i) out[i] = level.vertices[local[i]];
  return out;
}

// Closed matrix over the boundary graph of the last level.
DistanceBlock close_top(const HierarchyLevel& level, std::uint32_t max_tile, ExecutionTrace& trace,
                        std::uint32_t level_index) {
  DistanceBlock top(to_global(level, level.next_to_local));
  for (const Edge& e : level.boundary_graph.edges()) {
    Weight& s = top.at(e.src, e.dst);
    s = std::min(s, e.w);
  }
  const bool tiled = top.dim() > max_tile;
  ClosureStats st = tiled ? blocked_floyd_warshall(top, max_tile) : floyd_warshall(top);
  trace.closures.push_back({level_index, 0, ClosureKind::Top, st, tiled});
  return top;
}

// Matrix over all vertices of a level, from exact component blocks and the
// closed boundary matrix of that level.
DistanceBlock assemble_level(const HierarchyLevel& level, std::uint32_t level_index,
                             const DistanceBlock* db, ExecutionTrace& trace) {
  DistanceBlock out(level.vertices);
  const std::size_t k = level.components.size();
  std::vector<std::vector<VertexId>> bglobal(k);
  for (std::size_t c = 0; c < k; ++c) bglobal[c] = to_global(level, level.boundaries[c]);

  for (std::size_t c1 = 0; c1 < k; ++c1) {
    const auto& comp1 = level.components[c1];
    const DistanceBlock& d1 = level.intra[c1];
    for (std::uint32_t a = 0; a < comp1.size(); ++a)
      for (std::uint32_t b = 0; b < comp1.size(); ++b) out.at(comp1[a], comp1[b]) = d1.at(a, b);
    if (!db || bglobal[c1].empty()) continue;
    for (std::size_t c2 = 0; c2 < k; ++c2) {
      if (c2 == c1 || bglobal[c2].empty()) continue;
      const auto& comp2 = level.components[c2];
      const CrossBlock cross = min_plus_merge(d1, *db, level.intra[c2], bglobal[c1], bglobal[c2]);
      for (std::uint32_t a = 0; a < comp1.size(); ++a)
        for (std::uint32_t b = 0; b < comp2.size(); ++b) out.at(comp1[a], comp2[b]) = cross.at(a, b);
      const auto li = static_cast<std::uint32_t>(c1), lj = static_cast<std::uint32_t>(c2);
      trace.merges.push_back({level_index, li, lj, 0, comp1.size(), bglobal[c1].size(), bglobal[c2].size()});
      trace.merges.push_back({level_index, li, lj, 1, comp1.size(), bglobal[c2].size(), comp2.size()});
    }
  }
  return out;
}

}  // namespace

ApspResult recursive_apsp(const WeightedGraph& g, std::uint32_t max_tile, const ApspOptions& opts) {
  HierarchyOptions hopts;
  hopts.k_fn = opts.k_fn;
  hopts.partition = opts.partition;
  hopts.stall = opts.stall;
  hopts.weighted = true;
  hopts.max_shrink = opts.max_shrink;

  ApspResult r;
  r.n = g.num_vertices();
  r.hierarchy = build_hierarchy(g, max_tile, opts.seed, hopts);
  auto& levels = r.hierarchy.levels;
  const auto depth = static_cast<std::uint32_t>(levels.size());
  r.trace.vertices = g.num_vertices();
  r.trace.arcs = g.num_edges();
  r.trace.levels = depth;

  for (std::uint32_t l = 0; l < depth; ++l)
    for (std::uint32_t c = 0; c < levels[l].intra_stats.size(); ++c)
      r.trace.closures.push_back(
          {l, c, ClosureKind::Initial, levels[l].intra_stats[c], levels[l].intra[c].dim() > max_tile});

  r.boundary_matrices.resize(depth);
  if (!levels.back().terminal())
    r.boundary_matrices[depth - 1] = close_top(levels.back(), max_tile, r.trace, depth - 1);

  const bool full = r.n <= opts.dense_limit;
  for (std::uint32_t li = depth; li-- > 0;) {
    HierarchyLevel& level = levels[li];
    const DistanceBlock* db = level.terminal() ? nullptr : &r.boundary_matrices[li];
    if (db) {
      const std::size_t k = level.components.size();
      std::vector<InjectEvent> injects(k);
      std::vector<ClosureEvent> recloses(k);
      std::vector<char> reclosed(k, 0);
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(k); ++ci) {
        const auto c = static_cast<std::uint32_t>(ci);
        const auto bglobal = to_global(level, level.boundaries[c]);
        const std::uint64_t writes = inject_into(level.intra[c], *db, bglobal);
        injects[c] = {li, c, static_cast<std::uint32_t>(bglobal.size()), writes};
        if (writes > 0) {
          DistanceBlock& blk = level.intra[c];
          const bool tiled = blk.dim() > max_tile;
          recloses[c] = {li, c, ClosureKind::Reclose,
                         tiled ? blocked_floyd_warshall(blk, max_tile) : floyd_warshall(blk), tiled};
          reclosed[c] = 1;
        }
      }
      for (std::size_t c = 0; c < k; ++c) {
        r.trace.injects.push_back(injects[c]);
        if (reclosed[c]) r.trace.closures.push_back(recloses[c]);
      }
    }
    if (li > 0) {
      r.boundary_matrices[li - 1] = assemble_level(level, li, db, r.trace);
    } else if (full) {
      DistanceBlock all = assemble_level(level, 0, db, r.trace);
      r.dense = std::move(all.data());
    }
  }
  r.mode = full ? ApspMode::FullDense : ApspMode::Lazy;
  r.components = levels[0].intra;
  // Level blocks above the base are no longer needed once folded into the
  // boundary matrices.
  for (std::uint32_t l = 0; l < depth; ++l) {
    levels[l].intra.clear();
    levels[l].intra.shrink_to_fit();
  }
  return r;
}

Weight query_blocks(const ApspResult& r, VertexId u, VertexId v) {
  if (u >= r.n || v >= r.n) throw IndexError("vertex out of range");
  if (u == v) return 0;
  const HierarchyLevel& base = r.hierarchy.levels.front();
  const std::uint32_t c1 = base.partition.assignment[u], c2 = base.partition.assignment[v];
  const DistanceBlock& d1 = r.components[c1];
  const auto& comp1 = base.components[c1];
  if (c1 == c2) return d1.at(position_in(comp1, u), position_in(comp1, v));
  if (base.terminal()) return kInf;
  const DistanceBlock& d2 = r.components[c2];
  const auto& comp2 = base.components[c2];
  const DistanceBlock& db = r.boundary_matrices[0];
  const std::uint32_t iu = position_in(comp1, u), iv = position_in(comp2, v);
  Weight best = kInf;
  for (VertexId bi : base.boundaries[c1]) {
    const Weight left = d1.at(iu, position_in(comp1, bi));
    if (left >= kInf) continue;
    const std::uint32_t gi = db.index_of(bi);
    for (VertexId bj : base.boundaries[c2]) {
      const Weight w = sat_add(sat_add(left, db.at(gi, db.index_of(bj))), d2.at(position_in(comp2, bj), iv));
      best = std::min(best, w);
    }
  }
  return best;
}

Weight query_distance(const ApspResult& r, VertexId u, VertexId v) {
  if (u >= r.n || v >= r.n) throw IndexError("vertex out of range");
  if (r.mode == ApspMode::FullDense) return r.dense[std::size_t{u} * r.n + v];
  return query_blocks(r, u, v);
}

Weight ApspResult::query(VertexId u, VertexId v) const { return query_distance(*this, u, v); }

std::vector<Weight> dense_matrix(const ApspResult& r) {
  if (r.mode == ApspMode::FullDense) return r.dense;
  const HierarchyLevel& base = r.hierarchy.levels.front();
  std::vector<Weight> out(std::size_t{r.n} * r.n, kInf);
  const std::size_t k = base.components.size();
  std::vector<std::vector<VertexId>> bglobal(k);
  for (std::size_t c = 0; c < k; ++c) bglobal[c] = base.boundaries[c];
  for (std::size_t c1 = 0; c1 < k; ++c1) {
    const auto& comp1 = base.components[c1];
    for (std::uint32_t a = 0; a < comp1.size(); ++a)
      for (std::uint32_t b = 0; b < comp1.size(); ++b)
        out[std::size_t{comp1[a]} * r.n + comp1[b]] = r.components[c1].at(a, b);
    if (base.terminal() || bglobal[c1].empty()) continue;
    for (std::size_t c2 = 0; c2 < k; ++c2) {
      if (c1 == c2 || bglobal[c2].empty()) continue;
      const auto& comp2 = base.components[c2];
      const CrossBlock cross =
          min_plus_merge(r.components[c1], r.boundary_matrices[0], r.components[c2], bglobal[c1], bglobal[c2]);
      for (std::uint32_t a = 0; a < comp1.size(); ++a)
        for (std::uint32_t b = 0; b < comp2.size(); ++b)
          out[std::size_t{comp1[a]} * r.n + comp2[b]] = cross.at(a, b);
    }
  }
  return out;
}

std::vector<Weight> dense_apsp(const WeightedGraph& g) {
  std::vector<VertexId> ids(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) ids[v] = v;
  DistanceBlock b(std::move(ids), g.dense_adjacency());
  floyd_warshall(b);
  return std::move(b.data());
}

}  // namespace dpg
