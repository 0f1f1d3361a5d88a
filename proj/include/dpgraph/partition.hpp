#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "dpgraph/block.hpp"
#include "dpgraph/graph.hpp"

namespace dpg {

struct Partition {
  std::vector<std::uint32_t> assignment;  // vertex -> component in [0, k)
  std::uint32_t k = 0;

  /// Vertex lists per component, each sorted ascending.
  std::vector<std::vector<VertexId>> components() const;
};

/// Per-component sorted lists of boundary vertices.
using BoundarySet = std::vector<std::vector<VertexId>>;

using Adjacency = std::vector<std::vector<VertexId>>;

struct PartitionOptions {
  double imbalance = 0.1;
  std::uint32_t refine_passes = 2;
  /// Hard cap on component size; 0 means no cap beyond the imbalance bound.
  std::uint32_t max_component = 0;
};

/// Pluggable k-way partitioner over an undirected adjacency.
class PartitionStrategy {
 public:
  virtual ~PartitionStrategy() = default;
  virtual Partition partition(const Adjacency& adj, std::uint32_t k, std::uint64_t seed,
                              const PartitionOptions& opts) const = 0;
};

/// Region growing from a pseudo-peripheral vertex into balanced parts
/// (sizes floor/ceil of n/k), followed by single-vertex boundary moves that
/// strictly reduce the cut.
class GreedyGrowStrategy final : public PartitionStrategy {
 public:
  Partition partition(const Adjacency& adj, std::uint32_t k, std::uint64_t seed,
                      const PartitionOptions& opts) const override;
};

const PartitionStrategy& default_strategy();

/// Throws ArgumentError unless 1 <= k <= n.
Partition kway_partition(const WeightedGraph& g, std::uint32_t k, std::uint64_t seed,
                         const PartitionOptions& opts = {});

/// Vertices with an in- or out-arc to another component.
BoundarySet find_boundary(const WeightedGraph& g, const Partition& p);

/// Graph over the union of boundaries, vertices renumbered in ascending
/// global order (the returned `vertices`). Cross arcs come from `g`, virtual
/// arcs from the closed `intra` blocks (one per component, indexed like
/// p.components()). Parallel arcs collapse to their minimum and the edge list
/// is sorted, so the result is canonical.
struct BoundaryGraph {
  WeightedGraph graph;
  std::vector<VertexId> vertices;  // boundary-graph index -> vertex id of g
};
BoundaryGraph build_boundary_graph(const WeightedGraph& g, const Partition& p,
                                   const BoundarySet& boundaries,
                                   const std::vector<DistanceBlock>& intra);

// ---------------------------------------------------------------------------
// Hierarchy

/// Component count for a level graph of `n` vertices.
using BranchingRule = std::function<std::uint32_t(std::uint32_t n, std::uint32_t max_tile)>;

/// ceil(n / max_tile) * 2.
std::uint32_t default_branching(std::uint32_t n, std::uint32_t max_tile);

enum class StallPolicy {
  /// A level whose boundary graph does not shrink, even after halving k,
  /// raises RecursionError.
  Strict,
  /// Such a level becomes a single oversized component, closed by a tiled
  /// kernel instead of a single tile.
  BlockedTop,
};

struct HierarchyOptions {
  BranchingRule k_fn = default_branching;
  PartitionOptions partition{};
  StallPolicy stall = StallPolicy::Strict;
  /// Weighted mode closes every component to weight the virtual arcs and
  /// keeps the closed blocks. Structure-only mode gives a virtual arc weight 1
  /// wherever the pair is connected inside its component; the partitions are
  /// identical either way.
  bool weighted = true;
  /// A level is accepted only if its boundary graph keeps at most this
  /// fraction of the level's vertices.
  double max_shrink = 0.9;
  const PartitionStrategy* strategy = nullptr;
};

struct HierarchyLevel {
  /// Global id of each vertex of this level's graph.
  std::vector<VertexId> vertices;
  Partition partition;  // over level-local ids
  std::vector<std::vector<VertexId>> components;  // level-local ids, sorted
  BoundarySet boundaries;                          // level-local ids, sorted
  /// Next level's graph; vertex i is level-local id next_to_local[i].
  WeightedGraph boundary_graph;
  std::vector<VertexId> next_to_local;
  /// Level-local id -> boundary-graph index, or kNotBoundary.
  std::vector<VertexId> local_to_next;
  /// Closed component blocks keyed by global ids (weighted mode only).
  std::vector<DistanceBlock> intra;
  std::vector<ClosureStats> intra_stats;
  std::uint32_t k_requested = 0;

  static constexpr VertexId kNotBoundary = ~VertexId{0};
  std::size_t num_boundary() const noexcept { return next_to_local.size(); }
  /// True for a level that is a single component with no boundary.
  bool terminal() const noexcept { return next_to_local.empty(); }
};

struct PartitionHierarchy {
  std::vector<HierarchyLevel> levels;  // base first
  std::uint32_t max_tile = 0;
  bool blocked_top = false;  // the stall policy produced an oversized level

  std::size_t depth() const noexcept { return levels.size(); }
  /// Boundary graph of the last level (empty for a terminal last level).
  const WeightedGraph& top() const { return levels.back().boundary_graph; }
};

PartitionHierarchy build_hierarchy(const WeightedGraph& g, std::uint32_t max_tile, std::uint64_t seed,
                                   const HierarchyOptions& opts = {});

}  // namespace dpg
