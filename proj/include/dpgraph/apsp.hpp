#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dpgraph/block.hpp"
#include "dpgraph/partition.hpp"

namespace dpg {

/// Largest vertex count for which the full n x n matrix is materialized.
inline constexpr std::uint32_t kDenseLimit = 4096;

struct ApspOptions {
  std::uint64_t seed = 0;
  BranchingRule k_fn = default_branching;
  PartitionOptions partition{};
  StallPolicy stall = StallPolicy::BlockedTop;
  double max_shrink = 0.9;
  std::uint32_t dense_limit = kDenseLimit;
};

// ---------------------------------------------------------------------------
// Execution trace consumed by the cost model.

enum class ClosureKind { Initial, Reclose, Top };

struct ClosureEvent {
  std::uint32_t level = 0;
  std::uint32_t component = 0;
  ClosureKind kind = ClosureKind::Initial;
  ClosureStats stats{};
  bool tiled = false;  // closed by the tiled kernel (oversized block)
};

struct InjectEvent {
  std::uint32_t level = 0;
  std::uint32_t component = 0;
  std::uint32_t boundary = 0;
  std::uint64_t writes = 0;
};

/// One min-plus product of a merge: rows x inner -> rows x cols.
struct MergeEvent {
  std::uint32_t level = 0;
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::uint32_t stage = 0;  // 0: into the boundary of `to`, 1: expand to all of `to`
  std::uint64_t rows = 0;
  std::uint64_t inner = 0;
  std::uint64_t cols = 0;
};

struct ExecutionTrace {
  std::uint64_t vertices = 0;
  std::uint64_t arcs = 0;
  std::uint32_t levels = 0;
  std::vector<ClosureEvent> closures;
  std::vector<InjectEvent> injects;
  std::vector<MergeEvent> merges;
};

// ---------------------------------------------------------------------------

enum class ApspMode { FullDense, Lazy };

struct ApspResult {
  std::uint32_t n = 0;
  PartitionHierarchy hierarchy;
  /// Level-0 component blocks, exact for every pair inside a component.
  std::vector<DistanceBlock> components;
  /// boundary_matrices[l] is the closed matrix over level l+1's vertices
  /// (the boundary of level l). Empty for a terminal level.
  std::vector<DistanceBlock> boundary_matrices;
  ApspMode mode = ApspMode::Lazy;
  /// Row-major n x n distances (FullDense only).
  std::vector<Weight> dense;
  ExecutionTrace trace;

  /// Distance between vertices u and v.
  Weight query(VertexId u, VertexId v) const;
};

ApspResult recursive_apsp(const WeightedGraph& g, std::uint32_t max_tile, const ApspOptions& opts = {});

/// Throws IndexError for an out-of-range vertex.
Weight query_distance(const ApspResult& r, VertexId u, VertexId v);

/// Distance from the stored blocks alone (component lookup or the
/// cross-component formula), ignoring any dense matrix.
Weight query_blocks(const ApspResult& r, VertexId u, VertexId v);

/// Full matrix, materialized from the stored blocks in Lazy mode.
std::vector<Weight> dense_matrix(const ApspResult& r);

/// Reference single-block closure of the whole graph.
std::vector<Weight> dense_apsp(const WeightedGraph& g);

}  // namespace dpg
