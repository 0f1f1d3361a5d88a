#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dpgraph/graph.hpp"

namespace dpg {

/// Dense square min-plus matrix over a set of vertices. Row/column `i`
/// stands for global vertex `ids()[i]`.
class DistanceBlock {
 public:
  DistanceBlock() = default;
  /// Diagonal 0, everything else kInf. Ids must be distinct.
  explicit DistanceBlock(std::vector<VertexId> ids);
  DistanceBlock(std::vector<VertexId> ids, std::vector<Weight> data);

  /// Builds a block from signed values; throws DomainError on a negative
  /// entry. Values above kInf are clamped to kInf.
  static DistanceBlock from_signed(std::vector<VertexId> ids, std::span<const std::int64_t> values);

  /// Block of the subgraph of `g` induced by `ids` (arcs leaving the set are
  /// ignored).
  static DistanceBlock induced(const WeightedGraph& g, std::vector<VertexId> ids);

  std::uint32_t dim() const noexcept { return dim_; }
  const std::vector<VertexId>& ids() const noexcept { return ids_; }
  const std::vector<Weight>& data() const noexcept { return data_; }
  std::vector<Weight>& data() noexcept { return data_; }

  Weight at(std::uint32_t i, std::uint32_t j) const { return data_[std::size_t{i} * dim_ + j]; }
  Weight& at(std::uint32_t i, std::uint32_t j) { return data_[std::size_t{i} * dim_ + j]; }
  Weight* row(std::uint32_t i) { return data_.data() + std::size_t{i} * dim_; }
  const Weight* row(std::uint32_t i) const { return data_.data() + std::size_t{i} * dim_; }

  /// Row index of a global vertex; throws IndexError if absent.
  std::uint32_t index_of(VertexId global) const;
  bool contains(VertexId global) const noexcept;

  /// Zero diagonal and no entry above kInf.
  bool well_formed() const noexcept;
  /// Triangle inequality under saturating add, checked exhaustively.
  bool is_closed() const noexcept;

  friend bool operator==(const DistanceBlock& a, const DistanceBlock& b) {
    return a.ids_ == b.ids_ && a.data_ == b.data_;
  }

 private:
  void build_lookup();

  std::uint32_t dim_ = 0;
  std::vector<VertexId> ids_;
  std::vector<Weight> data_;
  std::vector<std::pair<VertexId, std::uint32_t>> lookup_;  // sorted by global id
};

/// Rectangular result of a cross-component merge.
struct CrossBlock {
  std::vector<VertexId> row_ids;
  std::vector<VertexId> col_ids;
  std::vector<Weight> data;  // row-major

  Weight at(std::size_t i, std::size_t j) const { return data[i * col_ids.size() + j]; }
};

// ---------------------------------------------------------------------------
// Kernels. Every write is a strict improvement: ties keep the incumbent.

struct PanelTrace {
  std::uint32_t pivot = 0;
  std::uint32_t rows_touched = 0;     // rows with a finite distance to the pivot
  std::uint64_t improvements = 0;     // entries strictly lowered
};

struct ClosureStats {
  std::uint32_t dim = 0;
  std::uint64_t pivots = 0;
  std::uint64_t improvements = 0;
};

/// One outer iteration of the recurrence for pivot `k`.
PanelTrace fw_panel_step(DistanceBlock& b, std::uint32_t k);

/// In-place closure. Rows are updated in parallel (OpenMP) per pivot.
ClosureStats floyd_warshall(DistanceBlock& b);
/// Single-threaded reference closure.
ClosureStats floyd_warshall_serial(DistanceBlock& b);
/// Tiled three-phase closure for blocks larger than one tile.
ClosureStats blocked_floyd_warshall(DistanceBlock& b, std::uint32_t tile);

/// Returns a closed copy. Throws ArgumentError unless the diagonal is zero.
DistanceBlock floyd_warshall_dense(DistanceBlock b);

/// The |boundary| x |boundary| sub-block, in the order given.
DistanceBlock restrict_to(const DistanceBlock& d, std::span<const VertexId> boundary);

/// Lowers every boundary-pair entry of `d` to the matching `db` entry.
/// Returns the number of entries written.
std::uint64_t inject_into(DistanceBlock& d, const DistanceBlock& db,
                          std::span<const VertexId> boundary);
/// `db` must be exactly the boundary matrix (IndexError otherwise).
DistanceBlock inject(const DistanceBlock& db, std::span<const VertexId> boundary, DistanceBlock d);

/// result[m][n] = min over i in b1, j in b2 of d1[m,i] + db[i,j] + d2[j,n].
/// Evaluated as two min-plus products so the work is
/// |d1|*|b1|*|b2| + |d1|*|b2|*|d2|.
CrossBlock min_plus_merge(const DistanceBlock& d1, const DistanceBlock& db, const DistanceBlock& d2,
                          std::span<const VertexId> b1, std::span<const VertexId> b2);

/// C = A (x) B over (min, +) with saturation. A is r x m, B is m x c.
void min_plus_product(const Weight* a, const Weight* b, Weight* c, std::size_t r, std::size_t m,
                      std::size_t cols);

}  // namespace dpg
