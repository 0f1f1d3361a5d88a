#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dpg {

using VertexId = std::uint32_t;
using Weight = std::uint32_t;

/// Absence-of-path marker. Every min-plus sum saturates here.
inline constexpr Weight kInf = (Weight{1} << 31) - 1;
/// Largest weight accepted on an input edge.
inline constexpr Weight kMaxEdgeWeight = kInf / 2;

/// Saturating add on the 32-bit datapath: INF + x == INF.
constexpr Weight sat_add(Weight a, Weight b) noexcept {
  const std::uint32_t s = a + b;  // a, b <= kInf, so the sum fits in 32 bits
  return s < kInf ? s : kInf;
}

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  Weight w = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed graph with non-negative 32-bit weights. Undirected inputs are
/// expanded to two arcs on construction; `directed()` remembers the origin.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Validates ids and weights. Zero-weight self loops are dropped; a
  /// positive self loop is rejected (self distance is definitionally 0).
  WeightedGraph(VertexId n, std::vector<Edge> edges, bool directed = true);

  VertexId num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool directed() const noexcept { return directed_; }

  /// Row-major n*n adjacency: edge weight (min over parallel arcs), 0 on the
  /// diagonal, kInf elsewhere.
  std::vector<Weight> dense_adjacency() const;

 private:
  VertexId n_ = 0;
  std::vector<Edge> edges_;
  bool directed_ = true;
};

/// Compressed sparse rows in canonical form (column ids strictly increasing
/// within each row).
struct CsrGraph {
  std::vector<std::uint64_t> rowptr;
  std::vector<VertexId> col;
  std::vector<Weight> val;

  VertexId num_vertices() const noexcept {
    return rowptr.empty() ? 0 : static_cast<VertexId>(rowptr.size() - 1);
  }
  /// Missing entries read as kInf, diagonal as 0.
  std::vector<Weight> to_dense() const;
};

/// Throws DuplicateEdgeError on a repeated (src, dst) pair.
CsrGraph build_csr(const WeightedGraph& g);

/// Symmetric neighbour lists (both arc directions, self loops dropped,
/// duplicates kept). Used by the partitioner.
std::vector<std::vector<VertexId>> undirected_adjacency(const WeightedGraph& g);

// ---------------------------------------------------------------------------
// Generators. All are deterministic for a fixed seed.

struct WeightRange {
  Weight lo = 1;
  Weight hi = 100;
};

/// Directed Erdos-Renyi: each ordered pair (i != j) independently with prob p.
WeightedGraph gen_er(VertexId n, double p, std::uint64_t seed, WeightRange wr = {});

/// Newman-Watts-Strogatz: ring lattice of even degree k plus shortcuts added
/// with probability p per lattice edge. Lattice edges are never removed.
/// Returned as undirected (each edge expanded to two arcs).
WeightedGraph gen_nws(VertexId n, VertexId k, double p, std::uint64_t seed,
                      WeightRange wr = {});

/// Two-level clustered digraph: vertices are split into clusters of
/// `cluster_size`, clusters are grouped `clusters_per_group` at a time.
/// Ordered pairs are linked with p_cluster inside a cluster, p_group inside a
/// group and p_global otherwise.
struct ClusteredParams {
  VertexId n = 0;
  VertexId cluster_size = 32;
  VertexId clusters_per_group = 8;
  double p_cluster = 0.3;
  double p_group = 0.01;
  double p_global = 0.0001;
};
WeightedGraph gen_clustered(const ClusteredParams& params, std::uint64_t seed,
                            WeightRange wr = {});

// ---------------------------------------------------------------------------
// Genome graphs

/// Character-labelled DAG, one node per base. Invariant: `topo_order` lists
/// every node after all of its predecessors.
class GenomeGraph {
 public:
  GenomeGraph() = default;
  /// Validates the alphabet {A,C,G,T,N}, predecessor ids and acyclicity, and
  /// computes the canonical topological order.
  GenomeGraph(std::string bases, std::vector<std::vector<VertexId>> preds);

  std::size_t size() const noexcept { return bases_.size(); }
  char base(VertexId v) const { return bases_[v]; }
  const std::string& bases() const noexcept { return bases_; }
  std::span<const VertexId> preds(VertexId v) const { return preds_[v]; }
  std::span<const VertexId> succs(VertexId v) const { return succs_[v]; }
  const std::vector<VertexId>& topo_order() const noexcept { return topo_; }
  /// Position of each node inside topo_order().
  const std::vector<VertexId>& topo_rank() const noexcept { return rank_; }
  std::size_t num_edges() const noexcept { return edge_count_; }

  /// Number of nodes on the longest path.
  std::size_t longest_path() const;

 private:
  std::string bases_;
  std::vector<std::vector<VertexId>> preds_;
  std::vector<std::vector<VertexId>> succs_;
  std::vector<VertexId> topo_;
  std::vector<VertexId> rank_;
  std::size_t edge_count_ = 0;
};

/// Kahn's method with min-id tie-breaking. Throws AcyclicityError naming an
/// edge on a cycle.
std::vector<VertexId> topo_sort(const std::vector<std::vector<VertexId>>& preds);

/// Segment-level view of a genome graph, as read from / written to the GFA
/// subset.
struct GfaGraph {
  struct Segment {
    std::string id;
    std::string seq;
  };
  std::vector<Segment> segments;
  std::vector<std::pair<std::string, std::string>> links;

  /// Expands each segment into a per-base chain; a link joins the last base of
  /// `from` to the first base of `to`.
  GenomeGraph expand() const;
};

/// Reference backbone with SNP and short-insertion bubbles at `bubble_rate`
/// per reference base.
struct SyntheticGenome {
  GfaGraph gfa;
  std::string reference;
};
SyntheticGenome gen_genome(std::size_t bases, double bubble_rate, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reads

enum class LengthClass { Short, Long };

inline constexpr std::size_t kShortReadThreshold = 300;

struct Read {
  std::string id;
  std::string seq;
};

struct ReadBatch {
  std::vector<Read> reads;
  LengthClass length_class = LengthClass::Short;
};

LengthClass classify_length(std::size_t len,
                            std::size_t threshold = kShortReadThreshold) noexcept;

/// Reads sampled along random graph paths with per-base substitutions at
/// `sub_rate`. Throws LengthError when no path of `len` nodes exists.
ReadBatch gen_reads(const GenomeGraph& g, std::size_t count, std::size_t len,
                    double sub_rate, std::uint64_t seed);

}  // namespace dpg
