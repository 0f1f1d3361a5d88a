#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dpgraph/graph.hpp"

namespace dpg {

inline constexpr std::uint32_t kMaxWindow = 256;
inline constexpr std::uint32_t kDefaultWindow = 128;

/// Up to 256 bits; bit j lives in word j / 64.
struct BitVec {
  std::array<std::uint64_t, 4> w{};

  bool test(std::uint32_t j) const noexcept { return (w[j >> 6] >> (j & 63)) & 1u; }
  void set(std::uint32_t j) noexcept { w[j >> 6] |= std::uint64_t{1} << (j & 63); }
  bool any() const noexcept { return (w[0] | w[1] | w[2] | w[3]) != 0; }
  /// Index of the highest set bit, or -1.
  int highest() const noexcept;
  BitVec& operator|=(const BitVec& o) noexcept {
    for (int i = 0; i < 4; ++i) w[i] |= o.w[i];
    return *this;
  }
  friend bool operator==(const BitVec&, const BitVec&) = default;
};

/// Per-base match masks of one query segment.
struct MaskTable {
  std::uint32_t width = 0;
  std::array<BitVec, 4> masks{};  // A, C, G, T

  /// Mask for a base; 'N' and anything else match nothing.
  const BitVec& of(char base) const noexcept;
};

/// Throws WidthError if the segment is longer than `width` or `width` is
/// outside [1, 256].
MaskTable precompute_masks(const std::string& segment, std::uint32_t width);

enum class CarryMode {
  /// Carry-in is the OR of the predecessors' carries (exact).
  PredCarry,
  /// Carry-in is the node's own carry from the previous window.
  SelfCarry,
};

/// Per-window states, kept when trace recording is on.
struct TraceLog {
  std::uint32_t width = 0;
  std::vector<std::vector<BitVec>> states;  // [window][node]
};

struct AlignOptions {
  std::uint32_t width = kDefaultWindow;
  CarryMode carry = CarryMode::PredCarry;
  bool record_trace = false;
  /// Stop once every carry is zero after a window (later windows stay zero).
  bool early_exit = false;
};

struct AlignResult {
  std::size_t score_max = 0;
  std::vector<VertexId> end_nodes;  // ascending
  std::uint32_t windows = 0;        // windows actually processed
  std::optional<TraceLog> trace;
};

/// Windowed bit-parallel exact prefix matching. Throws ArgumentError on an
/// empty query.
AlignResult align_windowed(const GenomeGraph& g, const std::string& q, const AlignOptions& opts = {});

/// Boolean dynamic program over (node, query position).
AlignResult align_reference(const GenomeGraph& g, const std::string& q);

/// Steps on a recorded path before the traceback buffer is exhausted.
inline constexpr std::size_t kTracebackSteps = 16384;

/// Walks back from the smallest end node, always taking the smallest
/// predecessor that carried the match. Throws StateError without a trace,
/// EmptyPathError for a zero score and CapacityError past `max_steps`.
std::vector<VertexId> reconstruct_path(const GenomeGraph& g, const std::string& q,
                                       const AlignResult& result,
                                       std::size_t max_steps = kTracebackSteps);

// ---------------------------------------------------------------------------
// Port profile of a graph, shared by every read aligned against it.

enum class Port { Self, Hop };

/// A node is Self when its only predecessor is the node just before it in
/// topological order (or it has none); otherwise Hop.
Port classify_port(const GenomeGraph& g, VertexId v);

struct PortProfile {
  std::uint64_t nodes = 0;
  std::uint64_t self_nodes = 0;
  std::uint64_t hop_nodes = 0;
  /// Predecessor states a Hop node pulls from shared SRAM (the adjacent
  /// predecessor, if any, comes over the Self port).
  std::vector<VertexId> hop_fetches;
  std::uint64_t edges = 0;
};
PortProfile profile_ports(const GenomeGraph& g);

// ---------------------------------------------------------------------------
// Batches

enum class MappingMode { ShortParallel, LongPipeline };

const char* to_string(MappingMode m) noexcept;

struct BatchConfig {
  AlignOptions align{};
  std::uint32_t pe_per_pu = 64;
  std::uint32_t group_size = 4;
  std::uint32_t group_count = 16;
};

struct ReadTrace {
  std::string id;
  std::size_t length = 0;
  std::uint32_t windows = 0;
  std::uint32_t group = 0;
};

struct BatchTrace {
  MappingMode mode = MappingMode::ShortParallel;
  std::uint32_t width = kDefaultWindow;
  std::uint32_t group_size = 0;
  std::uint32_t group_count = 0;
  PortProfile profile;
  std::vector<ReadTrace> reads;               // in batch order
  std::vector<std::vector<std::size_t>> groups;  // read indices per group
};

struct BatchResult {
  std::vector<std::string> read_ids;  // sorted
  std::vector<AlignResult> results;   // parallel to read_ids
  BatchTrace trace;
};

/// Aligns every read. Short mode deals reads round-robin to group_count
/// groups; Long mode runs them through one pipeline. Results do not depend on
/// the mode. Throws ValidationError unless group_size * group_count equals
/// pe_per_pu.
BatchResult batch_align(const GenomeGraph& g, const ReadBatch& batch, MappingMode mode,
                        const BatchConfig& config = {});

/// `read_id<TAB>score_max<TAB>end_node[<TAB>path]`; end_node is the smallest
/// end node or '-'.
void write_results_tsv(std::ostream& out, const BatchResult& r,
                       const std::vector<std::vector<VertexId>>* paths = nullptr);

}  // namespace dpg
