#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dpgraph/apsp.hpp"
#include "dpgraph/block.hpp"
#include "dpgraph/s2g.hpp"

namespace dpg {

// ---------------------------------------------------------------------------
// Device parameters

struct PcmParams {
  double read_energy_per_bit = 0.05e-12;   // J
  double write_energy_per_bit = 0.56e-12;  // J
  double read_latency = 2e-9;              // s
  double write_latency = 20e-9;            // s
  double clock_hz = 500e6;
  std::uint32_t unit_dim = 1024;
  std::uint32_t units_per_tile = 130;
  std::uint32_t tiles_per_die = 128;
  std::uint32_t bits = 32;
  std::uint32_t add_cycles_per_bit = 2;
  std::uint32_t sub_cycles_per_bit = 2;
  double freq_derate_alpha = 1.3;
  /// Array size at which the clock is nominal.
  std::uint32_t reference_dim = 1024;

  // Permutation unit: 32-row bursts, 1-cycle read + 10-cycle write.
  std::uint32_t burst_rows = 32;
  std::uint32_t dma_read_cycles = 1;
  std::uint32_t dma_write_cycles = 10;
  /// false: the permutation is serialized row by row after the compute.
  bool permutation_overlap = true;

  // Comparator tree: stream, first-level tree, second-level tree.
  std::uint32_t stream_cycles = 1;
  std::uint32_t tree1_cycles = 6;
  std::uint32_t tree2_cycles = 6;
  std::uint32_t tree_width = 1024;

  // Staging streams.
  double hbm_bandwidth = 819.2e9;  // B/s aggregate
  double cold_bandwidth = 8e9;     // B/s

  void validate() const;
};

struct HbmParams {
  std::uint32_t channels = 16;
  std::uint32_t banks_per_channel = 32;
  double read_energy_per_bit = 0.4e-12;
  double write_energy_per_bit = 0.45e-12;
  double access_latency_min = 10e-9;
  double access_latency_max = 20e-9;
  std::uint32_t pe_per_pu = 64;
  std::uint32_t group_size = 4;
  std::uint64_t shared_sram_bytes = 262144;
  std::uint32_t sram_banks = 32;
  std::uint32_t bank_access_cycles = 1;
  double pe_clock_hz = 1e9;
  std::uint32_t srf_bits = 384;
  std::uint32_t pattern_buffer_bytes = 256;
  std::uint32_t tbm_bytes = 4096;
  std::uint32_t bplu_width = 128;
  /// Peak bandwidth of one channel (aggregate 819.2 GB/s over 16).
  double channel_bandwidth = 51.2e9;
  /// Per-node state bookkeeping beyond the W-bit vector and the carry bit.
  std::uint32_t state_bookkeeping_bytes = 4;
  /// Bytes streamed per node and per predecessor link of the topology.
  std::uint32_t node_record_bytes = 2;
  std::uint32_t link_record_bytes = 4;
  double pe_power_w = 18.4e-3 / 64;     // per PE
  double sram_power_w = 19.4e-3;        // for 256 KB, scaled by capacity

  double access_latency() const noexcept { return 0.5 * (access_latency_min + access_latency_max); }
  void validate() const;
};

// ---------------------------------------------------------------------------
// Reports

struct CostReport {
  std::string phase = "total";
  double cycles = 0;
  double wall_time = 0;  // s
  double energy = 0;     // J
  double hbm_bytes_regular = 0;
  double hbm_bytes_irregular = 0;
  double pcm_writes = 0;
  std::map<std::string, double> utilization;
  std::vector<CostReport> phases;

  double hbm_bytes() const noexcept { return hbm_bytes_regular + hbm_bytes_irregular; }
  /// Adds counters (not wall time or phases) of `o`.
  void add_counters(const CostReport& o);
};

void write_report_json(std::ostream& out, const CostReport& r);
/// One row per phase (the report itself first):
/// phase,cycles,ns,pJ,bytes_regular,bytes_irregular,writes
void write_report_csv(std::ostream& out, const CostReport& r);

// ---------------------------------------------------------------------------
// Matrix tile

/// Cycles for one pivot of a dim-wide block.
double fw_pivot_cycles(std::uint32_t dim, const PcmParams& p);
/// Clock slowdown (>= 1) of a dim-wide array.
double derate(std::uint32_t dim, const PcmParams& p);

/// Closure of one block. `improvements` are the strict-improvement writes.
CostReport model_fw_block(std::uint32_t dim, std::uint64_t pivots, std::uint64_t improvements,
                          const PcmParams& p);
inline CostReport model_fw_block(std::uint32_t dim, const ClosureStats& s, const PcmParams& p) {
  return model_fw_block(dim, s.pivots, s.improvements, p);
}

/// Cycles of the comparator tree for one row.
double reduction_cycles_per_row(const PcmParams& p);

/// `rows` min-reductions of `width` candidates each. The "reduction" phase
/// carries the comparator-tree cycles, the "add" phase the two bit-serial
/// additions.
CostReport model_mp_merge(std::uint64_t rows, std::uint32_t width, const PcmParams& p);

/// Critical path over the level structure of a recursive run: concurrent
/// closures and merges share the die's units, levels are sequential.
CostReport model_recursive_apsp(const ExecutionTrace& trace, const PcmParams& p);

/// Trace a recursive run would produce for this hierarchy, with improvement
/// counts left at zero. Works on structure-only hierarchies. As in the real
/// run, base-level pair merges appear only when n <= dense_limit.
ExecutionTrace trace_from_hierarchy(const PartitionHierarchy& h, std::uint32_t dense_limit = kDenseLimit);

struct TilePoint {
  std::uint32_t tile = 0;
  double latency = 0;  // s
  double energy = 0;   // J
  double norm_latency = 0;
  double norm_energy = 0;
  std::size_t depth = 0;
  std::size_t components = 0;
  std::size_t boundary = 0;
};

/// Builds a structure-only hierarchy per tile size and models it with
/// unit_dim set to that size. Normalized to 1024 when present, else to the
/// first point.
std::vector<TilePoint> sweep_tile_size(const WeightedGraph& g, const std::vector<std::uint32_t>& tiles,
                                       const PcmParams& p, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Traversal tile

/// Bytes of one node's state at window width `width`.
double state_bytes(std::uint32_t width, const HbmParams& h);
/// Node states that fit in the shared SRAM at `bytes_per_state`.
std::uint64_t sram_state_capacity(const HbmParams& h, std::uint64_t bytes_per_state);

CostReport model_traversal(const BatchTrace& trace, const HbmParams& h, MappingMode mode);

/// Batches aligned against possibly different graphs, each with its mode.
struct TraversalWorkload {
  std::vector<BatchTrace> parts;
};

/// Sums the parts; wall times add (the parts run back to back).
CostReport model_workload(const TraversalWorkload& w, const HbmParams& h);
double throughput(const CostReport& r, std::size_t reads);
std::size_t workload_reads(const TraversalWorkload& w);

struct PePoint {
  std::uint32_t pes = 0;
  double throughput = 0;  // reads / s
  double bandwidth_utilization = 0;
};
std::vector<PePoint> sweep_pe_density(const TraversalWorkload& w, const std::vector<std::uint32_t>& counts,
                                      const HbmParams& h);

struct SramPoint {
  std::uint64_t bytes = 0;
  double regular = 0;    // bytes per read
  double irregular = 0;  // bytes per read
  double throughput = 0;
};
std::vector<SramPoint> sweep_sram(const TraversalWorkload& w, const std::vector<std::uint64_t>& capacities,
                                  const HbmParams& h);

/// Standard workloads for the sweeps: short reads on a small subgraph,
/// long reads on a large one, and both together.
TraversalWorkload short_read_workload(std::uint64_t seed, std::size_t reads = 256);
TraversalWorkload long_read_workload(std::uint64_t seed, std::size_t reads = 4);
TraversalWorkload mixed_workload(std::uint64_t seed);

// ---------------------------------------------------------------------------
// Roofline

enum class Kernel { FwClassic, FwPartitioned, S2G };

enum class Counting {
  /// FW: three 4-byte reads per inner iteration; partitioned FW: one load of
  /// the N x N block; S2G: predecessor states, mask and topology reads.
  LoadOnly,
  /// Adds the store of every result.
  LoadStore,
};

struct Intensity {
  Kernel kernel = Kernel::FwClassic;
  std::uint32_t n = 0;
  double ops = 0;
  double bytes = 0;
  double value = 0;  // ops / byte
  std::string convention;
};

Intensity arithmetic_intensity(Kernel k, std::uint32_t n, Counting c = Counting::LoadOnly);
const char* to_string(Kernel k) noexcept;

}  // namespace dpg
