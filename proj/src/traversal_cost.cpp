#include <algorithm>
#include <cmath>

#include "dpgraph/cost.hpp"
#include "dpgraph/errors.hpp"

namespace dpg {

double state_bytes(std::uint32_t width, const HbmParams& h) {
  return std::ceil(width / 8.0) + 1.0 + h.state_bookkeeping_bytes;
}

std::uint64_t sram_state_capacity(const HbmParams& h, std::uint64_t bytes_per_state) {
  if (bytes_per_state == 0) throw ArgumentError("state size must be positive");
  return h.shared_sram_bytes / bytes_per_state;
}

namespace {

std::uint32_t bank_of(VertexId v, std::uint32_t banks) {
  std::uint32_t x = v;  // murmur3 finalizer
  x ^= x >> 16;
  x *= 0x85ebca6bu;
  x ^= x >> 13;
  x *= 0xc2b2ae35u;
  x ^= x >> 16;
  return x & (banks - 1);
}

// Sum of squared bank shares of the Hop fetches: the probability that two
// random fetches collide on a bank.
double bank_collision(const PortProfile& prof, std::uint32_t banks) {
  if (prof.hop_fetches.empty()) return 0.0;
  std::vector<double> count(banks, 0.0);
  for (VertexId u : prof.hop_fetches) count[bank_of(u, banks)] += 1.0;
  const double total = double(prof.hop_fetches.size());
  double s = 0;
  for (double c : count) s += (c / total) * (c / total);
  return s;
}

}  // namespace

CostReport model_traversal(const BatchTrace& trace, const HbmParams& h, MappingMode mode) {
  h.validate();
  if (trace.mode != mode) throw ValidationError("trace was recorded under a different mapping mode");
  const PortProfile& prof = trace.profile;
  const double nodes = double(prof.nodes);
  const double fetches = double(prof.hop_fetches.size());
  const double ws = nodes * state_bytes(trace.width, h);
  const double sram = double(h.shared_sram_bytes);
  const double bw = h.channel_bandwidth;
  const double clock = h.pe_clock_hz;

  const bool shortm = mode == MappingMode::ShortParallel;
  const std::uint32_t lanes = shortm ? h.group_size : h.pe_per_pu;
  const std::uint32_t groups = shortm ? h.pe_per_pu / h.group_size : 1;
  const double sram_streams = std::max(1.0, std::floor(sram / std::max(ws, 1.0)));
  const double collide = bank_collision(prof, h.sram_banks);
  const double topo_bytes = nodes * h.node_record_bytes + double(prof.edges) * h.link_record_bytes;
  // Share of a window's operations that are SRAM fetches.
  const double rho = nodes + fetches > 0 ? fetches / (nodes + fetches) : 0.0;

  double compute = 0, spill_time = 0, regular = 0, irregular = 0, busy = 0, streams_seen = 0;
  for (const ReadTrace& rd : trace.reads) {
    const double k = std::max<std::uint32_t>(rd.windows, 1);
    const double width = std::min<double>(lanes, k);
    const double passes = std::ceil(k / width);
    const double depth = std::ceil(k / passes);  // windows in flight per pass
    const double per_group = std::max(1.0, std::floor(lanes / depth));
    const double streams = std::min(groups * per_group, sram_streams);
    const double contention = 1.0 + (streams - 1.0) * rho * collide;
    const double window_cycles = nodes + fetches * h.bank_access_cycles * contention;
    const double read_cycles = passes * window_cycles + (depth - 1.0);
    compute += read_cycles / streams / clock;
    busy += read_cycles * depth;
    streams_seen = std::max(streams_seen, streams);

    // Topology is streamed once per set of reads in flight together.
    regular += topo_bytes / streams + k * 4.0 * trace.width / 8.0;
    if (ws > sram) {
      const double spill = 2.0 * (ws - sram) * k;
      irregular += spill;
      spill_time += spill / bw + k * h.access_latency();
    }
  }

  CostReport r;
  r.phase = shortm ? "traversal_short" : "traversal_long";
  const double stream_time = (regular + irregular) / bw;
  r.wall_time = std::max(compute + spill_time, stream_time);
  r.cycles = r.wall_time * clock;
  r.hbm_bytes_regular = regular;
  r.hbm_bytes_irregular = irregular;
  const double hbm_e = (regular + irregular / 2) * 8 * h.read_energy_per_bit +
                       irregular / 2 * 8 * h.write_energy_per_bit;
  const double pe_e = h.pe_power_w * h.pe_per_pu * r.wall_time;
  const double sram_e = h.sram_power_w * (sram / 262144.0) * r.wall_time;
  r.energy = hbm_e + pe_e + sram_e;

  CostReport c, s, t;
  c.phase = "compute";
  c.cycles = compute * clock;
  c.wall_time = compute;
  c.energy = pe_e + sram_e;
  s.phase = "spill";
  s.cycles = spill_time * clock;
  s.wall_time = spill_time;
  s.hbm_bytes_irregular = irregular;
  s.energy = irregular / 2 * 8 * (h.read_energy_per_bit + h.write_energy_per_bit);
  t.phase = "stream";
  t.wall_time = regular / bw;
  t.cycles = t.wall_time * clock;
  t.hbm_bytes_regular = regular;
  t.energy = regular * 8 * h.read_energy_per_bit;
  r.phases = {c, s, t};

  r.utilization["bandwidth"] = r.wall_time > 0 ? stream_time / r.wall_time : 0;
  r.utilization["pe"] = r.cycles > 0 ? std::min(1.0, busy / (h.pe_per_pu * r.cycles)) : 0;
  r.utilization["sram"] = std::min(1.0, streams_seen * ws / sram);
  return r;
}

CostReport model_workload(const TraversalWorkload& w, const HbmParams& h) {
  CostReport total;
  total.phase = "workload";
  for (const BatchTrace& t : w.parts) {
    CostReport part = model_traversal(t, h, t.mode);
    total.add_counters(part);
    total.wall_time += part.wall_time;
    total.phases.push_back(std::move(part));
  }
  total.cycles = total.wall_time * h.pe_clock_hz;
  const double bytes = total.hbm_bytes();
  total.utilization["bandwidth"] =
      total.wall_time > 0 ? bytes / h.channel_bandwidth / total.wall_time : 0;
  return total;
}

std::size_t workload_reads(const TraversalWorkload& w) {
  std::size_t n = 0;
  for (const auto& t : w.parts) n += t.reads.size();
  return n;
}

double throughput(const CostReport& r, std::size_t reads) {
  return r.wall_time > 0 ? double(reads) / r.wall_time : 0.0;
}

std::vector<PePoint> sweep_pe_density(const TraversalWorkload& w, const std::vector<std::uint32_t>& counts,
                                      const HbmParams& h) {
  std::vector<PePoint> out;
  for (std::uint32_t pes : counts) {
    HbmParams q = h;
    q.pe_per_pu = pes;
    const CostReport r = model_workload(w, q);
    out.push_back({pes, throughput(r, workload_reads(w)), r.utilization.at("bandwidth")});
  }
  return out;
}

std::vector<SramPoint> sweep_sram(const TraversalWorkload& w, const std::vector<std::uint64_t>& capacities,
                                  const HbmParams& h) {
  std::vector<SramPoint> out;
  const double reads = std::max<double>(1.0, double(workload_reads(w)));
  for (std::uint64_t cap : capacities) {
    HbmParams q = h;
    q.shared_sram_bytes = cap;
    const CostReport r = model_workload(w, q);
    out.push_back({cap, r.hbm_bytes_regular / reads, r.hbm_bytes_irregular / reads,
                   throughput(r, workload_reads(w))});
  }
  return out;
}

namespace {

BatchTrace workload_part(std::size_t bases, std::size_t reads, std::size_t len, MappingMode mode,
                         std::uint64_t seed) {
  const SyntheticGenome genome = gen_genome(bases, 0.02, seed);
  const GenomeGraph g = genome.gfa.expand();
  const ReadBatch batch = gen_reads(g, reads, len, 0.01, seed + 1);
  return batch_align(g, batch, mode).trace;
}

}  // namespace

TraversalWorkload short_read_workload(std::uint64_t seed, std::size_t reads) {
  return {{workload_part(200, reads, 100, MappingMode::ShortParallel, seed)}};
}

TraversalWorkload long_read_workload(std::uint64_t seed, std::size_t reads) {
  return {{workload_part(10000, reads, 10000, MappingMode::LongPipeline, seed)}};
}

// Short reads are added until both halves take the same time on the default
// device, so neither length class dominates the sweep.
TraversalWorkload mixed_workload(std::uint64_t seed) {
  const HbmParams h;
  TraversalWorkload lw = long_read_workload(seed + 100);
  const TraversalWorkload probe = short_read_workload(seed, 256);
  const double per_short = model_workload(probe, h).wall_time / 256.0;
  const double long_time = model_workload(lw, h).wall_time;
  const auto reads = static_cast<std::size_t>(std::ceil(long_time / per_short));
  TraversalWorkload w = short_read_workload(seed, std::max<std::size_t>(reads, 1));
  w.parts.push_back(std::move(lw.parts.front()));
  return w;
}

// ---------------------------------------------------------------------------
// Roofline

const char* to_string(Kernel k) noexcept {
  switch (k) {
    case Kernel::FwClassic: return "FwClassic";
    case Kernel::FwPartitioned: return "FwPartitioned";
    case Kernel::S2G: return "S2G";
  }
  return "?";
}

Intensity arithmetic_intensity(Kernel k, std::uint32_t n, Counting c) {
  if (n < 2) throw ArgumentError("n must be at least 2");
  Intensity r;
  r.kernel = k;
  r.n = n;
  const double N = n;
  const bool store = c == Counting::LoadStore;
  switch (k) {
    case Kernel::FwClassic:
      // add + min per inner iteration; d[i][j], d[i][k], d[k][j] read from
      // memory each time (no reuse), 4 bytes each.
      r.ops = 2 * N * N * N;
      r.bytes = (store ? 16.0 : 12.0) * N * N * N;
      r.convention = store ? "3 reads + 1 write of 4 B per inner iteration"
                           : "3 reads of 4 B per inner iteration";
      break;
    case Kernel::FwPartitioned:
      // The N x N block is loaded once and stays resident for all N pivots.
      r.ops = 2 * N * N * N;
      r.bytes = (store ? 8.0 : 4.0) * N * N;
      r.convention = store ? "block loaded and stored once, 4 B entries" : "block loaded once, 4 B entries";
      break;
    case Kernel::S2G: {
      // One node update per window: OR, shift, OR, AND on W-bit vectors.
      // Loads: one predecessor state, the mask and the node's topology
      // record (2 B node + 4 B link); the store adds the W-bit state and carry.
      const double vec = N / 8.0;
      r.ops = 4;
      r.bytes = vec + vec + 6.0 + (store ? vec + 1.0 : 0.0);
      r.convention = "n = window bits; one predecessor per node";
      break;
    }
  }
  r.value = r.ops / r.bytes;
  return r;
}

}  // namespace dpg
