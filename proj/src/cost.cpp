#include "dpgraph/cost.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "json.hpp"

#include "dpgraph/errors.hpp"

namespace dpg {

namespace {

bool power_of_two(std::uint64_t x) { return x && !(x & (x - 1)); }

}  // namespace

void PcmParams::validate() const {
  if (!(read_energy_per_bit > 0 && write_energy_per_bit > 0 && read_latency > 0 && write_latency > 0 &&
        clock_hz > 0 && unit_dim > 0 && units_per_tile > 0 && tiles_per_die > 0 && bits > 0 &&
        add_cycles_per_bit > 0 && sub_cycles_per_bit > 0 && freq_derate_alpha > 0 && reference_dim > 0 &&
        burst_rows > 0 && tree_width > 0 && hbm_bandwidth > 0 && cold_bandwidth > 0))
    throw ValidationError("matrix-tile parameters must be strictly positive");
  if (!power_of_two(unit_dim)) throw ValidationError("unit_dim must be a power of two");
}

void HbmParams::validate() const {
  if (!(channels > 0 && banks_per_channel > 0 && read_energy_per_bit > 0 && write_energy_per_bit > 0 &&
        access_latency_min > 0 && access_latency_max >= access_latency_min && pe_per_pu > 0 &&
        group_size > 0 && shared_sram_bytes > 0 && sram_banks > 0 && pe_clock_hz > 0 &&
        channel_bandwidth > 0))
    throw ValidationError("traversal-tile parameters must be strictly positive");
  if (pe_per_pu % group_size != 0) throw ValidationError("pe_per_pu must be divisible by group_size");
  if (!power_of_two(sram_banks)) throw ValidationError("sram_banks must be a power of two");
}

void CostReport::add_counters(const CostReport& o) {
  cycles += o.cycles;
  energy += o.energy;
  hbm_bytes_regular += o.hbm_bytes_regular;
  hbm_bytes_irregular += o.hbm_bytes_irregular;
  pcm_writes += o.pcm_writes;
}

namespace {

nlohmann::ordered_json to_json(const CostReport& r) {
  nlohmann::ordered_json j;
  j["phase"] = r.phase;
  j["cycles"] = r.cycles;
  j["wall_time_s"] = r.wall_time;
  j["energy_j"] = r.energy;
  j["hbm_bytes_regular"] = r.hbm_bytes_regular;
  j["hbm_bytes_irregular"] = r.hbm_bytes_irregular;
  j["hbm_bytes"] = r.hbm_bytes();
  j["pcm_writes"] = r.pcm_writes;
  j["utilization"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.utilization) j["utilization"][k] = v;
  j["phases"] = nlohmann::ordered_json::array();
  for (const auto& p : r.phases) j["phases"].push_back(to_json(p));
  return j;
}

void csv_rows(std::ostream& out, const CostReport& r, const std::string& prefix) {
  const std::string name = prefix.empty() ? r.phase : prefix + "/" + r.phase;
  out << name << ',' << r.cycles << ',' << r.wall_time * 1e9 << ',' << r.energy * 1e12 << ','
      << r.hbm_bytes_regular << ',' << r.hbm_bytes_irregular << ',' << r.pcm_writes << '\n';
  for (const auto& p : r.phases) csv_rows(out, p, name);
}

}  // namespace

void write_report_json(std::ostream& out, const CostReport& r) { out << to_json(r).dump(2) << '\n'; }

void write_report_csv(std::ostream& out, const CostReport& r) {
  out << "phase,cycles,ns,pJ,bytes_regular,bytes_irregular,writes\n";
  csv_rows(out, r, "");
}

// ---------------------------------------------------------------------------
// Matrix tile

double derate(std::uint32_t dim, const PcmParams& p) {
  if (dim <= p.reference_dim) return 1.0;
  return std::pow(static_cast<double>(dim) / p.reference_dim, p.freq_derate_alpha);
}

namespace {

double permutation_cycles(std::uint32_t rows, const PcmParams& p) {
  const double per = p.dma_read_cycles + p.dma_write_cycles;
  if (p.permutation_overlap) return std::ceil(static_cast<double>(rows) / p.burst_rows) * per;
  return rows * per;
}

CostReport phase(const std::string& name, double cycles, double seconds, double energy) {
  CostReport r;
  r.phase = name;
  r.cycles = cycles;
  r.wall_time = seconds;
  r.energy = energy;
  return r;
}

}  // namespace

double fw_pivot_cycles(std::uint32_t dim, const PcmParams& p) {
  return double(p.add_cycles_per_bit) * p.bits + double(p.sub_cycles_per_bit) * p.bits +
         permutation_cycles(dim, p);
}

CostReport model_fw_block(std::uint32_t dim, std::uint64_t pivots, std::uint64_t improvements,
                          const PcmParams& p) {
  p.validate();
  if (dim > p.unit_dim)
    throw CapacityError("block of " + std::to_string(dim) + " exceeds unit_dim " + std::to_string(p.unit_dim));
  const double slow = derate(dim, p) / p.clock_hz;
  const double add = double(pivots) * p.add_cycles_per_bit * p.bits;
  const double sub = double(pivots) * p.sub_cycles_per_bit * p.bits;
  const double perm = double(pivots) * permutation_cycles(dim, p);
  // Each pivot streams the block once for the compare; only strict
  // improvements are written back.
  const double read_e = double(pivots) * double(dim) * dim * p.bits * p.read_energy_per_bit;
  const double write_e = double(improvements) * p.bits * p.write_energy_per_bit;

  CostReport r;
  r.phase = "fw_block";
  r.phases = {phase("add", add, add * slow, 0), phase("compare", sub, sub * slow, read_e),
              phase("permute", perm, perm * slow, 0), phase("writeback", 0, 0, write_e)};
  r.phases.back().pcm_writes = double(improvements);
  r.cycles = add + sub + perm;
  r.wall_time = r.cycles * slow;
  r.energy = read_e + write_e;
  r.pcm_writes = double(improvements);
  return r;
}

double reduction_cycles_per_row(const PcmParams& p) {
  return double(p.stream_cycles) + p.tree1_cycles + p.tree2_cycles;
}

CostReport model_mp_merge(std::uint64_t rows, std::uint32_t width, const PcmParams& p) {
  p.validate();
  if (width > p.tree_width)
    throw CapacityError("merge width " + std::to_string(width) + " exceeds the comparator tree");
  const double slow = derate(p.unit_dim, p) / p.clock_hz;
  const double reduce = double(rows) * reduction_cycles_per_row(p);
  // Two bit-serial additions per array load; an array holds unit_dim rows.
  const double loads = std::ceil(double(rows) / p.unit_dim);
  const double add = loads * 2.0 * p.add_cycles_per_bit * p.bits;
  const double read_e = double(rows) * width * 2.0 * p.bits * p.read_energy_per_bit;
  const double write_e = double(rows) * p.bits * p.write_energy_per_bit;

  CostReport r;
  r.phase = "mp_merge";
  r.phases = {phase("add", add, add * slow, read_e), phase("reduction", reduce, reduce * slow, 0),
              phase("writeback", 0, 0, write_e)};
  r.phases.back().pcm_writes = double(rows);
  r.cycles = add + reduce;
  r.wall_time = r.cycles * slow;
  r.energy = read_e + write_e;
  r.pcm_writes = double(rows);
  return r;
}

namespace {

// Units available for concurrent blocks. The die has a fixed number of cells,
// so the count scales with (reference / unit_dim)^2.
double unit_slots(const PcmParams& p) {
  const double scale = double(p.reference_dim) / p.unit_dim;
  return std::max(1.0, std::floor(double(p.units_per_tile) * p.tiles_per_die * scale * scale));
}

// Jobs grouped by duration; scheduled longest first in waves over identical
// units.
class JobPool {
 public:
  void add(double seconds, std::uint64_t count = 1) {
    if (count) jobs_[seconds] += count;
  }
  double makespan(double slots) const {
    const auto s = static_cast<std::uint64_t>(slots);
    double t = 0;
    std::uint64_t placed = 0;
    for (const auto& [d, c] : jobs_) {
      // Waves that start inside [placed, placed + c).
      const std::uint64_t first = (placed + s - 1) / s, last = (placed + c - 1) / s;
      t += d * double(last + 1 - first);
      placed += c;
    }
    return t;
  }

 private:
  std::map<double, std::uint64_t, std::greater<>> jobs_;
};

// Min-plus product rows x inner -> rows x cols, split into unit-sized
// reductions. Returns per-unit jobs (seconds) and accumulates counters.
void merge_jobs(std::uint64_t rows, std::uint64_t inner, std::uint64_t cols, const PcmParams& p,
                JobPool& jobs, CostReport& acc) {
  if (rows == 0 || cols == 0 || inner == 0) return;
  const std::uint64_t chunks = (inner + p.tree_width - 1) / p.tree_width;
  const auto width = static_cast<std::uint32_t>(std::min<std::uint64_t>(inner, p.tree_width));
  const std::uint64_t reductions = rows * cols * chunks;
  // One unit takes unit_dim reductions at a time.
  const std::uint64_t full = reductions / p.unit_dim, rest = reductions % p.unit_dim;
  if (full) {
    const CostReport one = model_mp_merge(p.unit_dim, width, p);
    jobs.add(one.wall_time, full);
    acc.cycles += one.cycles * double(full);
    acc.energy += one.energy * double(full);
    acc.pcm_writes += one.pcm_writes * double(full);
  }
  if (rest) {
    const CostReport last = model_mp_merge(rest, width, p);
    jobs.add(last.wall_time);
    acc.add_counters(last);
  }
}

// Closure of a block larger than a unit: tiled in unit_dim blocks, the pivot
// tile closed in place, the pivot strips relaxed per pivot, the rest updated
// by min-plus products.
CostReport model_tiled_closure(std::uint32_t dim, std::uint64_t improvements, const PcmParams& p) {
  const std::uint32_t t = p.unit_dim;
  const std::uint64_t nb = (dim + t - 1) / t;
  const double slots = unit_slots(p);
  CostReport r;
  r.phase = "fw_tiled";
  const CostReport diag = model_fw_block(t, t, 0, p);
  // Every pivot tile costs the same, so one round is modeled and scaled.
  CostReport round;
  round.add_counters(diag);
  JobPool strips, main;
  strips.add(diag.wall_time, 2 * (nb - 1));
  for (std::uint64_t i = 0; i < 2 * (nb - 1); ++i) round.add_counters(diag);
  merge_jobs(std::uint64_t{t} * (nb - 1) * (nb - 1), t, t, p, main, round);
  const double f = double(nb);
  r.cycles = round.cycles * f;
  r.energy = round.energy * f;
  r.pcm_writes = round.pcm_writes * f;
  const double wall = f * (diag.wall_time + strips.makespan(slots) + main.makespan(slots));
  r.energy += double(improvements) * p.bits * p.write_energy_per_bit;
  r.pcm_writes += double(improvements);
  r.wall_time = wall;
  return r;
}

CostReport model_closure(const ClosureEvent& e, const PcmParams& p) {
  if (e.stats.dim > p.unit_dim) {
    if (!e.tiled) throw ValidationError("untiled closure larger than unit_dim in trace");
    return model_tiled_closure(e.stats.dim, e.stats.improvements, p);
  }
  return model_fw_block(e.stats.dim, e.stats, p);
}

}  // namespace

CostReport model_recursive_apsp(const ExecutionTrace& trace, const PcmParams& p) {
  p.validate();
  const std::uint32_t levels = trace.levels;
  if (levels == 0) throw ValidationError("trace has no levels");
  const double slots = unit_slots(p);

  std::vector<JobPool> initial(levels), reclose(levels), merges(levels);
  std::vector<double> inject_time(levels, 0.0), top_time(levels, 0.0);
  CostReport closures, tops, recloses, injects, merge_acc;
  closures.phase = "closure";
  tops.phase = "boundary_fw";
  recloses.phase = "reclose";
  injects.phase = "inject";
  merge_acc.phase = "merge";

  for (const ClosureEvent& e : trace.closures) {
    if (e.level >= levels) throw ValidationError("closure event beyond the trace's levels");
    const CostReport c = model_closure(e, p);
    switch (e.kind) {
      case ClosureKind::Initial:
        initial[e.level].add(c.wall_time);
        closures.add_counters(c);
        break;
      case ClosureKind::Reclose:
        reclose[e.level].add(c.wall_time);
        recloses.add_counters(c);
        break;
      case ClosureKind::Top:
        top_time[e.level] += c.wall_time;
        tops.add_counters(c);
        break;
    }
  }
  for (const InjectEvent& e : trace.injects) {
    if (e.level >= levels) throw ValidationError("inject event beyond the trace's levels");
    // Rows of the boundary sub-block are rewritten; entries only when lower.
    const double rows = e.boundary;
    const double cyc = rows * p.dma_write_cycles;
    inject_time[e.level] = std::max(inject_time[e.level], cyc / p.clock_hz);
    injects.cycles += cyc;
    injects.energy += double(e.writes) * p.bits * p.write_energy_per_bit;
    injects.pcm_writes += double(e.writes);
  }
  for (const MergeEvent& e : trace.merges) {
    if (e.level >= levels) throw ValidationError("merge event beyond the trace's levels");
    merge_jobs(e.rows, e.inner, e.cols, p, merges[e.level], merge_acc);
  }

  double compute = 0;
  std::vector<double> level_wall(levels, 0.0);
  for (std::uint32_t l = 0; l < levels; ++l) {
    level_wall[l] = initial[l].makespan(slots) + top_time[l] + inject_time[l] + reclose[l].makespan(slots) +
                    merges[l].makespan(slots);
    compute += level_wall[l];
  }
  closures.wall_time = 0;
  for (std::uint32_t l = 0; l < levels; ++l) closures.wall_time += initial[l].makespan(slots);
  recloses.wall_time = 0;
  merge_acc.wall_time = 0;
  tops.wall_time = 0;
  injects.wall_time = 0;
  for (std::uint32_t l = 0; l < levels; ++l) {
    recloses.wall_time += reclose[l].makespan(slots);
    merge_acc.wall_time += merges[l].makespan(slots);
    tops.wall_time += top_time[l];
    injects.wall_time += inject_time[l];
  }

  // Input arcs come from the cold tier, boundary matrices move over HBM.
  CostReport staging;
  staging.phase = "staging";
  const double cold_bytes = double(trace.arcs) * 12.0;
  double hbm_bytes = 0;
  for (const ClosureEvent& e : trace.closures)
    if (e.kind == ClosureKind::Top) hbm_bytes += 4.0 * e.stats.dim * e.stats.dim;
  staging.hbm_bytes_regular = cold_bytes + hbm_bytes;
  staging.wall_time = cold_bytes / p.cold_bandwidth + hbm_bytes / p.hbm_bandwidth;

  CostReport r;
  r.phase = "recursive_apsp";
  for (const CostReport* c : {&closures, &tops, &injects, &recloses, &merge_acc, &staging}) {
    r.add_counters(*c);
    r.phases.push_back(*c);
  }
  r.wall_time = std::max(compute, staging.wall_time);
  r.utilization["staging"] = r.wall_time > 0 ? staging.wall_time / r.wall_time : 0;
  r.utilization["merge_share"] = compute > 0 ? merge_acc.wall_time / compute : 0;
  return r;
}

ExecutionTrace trace_from_hierarchy(const PartitionHierarchy& h, std::uint32_t dense_limit) {
  ExecutionTrace t;
  t.levels = static_cast<std::uint32_t>(h.levels.size());
  if (!h.levels.empty()) t.vertices = h.levels.front().vertices.size();
  for (std::uint32_t l = 0; l < t.levels; ++l) {
    const HierarchyLevel& level = h.levels[l];
    for (std::uint32_t c = 0; c < level.components.size(); ++c) {
      const auto dim = static_cast<std::uint32_t>(level.components[c].size());
      t.closures.push_back({l, c, ClosureKind::Initial, {dim, dim, 0}, dim > h.max_tile});
    }
  }
  if (!h.levels.back().terminal()) {
    const auto dim = static_cast<std::uint32_t>(h.levels.back().num_boundary());
    t.closures.push_back({t.levels - 1, 0, ClosureKind::Top, {dim, dim, 0}, dim > h.max_tile});
  }
  for (std::uint32_t l = t.levels; l-- > 0;) {
    const HierarchyLevel& level = h.levels[l];
    if (level.terminal()) continue;
    const std::size_t k = level.components.size();
    for (std::uint32_t c = 0; c < k; ++c) {
      const auto nb = static_cast<std::uint32_t>(level.boundaries[c].size());
      t.injects.push_back({l, c, nb, 0});
      if (nb >= 2) {
        const auto dim = static_cast<std::uint32_t>(level.components[c].size());
        t.closures.push_back({l, c, ClosureKind::Reclose, {dim, dim, 0}, dim > h.max_tile});
      }
    }
    if (l == 0 && t.vertices > dense_limit) continue;
    for (std::uint32_t a = 0; a < k; ++a) {
      const std::uint64_t ba = level.boundaries[a].size();
      if (ba == 0) continue;
      for (std::uint32_t b = 0; b < k; ++b) {
        const std::uint64_t bb = level.boundaries[b].size();
        if (a == b || bb == 0) continue;
        const std::uint64_t ca = level.components[a].size(), cb = level.components[b].size();
        t.merges.push_back({l, a, b, 0, ca, ba, bb});
        t.merges.push_back({l, a, b, 1, ca, bb, cb});
      }
    }
  }
  return t;
}

std::vector<TilePoint> sweep_tile_size(const WeightedGraph& g, const std::vector<std::uint32_t>& tiles,
                                       const PcmParams& p, std::uint64_t seed) {
  std::vector<TilePoint> out;
  for (std::uint32_t tile : tiles) {
    HierarchyOptions hopts;
    hopts.weighted = false;
    hopts.stall = StallPolicy::BlockedTop;
    const PartitionHierarchy h = build_hierarchy(g, tile, seed, hopts);
    ExecutionTrace t = trace_from_hierarchy(h);
    t.arcs = g.num_edges();
    PcmParams q = p;
    q.unit_dim = tile;
    const CostReport r = model_recursive_apsp(t, q);
    TilePoint pt;
    pt.tile = tile;
    pt.latency = r.wall_time;
    pt.energy = r.energy;
    pt.depth = h.depth();
    for (const auto& level : h.levels) {
      pt.components += level.components.size();
      pt.boundary += level.num_boundary();
    }
    out.push_back(pt);
  }
  if (out.empty()) return out;
  std::size_t anchor = 0;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].tile == 1024) anchor = i;
  for (auto& pt : out) {
    pt.norm_latency = pt.latency / out[anchor].latency;
    pt.norm_energy = pt.energy / out[anchor].energy;
  }
  return out;
}

}  // namespace dpg
