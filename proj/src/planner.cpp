#include "dpgraph/planner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dpgraph/errors.hpp"
#include "dpgraph/io.hpp"
#include "json.hpp"

namespace dpg {

using ojson = nlohmann::ordered_json;

namespace {

template <class F>
void for_each_field(PcmParams& p, F&& f) {
  f("read_energy_per_bit", p.read_energy_per_bit);
  f("write_energy_per_bit", p.write_energy_per_bit);
  f("read_latency", p.read_latency);
  f("write_latency", p.write_latency);
  f("clock_hz", p.clock_hz);
  f("unit_dim", p.unit_dim);
  f("units_per_tile", p.units_per_tile);
  f("tiles_per_die", p.tiles_per_die);
  f("bits", p.bits);
  f("add_cycles_per_bit", p.add_cycles_per_bit);
  f("sub_cycles_per_bit", p.sub_cycles_per_bit);
  f("freq_derate_alpha", p.freq_derate_alpha);
  f("reference_dim", p.reference_dim);
  f("burst_rows", p.burst_rows);
  f("dma_read_cycles", p.dma_read_cycles);
  f("dma_write_cycles", p.dma_write_cycles);
  f("permutation_overlap", p.permutation_overlap);
  f("stream_cycles", p.stream_cycles);
  f("tree1_cycles", p.tree1_cycles);
  f("tree2_cycles", p.tree2_cycles);
  f("tree_width", p.tree_width);
  f("hbm_bandwidth", p.hbm_bandwidth);
  f("cold_bandwidth", p.cold_bandwidth);
}

template <class F>
void for_each_field(HbmParams& h, F&& f) {
  f("channels", h.channels);
  f("banks_per_channel", h.banks_per_channel);
  f("read_energy_per_bit", h.read_energy_per_bit);
  f("write_energy_per_bit", h.write_energy_per_bit);
  f("access_latency_min", h.access_latency_min);
  f("access_latency_max", h.access_latency_max);
  f("pe_per_pu", h.pe_per_pu);
  f("group_size", h.group_size);
  f("shared_sram_bytes", h.shared_sram_bytes);
  f("sram_banks", h.sram_banks);
  f("bank_access_cycles", h.bank_access_cycles);
  f("pe_clock_hz", h.pe_clock_hz);
  f("srf_bits", h.srf_bits);
  f("pattern_buffer_bytes", h.pattern_buffer_bytes);
  f("tbm_bytes", h.tbm_bytes);
  f("bplu_width", h.bplu_width);
  f("channel_bandwidth", h.channel_bandwidth);
  f("state_bookkeeping_bytes", h.state_bookkeeping_bytes);
  f("node_record_bytes", h.node_record_bytes);
  f("link_record_bytes", h.link_record_bytes);
  f("pe_power_w", h.pe_power_w);
  f("sram_power_w", h.sram_power_w);
}

template <class P>
ojson params_json(const P& params) {
  P copy = params;
  ojson j = ojson::object();
  for_each_field(copy, [&](const char* name, auto& v) { j[name] = v; });
  return j;
}

template <class P>
void apply_params(const ojson& j, P& params, const char* section) {
  if (!j.is_object()) throw DescriptorError(std::string("device.") + section + " must be an object");
  std::set<std::string> known;
  for_each_field(params, [&](const char* name, auto& v) {
    known.insert(name);
    if (!j.contains(name)) return;
    const ojson& x = j.at(name);
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<T, bool>) {
      if (!x.is_boolean()) throw DescriptorError(std::string(name) + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!x.is_number_unsigned()) throw DescriptorError(std::string(name) + " must be a non-negative integer");
    } else {
      if (!x.is_number()) throw DescriptorError(std::string(name) + " must be a number");
    }
    v = x.get<T>();
  });
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw DescriptorError(std::string("unknown device.") + section + " field '" + key + "'");
}

const char* mapping_name(MappingChoice m) {
  switch (m) {
    case MappingChoice::Auto: return "auto";
    case MappingChoice::Short: return "short";
    case MappingChoice::Long: return "long";
  }
  return "?";
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

std::string name(const char* prefix, std::int64_t a) { return std::string(prefix) + "[" + std::to_string(a) + "]"; }

std::string name(const char* prefix, std::int64_t a, std::int64_t b) {
  return name(prefix, a) + "[" + std::to_string(b) + "]";
}

std::string name(const char* prefix, std::int64_t a, std::int64_t b, std::int64_t c) {
  return name(prefix, a, b) + "[" + std::to_string(c) + "]";
}

TileKind tile_for(StageKind k) {
  switch (k) {
    case StageKind::PartitionBuild: return TileKind::Host;
    case StageKind::FwClose:
    case StageKind::BoundaryFw:
    case StageKind::Inject:
    case StageKind::Merge: return TileKind::Matrix;
    case StageKind::MaskBuild:
    case StageKind::AlignBatch: return TileKind::Traversal;
  }
  return TileKind::Host;
}

class PlanBuilder {
 public:
  explicit PlanBuilder(ExecutionPlan& plan) : plan_(plan) {}
  Stage& add(StageKind k, std::int32_t level, std::vector<std::string> in, std::vector<std::string> out) {
    Stage s;
    s.id = static_cast<int>(plan_.stages.size());
    s.kind = k;
    s.tile = tile_for(k);
    s.level = level;
    s.inputs = std::move(in);
    s.outputs = std::move(out);
    plan_.stages.push_back(std::move(s));
    return plan_.stages.back();
  }

 private:
  ExecutionPlan& plan_;
};

ApspOptions apsp_options(const WorkloadDescriptor& w) {
  ApspOptions o;
  o.seed = w.seed;
  return o;
}

void lower_apsp(const WorkloadDescriptor& w, ExecutionPlan& plan, PlanInputs& in) {
  if (w.graph_data) {
    in.graph = *w.graph_data;
  } else {
    if (w.graph.empty()) throw DescriptorError("apsp workload needs a graph");
    in.graph = io::read_edge_list(w.graph);
  }
  if (w.max_tile < 2) throw DescriptorError("max_tile must be at least 2");
  const ApspOptions ao = apsp_options(w);
  HierarchyOptions ho;
  ho.k_fn = ao.k_fn;
  ho.partition = ao.partition;
  ho.stall = ao.stall;
  ho.max_shrink = ao.max_shrink;
  ho.weighted = false;
  const PartitionHierarchy h = build_hierarchy(in.graph, w.max_tile, ao.seed, ho);
  const auto depth = static_cast<std::int32_t>(h.levels.size());
  const bool full = in.graph.num_vertices() <= ao.dense_limit;

  PlanBuilder b(plan);
  for (std::int32_t l = 0; l < depth; ++l)
    b.add(StageKind::PartitionBuild, l, {l == 0 ? std::string("graph") : name("level", l - 1)}, {name("level", l)});
  for (std::int32_t l = 0; l < depth; ++l)
    for (std::size_t c = 0; c < h.levels[l].components.size(); ++c)
      b.add(StageKind::FwClose, l, {name("level", l)}, {name("block", l, std::int64_t(c))});

  const HierarchyLevel& last = h.levels.back();
  if (!last.terminal()) b.add(StageKind::BoundaryFw, depth - 1, {name("level", depth - 1)}, {name("db", depth - 1)});

  for (std::int32_t l = depth; l-- > 0;) {
    const HierarchyLevel& level = h.levels[l];
    const std::size_t k = level.components.size();
    std::vector<std::string> blocks;
    for (std::size_t c = 0; c < k; ++c) blocks.push_back(name("block", l, std::int64_t(c)));
    std::string closed = name("block", l, std::int64_t(0));
    std::vector<std::string> merged;
    if (!level.terminal()) {
      std::vector<std::string> inputs = blocks;
      inputs.push_back(name("db", l));
      b.add(StageKind::Inject, l, inputs, {name("closed", l)});
      closed = name("closed", l);
      if (l > 0 || full) {
        for (std::size_t a = 0; a < k; ++a) {
          if (level.boundaries[a].empty()) continue;
          for (std::size_t c = 0; c < k; ++c) {
            if (a == c || level.boundaries[c].empty()) continue;
            merged.push_back(name("merge", l, std::int64_t(a), std::int64_t(c)));
            b.add(StageKind::Merge, l, {closed, name("db", l)}, {merged.back()});
          }
        }
      }
    }
    if (l > 0) {
      // Distances over this level's vertices form the boundary matrix below.
      std::vector<std::string> inputs{closed};
      inputs.insert(inputs.end(), merged.begin(), merged.end());
      b.add(StageKind::BoundaryFw, l - 1, inputs, {name("db", l - 1)});
    }
  }
}

void lower_s2g(const WorkloadDescriptor& w, ExecutionPlan& plan, PlanInputs& in) {
  if (w.genome_data) {
    in.genome = *w.genome_data;
  } else {
    if (w.graph.empty()) throw DescriptorError("s2g workload needs a graph");
    in.genome = io::load_genome_graph(w.graph);
  }
  std::vector<Read> reads;
  if (w.reads_data) {
    reads = w.reads_data->reads;
  } else {
    if (w.reads.empty()) throw DescriptorError("s2g workload needs reads");
    reads = io::read_fasta(w.reads);
  }
  if (w.width == 0 || w.width > kMaxWindow) throw DescriptorError("window width out of range");

  // Split by length class, keeping input order inside each class.
  ReadBatch shorts, longs;
  shorts.length_class = LengthClass::Short;
  longs.length_class = LengthClass::Long;
  std::vector<std::size_t> short_pos, long_pos;
  for (std::size_t i = 0; i < reads.size(); ++i) {
    if (classify_length(reads[i].seq.size(), w.length_threshold) == LengthClass::Short) {
      shorts.reads.push_back(reads[i]);
      short_pos.push_back(i);
    } else {
      longs.reads.push_back(reads[i]);
      long_pos.push_back(i);
    }
  }

  PlanBuilder b(plan);
  b.add(StageKind::MaskBuild, -1, {"reads"}, {"masks"});
  auto add_batch = [&](ReadBatch& batch, std::vector<std::size_t>& pos, const char* label, std::size_t len) {
    if (batch.reads.empty()) return;
    Stage& s = b.add(StageKind::AlignBatch, -1, {"graph", "masks", std::string("reads.") + label},
                     {std::string("scores.") + label});
    switch (w.mapping) {
      case MappingChoice::Auto: s.mapping = select_mapping(len, w.length_threshold); break;
      case MappingChoice::Short: s.mapping = MappingMode::ShortParallel; break;
      case MappingChoice::Long: s.mapping = MappingMode::LongPipeline; break;
    }
    in.batches.push_back(std::move(batch));
    in.read_order.insert(in.read_order.end(), pos.begin(), pos.end());
  };
  const auto longest = [](const ReadBatch& rb) {
    std::size_t m = 1;
    for (const Read& r : rb.reads) m = std::max(m, r.seq.size());
    return m;
  };
  add_batch(shorts, short_pos, "short", longest(shorts));
  add_batch(longs, long_pos, "long", longest(longs));
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(StageKind k) noexcept {
  switch (k) {
    case StageKind::PartitionBuild: return "PartitionBuild";
    case StageKind::FwClose: return "FwClose";
    case StageKind::BoundaryFw: return "BoundaryFw";
    case StageKind::Inject: return "Inject";
    case StageKind::Merge: return "Merge";
    case StageKind::MaskBuild: return "MaskBuild";
    case StageKind::AlignBatch: return "AlignBatch";
  }
  return "?";
}

const char* to_string(TileKind t) noexcept {
  switch (t) {
    case TileKind::Matrix: return "Matrix";
    case TileKind::Traversal: return "Traversal";
    case TileKind::Host: return "Host";
  }
  return "?";
}

std::size_t ExecutionPlan::count(StageKind k) const {
  return static_cast<std::size_t>(
      std::count_if(stages.begin(), stages.end(), [k](const Stage& s) { return s.kind == k; }));
}

MappingMode select_mapping(std::size_t read_len, std::size_t threshold) {
  if (read_len == 0) throw ArgumentError("read length must be positive");
  return read_len <= threshold ? MappingMode::ShortParallel : MappingMode::LongPipeline;
}

WorkloadDescriptor parse_descriptor(const std::string& json_text, const std::string& base_dir) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DescriptorError(std::string("descriptor is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DescriptorError("descriptor must be a JSON object");
  static const std::set<std::string> keys{"kind",  "graph",   "reads",  "max_tile",         "seed",
                                          "mode",  "width",   "device", "length_threshold", "carry"};
  for (const auto& [key, _] : j.items())
    if (!keys.count(key)) throw DescriptorError("unknown descriptor field '" + key + "'");

  WorkloadDescriptor w;
  try {
    const std::string kind = j.value("kind", "");
    if (kind == "apsp") w.kind = WorkloadKind::Apsp;
    else if (kind == "s2g") w.kind = WorkloadKind::S2g;
    else throw DescriptorError("unknown workload kind '" + kind + "'");
    w.graph = resolve(base_dir, j.value("graph", ""));
    w.reads = resolve(base_dir, j.value("reads", ""));
    w.max_tile = j.value("max_tile", w.max_tile);
    w.seed = j.value("seed", w.seed);
    w.width = j.value("width", w.width);
    w.length_threshold = j.value("length_threshold", w.length_threshold);
    const std::string carry = j.value("carry", "pred");
    if (carry == "pred") w.carry = CarryMode::PredCarry;
    else if (carry == "self") w.carry = CarryMode::SelfCarry;
    else throw DescriptorError("unknown carry mode '" + carry + "'");
    const std::string mode = j.value("mode", "auto");
    if (mode == "auto") w.mapping = MappingChoice::Auto;
    else if (mode == "short") w.mapping = MappingChoice::Short;
    else if (mode == "long") w.mapping = MappingChoice::Long;
    else throw DescriptorError("unknown mapping mode '" + mode + "'");
  } catch (const nlohmann::json::exception& e) {
    throw DescriptorError(std::string("bad descriptor field: ") + e.what());
  }
  if (j.contains("device")) {
    const ojson& d = j.at("device");
    if (!d.is_object()) throw DescriptorError("device must be an object");
    for (const auto& [key, _] : d.items())
      if (key != "pcm" && key != "hbm") throw DescriptorError("unknown device section '" + key + "'");
    if (d.contains("pcm")) apply_params(d.at("pcm"), w.pcm, "pcm");
    if (d.contains("hbm")) apply_params(d.at("hbm"), w.hbm, "hbm");
  }
  try {
    w.pcm.validate();
    w.hbm.validate();
  } catch (const Error& e) {
    throw DescriptorError(std::string("device override rejected: ") + e.what());
  }
  return w;
}

WorkloadDescriptor load_descriptor(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DescriptorError("cannot open descriptor " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_descriptor(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string descriptor_to_json(const WorkloadDescriptor& w) {
  ojson j;
  j["kind"] = w.kind == WorkloadKind::Apsp ? "apsp" : "s2g";
  j["graph"] = w.graph;
  if (w.kind == WorkloadKind::S2g) {
    j["reads"] = w.reads;
    j["mode"] = mapping_name(w.mapping);
    j["width"] = w.width;
    j["carry"] = w.carry == CarryMode::PredCarry ? "pred" : "self";
    j["length_threshold"] = w.length_threshold;
    j["device"]["hbm"] = params_json(w.hbm);
  } else {
    j["max_tile"] = w.max_tile;
    j["device"]["pcm"] = params_json(w.pcm);
  }
  j["seed"] = w.seed;
  return j.dump(2);
}

ExecutionPlan lower(const WorkloadDescriptor& w) {
  ExecutionPlan plan;
  plan.workload = w;
  auto in = std::make_shared<PlanInputs>();
  switch (w.kind) {
    case WorkloadKind::Apsp: lower_apsp(w, plan, *in); break;
    case WorkloadKind::S2g: lower_s2g(w, plan, *in); break;
    default: throw DescriptorError("unknown workload kind");
  }
  plan.inputs = std::move(in);
  validate_plan(plan);
  return plan;
}

void validate_plan(const ExecutionPlan& plan) {
  std::set<std::string> available{"graph", "reads", "reads.short", "reads.long"};
  for (std::size_t i = 0; i < plan.stages.size(); ++i) {
    const Stage& s = plan.stages[i];
    if (s.id != static_cast<int>(i)) throw ConsistencyError("stage ids must be consecutive");
    if (s.tile != tile_for(s.kind))
      throw ConsistencyError(std::string(to_string(s.kind)) + " stage placed on the " + to_string(s.tile) + " tile");
    if (s.kind == StageKind::AlignBatch && !s.mapping)
      throw ConsistencyError("AlignBatch stage without a mapping");
    for (const std::string& in : s.inputs)
      if (!available.count(in))
        throw ConsistencyError("stage " + std::to_string(s.id) + " reads '" + in + "' before it is produced");
    for (const std::string& out : s.outputs) available.insert(out);
  }
}

std::string plan_to_json(const ExecutionPlan& plan) {
  ojson j;
  j["workload"] = ojson::parse(descriptor_to_json(plan.workload));
  std::map<std::string, std::size_t> counts;
  for (const Stage& s : plan.stages) ++counts[to_string(s.kind)];
  j["stage_counts"] = counts;
  ojson stages = ojson::array();
  for (const Stage& s : plan.stages) {
    ojson e;
    e["id"] = s.id;
    e["kind"] = to_string(s.kind);
    e["tile"] = to_string(s.tile);
    if (s.level >= 0) e["level"] = s.level;
    e["inputs"] = s.inputs;
    e["outputs"] = s.outputs;
    if (s.mapping) e["mapping"] = to_string(*s.mapping);
    stages.push_back(std::move(e));
  }
  j["stages"] = std::move(stages);
  return j.dump(2);
}

// ---------------------------------------------------------------------------

namespace {

int first_stage(const ExecutionPlan& plan, StageKind k) {
  for (const Stage& s : plan.stages)
    if (s.kind == k) return s.id;
  return 0;
}

void execute_apsp(const ExecutionPlan& plan, const ExecuteOptions& opts, ExecutionResult& out) {
  const WorkloadDescriptor& w = plan.workload;
  int running = first_stage(plan, StageKind::PartitionBuild);
  try {
    out.apsp = recursive_apsp(plan.inputs->graph, w.max_tile, apsp_options(w));
    running = first_stage(plan, StageKind::FwClose);
    // The engine must have walked the same level structure the plan lowered.
    const auto& levels = out.apsp->hierarchy.levels;
    std::size_t comps = 0;
    for (const auto& l : levels) comps += l.components.size();
    const std::size_t merges = out.apsp->trace.merges.size() / 2;
    if (levels.size() != plan.count(StageKind::PartitionBuild) || comps != plan.count(StageKind::FwClose) ||
        merges != plan.count(StageKind::Merge))
      throw ConsistencyError("engine run does not match the lowered plan");
    if (opts.cost_model) {
      running = first_stage(plan, StageKind::BoundaryFw);
      out.cost = model_recursive_apsp(out.apsp->trace, w.pcm);
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(running, e.what());
  }
}

void execute_s2g(const ExecutionPlan& plan, const ExecuteOptions& opts, ExecutionResult& out) {
  const WorkloadDescriptor& w = plan.workload;
  const PlanInputs& in = *plan.inputs;
  BatchConfig cfg;
  cfg.align.width = w.width;
  cfg.align.carry = w.carry;
  cfg.pe_per_pu = w.hbm.pe_per_pu;
  TraversalWorkload workload;
  std::size_t b = 0;
  for (const Stage& s : plan.stages) {
    try {
      if (s.kind == StageKind::MaskBuild) {
        // Masks depend only on the read; building them up front checks the alphabet.
        for (const ReadBatch& rb : in.batches)
          for (const Read& r : rb.reads)
            for (std::size_t off = 0; off < r.seq.size(); off += w.width)
              (void)precompute_masks(r.seq.substr(off, w.width), w.width);
      } else if (s.kind == StageKind::AlignBatch) {
        BatchConfig c = cfg;
        if (*s.mapping == MappingMode::ShortParallel) {
          c.group_size = w.hbm.group_size;
          c.group_count = w.hbm.pe_per_pu / std::max<std::uint32_t>(1, w.hbm.group_size);
        } else {
          c.group_size = w.hbm.pe_per_pu;
          c.group_count = 1;
        }
        out.batches.push_back(batch_align(in.genome, in.batches.at(b++), *s.mapping, c));
        if (opts.cost_model) workload.parts.push_back(out.batches.back().trace);
      }
    } catch (const std::exception& e) {
      throw StageError(s.id, e.what());
    }
  }
  // Back to input order.
  const std::size_t total = in.read_order.size();
  out.read_ids.resize(total);
  out.alignments.resize(total);
  std::size_t offset = 0;
  for (std::size_t bi = 0; bi < in.batches.size(); ++bi) {
    const ReadBatch& rb = in.batches[bi];
    const BatchResult& br = out.batches[bi];
    // Results are stably sorted by id, so repeated ids keep batch order.
    std::map<std::string, std::vector<std::size_t>> index;
    for (std::size_t i = br.read_ids.size(); i-- > 0;) index[br.read_ids[i]].push_back(i);
    for (std::size_t i = 0; i < rb.reads.size(); ++i) {
      const std::size_t pos = in.read_order[offset + i];
      auto& slots = index.at(rb.reads[i].id);
      const std::size_t r = slots.back();
      slots.pop_back();
      out.read_ids[pos] = br.read_ids[r];
      out.alignments[pos] = br.results[r];
    }
    offset += rb.reads.size();
  }
  if (opts.cost_model) {
    try {
      out.cost = model_workload(workload, w.hbm);
    } catch (const std::exception& e) {
      throw StageError(first_stage(plan, StageKind::AlignBatch), e.what());
    }
  }
}

}  // namespace

ExecutionResult execute(const ExecutionPlan& plan, const ExecuteOptions& opts) {
  if (!plan.inputs) throw StateError("plan has no inputs; build it with lower()");
  validate_plan(plan);
  ExecutionResult out;
  if (plan.workload.kind == WorkloadKind::Apsp) execute_apsp(plan, opts, out);
  else execute_s2g(plan, opts, out);
  return out;
}

}  // namespace dpg
