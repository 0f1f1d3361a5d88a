#include "dpgraph/s2g.hpp"

#include <algorithm>
#include <bit>
#include <ostream>

#include "dpgraph/errors.hpp"

namespace dpg {

int BitVec::highest() const noexcept {
  for (int i = 3; i >= 0; --i)
    if (w[i]) return i * 64 + 63 - std::countl_zero(w[i]);
  return -1;
}

const BitVec& MaskTable::of(char base) const noexcept {
  static const BitVec kNone{};
  switch (base) {
    case 'A': return masks[0];
    case 'C': return masks[1];
    case 'G': return masks[2];
    case 'T': return masks[3];
    default: return kNone;
  }
}

MaskTable precompute_masks(const std::string& segment, std::uint32_t width) {
  if (width < 1 || width > kMaxWindow) throw WidthError("window width must lie in [1, 256]");
  if (segment.size() > width)
    throw WidthError("segment of " + std::to_string(segment.size()) + " bases exceeds width " +
                     std::to_string(width));
  MaskTable t;
  t.width = width;
  for (std::uint32_t j = 0; j < segment.size(); ++j) {
    switch (segment[j]) {
      case 'A': t.masks[0].set(j); break;
      case 'C': t.masks[1].set(j); break;
      case 'G': t.masks[2].set(j); break;
      case 'T': t.masks[3].set(j); break;
      default: break;
    }
  }
  return t;
}

namespace {

// ((in << 1) | carry) & mask over the low `nw` words.
inline BitVec step(const BitVec& in, bool carry, const BitVec& mask, int nw) noexcept {
  BitVec out;
  std::uint64_t spill = carry ? 1u : 0u;
  for (int i = 0; i < nw; ++i) {
    out.w[i] = ((in.w[i] << 1) | spill) & mask.w[i];
    spill = in.w[i] >> 63;
  }
  return out;
}

void check_query(const std::string& q) {
  if (q.empty()) throw ArgumentError("query must not be empty");
}

}  // namespace

AlignResult align_windowed(const GenomeGraph& g, const std::string& q, const AlignOptions& opts) {
  check_query(q);
  const std::uint32_t width = opts.width;
  if (width < 1 || width > kMaxWindow) throw WidthError("window width must lie in [1, 256]");
  const std::size_t n = g.size();
  const auto windows = static_cast<std::uint32_t>((q.size() + width - 1) / width);
  const int nw = static_cast<int>((width + 63) / 64);
  const std::uint32_t msb = width - 1;

  AlignResult r;
  if (opts.record_trace) r.trace = TraceLog{width, {}};
  std::vector<BitVec> state(n);
  std::vector<std::uint8_t> carry(n, 0);

  for (std::uint32_t i = 0; i < windows; ++i) {
    const std::size_t offset = std::size_t{i} * width;
    const MaskTable masks = precompute_masks(q.substr(offset, width), width);
    for (VertexId v : g.topo_order()) {
      BitVec din;
      bool cin = i == 0;
      for (VertexId u : g.preds(v)) {
        din |= state[u];
        if (opts.carry == CarryMode::PredCarry) cin = cin || carry[u];
      }
      if (i > 0 && opts.carry == CarryMode::SelfCarry) cin = carry[v];
      state[v] = step(din, cin, masks.of(g.base(v)), nw);
    }
    bool live = false;
    for (VertexId v = 0; v < n; ++v) {
      const int hb = state[v].highest();
      if (hb >= 0) {
        const std::size_t s = offset + static_cast<std::size_t>(hb) + 1;
        if (s > r.score_max) {
          r.score_max = s;
          r.end_nodes.clear();
        }
        if (s == r.score_max) r.end_nodes.push_back(v);
      }
      carry[v] = state[v].test(msb);
      live = live || carry[v];
    }
    if (r.trace) r.trace->states.push_back(state);
    ++r.windows;
    if (opts.early_exit && !live) break;
  }
  return r;
}

AlignResult align_reference(const GenomeGraph& g, const std::string& q) {
  check_query(q);
  const std::size_t n = g.size(), m = q.size();
  std::vector<std::uint8_t> match(n * m, 0);
  for (VertexId v : g.topo_order()) {
    std::uint8_t* mv = match.data() + std::size_t{v} * m;
    const char b = g.base(v);
    if (b == 'N') continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (q[j] != b) continue;
      if (j == 0) {
        mv[j] = 1;
        continue;
      }
      for (VertexId u : g.preds(v))
        if (match[std::size_t{u} * m + j - 1]) {
          mv[j] = 1;
          break;
        }
    }
  }
  AlignResult r;
  r.windows = 1;
  for (VertexId v = 0; v < n; ++v) {
    const std::uint8_t* mv = match.data() + std::size_t{v} * m;
    for (std::size_t j = m; j-- > 0;)
      if (mv[j]) {
        if (j + 1 > r.score_max) {
          r.score_max = j + 1;
          r.end_nodes.clear();
        }
        if (j + 1 == r.score_max) r.end_nodes.push_back(v);
        break;
      }
  }
  return r;
}

std::vector<VertexId> reconstruct_path(const GenomeGraph& g, const std::string& q,
                                       const AlignResult& result, std::size_t max_steps) {
  if (!result.trace) throw StateError("alignment was run without trace recording");
  if (result.score_max == 0 || result.end_nodes.empty()) throw EmptyPathError("score is zero");
  if (result.score_max > max_steps)
    throw CapacityError("path of " + std::to_string(result.score_max) +
                        " steps exceeds the traceback buffer (" + std::to_string(max_steps) + ")");
  const TraceLog& log = *result.trace;
  auto matched = [&](VertexId v, std::size_t pos) {
    const std::size_t w = pos / log.width;
    return w < log.states.size() && log.states[w][v].test(static_cast<std::uint32_t>(pos % log.width));
  };
  std::vector<VertexId> path{result.end_nodes.front()};
  for (std::size_t pos = result.score_max - 1; pos > 0; --pos) {
    const VertexId v = path.back();
    VertexId best = ~VertexId{0};
    for (VertexId u : g.preds(v))
      if (matched(u, pos - 1)) best = std::min(best, u);
    if (best == ~VertexId{0}) throw StateError("trace is inconsistent with the graph");
    path.push_back(best);
  }
  std::reverse(path.begin(), path.end());
  for (std::size_t t = 0; t < path.size(); ++t)
    if (t >= q.size() || g.base(path[t]) != q[t]) throw StateError("trace does not belong to this query");
  return path;
}

Port classify_port(const GenomeGraph& g, VertexId v) {
  const auto preds = g.preds(v);
  if (preds.empty()) return Port::Self;
  const VertexId rank = g.topo_rank()[v];
  if (preds.size() == 1 && rank > 0 && g.topo_order()[rank - 1] == preds[0]) return Port::Self;
  return Port::Hop;
}

PortProfile profile_ports(const GenomeGraph& g) {
  PortProfile p;
  p.nodes = g.size();
  p.edges = g.num_edges();
  for (VertexId v = 0; v < g.size(); ++v) {
    if (classify_port(g, v) == Port::Self) {
      ++p.self_nodes;
      continue;
    }
    ++p.hop_nodes;
    const VertexId rank = g.topo_rank()[v];
    const VertexId adjacent = rank > 0 ? g.topo_order()[rank - 1] : ~VertexId{0};
    for (VertexId u : g.preds(v))
      if (u != adjacent) p.hop_fetches.push_back(u);
  }
  return p;
}

const char* to_string(MappingMode m) noexcept {
  return m == MappingMode::ShortParallel ? "ShortParallel" : "LongPipeline";
}

BatchResult batch_align(const GenomeGraph& g, const ReadBatch& batch, MappingMode mode,
                        const BatchConfig& config) {
  if (config.group_size == 0 || config.group_count == 0 ||
      config.group_size * config.group_count != config.pe_per_pu)
    throw ValidationError("group_size x group_count must equal pe_per_pu");
  const std::size_t count = batch.reads.size();
  std::vector<AlignResult> results(count);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i)
    results[static_cast<std::size_t>(i)] =
        align_windowed(g, batch.reads[static_cast<std::size_t>(i)].seq, config.align);

  BatchResult out;
  BatchTrace& t = out.trace;
  t.mode = mode;
  t.width = config.align.width;
  t.group_size = mode == MappingMode::ShortParallel ? config.group_size : config.pe_per_pu;
  t.group_count = mode == MappingMode::ShortParallel ? config.group_count : 1;
  t.profile = profile_ports(g);
  t.groups.assign(t.group_count, {});
  for (std::size_t i = 0; i < count; ++i) {
    const auto group = static_cast<std::uint32_t>(i % t.group_count);
    t.reads.push_back({batch.reads[i].id, batch.reads[i].seq.size(), results[i].windows, group});
    t.groups[group].push_back(i);
  }

  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return batch.reads[a].id < batch.reads[b].id; });
  for (std::size_t i : order) {
    out.read_ids.push_back(batch.reads[i].id);
    out.results.push_back(std::move(results[i]));
  }
  return out;
}

void write_results_tsv(std::ostream& out, const BatchResult& r,
                       const std::vector<std::vector<VertexId>>* paths) {
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    const AlignResult& a = r.results[i];
    out << r.read_ids[i] << '\t' << a.score_max << '\t';
    if (a.end_nodes.empty())
      out << '-';
    else
      out << a.end_nodes.front();
    if (paths) {
      out << '\t';
      const auto& p = (*paths)[i];
      if (p.empty()) out << '-';
      for (std::size_t j = 0; j < p.size(); ++j) out << (j ? "," : "") << p[j];
    }
    out << '\n';
  }
}

}  // namespace dpg
