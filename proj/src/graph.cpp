#include "dpgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "dpgraph/errors.hpp"

namespace dpg {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Weight draw_weight(std::mt19937_64& rng, WeightRange wr) {
  if (wr.hi <= wr.lo) return wr.lo;
  return wr.lo + static_cast<Weight>(rng() % (std::uint64_t{wr.hi} - wr.lo + 1));
}

// Calls fn(i) for each i in [0, count) selected independently with prob p,
// skipping geometrically between hits.
template <typename Fn>
void bernoulli_indices(std::uint64_t count, double p, std::mt19937_64& rng, Fn&& fn) {
  if (p <= 0.0 || count == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t i = 0;
  while (true) {
    const double u = uniform01(rng);
    const double skip = std::floor(std::log1p(-u) / log_q);
    if (skip >= static_cast<double>(count - i)) return;
    i += static_cast<std::uint64_t>(skip);
    fn(i);
    ++i;
    if (i >= count) return;
  }
}

void validate_weight_range(WeightRange wr) {
  if (wr.lo > wr.hi || wr.hi > kMaxEdgeWeight)
    throw ArgumentError("weight range must satisfy lo <= hi <= INF/2");
}

}  // namespace

WeightedGraph::WeightedGraph(VertexId n, std::vector<Edge> edges, bool directed)
    : n_(n), directed_(directed) {
  edges_.reserve(directed ? edges.size() : 2 * edges.size());
  for (const Edge& e : edges) {
    if (e.src >= n || e.dst >= n)
      throw IndexError("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                       ") out of range for n=" + std::to_string(n));
    if (e.w > kMaxEdgeWeight)
      throw DomainError("edge weight " + std::to_string(e.w) + " exceeds INF/2");
    if (e.src == e.dst) {
      if (e.w > 0)
        throw DomainError("self loop on " + std::to_string(e.src) + " with positive weight");
      continue;
    }
    edges_.push_back(e);
    if (!directed) edges_.push_back({e.dst, e.src, e.w});
  }
}

std::vector<Weight> WeightedGraph::dense_adjacency() const {
  const std::size_t n = n_;
  std::vector<Weight> d(n * n, kInf);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0;
  for (const Edge& e : edges_) {
    Weight& cell = d[std::size_t{e.src} * n + e.dst];
    cell = std::min(cell, e.w);
  }
  return d;
}

std::vector<Weight> CsrGraph::to_dense() const {
  const std::size_t n = num_vertices();
  std::vector<Weight> d(n * n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    d[i * n + i] = 0;
    for (auto p = rowptr[i]; p < rowptr[i + 1]; ++p) d[i * n + col[p]] = val[p];
  }
  return d;
}

CsrGraph build_csr(const WeightedGraph& g) {
  const std::size_t n = g.num_vertices();
  CsrGraph csr;
  csr.rowptr.assign(n + 1, 0);
  for (const Edge& e : g.edges()) ++csr.rowptr[e.src + 1];
  for (std::size_t i = 0; i < n; ++i) csr.rowptr[i + 1] += csr.rowptr[i];

  std::vector<std::pair<VertexId, Weight>> slots(g.num_edges());
  std::vector<std::uint64_t> fill(csr.rowptr.begin(), csr.rowptr.end() - 1);
  for (const Edge& e : g.edges()) slots[fill[e.src]++] = {e.dst, e.w};

  csr.col.resize(slots.size());
  csr.val.resize(slots.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto first = slots.begin() + static_cast<std::ptrdiff_t>(csr.rowptr[i]);
    auto last = slots.begin() + static_cast<std::ptrdiff_t>(csr.rowptr[i + 1]);
    std::sort(first, last);
    for (auto it = first; it != last; ++it) {
      if (it != first && it->first == (it - 1)->first)
        throw DuplicateEdgeError("(" + std::to_string(i) + "," + std::to_string(it->first) + ")");
      const auto p = static_cast<std::size_t>(it - slots.begin());
      csr.col[p] = it->first;
      csr.val[p] = it->second;
    }
  }
  return csr;
}

std::vector<std::vector<VertexId>> undirected_adjacency(const WeightedGraph& g) {
  std::vector<std::vector<VertexId>> adj(g.num_vertices());
  for (const Edge& e : g.edges()) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  return adj;
}

WeightedGraph gen_er(VertexId n, double p, std::uint64_t seed, WeightRange wr) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("p must lie in [0, 1]");
  validate_weight_range(wr);
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  if (n < 2) return WeightedGraph(n, {}, true);
  const std::uint64_t row = n - 1;
  bernoulli_indices(std::uint64_t{n} * row, p, rng, [&](std::uint64_t idx) {
    const auto src = static_cast<VertexId>(idx / row);
    auto dst = static_cast<VertexId>(idx % row);
    if (dst >= src) ++dst;
    edges.push_back({src, dst, 0});
  });
  for (Edge& e : edges) e.w = draw_weight(rng, wr);
  return WeightedGraph(n, std::move(edges), true);
}

WeightedGraph gen_nws(VertexId n, VertexId k, double p, std::uint64_t seed, WeightRange wr) {
  if (k % 2 != 0 || k >= n) throw ArgumentError("NWS needs even k < n");
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("p must lie in [0, 1]");
  validate_weight_range(wr);
  std::mt19937_64 rng(seed);
  auto key = [](VertexId a, VertexId b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t{a} << 32) | b;
  };
  std::unordered_set<std::uint64_t> present;
  std::vector<std::pair<VertexId, VertexId>> lattice;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId j = 1; j <= k / 2; ++j) {
      const VertexId v = (u + j) % n;
      if (present.insert(key(u, v)).second) lattice.emplace_back(u, v);
    }
  std::vector<std::pair<VertexId, VertexId>> all = lattice;
  for (const auto& [u, v] : lattice) {
    if (uniform01(rng) >= p) continue;
    // Retry a bounded number of times; dense graphs may have no free partner.
    for (VertexId attempt = 0; attempt < n; ++attempt) {
      const auto w = static_cast<VertexId>(rng() % n);
      if (w == u || present.count(key(u, w))) continue;
      present.insert(key(u, w));
      all.emplace_back(u, w);
      break;
    }
  }
  std::vector<Edge> edges;
  edges.reserve(all.size());
  for (const auto& [u, v] : all) edges.push_back({u, v, draw_weight(rng, wr)});
  return WeightedGraph(n, std::move(edges), false);
}

WeightedGraph gen_clustered(const ClusteredParams& cp, std::uint64_t seed, WeightRange wr) {
  if (cp.cluster_size == 0 || cp.clusters_per_group == 0)
    throw ArgumentError("cluster sizes must be positive");
  for (double p : {cp.p_cluster, cp.p_group, cp.p_global})
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("probabilities must lie in [0, 1]");
  validate_weight_range(wr);
  std::mt19937_64 rng(seed);
  const std::uint64_t n = cp.n;
  const std::uint64_t cs = cp.cluster_size;
  const std::uint64_t gs = cs * cp.clusters_per_group;
  std::vector<Edge> edges;
  auto cluster_of = [&](std::uint64_t v) { return v / cs; };

  // Candidate pairs are enumerated per group block and filtered by category,
  // so each ordered pair is drawn exactly once with its own probability.
  const std::uint64_t groups = (n + gs - 1) / gs;
  for (std::uint64_t ga = 0; ga < groups; ++ga) {
    const std::uint64_t a0 = ga * gs, a1 = std::min(n, a0 + gs);
    for (std::uint64_t gb = 0; gb < groups; ++gb) {
      const std::uint64_t b0 = gb * gs, b1 = std::min(n, b0 + gs);
      const std::uint64_t cols = b1 - b0;
      if (ga != gb) {
        bernoulli_indices((a1 - a0) * cols, cp.p_global, rng, [&](std::uint64_t idx) {
          edges.push_back({static_cast<VertexId>(a0 + idx / cols),
                           static_cast<VertexId>(b0 + idx % cols), 0});
        });
        continue;
      }
      // Same group: sample at p_group, then top up intra-cluster pairs.
      bernoulli_indices((a1 - a0) * cols, cp.p_group, rng, [&](std::uint64_t idx) {
        const std::uint64_t u = a0 + idx / cols, v = b0 + idx % cols;
        if (cluster_of(u) != cluster_of(v)) edges.push_back({VertexId(u), VertexId(v), 0});
      });
      for (std::uint64_t c0 = a0; c0 < a1; c0 += cs) {
        const std::uint64_t c1 = std::min(a1, c0 + cs), m = c1 - c0;
        bernoulli_indices(m * m, cp.p_cluster, rng, [&](std::uint64_t idx) {
          const std::uint64_t u = c0 + idx / m, v = c0 + idx % m;
          if (u != v) edges.push_back({VertexId(u), VertexId(v), 0});
        });
      }
    }
  }
  for (Edge& e : edges) e.w = draw_weight(rng, wr);
  return WeightedGraph(cp.n, std::move(edges), true);
}

// ---------------------------------------------------------------------------

std::vector<VertexId> topo_sort(const std::vector<std::vector<VertexId>>& preds) {
  const std::size_t n = preds.size();
  std::vector<std::vector<VertexId>> succs(n);
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (VertexId u : preds[v]) {
      if (u >= n) throw IndexError("predecessor id " + std::to_string(u) + " out of range");
      succs[u].push_back(static_cast<VertexId>(v));
      ++indeg[v];
    }
  std::priority_queue<VertexId, std::vector<VertexId>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(static_cast<VertexId>(v));
  std::vector<VertexId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const VertexId u = ready.top();
    ready.pop();
    order.push_back(u);
    for (VertexId v : succs[u])
      if (--indeg[v] == 0) ready.push(v);
  }
  if (order.size() != n) {
    for (std::size_t v = 0; v < n; ++v)
      if (indeg[v] > 0)
        for (VertexId u : preds[v])
          if (indeg[u] > 0)
            throw AcyclicityError("cycle through edge " + std::to_string(u) + "->" +
                                  std::to_string(v));
    throw AcyclicityError("cycle detected");
  }
  return order;
}

GenomeGraph::GenomeGraph(std::string bases, std::vector<std::vector<VertexId>> preds)
    : bases_(std::move(bases)), preds_(std::move(preds)) {
  if (preds_.size() != bases_.size())
    throw ArgumentError("predecessor list count must equal node count");
  for (std::size_t v = 0; v < bases_.size(); ++v) {
    const char c = bases_[v];
    if (c != 'A' && c != 'C' && c != 'G' && c != 'T' && c != 'N')
      throw AlphabetError(std::string("character '") + c + "' at node " + std::to_string(v));
  }
  for (auto& p : preds_) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  topo_ = topo_sort(preds_);
  rank_.assign(bases_.size(), 0);
  for (std::size_t i = 0; i < topo_.size(); ++i) rank_[topo_[i]] = static_cast<VertexId>(i);
  succs_.assign(bases_.size(), {});
  for (std::size_t v = 0; v < preds_.size(); ++v)
    for (VertexId u : preds_[v]) succs_[u].push_back(static_cast<VertexId>(v));
  for (const auto& p : preds_) edge_count_ += p.size();
}

std::size_t GenomeGraph::longest_path() const {
  std::vector<std::size_t> len(size(), 1);
  std::size_t best = 0;
  for (VertexId v : topo_) {
    for (VertexId u : preds_[v]) len[v] = std::max(len[v], len[u] + 1);
    best = std::max(best, len[v]);
  }
  return best;
}

GenomeGraph GfaGraph::expand() const {
  std::unordered_map<std::string, std::pair<VertexId, VertexId>> span;  // first, last node
  std::string bases;
  std::vector<std::vector<VertexId>> preds;
  for (const Segment& s : segments) {
    if (s.seq.empty()) throw ParseError("segment " + s.id + " has an empty sequence");
    if (span.count(s.id)) throw ParseError("duplicate segment id " + s.id);
    const auto first = static_cast<VertexId>(bases.size());
    for (std::size_t i = 0; i < s.seq.size(); ++i) {
      bases.push_back(s.seq[i]);
      preds.emplace_back();
      if (i > 0) preds.back().push_back(static_cast<VertexId>(bases.size() - 2));
    }
    span[s.id] = {first, static_cast<VertexId>(bases.size() - 1)};
  }
  for (const auto& [from, to] : links) {
    auto f = span.find(from);
    auto t = span.find(to);
    if (f == span.end() || t == span.end())
      throw ParseError("link references unknown segment " + (f == span.end() ? from : to));
    preds[t->second.first].push_back(f->second.second);
  }
  return GenomeGraph(std::move(bases), std::move(preds));
}

SyntheticGenome gen_genome(std::size_t bases, double bubble_rate, std::uint64_t seed) {
  if (!(bubble_rate >= 0.0 && bubble_rate <= 1.0))
    throw ArgumentError("bubble rate must lie in [0, 1]");
  static constexpr char kAcgt[] = {'A', 'C', 'G', 'T'};
  std::mt19937_64 rng(seed);
  SyntheticGenome out;
  out.reference.reserve(bases);
  for (std::size_t i = 0; i < bases; ++i) out.reference.push_back(kAcgt[rng() % 4]);

  auto& gfa = out.gfa;
  std::vector<std::string> pending;  // segments whose tail links to the next segment
  auto add_segment = [&](std::string seq, const std::vector<std::string>& from) {
    std::string id = std::to_string(gfa.segments.size() + 1);
    for (const auto& f : from) gfa.links.emplace_back(f, id);
    gfa.segments.push_back({id, std::move(seq)});
    return id;
  };
  std::string chunk;
  auto flush = [&] {
    if (chunk.empty()) return;
    pending = {add_segment(std::move(chunk), pending)};
    chunk.clear();
  };
  for (std::size_t i = 0; i < bases; ++i) {
    const char ref = out.reference[i];
    const bool bubble = i > 0 && uniform01(rng) < bubble_rate;
    if (!bubble) {
      chunk.push_back(ref);
      continue;
    }
    flush();
    if (rng() % 10 < 7) {
      // SNP: reference base and one alternative in parallel.
      char alt = kAcgt[rng() % 4];
      while (alt == ref) alt = kAcgt[rng() % 4];
      const auto from = pending;
      pending = {add_segment(std::string(1, ref), from), add_segment(std::string(1, alt), from)};
    } else {
      // Insertion: 1-4 extra bases that the reference path can skip.
      std::string ins;
      const auto len = 1 + rng() % 4;
      for (std::size_t j = 0; j < len; ++j) ins.push_back(kAcgt[rng() % 4]);
      pending.push_back(add_segment(std::move(ins), pending));
      chunk.push_back(ref);
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------

LengthClass classify_length(std::size_t len, std::size_t threshold) noexcept {
  return len <= threshold ? LengthClass::Short : LengthClass::Long;
}

ReadBatch gen_reads(const GenomeGraph& g, std::size_t count, std::size_t len,
                    double sub_rate, std::uint64_t seed) {
  if (!(sub_rate >= 0.0 && sub_rate <= 1.0)) throw ArgumentError("sub_rate must lie in [0, 1]");
  ReadBatch batch;
  batch.length_class = classify_length(len);
  if (count == 0) return batch;
  if (len == 0) throw LengthError("read length must be positive");

  // reach[v]: node count of the longest path starting at v.
  std::vector<std::size_t> reach(g.size(), 1);
  const auto& order = g.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (VertexId s : g.succs(*it)) reach[*it] = std::max(reach[*it], reach[s] + 1);
  std::vector<VertexId> starts;
  for (VertexId v = 0; v < g.size(); ++v)
    if (reach[v] >= len) starts.push_back(v);
  if (starts.empty())
    throw LengthError("no path of " + std::to_string(len) + " nodes in the graph");

  static constexpr char kAcgt[] = {'A', 'C', 'G', 'T'};
  std::mt19937_64 rng(seed);
  const std::size_t width = std::to_string(count - 1).size();
  std::vector<VertexId> next;
  for (std::size_t r = 0; r < count; ++r) {
    Read read;
    std::string num = std::to_string(r);
    read.id = "read" + std::string(width - num.size(), '0') + num;
    VertexId v = starts[rng() % starts.size()];
    for (std::size_t pos = 0; pos < len; ++pos) {
      char c = g.base(v);
      if (uniform01(rng) < sub_rate) {
        char alt = kAcgt[rng() % 4];
        while (alt == c) alt = kAcgt[rng() % 4];
        c = alt;
      }
      read.seq.push_back(c);
      if (pos + 1 == len) break;
      next.clear();
      for (VertexId s : g.succs(v))
        if (reach[s] >= len - pos - 1) next.push_back(s);
      v = next[rng() % next.size()];
    }
    batch.reads.push_back(std::move(read));
  }
  return batch;
}

}  // namespace dpg
