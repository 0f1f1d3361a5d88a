#include <algorithm>
#include <random>

#include "doctest.h"
#include "dpgraph/errors.hpp"
#include "dpgraph/s2g.hpp"
#include "oracles.hpp"

using namespace dpg;

namespace {

const std::uint32_t kWidths[] = {8, 32, 64, 128, 256};

GenomeGraph bubble() { return GenomeGraph("ACGT", {{}, {0}, {0}, {1, 2}}); }

GenomeGraph chain(const std::string& s) {
  std::vector<std::vector<VertexId>> p(s.size());
  for (VertexId v = 1; v < s.size(); ++v) p[v] = {v - 1};
  return GenomeGraph(s, p);
}

std::string random_bases(std::size_t n, std::mt19937_64& rng, std::size_t alphabet = 4) {
  static const char kB[] = "ACGT";
  std::string s(n, 'A');
  for (auto& c : s) c = kB[rng() % alphabet];
  return s;
}

// Random DAG over a small alphabet so long matches exist: node v draws
// predecessors among the previous `span` nodes.
GenomeGraph random_genome(std::size_t n, std::mt19937_64& rng) {
  std::string bases = random_bases(n, rng, 2 + rng() % 3);
  std::vector<std::vector<VertexId>> p(n);
  for (VertexId v = 1; v < n; ++v) {
    p[v].push_back(v - 1);
    const std::size_t extra = rng() % 3;
    for (std::size_t e = 0; e < extra; ++e) {
      const VertexId u = v - 1 - static_cast<VertexId>(rng() % std::min<VertexId>(v, 8));
      if (std::find(p[v].begin(), p[v].end(), u) == p[v].end()) p[v].push_back(u);
    }
  }
  return GenomeGraph(bases, p);
}

// Query that mostly follows a graph walk, with occasional noise.
std::string walk_query(const GenomeGraph& g, std::size_t len, std::mt19937_64& rng) {
  std::string q;
  VertexId v = static_cast<VertexId>(rng() % g.size());
  while (q.size() < len) {
    q.push_back(rng() % 50 ? g.base(v) : 'T');
    auto s = g.succs(v);
    v = s.empty() ? static_cast<VertexId>(rng() % g.size()) : s[rng() % s.size()];
  }
  return q;
}

}  // namespace

TEST_SUITE("s2g") {

TEST_CASE("precompute_masks") {
  MaskTable m = precompute_masks("ACT", 8);
  CHECK(m.of('A').w[0] == 0b001);
  CHECK(m.of('C').w[0] == 0b010);
  CHECK(m.of('T').w[0] == 0b100);
  CHECK_FALSE(m.of('G').any());
  CHECK(precompute_masks("AAAA", 8).of('A').w[0] == 0b1111);
  MaskTable n = precompute_masks("ANA", 8);
  for (char c : std::string("ACGTN")) CHECK_FALSE(n.of(c).test(1));
  CHECK_THROWS_AS(precompute_masks(std::string(9, 'A'), 8), WidthError);
  CHECK_THROWS_AS(precompute_masks("A", 257), WidthError);
}

TEST_CASE("property: masks are a partition of the covered bits") {
  std::mt19937_64 rng(1);
  for (std::uint32_t w : kWidths) {
    std::string s = random_bases(w - rng() % w, rng);
    MaskTable m = precompute_masks(s, w);
    for (std::uint32_t j = 0; j < w; ++j) {
      int owners = 0;
      for (char c : std::string("ACGT")) owners += m.of(c).test(j);
      CHECK(owners == (j < s.size() ? 1 : 0));
    }
  }
}

TEST_CASE("bubble alignment with node states") {
  AlignOptions o;
  o.record_trace = true;
  AlignResult r = align_windowed(bubble(), "ACT", o);
  CHECK(r.score_max == 3);
  CHECK(r.end_nodes == std::vector<VertexId>{3});
  REQUIRE(r.trace.has_value());
  const auto& s = r.trace->states[0];
  CHECK(s[0].w[0] == 0b001);
  CHECK(s[1].w[0] == 0b010);
  CHECK(s[2].w[0] == 0);
  CHECK(s[3].w[0] == 0b100);
  CHECK(reconstruct_path(bubble(), "ACT", r) == std::vector<VertexId>{0, 1, 3});
}

TEST_CASE("query sharing no base with the graph scores zero") {
  CHECK(align_windowed(chain("AAAA"), "CGT").score_max == 0);
  CHECK(align_reference(chain("AAAA"), "CGT").score_max == 0);
  CHECK_THROWS_AS(align_windowed(chain("A"), ""), ArgumentError);
}

TEST_CASE("carries cross two window boundaries") {
  std::mt19937_64 rng(8);
  std::string q = random_bases(300, rng);
  AlignResult r = align_windowed(chain(q), q, {.width = 128});
  CHECK(r.windows == 3);
  CHECK(r.score_max == 300);
  CHECK(r.end_nodes == std::vector<VertexId>{299});
  CHECK(align_reference(chain(q), q).score_max == 300);
}

TEST_CASE("align_reference small cases") {
  CHECK(align_reference(chain("A"), "A").score_max == 1);
  CHECK(align_reference(chain("ACGT"), "CG").score_max == 2);
}

TEST_CASE("property: windowed alignment equals the oracle for every width") {
  std::mt19937_64 rng(500);
  for (int t = 0; t < 60; ++t) {
    GenomeGraph g = random_genome(20 + rng() % 480, rng);
    std::string q = walk_query(g, 1 + rng() % 400, rng);
    const oracle::AlignOracle want = oracle::align(g, q);
    CHECK(align_reference(g, q).score_max == want.score);
    for (std::uint32_t w : kWidths) {
      AlignResult r = align_windowed(g, q, {.width = w});
      REQUIRE(r.score_max == want.score);
      CHECK(r.end_nodes == want.ends);
    }
  }
}

TEST_CASE("literal self carry loses matches across windows on a bubble") {
  // Path A C A C ... crosses the window boundary on alternating nodes;
  // self carry is only exact when each node feeds itself.
  std::string s;
  for (int i = 0; i < 40; ++i) s += "AC";
  AlignResult pred = align_windowed(chain(s), s, {.width = 8, .carry = CarryMode::PredCarry});
  AlignResult self = align_windowed(chain(s), s, {.width = 8, .carry = CarryMode::SelfCarry});
  CHECK(pred.score_max == s.size());
  CHECK(self.score_max < s.size());
}

TEST_CASE("property: adding an edge never lowers the score") {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 30; ++t) {
    GenomeGraph g = random_genome(60 + rng() % 200, rng);
    std::string q = walk_query(g, 30 + rng() % 120, rng);
    const std::size_t before = align_windowed(g, q, {.width = 32}).score_max;
    std::vector<std::vector<VertexId>> p(g.size());
    for (VertexId v = 0; v < g.size(); ++v) p[v].assign(g.preds(v).begin(), g.preds(v).end());
    const VertexId v = 2 + static_cast<VertexId>(rng() % (g.size() - 2));
    const VertexId u = static_cast<VertexId>(rng() % (v - 1));
    if (std::find(p[v].begin(), p[v].end(), u) == p[v].end()) p[v].push_back(u);
    GenomeGraph h(g.bases(), p);
    CHECK(align_windowed(h, q, {.width = 32}).score_max >= before);
  }
}

TEST_CASE("property: score bounded by query and longest path") {
  std::mt19937_64 rng(72);
  for (int t = 0; t < 30; ++t) {
    GenomeGraph g = random_genome(5 + rng() % 100, rng);
    std::string q = walk_query(g, 1 + rng() % 300, rng);
    const auto r = align_windowed(g, q, {.width = 64});
    CHECK(r.score_max <= std::min(q.size(), g.longest_path()));
  }
}

TEST_CASE("property: early exit after an all-zero window is sound") {
  std::mt19937_64 rng(73);
  for (int t = 0; t < 30; ++t) {
    GenomeGraph g = random_genome(40 + rng() % 200, rng);
    std::string q = walk_query(g, 100 + rng() % 400, rng);
    AlignResult full = align_windowed(g, q, {.width = 8, .record_trace = true});
    AlignResult quick = align_windowed(g, q, {.width = 8, .early_exit = true});
    CHECK(quick.score_max == full.score_max);
    CHECK(quick.end_nodes == full.end_nodes);
    CHECK(quick.windows <= full.windows);
    // Once a window ends with every state zero, later windows stay zero.
    bool dead = false;
    for (const auto& states : full.trace->states) {
      if (dead)
        for (const BitVec& s : states) CHECK_FALSE(s.any());
      dead = std::none_of(states.begin(), states.end(), [](const BitVec& s) { return s.any(); });
    }
  }
}

TEST_CASE("property: traceback paths are legal and spell the match") {
  std::mt19937_64 rng(74);
  for (int t = 0; t < 40; ++t) {
    GenomeGraph g = random_genome(30 + rng() % 300, rng);
    std::string q = walk_query(g, 10 + rng() % 300, rng);
    AlignResult r = align_windowed(g, q, {.width = 32, .record_trace = true});
    if (r.score_max == 0) {
      CHECK_THROWS_AS(reconstruct_path(g, q, r), EmptyPathError);
      continue;
    }
    auto path = reconstruct_path(g, q, r);
    REQUIRE(path.size() == r.score_max);
    for (std::size_t i = 0; i < path.size(); ++i) {
      CHECK(g.base(path[i]) == q[i]);
      if (i) {
        auto s = g.succs(path[i - 1]);
        CHECK(std::find(s.begin(), s.end(), path[i]) != s.end());
      }
    }
  }
}

TEST_CASE("traceback errors") {
  std::string q = "ACGTACGT";
  AlignResult r = align_windowed(chain(q), q);
  CHECK_THROWS_AS(reconstruct_path(chain(q), q, r), StateError);
  AlignResult t = align_windowed(chain(q), q, {.record_trace = true});
  CHECK(reconstruct_path(chain(q), q, t) == std::vector<VertexId>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK_THROWS_AS(reconstruct_path(chain(q), q, t, 4), CapacityError);
}

TEST_CASE("port classification") {
  GenomeGraph b = bubble();
  CHECK(classify_port(b, 0) == Port::Self);
  CHECK(classify_port(b, 1) == Port::Self);
  CHECK(classify_port(b, 2) == Port::Hop);
  CHECK(classify_port(b, 3) == Port::Hop);
  PortProfile p = profile_ports(b);
  CHECK(p.nodes == 4);
  CHECK(p.self_nodes == 2);
  CHECK(p.hop_nodes == 2);
  CHECK(p.edges == 4);
  // Node 2 fetches 0; node 3 takes 2 over the Self port and fetches 1.
  CHECK(p.hop_fetches == std::vector<VertexId>{0, 1});
}

TEST_CASE("short mode deals reads round robin") {
  GenomeGraph g = gen_genome(400, 0.02, 1).gfa.expand();
  ReadBatch b = gen_reads(g, 64, 100, 0.0, 2);
  BatchResult r = batch_align(g, b, MappingMode::ShortParallel);
  REQUIRE(r.trace.groups.size() == 16);
  for (auto& grp : r.trace.groups) CHECK(grp.size() == 4);
  for (std::size_t i = 0; i < 64; ++i) CHECK(r.trace.reads[i].group == i % 16);
  for (auto& a : r.results) CHECK(a.score_max == 100);
  CHECK(std::is_sorted(r.read_ids.begin(), r.read_ids.end()));
}

TEST_CASE("long mode runs one pipeline") {
  GenomeGraph g = gen_genome(12000, 0.01, 1).gfa.expand();
  ReadBatch b = gen_reads(g, 1, 10000, 0.0, 2);
  BatchConfig c;
  c.group_size = 64;
  c.group_count = 1;
  BatchResult r = batch_align(g, b, MappingMode::LongPipeline, c);
  CHECK(r.trace.groups.size() == 1);
  CHECK(r.trace.reads[0].windows == (10000 + 127) / 128);
  CHECK(r.results[0].score_max == 10000);
}

TEST_CASE("property: scores do not depend on the mapping mode") {
  GenomeGraph g = gen_genome(2000, 0.03, 5).gfa.expand();
  ReadBatch b = gen_reads(g, 50, 150, 0.02, 6);
  BatchResult s = batch_align(g, b, MappingMode::ShortParallel);
  BatchConfig c;
  c.group_size = 64;
  c.group_count = 1;
  BatchResult l = batch_align(g, b, MappingMode::LongPipeline, c);
  CHECK(s.read_ids == l.read_ids);
  for (std::size_t i = 0; i < s.results.size(); ++i) {
    CHECK(s.results[i].score_max == l.results[i].score_max);
    CHECK(s.results[i].end_nodes == l.results[i].end_nodes);
  }
}

TEST_CASE("batch config must cover the PEs") {
  GenomeGraph g = chain("ACGT");
  ReadBatch b;
  b.reads = {{"r", "AC"}};
  BatchConfig c;
  c.group_count = 8;
  CHECK_THROWS_AS(batch_align(g, b, MappingMode::ShortParallel, c), ValidationError);
}

}  // TEST_SUITE
