#include <cmath>
#include <sstream>

#include "doctest.h"
#include "dpgraph/cost.hpp"
#include "dpgraph/errors.hpp"
#include "json.hpp"

using namespace dpg;

namespace {

// Independent restatement of the per-pivot formula: two bit-serial passes of
// 2 cycles/bit over 32 bits, plus one 11-cycle DMA slot per 32-row burst.
double pivot_cycles(std::uint32_t dim) { return 2 * 32 + 2 * 32 + std::ceil(dim / 32.0) * 11; }
double pivot_seconds(std::uint32_t dim) { return pivot_cycles(dim) / 500e6; }

ClosureEvent closure(std::uint32_t level, std::uint32_t dim, ClosureKind kind = ClosureKind::Initial) {
  ClosureEvent e;
  e.level = level;
  e.kind = kind;
  e.stats = {dim, dim, 0};
  return e;
}

BatchTrace chain_trace(std::uint32_t nodes, std::uint32_t windows, MappingMode mode) {
  BatchTrace t;
  t.mode = mode;
  t.width = 128;
  t.profile.nodes = nodes;
  t.profile.self_nodes = nodes;
  t.profile.edges = nodes - 1;
  ReadTrace r;
  r.id = "r";
  r.windows = windows;
  r.length = windows * 128;
  t.reads = {r};
  return t;
}

}  // namespace

TEST_SUITE("cost") {

TEST_CASE("parameter defaults validate") {
  PcmParams p;
  CHECK_NOTHROW(p.validate());
  p.unit_dim = 1000;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  HbmParams h;
  CHECK_NOTHROW(h.validate());
  h.sram_banks = 24;
  CHECK_THROWS_AS(h.validate(), ValidationError);
  CHECK(HbmParams{}.access_latency() == doctest::Approx(15e-9));
}

TEST_CASE("model_fw_block arithmetic") {
  PcmParams p;
  CostReport zero = model_fw_block(512, 0, 0, p);
  CHECK(zero.cycles == 0);
  CHECK(zero.energy == 0);

  CostReport one = model_fw_block(1024, 1, 0, p);
  CHECK(one.cycles == 480);
  CHECK(one.cycles == pivot_cycles(1024));
  CHECK(fw_pivot_cycles(1024, p) == 480);
  // No strict improvements: nothing is written back.
  CHECK(one.pcm_writes == 0);
  CHECK(one.phases.back().energy == 0);

  CostReport w = model_fw_block(1024, 1, 10, p);
  CHECK(w.energy - one.energy == doctest::Approx(10 * 32 * 0.56e-12));
  CHECK_THROWS_AS(model_fw_block(2048, 1, 0, p), CapacityError);

  PcmParams serial = p;
  serial.permutation_overlap = false;
  CHECK(model_fw_block(64, 1, 0, serial).cycles == 128 + 64 * 11);
}

TEST_CASE("derate is unity up to the reference size") {
  PcmParams p;
  CHECK(derate(512, p) == 1.0);
  CHECK(derate(1024, p) == 1.0);
  CHECK(derate(2048, p) == doctest::Approx(std::pow(2.0, 1.3)));
}

TEST_CASE("model_mp_merge reduction cycles") {
  PcmParams p;
  CHECK(reduction_cycles_per_row(p) == 13);
  auto reduction = [](const CostReport& r) {
    for (auto& ph : r.phases)
      if (ph.phase == "reduction") return ph.cycles;
    return -1.0;
  };
  CHECK(reduction(model_mp_merge(1, 1024, p)) == 13);
  CHECK(reduction(model_mp_merge(1024, 1024, p)) == 13312);
  CostReport z = model_mp_merge(0, 1024, p);
  CHECK(z.cycles == 0);
  CHECK(z.energy == 0);
  CHECK_THROWS_AS(model_mp_merge(1, 1025, p), CapacityError);
}

TEST_CASE("single tile run equals one closure") {
  PcmParams p;
  ExecutionTrace t;
  t.levels = 1;
  t.closures = {closure(0, 300)};
  CostReport r = model_recursive_apsp(t, p);
  CostReport one = model_fw_block(300, 300, 0, p);
  CHECK(r.wall_time == doctest::Approx(one.wall_time));
  CHECK(r.energy == doctest::Approx(one.energy));
  CHECK(r.cycles == doctest::Approx(one.cycles));
}

TEST_CASE("independent closures run in parallel") {
  PcmParams p;
  ExecutionTrace t;
  t.levels = 1;
  t.closures = {closure(0, 256), closure(0, 256)};
  CostReport r = model_recursive_apsp(t, p);
  CostReport one = model_fw_block(256, 256, 0, p);
  CHECK(r.wall_time == doctest::Approx(one.wall_time));
  CHECK(r.energy == doctest::Approx(2 * one.energy));

  // One unit only: the two closures serialize.
  PcmParams tiny = p;
  tiny.units_per_tile = 1;
  tiny.tiles_per_die = 1;
  CHECK(model_recursive_apsp(t, tiny).wall_time == doctest::Approx(2 * one.wall_time));
}

TEST_CASE("four level trace follows the hand-summed critical path") {
  PcmParams p;
  ExecutionTrace t;
  t.levels = 4;
  // Level 0: three closures in parallel; 1 and 2: one each plus a reclose;
  // level 3: top closure.
  t.closures = {closure(0, 100), closure(0, 200), closure(0, 300), closure(1, 64),
                closure(1, 96, ClosureKind::Reclose), closure(2, 32), closure(2, 48, ClosureKind::Reclose),
                closure(3, 20, ClosureKind::Top)};
  t.injects = {{1, 0, 40, 0}, {2, 0, 10, 0}};
  const double expect = 300 * pivot_seconds(300) + (64 * pivot_seconds(64) + 40 * 10 / 500e6 + 96 * pivot_seconds(96)) +
                        (32 * pivot_seconds(32) + 10 * 10 / 500e6 + 48 * pivot_seconds(48)) +
                        20 * pivot_seconds(20);
  CostReport r = model_recursive_apsp(t, p);
  CHECK(r.wall_time == doctest::Approx(expect));
  t.levels = 2;
  CHECK_THROWS_AS(model_recursive_apsp(t, p), ValidationError);
}

TEST_CASE("property: energy scales linearly with per-bit energies") {
  WeightedGraph g = gen_er(800, 0.004, 3);
  ApspResult r = recursive_apsp(g, 128);
  PcmParams p, q;
  q.read_energy_per_bit *= 2;
  q.write_energy_per_bit *= 2;
  CostReport a = model_recursive_apsp(r.trace, p), b = model_recursive_apsp(r.trace, q);
  CHECK(b.energy == doctest::Approx(2 * a.energy));
  CHECK(b.cycles == a.cycles);
  CHECK(b.wall_time == a.wall_time);
}

TEST_CASE("property: reports are non-negative and additive") {
  WeightedGraph g = gen_nws(900, 4, 0.02, 1);
  ApspResult r = recursive_apsp(g, 64);
  CostReport c = model_recursive_apsp(r.trace, PcmParams{});
  double e = 0, cyc = 0, reg = 0;
  for (auto& ph : c.phases) {
    CHECK(ph.energy >= 0);
    CHECK(ph.cycles >= 0);
    CHECK(ph.wall_time >= 0);
    e += ph.energy;
    cyc += ph.cycles;
    reg += ph.hbm_bytes_regular;
  }
  CHECK(c.energy == doctest::Approx(e));
  CHECK(c.cycles == doctest::Approx(cyc));
  CHECK(c.hbm_bytes_regular == doctest::Approx(reg));

  // Disjoint traversal traces add up.
  TraversalWorkload a = short_read_workload(1, 32), b = long_read_workload(1, 2), both;
  both.parts = {a.parts[0], b.parts[0]};
  HbmParams h;
  CostReport ra = model_workload(a, h), rb = model_workload(b, h), rab = model_workload(both, h);
  CHECK(rab.energy == doctest::Approx(ra.energy + rb.energy));
  CHECK(rab.hbm_bytes_regular == doctest::Approx(ra.hbm_bytes_regular + rb.hbm_bytes_regular));
  CHECK(rab.hbm_bytes_irregular == doctest::Approx(ra.hbm_bytes_irregular + rb.hbm_bytes_irregular));
}

TEST_CASE("property: modelling does not change distances") {
  WeightedGraph g = gen_er(600, 0.005, 8);
  ApspResult a = recursive_apsp(g, 64);
  (void)model_recursive_apsp(a.trace, PcmParams{});
  CHECK(a.dense == recursive_apsp(g, 64).dense);
}

TEST_CASE("trace_from_hierarchy mirrors a real run") {
  WeightedGraph g = gen_er(700, 0.004, 5);
  ApspResult r = recursive_apsp(g, 64);
  ExecutionTrace t = trace_from_hierarchy(r.hierarchy);
  CHECK(t.levels == r.trace.levels);
  CHECK(t.closures.size() == r.trace.closures.size());
  CHECK(t.merges.size() == r.trace.merges.size());
  CHECK(t.injects.size() == r.trace.injects.size());
}

TEST_CASE("sweep_tile_size normalizes to 1024") {
  WeightedGraph g = gen_nws(3000, 4, 0.01, 2);
  auto one = sweep_tile_size(g, {1024}, PcmParams{});
  REQUIRE(one.size() == 1);
  CHECK(one[0].norm_latency == 1.0);
  CHECK(one[0].norm_energy == 1.0);
}

TEST_CASE("chain workload on one PE costs one cycle per node and window") {
  HbmParams h;
  h.pe_per_pu = 1;
  h.group_size = 1;
  BatchTrace t = chain_trace(1000, 3, MappingMode::LongPipeline);
  CostReport r = model_traversal(t, h, MappingMode::LongPipeline);
  CHECK(r.phases[0].phase == "compute");
  CHECK(r.phases[0].cycles == doctest::Approx(3000));
  CHECK(r.hbm_bytes_irregular == 0);
  CHECK_THROWS_AS(model_traversal(t, h, MappingMode::ShortParallel), ValidationError);
}

TEST_CASE("state sizes and the SRAM design point") {
  HbmParams h;
  CHECK(state_bytes(128, h) == 21);
  CHECK(sram_state_capacity(h, 16) == 16384);
  CHECK(16384 * 16 == h.shared_sram_bytes);
  CHECK_THROWS_AS(sram_state_capacity(h, 0), ArgumentError);
}

TEST_CASE("spills appear only past the SRAM capacity") {
  HbmParams h;
  const auto fit = static_cast<std::uint32_t>(h.shared_sram_bytes / state_bytes(128, h));
  CHECK(model_traversal(chain_trace(fit, 4, MappingMode::LongPipeline), h, MappingMode::LongPipeline)
            .hbm_bytes_irregular == 0);
  CHECK(model_traversal(chain_trace(fit + 100, 4, MappingMode::LongPipeline), h, MappingMode::LongPipeline)
            .hbm_bytes_irregular > 0);
}

TEST_CASE("property: PE sweep is monotone") {
  auto pts = sweep_pe_density(mixed_workload(1), {16, 32, 64, 128, 192}, HbmParams{});
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].throughput >= pts[i - 1].throughput);
  for (auto& p : pts) CHECK(p.bandwidth_utilization <= 1.0 + 1e-9);
}

TEST_CASE("property: SRAM sweep is monotone") {
  auto pts = sweep_sram(long_read_workload(1), {32768, 65536, 131072, 262144, 524288}, HbmParams{});
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].irregular <= pts[i - 1].irregular);
    CHECK(pts[i].regular == doctest::Approx(pts[0].regular));
    CHECK(pts[i].throughput >= pts[i - 1].throughput);
  }
  CHECK(pts.front().irregular > pts[2].irregular);
  CHECK(pts.back().irregular == 0);
}

TEST_CASE("arithmetic intensity conventions") {
  Intensity part = arithmetic_intensity(Kernel::FwPartitioned, 1024);
  CHECK(part.value == doctest::Approx(512));
  CHECK(arithmetic_intensity(Kernel::FwPartitioned, 2048).value == doctest::Approx(2 * part.value));
  CHECK(arithmetic_intensity(Kernel::FwClassic, 1024).value == doctest::Approx(2.0 / 12));
  CHECK(arithmetic_intensity(Kernel::FwClassic, 1024, Counting::LoadStore).value < 2.0 / 12);
  CHECK_FALSE(part.convention.empty());
  CHECK(arithmetic_intensity(Kernel::S2G, 128).value > 0);
  CHECK_THROWS_AS(arithmetic_intensity(Kernel::FwClassic, 1), ArgumentError);
}

TEST_CASE("report serialization") {
  CostReport r = model_mp_merge(4, 1024, PcmParams{});
  std::ostringstream js, csv;
  write_report_json(js, r);
  auto j = nlohmann::json::parse(js.str());
  CHECK(j["phase"] == "mp_merge");
  CHECK(j["phases"].size() == 3);
  write_report_csv(csv, r);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "phase,cycles,ns,pJ,bytes_regular,bytes_irregular,writes");
  int rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  CHECK(rows == 4);
}

}  // TEST_SUITE
