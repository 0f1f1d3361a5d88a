// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "dpgraph/apsp.hpp"
#include "dpgraph/block.hpp"
#include "dpgraph/s2g.hpp"

using namespace dpg;

namespace {

DistanceBlock make_block(std::uint32_t n) {
  std::vector<VertexId> ids(n);
  for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
  return DistanceBlock::induced(gen_er(n, 8.0 / n, 1), ids);
}

void BM_FloydWarshallSerial(benchmark::State& st) {
  const DistanceBlock base = make_block(static_cast<std::uint32_t>(st.range(0)));
  for (auto _ : st) {
    DistanceBlock b = base;
    benchmark::DoNotOptimize(floyd_warshall_serial(b));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0) * st.range(0));
}

void BM_FloydWarshallParallel(benchmark::State& st) {
  const DistanceBlock base = make_block(static_cast<std::uint32_t>(st.range(0)));
  for (auto _ : st) {
    DistanceBlock b = base;
    benchmark::DoNotOptimize(floyd_warshall(b));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0) * st.range(0));
}

void BM_FloydWarshallBlocked(benchmark::State& st) {
  const DistanceBlock base = make_block(static_cast<std::uint32_t>(st.range(0)));
  for (auto _ : st) {
    DistanceBlock b = base;
    benchmark::DoNotOptimize(blocked_floyd_warshall(b, 64));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0) * st.range(0));
}

void BM_RecursiveApsp(benchmark::State& st) {
  const WeightedGraph g = gen_nws(static_cast<VertexId>(st.range(0)), 4, 0.01, 3);
  for (auto _ : st) benchmark::DoNotOptimize(recursive_apsp(g, 128).dense.data());
}

void BM_BatchAlign(benchmark::State& st) {
  const GenomeGraph g = gen_genome(20000, 0.02, 1).gfa.expand();
  const ReadBatch b = gen_reads(g, static_cast<std::size_t>(st.range(0)), 150, 0.01, 2);
  for (auto _ : st) benchmark::DoNotOptimize(batch_align(g, b, MappingMode::ShortParallel).results.data());
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_FloydWarshallSerial)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FloydWarshallParallel)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FloydWarshallBlocked)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecursiveApsp)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchAlign)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
