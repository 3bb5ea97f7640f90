// End-to-end ingestion throughput: edge updates per second through the
// engine, across stream lengths, worker counts, and execution modes.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "skemb/rng.hpp"
#include "skemb/sketch.hpp"
#include "skemb/stream.hpp"
#include "skemb/types.hpp"

namespace {

using namespace skemb;

constexpr std::uint64_t kVertices = 1u << 15;

UpdateStream make_stream(std::uint64_t edges, std::uint64_t seed) {
  UpdateStream stream;
  stream.reserve(edges);
  rng::Engine g = rng::make_engine(seed);
  for (std::uint64_t i = 0; i < edges; ++i) {
    std::uint64_t u = rng::uniform_below(g, kVertices);
    std::uint64_t v = rng::uniform_below(g, kVertices - 1);
    if (v >= u) ++v;
    stream.push_back({u, v, +1});
  }
  return stream;
}

void BM_EngineIngest(benchmark::State& state) {
  const auto edges = static_cast<std::uint64_t>(state.range(0));
  const auto workers = static_cast<std::uint32_t>(state.range(1));
  const bool threaded = state.range(2) != 0;
  const UpdateStream stream = make_stream(edges, 11);
  SketchOperator op = make_operator(SketchKind::cst, kVertices, 64, 3);

  for (auto _ : state) {
    state.PauseTiming();  // row allocation is O(n*s), not part of ingestion
    StreamEngine engine(PartitionMap::round_robin(kVertices, workers), op,
                        threaded ? ExecutionMode::threaded : ExecutionMode::serial);
    state.ResumeTiming();
    engine.ingest(stream);
    engine.finish();
    benchmark::DoNotOptimize(engine.applied_updates());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(edges));
}

}  // namespace

BENCHMARK(BM_EngineIngest)
    ->Args({1 << 18, 1, 0})
    ->Args({1 << 19, 1, 0})
    ->Args({1 << 20, 1, 0})
    ->Args({1 << 20, 4, 0})
    ->Args({1 << 20, 4, 1})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
