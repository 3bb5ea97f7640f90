// Per-update cost of the two sketch operators across sketch dimensions.
// CST is O(1) per update regardless of s; FWHT pays O(s) sign flips.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "skemb/sketch.hpp"

namespace {

using namespace skemb;

constexpr std::uint64_t kInputDim = 1u << 16;

void BM_CstUpdate(benchmark::State& state) {
  const auto s = static_cast<std::uint32_t>(state.range(0));
  CstOperator op(kInputDim, s, 1);
  SketchRow row(0, s);
  std::uint64_t j = 0;
  for (auto _ : state) {
    op.update(row, j & (kInputDim - 1), +1);
    ++j;
    benchmark::DoNotOptimize(row.accum.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_FwhtUpdate(benchmark::State& state) {
  const auto s = static_cast<std::uint32_t>(state.range(0));
  FwhtOperator op(kInputDim, s, 1);
  SketchRow row(0, s);
  std::uint64_t j = 0;
  for (auto _ : state) {
    op.update(row, j & (kInputDim - 1), +1);
    ++j;
    benchmark::DoNotOptimize(row.accum.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_CstExport(benchmark::State& state) {
  const auto s = static_cast<std::uint32_t>(state.range(0));
  CstOperator op(kInputDim, s, 1);
  SketchRow row(0, s);
  for (std::uint64_t j = 0; j < kInputDim; j += 7) op.update(row, j, +1);
  for (auto _ : state) {
    auto exported = op.export_row(row);
    benchmark::DoNotOptimize(exported.data());
  }
}

}  // namespace

BENCHMARK(BM_CstUpdate)->Arg(8)->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(BM_FwhtUpdate)->Arg(8)->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(BM_CstExport)->Arg(128);
