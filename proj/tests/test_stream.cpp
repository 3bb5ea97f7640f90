#include <algorithm>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "skemb/error.hpp"
#include "skemb/rng.hpp"
#include "skemb/sbm.hpp"
#include "skemb/sketch.hpp"
#include "skemb/stream.hpp"

using namespace skemb;

namespace {

UpdateStream random_insert_stream(std::uint64_t n, std::size_t edges,
                                  std::uint64_t seed) {
  rng::Engine g = rng::make_engine(seed);
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  UpdateStream out;
  while (out.size() < edges) {
    std::uint64_t u = rng::uniform_below(g, n);
    std::uint64_t v = rng::uniform_below(g, n - 1);
    if (v >= u) ++v;
    auto key = std::minmax(u, v);
    if (!seen.insert({key.first, key.second}).second) continue;
    out.push_back({u, v, +1});
  }
  return out;
}

}  // namespace

TEST_SUITE("stream") {

TEST_CASE("round_robin partition: worker id is v mod W") {
  PartitionMap map = PartitionMap::round_robin(16, 4);
  CHECK(map.vertex_count() == 16);
  CHECK(map.worker_count() == 4);
  CHECK(map.worker_of(5) == 1);
  CHECK(map.worker_of(10) == 2);
  CHECK(map.worker_of(0) == 0);

  for (std::uint32_t w = 0; w < 4; ++w) {
    auto owned = map.owned_vertices(w);
    CHECK(owned.size() == map.owned_count(w));
    CHECK(std::is_sorted(owned.begin(), owned.end()));
    for (std::size_t i = 0; i < owned.size(); ++i) {
      CHECK(map.worker_of(owned[i]) == w);
      CHECK(map.local_index(owned[i]) == i);
    }
  }
}

TEST_CASE("partition loads differ by at most one vertex") {
  for (auto [n, w] : std::vector<std::pair<std::uint64_t, std::uint32_t>>{
           {10, 3}, {16, 4}, {17, 4}, {5, 8}, {1000, 7}}) {
    for (PartitionMap map : {PartitionMap::round_robin(n, w),
                             PartitionMap::contiguous(n, w)}) {
      std::uint64_t lo = n, hi = 0, total = 0;
      for (std::uint32_t i = 0; i < w; ++i) {
        std::uint64_t c = map.owned_count(i);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        total += c;
      }
      CHECK(total == n);
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("contiguous partition owns consecutive ranges") {
  PartitionMap map = PartitionMap::contiguous(10, 3);
  // 10 = 3*3 + 1: worker 0 owns 4, the rest own 3.
  CHECK(map.owned_vertices(0) == std::vector<std::uint64_t>{0, 1, 2, 3});
  CHECK(map.owned_vertices(1) == std::vector<std::uint64_t>{4, 5, 6});
  CHECK(map.owned_vertices(2) == std::vector<std::uint64_t>{7, 8, 9});
  for (std::uint64_t v = 0; v < 10; ++v)
    CHECK(map.local_index(v) == v - map.owned_vertices(map.worker_of(v))[0]);
}

TEST_CASE("custom partition takes arbitrary assignments") {
  std::vector<std::uint32_t> assign = {2, 0, 2, 1, 0};
  PartitionMap map = PartitionMap::custom(5, 3, assign);
  CHECK(map.worker_of(0) == 2);
  CHECK(map.worker_of(4) == 0);
  CHECK(map.owned_vertices(0) == std::vector<std::uint64_t>{1, 4});
  CHECK(map.owned_vertices(2) == std::vector<std::uint64_t>{0, 2});
  CHECK(map.local_index(4) == 1);
  CHECK(map.owned_count(1) == 1);

  CHECK_THROWS_AS(PartitionMap::custom(5, 2, assign), ParameterError);
  CHECK_THROWS_AS(PartitionMap::custom(3, 3, assign), ParameterError);
}

TEST_CASE("route splits an edge into its two directed messages") {
  PartitionMap map = PartitionMap::round_robin(16, 4);
  auto halves = route(map, {5, 10, +1});
  CHECK(halves[0].first == 1);  // 5 mod 4
  CHECK(halves[0].second == RoutedUpdate{5, 10, +1});
  CHECK(halves[1].first == 2);  // 10 mod 4
  CHECK(halves[1].second == RoutedUpdate{10, 5, +1});

  PartitionMap single = PartitionMap::round_robin(16, 1);
  auto both = route(single, {5, 10, -1});
  CHECK(both[0].first == 0);
  CHECK(both[1].first == 0);
  CHECK(both[0].second.delta == -1);

  CHECK_THROWS_AS(route(map, {3, 3, +1}), InputFormatError);
  CHECK_THROWS_AS(route(map, {3, 16, +1}), InputFormatError);
  CHECK_THROWS_AS(route(map, {16, 3, +1}), InputFormatError);
}

TEST_CASE("worker rejects rows it does not own") {
  PartitionMap map = PartitionMap::round_robin(8, 2);
  SketchOperator op = make_operator(SketchKind::cst, 8, 4, 1);
  SketchWorker w1(map, 1, op);
  CHECK_NOTHROW(w1.apply({1, 2, +1}));  // vertex 1 belongs to worker 1
  CHECK(w1.applied_count() == 1);
  CHECK_THROWS_AS(w1.apply({2, 1, +1}), InternalError);
  CHECK(w1.applied_count() == 1);
}

TEST_CASE("engine validates the operator dimension") {
  PartitionMap map = PartitionMap::round_robin(8, 2);
  SketchOperator op = make_operator(SketchKind::cst, 9, 4, 1);
  CHECK_THROWS_AS(StreamEngine(map, op), ParameterError);
}

TEST_CASE("ingest after finish throws") {
  PartitionMap map = PartitionMap::round_robin(8, 2);
  SketchOperator op = make_operator(SketchKind::cst, 8, 4, 1);
  StreamEngine engine(map, op);
  engine.ingest({0, 1, +1});
  engine.finish();
  engine.finish();  // idempotent
  CHECK_THROWS_AS(engine.ingest({0, 2, +1}), InternalError);
}

TEST_CASE("insert then delete leaves the all-zero embedding") {
  SketchOperator op = make_operator(SketchKind::fwht, 8, 4, 3);
  UpdateStream stream = {{0, 1, +1}, {0, 1, -1}};
  EmbeddingMatrix emb = run_stream(stream, op, 8, 2);
  for (double v : emb.values) CHECK(v == 0.0);
}

TEST_CASE("embedding is invariant to worker count, mode, and order") {
  const std::uint64_t n = 64;
  SbmSample sample = sample_sbm(flat_sbm_spec(n, 4, 20.0, 0.5, 5));

  for (SketchKind kind : {SketchKind::cst, SketchKind::fwht}) {
    SketchOperator op = make_operator(kind, n, 16, 77);
    EmbeddingMatrix reference = run_stream(sample.stream, op, n, 1);
    CHECK(reference.rows == n);
    CHECK(reference.cols == 16);

    for (std::uint32_t workers : {2u, 3u, 8u}) {
      CHECK(run_stream(sample.stream, op, n, workers) == reference);
      CHECK(run_stream(sample.stream, op, n, workers,
                       ExecutionMode::threaded) == reference);
    }

    // Contiguous and custom partitions agree too.
    CHECK(run_stream(sample.stream, op, PartitionMap::contiguous(n, 4)) ==
          reference);
    std::vector<std::uint32_t> assign(n);
    rng::Engine g = rng::make_engine(8);
    for (auto& a : assign)
      a = static_cast<std::uint32_t>(rng::uniform_below(g, 5));
    CHECK(run_stream(sample.stream, op, PartitionMap::custom(n, 5, assign)) ==
          reference);

    // Shuffled stream order.
    UpdateStream shuffled = sample.stream;
    rng::shuffle(g, shuffled);
    CHECK(run_stream(shuffled, op, n, 3) == reference);
  }
}

TEST_CASE("fully dynamic stream equals the net edge set from scratch") {
  const std::uint64_t n = 256;
  UpdateStream inserts = random_insert_stream(n, 1000, 42);

  // Delete half of them; interleave deletions anywhere (turnstile rows may
  // go negative in between).
  UpdateStream full = inserts;
  UpdateStream survivors;
  for (std::size_t i = 0; i < inserts.size(); ++i) {
    if (i % 2 == 0)
      full.push_back({inserts[i].u, inserts[i].v, -1});
    else
      survivors.push_back(inserts[i]);
  }
  rng::Engine g = rng::make_engine(7);
  rng::shuffle(g, full);

  for (SketchKind kind : {SketchKind::cst, SketchKind::fwht}) {
    SketchOperator op = make_operator(kind, n, 32, 13);
    EmbeddingMatrix dynamic = run_stream(full, op, n, 4);
    EmbeddingMatrix fresh = run_stream(survivors, op, n, 1);
    CHECK(dynamic == fresh);
  }
}

TEST_CASE("adversarial per-worker interleavings cannot change the rows") {
  const std::uint64_t n = 32;
  PartitionMap map = PartitionMap::round_robin(n, 2);
  SketchOperator op = make_operator(SketchKind::cst, n, 8, 99);
  UpdateStream stream = random_insert_stream(n, 100, 3);

  // Reference rows from the serial engine.
  StreamEngine engine(map, op);
  engine.ingest(stream);
  EmbeddingMatrix reference = engine.gather();

  // Route by hand, then apply each worker's messages in several shuffled
  // orders directly against SketchWorker.
  std::vector<std::vector<RoutedUpdate>> inbox(2);
  for (const EdgeUpdate& e : stream)
    for (auto& [w, msg] : route(map, e)) inbox[w].push_back(msg);

  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    rng::Engine g = rng::make_engine(derive_seed(11, "interleave", trial));
    std::vector<SketchWorker> workers;
    workers.emplace_back(map, 0, op);
    workers.emplace_back(map, 1, op);
    for (std::uint32_t w = 0; w < 2; ++w) {
      rng::shuffle(g, inbox[w]);
      for (const RoutedUpdate& msg : inbox[w]) workers[w].apply(msg);
    }
    for (std::uint64_t v = 0; v < n; ++v) {
      const SketchRow& row = workers[map.worker_of(v)].row(v);
      const auto exported = export_row(op, row);
      for (std::uint32_t t = 0; t < 8; ++t)
        CHECK(exported[t] == reference.row(v)[t]);
    }
  }
}

TEST_CASE("total applied work is exactly twice the stream length") {
  const std::uint64_t n = 64;
  UpdateStream stream = random_insert_stream(n, 500, 10);
  SketchOperator op = make_operator(SketchKind::cst, n, 8, 1);

  for (ExecutionMode mode : {ExecutionMode::serial, ExecutionMode::threaded}) {
    StreamEngine engine(PartitionMap::round_robin(n, 4), op, mode);
    engine.ingest(stream);
    engine.finish();
    CHECK(engine.applied_updates() == 2 * stream.size());
    std::uint64_t per_worker = 0;
    for (std::uint32_t w = 0; w < 4; ++w)
      per_worker += engine.worker(w).applied_count();
    CHECK(per_worker == 2 * stream.size());
  }
}

TEST_CASE("routing errors surface in threaded mode at finish") {
  SketchOperator op = make_operator(SketchKind::cst, 8, 4, 1);
  StreamEngine engine(PartitionMap::round_robin(8, 2), op,
                      ExecutionMode::threaded);
  CHECK_THROWS_AS(engine.ingest({0, 8, +1}), InputFormatError);
  engine.finish();
}

TEST_CASE("gather returns rows for every vertex in id order") {
  const std::uint64_t n = 10;
  SketchOperator op = make_operator(SketchKind::cst, n, 4, 5);
  UpdateStream stream = {{0, 9, +1}, {1, 2, +1}};
  EmbeddingMatrix emb = run_stream(stream, op, n, 3);
  CHECK(emb.rows == n);
  CHECK(emb.cols == 4);

  // Vertices untouched by the stream stay zero.
  for (std::uint32_t t = 0; t < 4; ++t) {
    CHECK(emb.row(5)[t] == 0.0);
    CHECK(emb.row(3)[t] == 0.0);
  }
  // Touched vertices match a hand-built row.
  const auto& cst = std::get<CstOperator>(op);
  SketchRow expect(0, 4);
  cst.update(expect, 9, +1);
  auto exported = cst.export_row(expect);
  for (std::uint32_t t = 0; t < 4; ++t) CHECK(emb.row(0)[t] == exported[t]);
}

TEST_CASE("throughput_bench reports consistent counters") {
  const std::uint64_t n = 128;
  UpdateStream stream = random_insert_stream(n, 2000, 21);
  SketchOperator op = make_operator(SketchKind::cst, n, 16, 2);

  ThroughputReport report = throughput_bench(stream, op, n, 2);
  CHECK(report.edge_updates == 2000);
  CHECK(report.row_updates == 4000);
  CHECK(report.workers == 2);
  CHECK(report.seconds >= 0.0);
  CHECK(report.updates_per_second >= 0.0);

  ThroughputReport empty = throughput_bench({}, op, n, 1);
  CHECK(empty.edge_updates == 0);
}

}  // TEST_SUITE
