#pragma once

#include <array>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "skemb/sketch.hpp"
#include "skemb/types.hpp"

namespace skemb {

// serial: messages are applied inline on the caller's thread in routing
// order. threaded: one thread per worker consumes a per-worker queue.
// Both modes produce bit-identical embeddings: rows hold exact integers and
// every message commutes with every other message for the same row.
enum class ExecutionMode { serial, threaded };

// Vertex -> worker assignment. round_robin (v mod W, the default protocol)
// and contiguous (equal blocks of consecutive ids) both keep worker loads
// within one vertex of each other; custom takes an arbitrary per-vertex
// assignment so alternative strategies can be exercised without touching the
// engine. Vertices owned by one worker are ranked by ascending id; that rank
// is the row's local index inside the worker.
class PartitionMap {
 public:
  static PartitionMap round_robin(std::uint64_t n, std::uint32_t workers);
  static PartitionMap contiguous(std::uint64_t n, std::uint32_t workers);
  static PartitionMap custom(std::uint64_t n, std::uint32_t workers,
                             std::vector<std::uint32_t> assignment);

  std::uint64_t vertex_count() const { return n_; }
  std::uint32_t worker_count() const { return workers_; }

  // Callers must pass v < vertex_count(); route() enforces that for every
  // update entering the engine.
  std::uint32_t worker_of(std::uint64_t v) const;
  std::uint64_t local_index(std::uint64_t v) const;

  std::uint64_t owned_count(std::uint32_t worker) const;
  std::vector<std::uint64_t> owned_vertices(std::uint32_t worker) const;

 private:
  enum class Rule { round_robin, contiguous, custom };

  PartitionMap(Rule rule, std::uint64_t n, std::uint32_t workers);

  Rule rule_ = Rule::round_robin;
  std::uint64_t n_ = 0;
  std::uint32_t workers_ = 1;
  std::uint64_t base_ = 0;       // n / W
  std::uint32_t remainder_ = 0;  // n % W; leading workers own base_ + 1
  std::vector<std::uint32_t> assignment_;  // custom only
  std::vector<std::uint64_t> rank_;        // custom only: local index per vertex
  std::vector<std::uint64_t> counts_;      // custom only: load per worker
};

// One directed half of an edge update: add delta at coordinate `coord` of
// row `target`. An undirected update {u, v} becomes (u, v) and (v, u).
struct RoutedUpdate {
  std::uint64_t target = 0;
  std::uint64_t coord = 0;
  std::int64_t delta = 0;

  friend bool operator==(const RoutedUpdate&, const RoutedUpdate&) = default;
};

// Split an edge update into its two directed messages, paired with the
// worker that owns each target row. Throws InputFormatError for self-loops
// and for endpoints outside [0, map.vertex_count()).
std::array<std::pair<std::uint32_t, RoutedUpdate>, 2> route(
    const PartitionMap& map, const EdgeUpdate& update);

// Owns the sketch rows of one worker's vertices and applies routed messages
// to them. The map and operator are borrowed read-only and must outlive the
// worker. apply() rejects rows the worker does not own with InternalError;
// the check stays on in release builds (one modulo per message).
class SketchWorker {
 public:
  SketchWorker(const PartitionMap& map, std::uint32_t id,
               const SketchOperator& op);

  std::uint32_t id() const { return id_; }
  std::uint64_t applied_count() const { return applied_; }

  void apply(const RoutedUpdate& msg);

  const SketchRow& row(std::uint64_t vertex) const;
  const std::vector<SketchRow>& rows() const { return rows_; }

 private:
  const PartitionMap* map_ = nullptr;
  const SketchOperator* op_ = nullptr;
  std::uint32_t id_ = 0;
  std::uint64_t applied_ = 0;
  std::vector<SketchRow> rows_;
};

// In-process ingestion engine. ingest() routes each update to the two owner
// workers; gather() drains everything and assembles the n x s embedding.
// The result is a pure function of the update multiset and the operator:
// worker count, ingestion order, and scheduling cannot change a single bit.
class StreamEngine {
 public:
  StreamEngine(PartitionMap map, SketchOperator op,
               ExecutionMode mode = ExecutionMode::serial);
  ~StreamEngine();

  StreamEngine(const StreamEngine&) = delete;
  StreamEngine& operator=(const StreamEngine&) = delete;

  const PartitionMap& partition() const { return map_; }
  const SketchOperator& sketch_operator() const { return op_; }
  ExecutionMode mode() const { return mode_; }

  void ingest(const EdgeUpdate& update);
  void ingest(const UpdateStream& stream);

  // Flush buffered messages, stop worker threads, and surface any worker
  // error. Idempotent; gather() calls it implicitly. ingest() afterwards
  // throws InternalError.
  void finish();

  EmbeddingMatrix gather();

  // Total routed messages applied; equals 2x the ingested update count.
  // Meaningful in threaded mode only after finish().
  std::uint64_t applied_updates() const;

  const SketchWorker& worker(std::uint32_t w) const { return workers_[w]; }

 private:
  struct Mailbox {
    std::mutex m;
    std::condition_variable cv;
    std::deque<std::vector<RoutedUpdate>> batches;
    bool closed = false;
  };

  static constexpr std::size_t kBatchSize = 1024;

  void enqueue(std::uint32_t w, const RoutedUpdate& msg);
  void worker_loop(std::uint32_t w);

  PartitionMap map_;
  SketchOperator op_;
  ExecutionMode mode_ = ExecutionMode::serial;
  std::vector<SketchWorker> workers_;
  std::vector<std::vector<RoutedUpdate>> buffers_;
  std::vector<std::unique_ptr<Mailbox>> mail_;
  std::vector<std::thread> threads_;
  std::mutex error_m_;
  std::exception_ptr error_;
  bool finished_ = false;
};

// Ingest the whole stream and return the embedding. The overload without a
// map uses the round-robin partition.
EmbeddingMatrix run_stream(const UpdateStream& stream, const SketchOperator& op,
                           PartitionMap map,
                           ExecutionMode mode = ExecutionMode::serial);
EmbeddingMatrix run_stream(const UpdateStream& stream, const SketchOperator& op,
                           std::uint64_t n, std::uint32_t workers,
                           ExecutionMode mode = ExecutionMode::serial);

struct ThroughputReport {
  std::uint64_t edge_updates = 0;
  std::uint64_t row_updates = 0;
  std::uint32_t workers = 0;
  double seconds = 0.0;
  double updates_per_second = 0.0;  // edge updates per second
};

// Time ingest + drain of the stream (row allocation and the final export are
// excluded: both are O(n*s) regardless of stream length, and the quantity of
// interest is cost per update).
ThroughputReport throughput_bench(const UpdateStream& stream,
                                  const SketchOperator& op, std::uint64_t n,
                                  std::uint32_t workers,
                                  ExecutionMode mode = ExecutionMode::serial);

}  // namespace skemb
