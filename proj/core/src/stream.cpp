#include "skemb/stream.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>

#include "skemb/error.hpp"

namespace skemb {

PartitionMap::PartitionMap(Rule rule, std::uint64_t n, std::uint32_t workers)
    : rule_(rule),
      n_(n),
      workers_(workers),
      base_(n / workers),
      remainder_(static_cast<std::uint32_t>(n % workers)) {}

PartitionMap PartitionMap::round_robin(std::uint64_t n, std::uint32_t workers) {
  if (workers == 0) throw ParameterError("PartitionMap: worker count must be positive");
  return PartitionMap(Rule::round_robin, n, workers);
}

PartitionMap PartitionMap::contiguous(std::uint64_t n, std::uint32_t workers) {
  if (workers == 0) throw ParameterError("PartitionMap: worker count must be positive");
  return PartitionMap(Rule::contiguous, n, workers);
}

PartitionMap PartitionMap::custom(std::uint64_t n, std::uint32_t workers,
                                  std::vector<std::uint32_t> assignment) {
  if (workers == 0) throw ParameterError("PartitionMap: worker count must be positive");
  if (assignment.size() != n)
    throw ParameterError("PartitionMap: assignment must list every vertex");
  PartitionMap map(Rule::custom, n, workers);
  map.assignment_ = std::move(assignment);
  map.rank_.resize(n);
  map.counts_.assign(workers, 0);
  for (std::uint64_t v = 0; v < n; ++v) {
    std::uint32_t w = map.assignment_[v];
    if (w >= workers)
      throw ParameterError("PartitionMap: assignment entry " + std::to_string(w) +
                           " exceeds worker count");
    map.rank_[v] = map.counts_[w]++;
  }
  return map;
}

std::uint32_t PartitionMap::worker_of(std::uint64_t v) const {
  switch (rule_) {
    case Rule::round_robin:
      return static_cast<std::uint32_t>(v % workers_);
    case Rule::contiguous: {
      std::uint64_t boundary = static_cast<std::uint64_t>(remainder_) * (base_ + 1);
      if (v < boundary) return static_cast<std::uint32_t>(v / (base_ + 1));
      return static_cast<std::uint32_t>(remainder_ + (v - boundary) / base_);
    }
    case Rule::custom:
      return assignment_[v];
  }
  return 0;
}

std::uint64_t PartitionMap::local_index(std::uint64_t v) const {
  switch (rule_) {
    case Rule::round_robin:
      return v / workers_;
    case Rule::contiguous: {
      std::uint64_t boundary = static_cast<std::uint64_t>(remainder_) * (base_ + 1);
      if (v < boundary) return v % (base_ + 1);
      return (v - boundary) % base_;
    }
    case Rule::custom:
      return rank_[v];
  }
  return 0;
}

std::uint64_t PartitionMap::owned_count(std::uint32_t worker) const {
  if (worker >= workers_)
    throw std::out_of_range("PartitionMap: worker id out of range");
  if (rule_ == Rule::custom) return counts_[worker];
  return base_ + (worker < remainder_ ? 1 : 0);
}

std::vector<std::uint64_t> PartitionMap::owned_vertices(std::uint32_t worker) const {
  std::vector<std::uint64_t> out;
  out.reserve(owned_count(worker));
  switch (rule_) {
    case Rule::round_robin:
      for (std::uint64_t v = worker; v < n_; v += workers_) out.push_back(v);
      break;
    case Rule::contiguous: {
      std::uint64_t start =
          worker < remainder_
              ? static_cast<std::uint64_t>(worker) * (base_ + 1)
              : static_cast<std::uint64_t>(remainder_) * (base_ + 1) +
                    (worker - remainder_) * base_;
      std::uint64_t len = owned_count(worker);
      for (std::uint64_t i = 0; i < len; ++i) out.push_back(start + i);
      break;
    }
    case Rule::custom:
      for (std::uint64_t v = 0; v < n_; ++v)
        if (assignment_[v] == worker) out.push_back(v);
      break;
  }
  return out;
}

std::array<std::pair<std::uint32_t, RoutedUpdate>, 2> route(
    const PartitionMap& map, const EdgeUpdate& update) {
  if (update.u == update.v)
    throw InputFormatError("self-loop update on vertex " + std::to_string(update.u));
  if (update.u >= map.vertex_count() || update.v >= map.vertex_count())
    throw InputFormatError("edge (" + std::to_string(update.u) + ", " +
                           std::to_string(update.v) + ") references a vertex >= " +
                           std::to_string(map.vertex_count()));
  return {{{map.worker_of(update.u), {update.u, update.v, update.delta}},
           {map.worker_of(update.v), {update.v, update.u, update.delta}}}};
}

SketchWorker::SketchWorker(const PartitionMap& map, std::uint32_t id,
                           const SketchOperator& op)
    : map_(&map), op_(&op), id_(id) {
  std::uint32_t s = sketch_dim(op);
  rows_.reserve(map.owned_count(id));
  for (std::uint64_t v : map.owned_vertices(id)) rows_.emplace_back(v, s);
}

void SketchWorker::apply(const RoutedUpdate& msg) {
  if (map_->worker_of(msg.target) != id_)
    throw InternalError("worker " + std::to_string(id_) + " asked to mutate row " +
                        std::to_string(msg.target) + " owned by worker " +
                        std::to_string(map_->worker_of(msg.target)));
  update_row(*op_, rows_[map_->local_index(msg.target)], msg.coord, msg.delta);
  ++applied_;
}

const SketchRow& SketchWorker::row(std::uint64_t vertex) const {
  if (map_->worker_of(vertex) != id_)
    throw InternalError("worker " + std::to_string(id_) + " does not own row " +
                        std::to_string(vertex));
  return rows_[map_->local_index(vertex)];
}

StreamEngine::StreamEngine(PartitionMap map, SketchOperator op, ExecutionMode mode)
    : map_(std::move(map)), op_(std::move(op)), mode_(mode) {
  if (input_dim(op_) != map_.vertex_count())
    throw ParameterError("StreamEngine: operator input dimension " +
                         std::to_string(input_dim(op_)) +
                         " does not match vertex count " +
                         std::to_string(map_.vertex_count()));
  std::uint32_t w_count = map_.worker_count();
  workers_.reserve(w_count);
  for (std::uint32_t w = 0; w < w_count; ++w) workers_.emplace_back(map_, w, op_);
  if (mode_ == ExecutionMode::threaded) {
    buffers_.resize(w_count);
    for (auto& buf : buffers_) buf.reserve(kBatchSize);
    mail_.reserve(w_count);
    for (std::uint32_t w = 0; w < w_count; ++w)
      mail_.push_back(std::make_unique<Mailbox>());
    threads_.reserve(w_count);
    for (std::uint32_t w = 0; w < w_count; ++w)
      threads_.emplace_back([this, w] { worker_loop(w); });
  }
}

StreamEngine::~StreamEngine() {
  try {
    finish();
  } catch (...) {
    // Destructor swallows worker errors; call finish() to observe them.
  }
}

void StreamEngine::worker_loop(std::uint32_t w) {
  Mailbox& box = *mail_[w];
  for (;;) {
    std::vector<RoutedUpdate> batch;
    {
      std::unique_lock lk(box.m);
      box.cv.wait(lk, [&] { return box.closed || !box.batches.empty(); });
      if (box.batches.empty()) return;
      batch = std::move(box.batches.front());
      box.batches.pop_front();
    }
    try {
      for (const RoutedUpdate& msg : batch) workers_[w].apply(msg);
    } catch (...) {
      std::lock_guard lk(error_m_);
      if (!error_) error_ = std::current_exception();
      return;
    }
  }
}

void StreamEngine::enqueue(std::uint32_t w, const RoutedUpdate& msg) {
  auto& buf = buffers_[w];
  buf.push_back(msg);
  if (buf.size() >= kBatchSize) {
    Mailbox& box = *mail_[w];
    {
      std::lock_guard lk(box.m);
      box.batches.push_back(std::move(buf));
    }
    box.cv.notify_one();
    buf.clear();
    buf.reserve(kBatchSize);
  }
}

void StreamEngine::ingest(const EdgeUpdate& update) {
  if (finished_) throw InternalError("StreamEngine: ingest after finish");
  auto msgs = route(map_, update);
  if (mode_ == ExecutionMode::serial) {
    workers_[msgs[0].first].apply(msgs[0].second);
    workers_[msgs[1].first].apply(msgs[1].second);
  } else {
    enqueue(msgs[0].first, msgs[0].second);
    enqueue(msgs[1].first, msgs[1].second);
  }
}

void StreamEngine::ingest(const UpdateStream& stream) {
  for (const EdgeUpdate& update : stream) ingest(update);
}

void StreamEngine::finish() {
  if (finished_) return;
  finished_ = true;
  if (mode_ != ExecutionMode::threaded) return;
  for (std::uint32_t w = 0; w < map_.worker_count(); ++w) {
    Mailbox& box = *mail_[w];
    {
      std::lock_guard lk(box.m);
      if (!buffers_[w].empty()) box.batches.push_back(std::move(buffers_[w]));
      box.closed = true;
    }
    box.cv.notify_one();
  }
  for (auto& t : threads_) t.join();
  threads_.clear();
  if (error_) std::rethrow_exception(error_);
}

EmbeddingMatrix StreamEngine::gather() {
  finish();
  EmbeddingMatrix embedding(map_.vertex_count(), sketch_dim(op_));
  for (const SketchWorker& worker : workers_) {
    for (const SketchRow& row : worker.rows()) {
      std::vector<double> exported = export_row(op_, row);
      std::copy(exported.begin(), exported.end(), embedding.row(row.owner).begin());
    }
  }
  return embedding;
}

std::uint64_t StreamEngine::applied_updates() const {
  std::uint64_t total = 0;
  for (const SketchWorker& worker : workers_) total += worker.applied_count();
  return total;
}

EmbeddingMatrix run_stream(const UpdateStream& stream, const SketchOperator& op,
                           PartitionMap map, ExecutionMode mode) {
  StreamEngine engine(std::move(map), op, mode);
  engine.ingest(stream);
  return engine.gather();
}

EmbeddingMatrix run_stream(const UpdateStream& stream, const SketchOperator& op,
                           std::uint64_t n, std::uint32_t workers,
                           ExecutionMode mode) {
  return run_stream(stream, op, PartitionMap::round_robin(n, workers), mode);
}

ThroughputReport throughput_bench(const UpdateStream& stream,
                                  const SketchOperator& op, std::uint64_t n,
                                  std::uint32_t workers, ExecutionMode mode) {
  StreamEngine engine(PartitionMap::round_robin(n, workers), op, mode);
  auto start = std::chrono::steady_clock::now();
  engine.ingest(stream);
  engine.finish();
  auto stop = std::chrono::steady_clock::now();

  ThroughputReport report;
  report.edge_updates = stream.size();
  report.row_updates = engine.applied_updates();
  report.workers = workers;
  report.seconds = std::chrono::duration<double>(stop - start).count();
  report.updates_per_second =
      report.seconds > 0.0 ? static_cast<double>(report.edge_updates) / report.seconds
                           : 0.0;
  return report;
}

}  // namespace skemb
