#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace skemb {

// One turnstile item: add `delta` to the undirected edge {u, v}.
// delta = +1 inserts, -1 deletes; arbitrary signed weights are accepted.
struct EdgeUpdate {
  std::uint64_t u = 0;
  std::uint64_t v = 0;
  std::int64_t delta = 1;

  friend bool operator==(const EdgeUpdate&, const EdgeUpdate&) = default;
};

using UpdateStream = std::vector<EdgeUpdate>;

// Vertex -> cluster-label map, used for predictions and ground truth alike.
struct Partition {
  std::vector<std::uint32_t> labels;

  std::size_t size() const { return labels.size(); }

  std::uint32_t cluster_count() const {
    if (labels.empty()) return 0;
    return *std::max_element(labels.begin(), labels.end()) + 1;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
};

// Row-major n x cols real matrix; row i is vertex (or point) i's embedding.
struct EmbeddingMatrix {
  std::uint64_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<double> values;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::uint64_t n, std::uint32_t d)
      : rows(n), cols(d), values(static_cast<std::size_t>(n) * d, 0.0) {}

  std::span<double> row(std::uint64_t i) {
    return {values.data() + static_cast<std::size_t>(i) * cols, cols};
  }
  std::span<const double> row(std::uint64_t i) const {
    return {values.data() + static_cast<std::size_t>(i) * cols, cols};
  }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;
};

}  // namespace skemb
