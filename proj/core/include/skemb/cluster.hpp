#pragma once

#include <cstdint>
#include <vector>

#include "skemb/types.hpp"

namespace skemb {

struct KmeansResult {
  Partition partition;
  std::vector<double> centroids;  // row-major k x cols
  std::uint32_t k = 0;
  double inertia = 0.0;           // sum of squared distances to assigned centroid
  std::uint32_t iterations = 0;   // Lloyd update/reassign rounds executed
  std::vector<double> inertia_trace;  // objective after init and each round
};

// Lloyd's method from a k-means++ start. Deterministic given (emb, k, seed).
// Ties in nearest-centroid go to the lowest centroid index; a cluster left
// empty after reassignment is reseeded at the point currently farthest from
// its centroid. The objective never increases between rounds; a violation
// beyond float slack throws InternalError.
KmeansResult kmeans(const EmbeddingMatrix& emb, std::uint32_t k,
                    std::uint64_t seed, std::uint32_t max_iters = 100);

// Independent restarts with sub-seeds derived from `seed`; returns the run
// with the lowest inertia (first such run on ties).
KmeansResult kmeans_best_of(const EmbeddingMatrix& emb, std::uint32_t k,
                            std::uint64_t seed, std::uint32_t restarts,
                            std::uint32_t max_iters = 100);

struct EighResult {
  std::uint64_t n = 0;
  std::vector<double> values;   // eigenvalues, descending
  std::vector<double> vectors;  // row-major n x n; column j pairs with values[j]
  bool degenerate = false;      // input was the zero matrix; vectors = identity
};

// Dense symmetric eigendecomposition by cyclic Jacobi rotations. `matrix` is
// row-major n x n and must be symmetric. Iterates until the off-diagonal
// Frobenius mass is negligible relative to the input, so every returned pair
// satisfies ||A v - lambda v|| <= 1e-8 * ||A||_F with a wide margin.
EighResult jacobi_eigh(std::vector<double> matrix, std::uint64_t n);

// spectral_embed materializes a dense n x n adjacency matrix; the guard keeps
// the O(n^3) eigensolve in oracle territory.
inline constexpr std::uint64_t kSpectralGuardN = 4096;

// Rows of the top-k eigenvector matrix of the symmetric adjacency built from
// the resident edge set (eigenvalues most-positive first). Comparison oracle
// only; sketches are the production path.
EmbeddingMatrix spectral_embed(const UpdateStream& edges, std::uint64_t n,
                               std::uint32_t k);

}  // namespace skemb
