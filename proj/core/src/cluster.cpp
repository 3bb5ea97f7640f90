#include "skemb/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "skemb/error.hpp"
#include "skemb/hash.hpp"
#include "skemb/rng.hpp"

namespace skemb {
namespace {

double sq_dist(const double* a, const double* b, std::uint32_t d) {
  double acc = 0.0;
  for (std::uint32_t i = 0; i < d; ++i) {
    double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

// Nearest-centroid assignment; ties go to the lowest centroid index because
// only a strictly smaller distance displaces the incumbent.
double assign_points(const EmbeddingMatrix& emb,
                     const std::vector<double>& centroids, std::uint32_t k,
                     std::vector<std::uint32_t>& labels,
                     std::vector<double>& dist2) {
  std::uint32_t d = emb.cols;
  double inertia = 0.0;
  for (std::uint64_t i = 0; i < emb.rows; ++i) {
    const double* point = emb.row(i).data();
    std::uint32_t best = 0;
    double best_d = sq_dist(point, centroids.data(), d);
    for (std::uint32_t j = 1; j < k; ++j) {
      double dj = sq_dist(point, centroids.data() + static_cast<std::size_t>(j) * d, d);
      if (dj < best_d) {
        best_d = dj;
        best = j;
      }
    }
    labels[i] = best;
    dist2[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

// One draw from the D^2 distribution: index i with probability dist2[i]/total.
// Linear inverse-CDF scan; the last index is the fallback against float
// round-off at the tail.
std::uint64_t sample_from_dist2(const std::vector<double>& dist2, double total,
                                rng::Engine& g) {
  double r = rng::uniform01(g) * total;
  double running = 0.0;
  for (std::uint64_t i = 0; i + 1 < dist2.size(); ++i) {
    running += dist2[i];
    if (r < running) return i;
  }
  return dist2.size() - 1;
}

// Greedy k-means++: first centroid uniform; each next one is the best of
// 2 + floor(ln k) candidates drawn from the D^2 distribution, "best" meaning
// the one that minimizes the resulting potential. The extra candidates cost
// O(n d) each, which is negligible next to a Lloyd round, and they avoid most
// of the split/merge seedings that plain D^2 sampling falls into when the
// clusters overlap.
std::vector<double> kmeanspp_init(const EmbeddingMatrix& emb, std::uint32_t k,
                                  rng::Engine& g) {
  std::uint64_t n = emb.rows;
  std::uint32_t d = emb.cols;
  std::uint32_t candidates =
      2 + static_cast<std::uint32_t>(std::log(static_cast<double>(k)));
  std::vector<double> centroids(static_cast<std::size_t>(k) * d);
  auto place = [&](std::uint32_t slot, std::uint64_t point) {
    auto row = emb.row(point);
    std::copy(row.begin(), row.end(),
              centroids.begin() + static_cast<std::size_t>(slot) * d);
  };
  place(0, rng::uniform_below(g, n));

  std::vector<double> dist2(n);
  for (std::uint64_t i = 0; i < n; ++i)
    dist2[i] = sq_dist(emb.row(i).data(), centroids.data(), d);

  std::vector<double> trial_dist2(n);
  std::vector<double> best_dist2(n);
  for (std::uint32_t j = 1; j < k; ++j) {
    double total = std::accumulate(dist2.begin(), dist2.end(), 0.0);
    if (total <= 0.0) {
      // All points coincide with some centroid; any choice is equivalent.
      place(j, rng::uniform_below(g, n));
      continue;
    }
    std::uint64_t best_pick = 0;
    double best_potential = std::numeric_limits<double>::infinity();
    for (std::uint32_t c = 0; c < candidates; ++c) {
      std::uint64_t pick = sample_from_dist2(dist2, total, g);
      const double* cand = emb.row(pick).data();
      double potential = 0.0;
      for (std::uint64_t i = 0; i < n; ++i) {
        trial_dist2[i] = std::min(dist2[i], sq_dist(emb.row(i).data(), cand, d));
        potential += trial_dist2[i];
      }
      if (potential < best_potential) {
        best_potential = potential;
        best_pick = pick;
        best_dist2.swap(trial_dist2);
      }
    }
    place(j, best_pick);
    dist2.swap(best_dist2);
  }
  return centroids;
}

}  // namespace

KmeansResult kmeans(const EmbeddingMatrix& emb, std::uint32_t k,
                    std::uint64_t seed, std::uint32_t max_iters) {
  std::uint64_t n = emb.rows;
  std::uint32_t d = emb.cols;
  if (k == 0) throw ParameterError("kmeans: k must be at least 1");
  if (k > n)
    throw ParameterError("kmeans: k = " + std::to_string(k) + " exceeds " +
                         std::to_string(n) + " points");
  for (double v : emb.values)
    if (!std::isfinite(v))
      throw ParameterError("kmeans: embedding contains non-finite entries");

  rng::Engine g = rng::make_engine(derive_seed(seed, "kmeans.init"));
  std::vector<double> centroids = kmeanspp_init(emb, k, g);

  std::vector<std::uint32_t> labels(n);
  std::vector<double> dist2(n);
  double inertia = assign_points(emb, centroids, k, labels, dist2);

  KmeansResult result;
  result.k = k;
  result.inertia_trace.push_back(inertia);

  std::vector<double> sums(static_cast<std::size_t>(k) * d);
  std::vector<std::uint64_t> counts(k);
  std::vector<std::uint32_t> next_labels(n);
  std::vector<double> next_dist2(n);

  for (std::uint32_t iter = 0; iter < max_iters; ++iter) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint32_t c = labels[i];
      ++counts[c];
      const double* point = emb.row(i).data();
      double* sum = sums.data() + static_cast<std::size_t>(c) * d;
      for (std::uint32_t j = 0; j < d; ++j) sum[j] += point[j];
    }
    for (std::uint32_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // repaired below; keeps its old position
      double inv = 1.0 / static_cast<double>(counts[c]);
      double* centroid = centroids.data() + static_cast<std::size_t>(c) * d;
      const double* sum = sums.data() + static_cast<std::size_t>(c) * d;
      for (std::uint32_t j = 0; j < d; ++j) centroid[j] = sum[j] * inv;
    }
    // Empty-cluster repair: reseed at the point farthest from its assigned
    // centroid. Zeroing the claimed point's distance keeps a second empty
    // cluster from grabbing the same point.
    for (std::uint32_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::uint64_t farthest =
          std::max_element(dist2.begin(), dist2.end()) - dist2.begin();
      auto row = emb.row(farthest);
      std::copy(row.begin(), row.end(),
                centroids.begin() + static_cast<std::size_t>(c) * d);
      dist2[farthest] = 0.0;
    }

    double next_inertia = assign_points(emb, centroids, k, next_labels, next_dist2);
    ++result.iterations;
    if (next_inertia > result.inertia_trace.back() * (1.0 + 1e-12) + 1e-12)
      throw InternalError("kmeans: objective increased from " +
                          std::to_string(result.inertia_trace.back()) + " to " +
                          std::to_string(next_inertia));
    result.inertia_trace.push_back(next_inertia);

    bool stable = next_labels == labels;
    labels.swap(next_labels);
    dist2.swap(next_dist2);
    inertia = next_inertia;
    if (stable) break;
  }

  result.partition.labels = std::move(labels);
  result.centroids = std::move(centroids);
  result.inertia = inertia;
  return result;
}

KmeansResult kmeans_best_of(const EmbeddingMatrix& emb, std::uint32_t k,
                            std::uint64_t seed, std::uint32_t restarts,
                            std::uint32_t max_iters) {
  if (restarts == 0) throw ParameterError("kmeans_best_of: restarts must be at least 1");
  KmeansResult best;
  for (std::uint32_t r = 0; r < restarts; ++r) {
    KmeansResult cand =
        kmeans(emb, k, derive_seed(seed, "kmeans.restart", r), max_iters);
    if (r == 0 || cand.inertia < best.inertia) best = std::move(cand);
  }
  return best;
}

EighResult jacobi_eigh(std::vector<double> matrix, std::uint64_t n) {
  if (matrix.size() != n * n)
    throw ParameterError("jacobi_eigh: matrix size does not match n");
  double max_abs = 0.0;
  for (double v : matrix) max_abs = std::max(max_abs, std::fabs(v));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = i + 1; j < n; ++j)
      if (std::fabs(matrix[i * n + j] - matrix[j * n + i]) >
          1e-12 * std::max(1.0, max_abs))
        throw ParameterError("jacobi_eigh: matrix is not symmetric");

  EighResult out;
  out.n = n;
  std::vector<double> v(n * n, 0.0);
  for (std::uint64_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  if (n == 0) return out;

  double fro2 = 0.0;
  for (double x : matrix) fro2 += x * x;
  out.degenerate = fro2 == 0.0;
  double tol2 = fro2 * 1e-28;

  auto& a = matrix;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off2 = 0.0;
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = i + 1; j < n; ++j)
        off2 += 2.0 * a[i * n + j] * a[i * n + j];
    if (off2 <= tol2) break;

    for (std::uint64_t p = 0; p + 1 < n; ++p) {
      for (std::uint64_t q = p + 1; q < n; ++q) {
        double apq = a[p * n + q];
        if (apq == 0.0) continue;
        double app = a[p * n + p];
        double aqq = a[q * n + q];
        double g100 = 100.0 * std::fabs(apq);
        if (std::fabs(app) + g100 == std::fabs(app) &&
            std::fabs(aqq) + g100 == std::fabs(aqq)) {
          a[p * n + q] = a[q * n + p] = 0.0;
          continue;
        }
        double theta = (aqq - app) / (2.0 * apq);
        double t = theta >= 0.0
                       ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                       : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;

        for (std::uint64_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          double aip = a[i * n + p];
          double aiq = a[i * n + q];
          a[i * n + p] = a[p * n + i] = c * aip - s * aiq;
          a[i * n + q] = a[q * n + i] = s * aip + c * aiq;
        }
        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = a[q * n + p] = 0.0;

        for (std::uint64_t i = 0; i < n; ++i) {
          double vip = v[i * n + p];
          double viq = v[i * n + q];
          v[i * n + p] = c * vip - s * viq;
          v[i * n + q] = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::uint64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::uint64_t x, std::uint64_t y) {
    return a[x * n + x] > a[y * n + y];
  });

  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::uint64_t j = 0; j < n; ++j) {
    std::uint64_t col = order[j];
    out.values[j] = a[col * n + col];
    for (std::uint64_t i = 0; i < n; ++i) out.vectors[i * n + j] = v[i * n + col];
  }
  return out;
}

EmbeddingMatrix spectral_embed(const UpdateStream& edges, std::uint64_t n,
                               std::uint32_t k) {
  if (n > kSpectralGuardN)
    throw ParameterError("spectral_embed: n = " + std::to_string(n) +
                         " exceeds the dense-eigensolver cap " +
                         std::to_string(kSpectralGuardN));
  if (k == 0 || k > n)
    throw ParameterError("spectral_embed: k must lie in [1, n]");

  std::vector<double> a(n * n, 0.0);
  for (const EdgeUpdate& e : edges) {
    if (e.u == e.v)
      throw InputFormatError("spectral_embed: self-loop on vertex " +
                             std::to_string(e.u));
    if (e.u >= n || e.v >= n)
      throw InputFormatError("spectral_embed: edge (" + std::to_string(e.u) +
                             ", " + std::to_string(e.v) +
                             ") references a vertex >= " + std::to_string(n));
    double delta = static_cast<double>(e.delta);
    a[e.u * n + e.v] += delta;
    a[e.v * n + e.u] += delta;
  }

  EighResult eig = jacobi_eigh(std::move(a), n);
  EmbeddingMatrix out(n, k);
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < k; ++j) out.row(i)[j] = eig.vectors[i * n + j];
  return out;
}

}  // namespace skemb
