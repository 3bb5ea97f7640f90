#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "skemb/rng.hpp"
#include "skemb/types.hpp"

namespace skemb {

// Stochastic block model parameter set: `communities` blocks with the given
// sizes and a symmetric edge-probability matrix (row-major, communities^2
// entries). Fully describes a generator distribution together with the seed.
struct SbmSpec {
  std::uint32_t communities = 0;
  std::vector<std::uint64_t> sizes;
  std::vector<double> prob;
  std::uint64_t seed = 0;

  std::uint64_t vertex_count() const;
  double prob_at(std::uint32_t i, std::uint32_t j) const {
    return prob[static_cast<std::size_t>(i) * communities + j];
  }

  // Throws ParameterError on any violated invariant (asymmetry, entries
  // outside [0,1], size/shape mismatches, zero-sized blocks).
  void validate() const;
};

// c x c matrix with rho_in on the diagonal and rho_out elsewhere, where
// rho_in = ratio * rho_out and every row sums to row_sum.
std::vector<double> flat_prob_matrix(std::uint32_t communities, double ratio,
                                     double row_sum);

// Block sizes as equal as possible: n/c each, remainder spread over the
// leading blocks.
std::vector<std::uint64_t> equal_sizes(std::uint64_t n, std::uint32_t communities);

// Flat-matrix spec with equal-size blocks.
SbmSpec flat_sbm_spec(std::uint64_t n, std::uint32_t communities, double ratio,
                      double row_sum, std::uint64_t seed);

// Flat-matrix spec from explicit densities.
SbmSpec sbm_spec_from_densities(std::uint64_t n, std::uint32_t communities,
                                double rho_in, double rho_out,
                                std::uint64_t seed);

// Parameters following power-law fits of the GraphChallenge 2017 corpus:
//   c        = round(0.95 * n^0.36), at least 1
//   mean(C)  = 0.95 * n^0.64,  var(C) = 0.32 * n^0.64
//   rho_in   = 16.75 * n^-0.59, rho_out = 1.02 * n^-0.59
// Community sizes are drawn normally with that mean/variance, rounded,
// truncated at 1 and adjusted by +-1 steps until they sum to n. Densities are
// clamped into (0, 1). Requires n >= 16.
SbmSpec graphchallenge_spec(std::uint64_t n, std::uint64_t seed);

struct SbmSample {
  UpdateStream stream;  // insert-only, order is a seeded permutation
  Partition truth;
};

// Sample every unordered vertex pair independently with its block-pair
// probability. Deterministic given spec.seed: each block pair draws from its
// own derived seed (so per-block sampling could run in parallel without
// changing the result) and the final stream order comes from one more derived
// seed. Never emits self-loops or duplicate edges.
SbmSample sample_sbm(const SbmSpec& spec);

// Expected edge count and its variance under the spec (sum of independent
// Bernoullis over all vertex pairs).
std::pair<double, double> expected_edge_stats(const SbmSpec& spec);

namespace detail {

// Emit the indices in [0, count) that pass an independent Bernoulli(p) test,
// by testing every index in order.
void sample_pairs_bernoulli(rng::Engine& g, std::uint64_t count, double p,
                            std::vector<std::uint64_t>& out);

// Same distribution via geometric skips between successes; O(hits) draws.
void sample_pairs_skip(rng::Engine& g, std::uint64_t count, double p,
                       std::vector<std::uint64_t>& out);

// Inverse of the row-major upper-triangle linearization over {0..z-1}:
// t -> (a, b), a < b < z.
std::pair<std::uint64_t, std::uint64_t> triangle_pair(std::uint64_t z,
                                                      std::uint64_t t);

}  // namespace detail
}  // namespace skemb
