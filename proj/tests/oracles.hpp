#pragma once

// Independent reference implementations that the tests check the library
// against. Everything here favors obviousness over speed: dense sketch
// matrices built entry by entry, full pair enumeration, factorial search
// over label assignments. Values produced by these oracles are the ground
// truth for the fast implementations; the oracles themselves only depend
// on the operators' published hash accessors and on first principles.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "skemb/sketch.hpp"
#include "skemb/types.hpp"

namespace oracle {

// Dense CountSketch matrix R, laid out row-major p x s:
// R[j][bucket(j)] = sign(j), every other entry zero.
inline std::vector<std::int64_t> dense_cst_matrix(const skemb::CstOperator& op) {
  std::vector<std::int64_t> r(op.input_dim() * op.sketch_dim(), 0);
  for (std::uint64_t j = 0; j < op.input_dim(); ++j)
    r[j * op.sketch_dim() + op.bucket(j)] = op.sign(j);
  return r;
}

// Dense subsampled-Hadamard matrix D*H*S, laid out row-major p_pad x s:
// M[j][t] = d(j) * H(j, k_t) with H the Sylvester Hadamard matrix.
inline std::vector<std::int64_t> dense_fwht_matrix(
    const skemb::FwhtOperator& op) {
  std::vector<std::int64_t> m(op.padded_dim() * op.sketch_dim(), 0);
  for (std::uint64_t j = 0; j < op.padded_dim(); ++j)
    for (std::uint32_t t = 0; t < op.sketch_dim(); ++t)
      m[j * op.sketch_dim() + t] =
          static_cast<std::int64_t>(op.diag_sign(j)) *
          skemb::FwhtOperator::hadamard_sign(j, op.column(t));
  return m;
}

// Integer row vector x (length = number of matrix rows) times a dense
// row-major matrix with s columns.
inline std::vector<std::int64_t> dense_multiply(
    const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& m,
    std::uint32_t s) {
  std::vector<std::int64_t> out(s, 0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == 0) continue;
    for (std::uint32_t t = 0; t < s; ++t)
      out[t] += x[j] * m[j * s + t];
  }
  return out;
}

// Pair-counting precision/recall by explicit enumeration of all vertex
// pairs. Empty denominators score 1.0, matching the library convention.
inline std::pair<double, double> pairwise_pr_bruteforce(
    const skemb::Partition& pred, const skemb::Partition& truth) {
  const std::uint64_t n = pred.size();
  std::uint64_t tp = 0, pred_pairs = 0, truth_pairs = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = i + 1; j < n; ++j) {
      const bool same_pred = pred.labels[i] == pred.labels[j];
      const bool same_truth = truth.labels[i] == truth.labels[j];
      pred_pairs += same_pred;
      truth_pairs += same_truth;
      tp += same_pred && same_truth;
    }
  }
  const double pp =
      pred_pairs ? static_cast<double>(tp) / static_cast<double>(pred_pairs)
                 : 1.0;
  const double pr =
      truth_pairs ? static_cast<double>(tp) / static_cast<double>(truth_pairs)
                  : 1.0;
  return {pp, pr};
}

// Best-assignment accuracy by trying every permutation of the larger label
// set. Only usable for a handful of clusters (k! blowup).
inline double accuracy_bruteforce(const skemb::Partition& pred,
                                  const skemb::Partition& truth) {
  const std::uint64_t n = pred.size();
  std::uint32_t k1 = 0, k2 = 0;
  for (std::uint32_t l : pred.labels) k1 = std::max(k1, l + 1);
  for (std::uint32_t l : truth.labels) k2 = std::max(k2, l + 1);
  std::vector<std::uint64_t> table(static_cast<std::size_t>(k1) * k2, 0);
  for (std::uint64_t i = 0; i < n; ++i)
    ++table[static_cast<std::size_t>(pred.labels[i]) * k2 + truth.labels[i]];

  const std::uint32_t k = std::max(k1, k2);
  std::vector<std::uint32_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0u);
  std::uint64_t best = 0;
  do {
    std::uint64_t matched = 0;
    for (std::uint32_t i = 0; i < k1; ++i)
      if (perm[i] < k2) matched += table[static_cast<std::size_t>(i) * k2 + perm[i]];
    best = std::max(best, matched);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(n);
}

// All set partitions of {0..n-1} as canonical label vectors (restricted
// growth strings): labels[0] = 0 and labels[i] <= 1 + max(labels[0..i-1]).
inline std::vector<std::vector<std::uint32_t>> all_partitions(std::uint32_t n) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> rgs(n, 0);
  auto rec = [&](auto&& self, std::uint32_t pos, std::uint32_t used) -> void {
    if (pos == n) {
      out.push_back(rgs);
      return;
    }
    for (std::uint32_t v = 0; v <= used; ++v) {
      rgs[pos] = v;
      self(self, pos + 1, std::max(used, v + 1));
    }
  };
  if (n == 0) return out;
  rec(rec, 1, 1);
  return out;
}

}  // namespace oracle
