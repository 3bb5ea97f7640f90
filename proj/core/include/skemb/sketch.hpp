#pragma once

#include <bit>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "skemb/hash.hpp"
#include "skemb/types.hpp"

namespace skemb {

enum class SketchKind { cst, fwht };

std::string_view to_string(SketchKind kind);
SketchKind sketch_kind_from_string(std::string_view name);

// Sketch dimension s = ceil(c_const * eps^-2 * ln n), at least 1.
// Throws ParameterError unless 0 < epsilon < 1 and n >= 2.
std::uint32_t dimension_for(double epsilon, std::uint64_t n,
                            double c_const = 1.0);

// Exact integer accumulator for one vertex's sketch vector. Every update
// contributes delta * (+-1) per entry, so the state is order-independent:
// equal update multisets give bit-identical accumulators. Scaling to reals
// happens only at export time.
struct SketchRow {
  std::uint64_t owner = 0;
  std::vector<std::int64_t> accum;

  SketchRow() = default;
  SketchRow(std::uint64_t owner_vertex, std::uint32_t dim)
      : owner(owner_vertex), accum(dim, 0) {}

  friend bool operator==(const SketchRow&, const SketchRow&) = default;
};

// CountSketch transform: the sketch matrix R has exactly one nonzero per
// input coordinate, R[j, bucket(j)] = sign(j), with bucket and sign drawn
// from independent 2-universal hash instances keyed by (seed, role). A
// single-coordinate update touches one accumulator entry: O(1) per update,
// and a row with z nonzero coordinates sketches to at most z nonzero
// entries. Export is unit-scale.
class CstOperator {
 public:
  CstOperator(std::uint64_t input_dim, std::uint32_t sketch_dim,
              std::uint64_t seed);

  std::uint64_t input_dim() const { return p_; }
  std::uint32_t sketch_dim() const { return s_; }
  std::uint64_t seed() const { return seed_; }

  std::uint32_t bucket(std::uint64_t j) const {
    return static_cast<std::uint32_t>(bucket_hash_(j));
  }
  int sign(std::uint64_t j) const { return sign_hash_(j); }

  // accum[bucket(j)] += delta * sign(j). Throws std::out_of_range unless
  // j < input_dim().
  void update(SketchRow& row, std::uint64_t j, std::int64_t delta) const;

  std::vector<double> export_row(const SketchRow& row) const;

 private:
  std::uint64_t p_ = 0;
  std::uint32_t s_ = 0;
  std::uint64_t seed_ = 0;
  UniversalHash bucket_hash_;
  SignHash sign_hash_;
};

// Subsampled-Hadamard fast JLT. Conceptually sketches x as x * D * H * S:
// D is a random +-1 diagonal, H the (unnormalized, Sylvester) Hadamard
// matrix of size p_pad = next power of two >= input_dim, and S picks s
// columns k_1..k_s uniformly with replacement. None of the matrices are
// materialized: H(j,k) = (-1)^popcount(j AND k), so one coordinate update
// costs O(s) sign flips. Export scales by 1/sqrt(s), which makes the
// expected squared norm of a sketched vector equal its input squared norm.
class FwhtOperator {
 public:
  FwhtOperator(std::uint64_t input_dim, std::uint32_t sketch_dim,
               std::uint64_t seed);

  std::uint64_t input_dim() const { return p_; }
  std::uint64_t padded_dim() const { return p_pad_; }
  std::uint32_t log2_padded_dim() const { return log2p_; }
  std::uint32_t sketch_dim() const { return s_; }
  std::uint64_t seed() const { return seed_; }

  // Diagonal sign for input coordinate j (the column index of x * D).
  int diag_sign(std::uint64_t j) const { return sign_hash_(j); }
  // Sampled Hadamard column index k_t.
  std::uint64_t column(std::uint32_t t) const { return cols_[t]; }

  static int hadamard_sign(std::uint64_t j, std::uint64_t k) {
    return (std::popcount(j & k) & 1) ? -1 : +1;
  }

  // accum[t] += delta * diag_sign(j) * H(j, k_t) for every t. Throws
  // std::out_of_range unless j < padded_dim(); coordinates in
  // [input_dim, padded_dim) are legal and correspond to zero padding.
  void update(SketchRow& row, std::uint64_t j, std::int64_t delta) const;

  std::vector<double> export_row(const SketchRow& row) const;

 private:
  std::uint64_t p_ = 0;
  std::uint64_t p_pad_ = 0;
  std::uint32_t log2p_ = 0;
  std::uint32_t s_ = 0;
  std::uint64_t seed_ = 0;
  SignHash sign_hash_;
  std::vector<std::uint64_t> cols_;
};

using SketchOperator = std::variant<CstOperator, FwhtOperator>;

SketchOperator make_operator(SketchKind kind, std::uint64_t input_dim,
                             std::uint32_t sketch_dim, std::uint64_t seed);

SketchKind kind_of(const SketchOperator& op);
std::uint32_t sketch_dim(const SketchOperator& op);
std::uint64_t input_dim(const SketchOperator& op);
std::uint64_t seed_of(const SketchOperator& op);
// One past the largest coordinate an update may touch: input_dim for CST,
// padded_dim for FWHT.
std::uint64_t coordinate_limit(const SketchOperator& op);

void update_row(const SketchOperator& op, SketchRow& row, std::uint64_t j,
                std::int64_t delta);
std::vector<double> export_row(const SketchOperator& op, const SketchRow& row);

}  // namespace skemb
