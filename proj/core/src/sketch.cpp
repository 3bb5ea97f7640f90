#include "skemb/sketch.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "skemb/error.hpp"
#include "skemb/rng.hpp"

namespace skemb {

std::string_view to_string(SketchKind kind) {
  return kind == SketchKind::cst ? "cst" : "fwht";
}

SketchKind sketch_kind_from_string(std::string_view name) {
  if (name == "cst") return SketchKind::cst;
  if (name == "fwht") return SketchKind::fwht;
  throw ParameterError("unknown sketch kind: " + std::string(name));
}

std::uint32_t dimension_for(double epsilon, std::uint64_t n, double c_const) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ParameterError("dimension_for: epsilon must lie in (0,1)");
  if (n < 2) throw ParameterError("dimension_for: n must be at least 2");
  if (!(c_const > 0.0)) throw ParameterError("dimension_for: c_const must be positive");
  double s = std::ceil(c_const / (epsilon * epsilon) *
                       std::log(static_cast<double>(n)));
  if (s < 1.0) return 1;
  return static_cast<std::uint32_t>(s);
}

CstOperator::CstOperator(std::uint64_t input_dim, std::uint32_t sketch_dim,
                         std::uint64_t seed)
    : p_(input_dim),
      s_(sketch_dim),
      seed_(seed),
      bucket_hash_(seed, "cst.bucket", sketch_dim),
      sign_hash_(seed, "cst.sign") {
  if (p_ == 0) throw ParameterError("CstOperator: input dimension must be positive");
  if (s_ == 0) throw ParameterError("CstOperator: sketch dimension must be positive");
}

void CstOperator::update(SketchRow& row, std::uint64_t j,
                         std::int64_t delta) const {
  if (j >= p_)
    throw std::out_of_range("CstOperator::update: coordinate " +
                            std::to_string(j) + " out of range");
  row.accum[bucket(j)] += delta * sign(j);
}

std::vector<double> CstOperator::export_row(const SketchRow& row) const {
  std::vector<double> out(row.accum.size());
  for (std::size_t t = 0; t < out.size(); ++t)
    out[t] = static_cast<double>(row.accum[t]);
  return out;
}

FwhtOperator::FwhtOperator(std::uint64_t input_dim, std::uint32_t sketch_dim,
                           std::uint64_t seed)
    : p_(input_dim),
      s_(sketch_dim),
      seed_(seed),
      sign_hash_(seed, "fwht.sign") {
  if (p_ == 0) throw ParameterError("FwhtOperator: input dimension must be positive");
  if (s_ == 0) throw ParameterError("FwhtOperator: sketch dimension must be positive");
  p_pad_ = std::bit_ceil(p_);
  log2p_ = static_cast<std::uint32_t>(std::countr_zero(p_pad_));
  cols_.resize(s_);
  rng::Engine g = rng::make_engine(derive_seed(seed, "fwht.cols"));
  for (auto& k : cols_) k = rng::uniform_below(g, p_pad_);
}

void FwhtOperator::update(SketchRow& row, std::uint64_t j,
                          std::int64_t delta) const {
  if (j >= p_pad_)
    throw std::out_of_range("FwhtOperator::update: coordinate " +
                            std::to_string(j) + " out of range");
  std::int64_t signed_delta = delta * diag_sign(j);
  for (std::uint32_t t = 0; t < s_; ++t) {
    // H(j,k) = (-1)^popcount(j AND k); branch-free sign application.
    std::int64_t neg = static_cast<std::int64_t>(std::popcount(j & cols_[t]) & 1);
    row.accum[t] += (signed_delta ^ -neg) + neg;
  }
}

std::vector<double> FwhtOperator::export_row(const SketchRow& row) const {
  double scale = 1.0 / std::sqrt(static_cast<double>(s_));
  std::vector<double> out(row.accum.size());
  for (std::size_t t = 0; t < out.size(); ++t)
    out[t] = static_cast<double>(row.accum[t]) * scale;
  return out;
}

SketchOperator make_operator(SketchKind kind, std::uint64_t input_dim,
                             std::uint32_t sketch_dim, std::uint64_t seed) {
  if (kind == SketchKind::cst)
    return CstOperator(input_dim, sketch_dim, seed);
  return FwhtOperator(input_dim, sketch_dim, seed);
}

SketchKind kind_of(const SketchOperator& op) {
  return std::holds_alternative<CstOperator>(op) ? SketchKind::cst
                                                 : SketchKind::fwht;
}

std::uint32_t sketch_dim(const SketchOperator& op) {
  return std::visit([](const auto& o) { return o.sketch_dim(); }, op);
}

std::uint64_t input_dim(const SketchOperator& op) {
  return std::visit([](const auto& o) { return o.input_dim(); }, op);
}

std::uint64_t seed_of(const SketchOperator& op) {
  return std::visit([](const auto& o) { return o.seed(); }, op);
}

std::uint64_t coordinate_limit(const SketchOperator& op) {
  if (const auto* fwht = std::get_if<FwhtOperator>(&op))
    return fwht->padded_dim();
  return std::get<CstOperator>(op).input_dim();
}

void update_row(const SketchOperator& op, SketchRow& row, std::uint64_t j,
                std::int64_t delta) {
  std::visit([&](const auto& o) { o.update(row, j, delta); }, op);
}

std::vector<double> export_row(const SketchOperator& op, const SketchRow& row) {
  return std::visit([&](const auto& o) { return o.export_row(row); }, op);
}

}  // namespace skemb
