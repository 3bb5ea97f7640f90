#include "skemb/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "skemb/error.hpp"
#include "skemb/hash.hpp"

namespace skemb {

std::uint64_t SbmSpec::vertex_count() const {
  return std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
}

void SbmSpec::validate() const {
  if (communities == 0) throw ParameterError("SbmSpec: community count must be positive");
  if (sizes.size() != communities)
    throw ParameterError("SbmSpec: sizes length must equal community count");
  for (auto z : sizes)
    if (z == 0) throw ParameterError("SbmSpec: community sizes must be positive");
  if (prob.size() != static_cast<std::size_t>(communities) * communities)
    throw ParameterError("SbmSpec: probability matrix must be c x c");
  for (std::uint32_t i = 0; i < communities; ++i) {
    for (std::uint32_t j = 0; j < communities; ++j) {
      double p = prob_at(i, j);
      if (!(p >= 0.0 && p <= 1.0))
        throw ParameterError("SbmSpec: probability entries must lie in [0,1]");
      if (prob_at(i, j) != prob_at(j, i))
        throw ParameterError("SbmSpec: probability matrix must be symmetric");
    }
  }
}

std::vector<double> flat_prob_matrix(std::uint32_t communities, double ratio,
                                     double row_sum) {
  if (communities == 0) throw ParameterError("flat_prob_matrix: community count must be positive");
  if (!(ratio > 0.0)) throw ParameterError("flat_prob_matrix: ratio must be positive");
  if (!(row_sum > 0.0 && row_sum <= 1.0))
    throw ParameterError("flat_prob_matrix: row_sum must lie in (0,1]");

  // rho_in = ratio * rho_out and rho_in + (c-1) * rho_out = row_sum.
  double rho_out = row_sum / (ratio + static_cast<double>(communities) - 1.0);
  double rho_in = ratio * rho_out;
  if (communities == 1) rho_in = row_sum;
  if (!(rho_in >= 0.0 && rho_in <= 1.0 && rho_out >= 0.0 && rho_out <= 1.0))
    throw ParameterError("flat_prob_matrix: entries fall outside [0,1]");

  std::vector<double> prob(static_cast<std::size_t>(communities) * communities,
                           rho_out);
  for (std::uint32_t i = 0; i < communities; ++i)
    prob[static_cast<std::size_t>(i) * communities + i] = rho_in;
  return prob;
}

std::vector<std::uint64_t> equal_sizes(std::uint64_t n, std::uint32_t communities) {
  if (communities == 0) throw ParameterError("equal_sizes: community count must be positive");
  if (n < communities) throw ParameterError("equal_sizes: need at least one vertex per community");
  std::vector<std::uint64_t> sizes(communities, n / communities);
  for (std::uint64_t i = 0; i < n % communities; ++i) ++sizes[i];
  return sizes;
}

SbmSpec flat_sbm_spec(std::uint64_t n, std::uint32_t communities, double ratio,
                      double row_sum, std::uint64_t seed) {
  SbmSpec spec;
  spec.communities = communities;
  spec.sizes = equal_sizes(n, communities);
  spec.prob = flat_prob_matrix(communities, ratio, row_sum);
  spec.seed = seed;
  spec.validate();
  return spec;
}

SbmSpec sbm_spec_from_densities(std::uint64_t n, std::uint32_t communities,
                                double rho_in, double rho_out,
                                std::uint64_t seed) {
  SbmSpec spec;
  spec.communities = communities;
  spec.sizes = equal_sizes(n, communities);
  spec.prob.assign(static_cast<std::size_t>(communities) * communities, rho_out);
  for (std::uint32_t i = 0; i < communities; ++i)
    spec.prob[static_cast<std::size_t>(i) * communities + i] = rho_in;
  spec.seed = seed;
  spec.validate();
  return spec;
}

namespace {

double clamp_unit_open(double v) {
  return std::clamp(v, 1e-12, 1.0 - 1e-12);
}

}  // namespace

SbmSpec graphchallenge_spec(std::uint64_t n, std::uint64_t seed) {
  if (n < 16) throw ParameterError("graphchallenge_spec: n must be at least 16");

  double nd = static_cast<double>(n);
  auto c64 = static_cast<std::uint64_t>(
      std::max<long long>(1, std::llround(0.95 * std::pow(nd, 0.36))));
  if (c64 > n) c64 = n;
  auto c = static_cast<std::uint32_t>(c64);

  double mean = 0.95 * std::pow(nd, 0.64);
  double stddev = std::sqrt(0.32 * std::pow(nd, 0.64));

  rng::Engine g = rng::make_engine(derive_seed(seed, "sbm.gc.sizes"));
  std::vector<std::uint64_t> sizes(c);
  for (auto& z : sizes) {
    double draw = std::round(rng::normal(g, mean, stddev));
    z = draw < 1.0 ? 1 : static_cast<std::uint64_t>(draw);
  }

  // +-1 adjustments, cycled over blocks, until the sizes sum to n.
  std::uint64_t total = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
  std::size_t cursor = 0;
  while (total != n) {
    std::size_t i = cursor++ % sizes.size();
    if (total < n) {
      ++sizes[i];
      ++total;
    } else if (sizes[i] > 1) {
      --sizes[i];
      --total;
    }
  }

  double rho_in = clamp_unit_open(16.75 * std::pow(nd, -0.59));
  double rho_out = clamp_unit_open(1.02 * std::pow(nd, -0.59));

  SbmSpec spec;
  spec.communities = c;
  spec.sizes = std::move(sizes);
  spec.prob.assign(static_cast<std::size_t>(c) * c, rho_out);
  for (std::uint32_t i = 0; i < c; ++i)
    spec.prob[static_cast<std::size_t>(i) * c + i] = rho_in;
  spec.seed = seed;
  spec.validate();
  return spec;
}

namespace detail {

void sample_pairs_bernoulli(rng::Engine& g, std::uint64_t count, double p,
                            std::vector<std::uint64_t>& out) {
  for (std::uint64_t t = 0; t < count; ++t)
    if (rng::bernoulli(g, p)) out.push_back(t);
}

void sample_pairs_skip(rng::Engine& g, std::uint64_t count, double p,
                       std::vector<std::uint64_t>& out) {
  if (p <= 0.0) return;
  std::uint64_t pos = 0;
  for (;;) {
    std::uint64_t skip = rng::geometric_skip(g, p);
    if (skip >= count - pos) return;
    pos += skip;
    out.push_back(pos);
    if (++pos >= count) return;
  }
}

std::pair<std::uint64_t, std::uint64_t> triangle_pair(std::uint64_t z,
                                                      std::uint64_t t) {
  // offset(a) = a*(2z-a-1)/2 indexes the first pair whose low vertex is a.
  auto offset = [z](std::uint64_t a) {
    return a * (2 * z - a - 1) / 2;
  };
  double zd = static_cast<double>(z);
  double disc = (2.0 * zd - 1.0) * (2.0 * zd - 1.0) - 8.0 * static_cast<double>(t);
  double est = ((2.0 * zd - 1.0) - std::sqrt(std::max(disc, 0.0))) / 2.0;
  auto a = static_cast<std::uint64_t>(std::max(0.0, std::floor(est)));
  if (a >= z - 1) a = z - 2;
  while (a + 1 < z - 1 && offset(a + 1) <= t) ++a;
  while (a > 0 && offset(a) > t) --a;
  std::uint64_t b = a + 1 + (t - offset(a));
  return {a, b};
}

}  // namespace detail

std::pair<double, double> expected_edge_stats(const SbmSpec& spec) {
  double mean = 0.0, var = 0.0;
  for (std::uint32_t i = 0; i < spec.communities; ++i) {
    for (std::uint32_t j = i; j < spec.communities; ++j) {
      double p = spec.prob_at(i, j);
      double pairs =
          (i == j) ? static_cast<double>(spec.sizes[i]) *
                         static_cast<double>(spec.sizes[i] - 1) / 2.0
                   : static_cast<double>(spec.sizes[i]) *
                         static_cast<double>(spec.sizes[j]);
      mean += pairs * p;
      var += pairs * p * (1.0 - p);
    }
  }
  return {mean, var};
}

SbmSample sample_sbm(const SbmSpec& spec) {
  spec.validate();
  const std::uint32_t c = spec.communities;

  std::vector<std::uint64_t> block_start(c + 1, 0);
  for (std::uint32_t i = 0; i < c; ++i)
    block_start[i + 1] = block_start[i] + spec.sizes[i];
  const std::uint64_t n = block_start[c];

  SbmSample sample;
  sample.truth.labels.resize(n);
  for (std::uint32_t i = 0; i < c; ++i)
    std::fill(sample.truth.labels.begin() + block_start[i],
              sample.truth.labels.begin() + block_start[i + 1], i);

  // Geometric skipping pays off for sparse block pairs; the dense per-pair
  // loop is cheaper when most pairs hit. Both draw the same distribution.
  constexpr double kSkipThreshold = 0.25;

  std::vector<std::uint64_t> hits;
  for (std::uint32_t i = 0; i < c; ++i) {
    for (std::uint32_t j = i; j < c; ++j) {
      double p = spec.prob_at(i, j);
      if (p <= 0.0) continue;
      std::uint64_t count =
          (i == j) ? spec.sizes[i] * (spec.sizes[i] - 1) / 2
                   : spec.sizes[i] * spec.sizes[j];
      if (count == 0) continue;

      rng::Engine g = rng::make_engine(derive_seed(
          spec.seed, "sbm.block", static_cast<std::uint64_t>(i) * c + j));
      hits.clear();
      if (p < kSkipThreshold)
        detail::sample_pairs_skip(g, count, p, hits);
      else
        detail::sample_pairs_bernoulli(g, count, p, hits);

      for (std::uint64_t t : hits) {
        std::uint64_t u, v;
        if (i == j) {
          auto [a, b] = detail::triangle_pair(spec.sizes[i], t);
          u = block_start[i] + a;
          v = block_start[i] + b;
        } else {
          u = block_start[i] + t / spec.sizes[j];
          v = block_start[j] + t % spec.sizes[j];
        }
        sample.stream.push_back({u, v, +1});
      }
    }
  }

  rng::Engine g = rng::make_engine(derive_seed(spec.seed, "sbm.shuffle"));
  rng::shuffle(g, sample.stream);
  return sample;
}

}  // namespace skemb
