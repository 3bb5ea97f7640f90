#include "skemb/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>

#include "skemb/cluster.hpp"
#include "skemb/error.hpp"
#include "skemb/hash.hpp"
#include "skemb/io.hpp"

namespace skemb {
namespace {

std::uint64_t choose2(std::uint64_t m) { return m * (m - 1) / 2; }

// Maximum-weight assignment of rows to columns (rows <= cols, one column per
// row) via shortest augmenting paths on the dual potentials, O(rows^2 cols).
std::int64_t assignment_max(const std::vector<std::int64_t>& w, std::size_t rows,
                            std::size_t cols) {
  const std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(rows + 1, 0), v(cols + 1, 0);
  std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
  for (std::size_t i = 1; i <= rows; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(cols + 1, kInf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      std::int64_t delta = kInf;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        std::int64_t cur = -w[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::int64_t total = 0;
  for (std::size_t j = 1; j <= cols; ++j)
    if (p[j] != 0) total += w[(p[j] - 1) * cols + (j - 1)];
  return total;
}

void check_lengths(const Partition& pred, const Partition& truth,
                   std::string_view who) {
  if (pred.size() != truth.size())
    throw InputFormatError(std::string(who) + ": partition lengths differ (" +
                           std::to_string(pred.size()) + " vs " +
                           std::to_string(truth.size()) + ")");
}

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& v) {
  std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::pair<double, double> pairwise_pr(const Partition& pred, const Partition& truth) {
  check_lengths(pred, truth, "pairwise_pr");
  std::uint64_t n = pred.size();
  if (n < 2) throw ParameterError("pairwise_pr: need at least two vertices");

  std::uint32_t k1 = pred.cluster_count();
  std::uint32_t k2 = truth.cluster_count();
  std::vector<std::uint64_t> a(k1, 0), b(k2, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    ++a[pred.labels[i]];
    ++b[truth.labels[i]];
  }

  std::uint64_t tp = 0;
  if (static_cast<std::uint64_t>(k1) * k2 <= (1ULL << 24)) {
    std::vector<std::uint64_t> cell(static_cast<std::size_t>(k1) * k2, 0);
    for (std::uint64_t i = 0; i < n; ++i)
      ++cell[static_cast<std::size_t>(pred.labels[i]) * k2 + truth.labels[i]];
    for (std::uint64_t count : cell) tp += choose2(count);
  } else {
    // Contingency table too large to materialize (both sides near-singleton):
    // count cell sizes as run lengths of the sorted label pairs instead.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cells(n);
    for (std::uint64_t i = 0; i < n; ++i)
      cells[i] = {pred.labels[i], truth.labels[i]};
    std::sort(cells.begin(), cells.end());
    std::uint64_t run = 1;
    for (std::uint64_t i = 1; i <= n; ++i) {
      if (i < n && cells[i] == cells[i - 1]) {
        ++run;
        continue;
      }
      tp += choose2(run);
      run = 1;
    }
  }

  std::uint64_t pred_pairs = 0, truth_pairs = 0;
  for (std::uint64_t count : a) pred_pairs += choose2(count);
  for (std::uint64_t count : b) truth_pairs += choose2(count);

  double pp = pred_pairs == 0
                  ? 1.0
                  : static_cast<double>(tp) / static_cast<double>(pred_pairs);
  double pr = truth_pairs == 0
                  ? 1.0
                  : static_cast<double>(tp) / static_cast<double>(truth_pairs);
  return {pp, pr};
}

double accuracy(const Partition& pred, const Partition& truth) {
  check_lengths(pred, truth, "accuracy");
  std::uint64_t n = pred.size();
  if (n == 0) throw ParameterError("accuracy: empty partitions");

  std::uint32_t k1 = pred.cluster_count();
  std::uint32_t k2 = truth.cluster_count();
  // assignment_max wants rows <= cols; the matching is symmetric, so feed it
  // the transposed table when prediction has more clusters.
  bool transpose = k1 > k2;
  std::size_t rows = transpose ? k2 : k1;
  std::size_t cols = transpose ? k1 : k2;
  std::vector<std::int64_t> table(rows * cols, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::size_t r = transpose ? truth.labels[i] : pred.labels[i];
    std::size_t c = transpose ? pred.labels[i] : truth.labels[i];
    ++table[r * cols + c];
  }
  std::int64_t matched = assignment_max(table, rows, cols);
  return static_cast<double>(matched) / static_cast<double>(n);
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw ParameterError("spearman_rho: series lengths differ");
  std::size_t n = x.size();
  if (n < 2) return 0.0;
  std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  double mean = 0.5 * static_cast<double>(n + 1);
  double cov = 0.0, var_x = 0.0, var_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = rx[i] - mean;
    double dy = ry[i] - mean;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  if (var_x == 0.0 || var_y == 0.0) return 0.0;
  return cov / std::sqrt(var_x * var_y);
}

MetricsReport evaluate(const Partition& pred, const Partition& truth) {
  auto [pp, pr] = pairwise_pr(pred, truth);
  MetricsReport report;
  report.pp = pp;
  report.pr = pr;
  report.acc = accuracy(pred, truth);
  report.trials = 1;
  report.pp_trials = {report.pp};
  report.pr_trials = {report.pr};
  report.acc_trials = {report.acc};
  return report;
}

TrialSeeds derive_trial_seeds(std::uint64_t master, std::uint64_t trial) {
  return {derive_seed(master, "trial.sbm", trial),
          derive_seed(master, "trial.operator", trial),
          derive_seed(master, "trial.cluster", trial)};
}

TrialResult run_pipeline_trial(const SbmSpec& spec, const PipelineConfig& config,
                               const TrialSeeds& seeds) {
  SbmSpec local = spec;
  local.seed = seeds.sbm_seed;
  SbmSample sample = sample_sbm(local);

  std::uint64_t n = local.vertex_count();
  std::uint32_t s = dimension_for(config.epsilon, n, config.c_const);
  SketchOperator op = make_operator(config.kind, n, s, seeds.operator_seed);
  EmbeddingMatrix emb =
      run_stream(sample.stream, op, n, config.workers, config.mode);

  KmeansResult km =
      kmeans_best_of(emb, local.communities, seeds.cluster_seed,
                     config.kmeans_restarts, config.kmeans_max_iters);

  auto [pp, pr] = pairwise_pr(km.partition, sample.truth);
  return {pp, pr, accuracy(km.partition, sample.truth)};
}

MetricsReport evaluate_pipeline(const SbmSpec& spec, const PipelineConfig& config,
                                std::uint64_t master_seed, std::uint32_t trials) {
  if (trials == 0) throw ParameterError("evaluate_pipeline: trials must be at least 1");
  MetricsReport report;
  report.trials = trials;
  for (std::uint32_t t = 0; t < trials; ++t) {
    TrialResult r = run_pipeline_trial(spec, config, derive_trial_seeds(master_seed, t));
    report.pp_trials.push_back(r.pp);
    report.pr_trials.push_back(r.pr);
    report.acc_trials.push_back(r.acc);
    report.pp += r.pp;
    report.pr += r.pr;
    report.acc += r.acc;
  }
  report.pp /= trials;
  report.pr /= trials;
  report.acc /= trials;
  return report;
}

std::vector<double> default_epsilon_grid() {
  constexpr int kPoints = 12;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i)
    grid[i] = 0.5 * std::pow(0.01 / 0.5, static_cast<double>(i) / (kPoints - 1));
  grid.front() = 0.5;
  grid.back() = 0.01;
  return grid;
}

std::vector<SweepResult> max_viable_epsilon_multi(
    const SbmSpec& spec, const PipelineConfig& base, std::vector<double> eps_grid,
    const std::vector<double>& thresholds, std::uint32_t trials,
    std::uint64_t seed) {
  if (eps_grid.empty()) throw ParameterError("max_viable_epsilon: empty epsilon grid");
  for (double e : eps_grid)
    if (!(e > 0.0 && e < 1.0))
      throw ParameterError("max_viable_epsilon: grid entries must lie in (0,1)");
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (!(eps_grid[i] < eps_grid[i - 1]))
      throw ParameterError("max_viable_epsilon: grid must be strictly descending");
  if (thresholds.empty())
    throw ParameterError("max_viable_epsilon: no thresholds given");
  if (trials == 0) throw ParameterError("max_viable_epsilon: trials must be at least 1");
  spec.validate();

  std::vector<SweepResult> results(thresholds.size());
  for (std::size_t ti = 0; ti < thresholds.size(); ++ti) {
    results[ti].eps_grid = eps_grid;
    results[ti].threshold = thresholds[ti];
  }

  std::vector<SweepPoint> examined;
  std::size_t unresolved = thresholds.size();
  for (std::size_t gi = 0; gi < eps_grid.size() && unresolved > 0; ++gi) {
    PipelineConfig config = base;
    config.epsilon = eps_grid[gi];
    std::uint64_t point_seed = derive_seed(seed, "sweep.point", gi);
    double sum_pp = 0.0, sum_pr = 0.0;
    for (std::uint32_t t = 0; t < trials; ++t) {
      TrialResult r =
          run_pipeline_trial(spec, config, derive_trial_seeds(point_seed, t));
      sum_pp += r.pp;
      sum_pr += r.pr;
    }
    SweepPoint point{eps_grid[gi], sum_pp / trials, sum_pr / trials};
    examined.push_back(point);

    double low = std::min(point.mean_pp, point.mean_pr);
    for (std::size_t ti = 0; ti < thresholds.size(); ++ti) {
      if (results[ti].max_viable_eps) continue;
      if (low >= thresholds[ti]) {
        results[ti].max_viable_eps = eps_grid[gi];
        --unresolved;
      }
    }
  }
  for (auto& result : results) result.examined = examined;
  return results;
}

SweepResult max_viable_epsilon(const SbmSpec& spec, const PipelineConfig& base,
                               std::vector<double> eps_grid, double threshold,
                               std::uint32_t trials, std::uint64_t seed) {
  return max_viable_epsilon_multi(spec, base, std::move(eps_grid), {threshold},
                                  trials, seed)[0];
}

TrendConfig TrendConfig::desk_scale() { return {}; }

TrendConfig TrendConfig::paper_scale() {
  TrendConfig config;
  config.base_n = 4096;
  config.base_c = 16;
  config.community_grid = {2, 4, 8, 16, 32};
  config.vertex_grid = {512, 1024, 2048, 4096, 8096};
  return config;
}

namespace {

void append_sweep_rows(std::vector<TrendRow>& rows, const SbmSpec& spec,
                       double swept_value, const TrendConfig& config,
                       std::string_view role, std::uint64_t point_index) {
  constexpr std::array<SketchKind, 2> kKinds = {SketchKind::cst,
                                                SketchKind::fwht};
  for (std::size_t ki = 0; ki < kKinds.size(); ++ki) {
    PipelineConfig pipeline = config.pipeline;
    pipeline.kind = kKinds[ki];
    std::uint64_t seed = derive_seed(config.seed, role, point_index * 2 + ki);
    std::vector<SweepResult> sweeps =
        max_viable_epsilon_multi(spec, pipeline, config.eps_grid,
                                 config.thresholds, config.trials, seed);
    for (const SweepResult& sweep : sweeps)
      rows.push_back({swept_value, kKinds[ki], sweep.threshold,
                      sweep.max_viable_eps});
  }
}

}  // namespace

TrendTables trend_experiments(const TrendConfig& config) {
  TrendConfig cfg = config;
  if (cfg.eps_grid.empty()) cfg.eps_grid = default_epsilon_grid();

  TrendTables tables;
  for (std::size_t i = 0; i < cfg.ratio_grid.size(); ++i) {
    SbmSpec spec =
        flat_sbm_spec(cfg.base_n, cfg.base_c, cfg.ratio_grid[i], cfg.row_sum, 0);
    append_sweep_rows(tables.ratio_sweep, spec, cfg.ratio_grid[i], cfg,
                      "trend.ratio", i);
  }
  for (std::size_t i = 0; i < cfg.community_grid.size(); ++i) {
    SbmSpec spec = flat_sbm_spec(cfg.base_n, cfg.community_grid[i],
                                 cfg.base_ratio, cfg.row_sum, 0);
    append_sweep_rows(tables.community_sweep, spec,
                      static_cast<double>(cfg.community_grid[i]), cfg,
                      "trend.communities", i);
  }
  for (std::size_t i = 0; i < cfg.vertex_grid.size(); ++i) {
    SbmSpec spec = flat_sbm_spec(cfg.vertex_grid[i], cfg.base_c, cfg.base_ratio,
                                 cfg.row_sum, 0);
    append_sweep_rows(tables.vertex_sweep, spec,
                      static_cast<double>(cfg.vertex_grid[i]), cfg,
                      "trend.vertices", i);
  }
  return tables;
}

std::string trend_csv(const std::vector<TrendRow>& rows,
                      std::string_view swept_name) {
  std::string out;
  out += std::string(swept_name) + ",operator,threshold,max_viable_eps\n";
  for (const TrendRow& row : rows) {
    out += format_double(row.swept_value);
    out += ',';
    out += to_string(row.kind);
    out += ',';
    out += format_double(row.threshold);
    out += ',';
    out += row.max_viable_eps ? format_double(*row.max_viable_eps) : "none";
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "epsilon,mean_pp,mean_pr\n";
  for (const SweepPoint& point : result.examined) {
    out += format_double(point.epsilon);
    out += ',';
    out += format_double(point.mean_pp);
    out += ',';
    out += format_double(point.mean_pr);
    out += '\n';
  }
  return out;
}

}  // namespace skemb
