#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "skemb/sbm.hpp"
#include "skemb/sketch.hpp"
#include "skemb/stream.hpp"
#include "skemb/types.hpp"

namespace skemb {

// Pair-counting precision/recall over unordered vertex pairs:
//   pp = |co-clustered in both| / |co-clustered in pred|
//   pr = |co-clustered in both| / |co-clustered in truth|
// computed from the contingency table, never by pair enumeration. A side with
// no co-clustered pairs contributes a vacuous claim and scores 1.0.
std::pair<double, double> pairwise_pr(const Partition& pred, const Partition& truth);

// Largest fraction of vertices with matching labels over all injective maps
// from predicted labels to truth labels (optimal assignment on the
// contingency table); excess predicted clusters map to nothing.
double accuracy(const Partition& pred, const Partition& truth);

// Spearman rank correlation of y against x, with average ranks for ties.
// Returns 0 when either side is constant.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

struct MetricsReport {
  double pp = 0.0;
  double pr = 0.0;
  double acc = 0.0;
  std::uint32_t trials = 0;
  std::vector<double> pp_trials;
  std::vector<double> pr_trials;
  std::vector<double> acc_trials;
};

// Single-pair report (trials = 1).
MetricsReport evaluate(const Partition& pred, const Partition& truth);

// Everything about a sketch-embed-cluster run except the seeds and the graph.
struct PipelineConfig {
  SketchKind kind = SketchKind::cst;
  double epsilon = 0.1;
  double c_const = 1.0;
  std::uint32_t workers = 1;
  ExecutionMode mode = ExecutionMode::serial;
  std::uint32_t kmeans_restarts = 4;
  std::uint32_t kmeans_max_iters = 100;
};

// Independent sub-seeds for the three random stages of one trial. Deriving
// them all from (master, trial) lets a CLI pipeline built from separate
// processes reproduce library trials bit-for-bit.
struct TrialSeeds {
  std::uint64_t sbm_seed = 0;
  std::uint64_t operator_seed = 0;
  std::uint64_t cluster_seed = 0;
};

TrialSeeds derive_trial_seeds(std::uint64_t master, std::uint64_t trial);

struct TrialResult {
  double pp = 0.0;
  double pr = 0.0;
  double acc = 0.0;
};

// One end-to-end run: sample the SBM (spec.seed replaced by seeds.sbm_seed),
// stream it through a fresh operator, k-means at k = spec.communities, score
// against the planted truth.
TrialResult run_pipeline_trial(const SbmSpec& spec, const PipelineConfig& config,
                               const TrialSeeds& seeds);

// Mean metrics over `trials` independent trials seeded from `master_seed`.
MetricsReport evaluate_pipeline(const SbmSpec& spec, const PipelineConfig& config,
                                std::uint64_t master_seed, std::uint32_t trials);

// Geometric grid of 12 epsilon values from 0.5 down to 0.01, descending.
std::vector<double> default_epsilon_grid();

struct SweepPoint {
  double epsilon = 0.0;
  double mean_pp = 0.0;
  double mean_pr = 0.0;
};

struct SweepResult {
  std::vector<double> eps_grid;  // descending
  double threshold = 0.0;
  std::optional<double> max_viable_eps;
  std::vector<SweepPoint> examined;  // scan order, largest epsilon first
};

// Scan the grid from the largest epsilon down; at each point run `trials`
// independent pipelines and take mean pp / mean pr. The answer for a
// threshold is the first (largest) epsilon whose min(mean pp, mean pr)
// reaches it; scanning stops once every threshold is resolved or the grid is
// exhausted. Per-point trial seeds depend only on (seed, grid index), so the
// multi-threshold scan returns exactly what independent scans would.
std::vector<SweepResult> max_viable_epsilon_multi(
    const SbmSpec& spec, const PipelineConfig& base, std::vector<double> eps_grid,
    const std::vector<double>& thresholds, std::uint32_t trials,
    std::uint64_t seed);

SweepResult max_viable_epsilon(const SbmSpec& spec, const PipelineConfig& base,
                               std::vector<double> eps_grid, double threshold,
                               std::uint32_t trials, std::uint64_t seed);

struct TrendConfig {
  std::uint64_t base_n = 1024;
  std::uint32_t base_c = 8;
  double base_ratio = 50.0;
  double row_sum = 0.5;
  std::vector<double> ratio_grid = {10.0, 50.0, 250.0, 1000.0};
  std::vector<std::uint32_t> community_grid = {2, 4, 8, 16};
  std::vector<std::uint64_t> vertex_grid = {512, 1024, 2048, 4096};
  std::vector<double> thresholds = {0.90, 0.95, 0.99};
  std::vector<double> eps_grid;  // empty -> default_epsilon_grid()
  std::uint32_t trials = 10;
  std::uint64_t seed = 1;
  PipelineConfig pipeline;  // kind is overridden: every sweep runs cst and fwht

  // Small grids sized for a single desk machine.
  static TrendConfig desk_scale();
  // The original experiment scale: base n=4096, c=16, community grid up to
  // 32, vertex grid up to 8096. Hours of compute; opt-in.
  static TrendConfig paper_scale();
};

struct TrendRow {
  double swept_value = 0.0;
  SketchKind kind = SketchKind::cst;
  double threshold = 0.0;
  std::optional<double> max_viable_eps;
};

struct TrendTables {
  std::vector<TrendRow> ratio_sweep;      // swept_value = rho_in / rho_out
  std::vector<TrendRow> community_sweep;  // swept_value = c
  std::vector<TrendRow> vertex_sweep;     // swept_value = n
};

// The three trend experiments: sweep ratio at (base_n, base_c), sweep c at
// base_n, sweep n at base_c; each point reports max viable epsilon for both
// operator kinds at every threshold.
TrendTables trend_experiments(const TrendConfig& config);

// CSV with header "<swept_name>,operator,threshold,max_viable_eps"; an
// unattainable threshold prints "none".
std::string trend_csv(const std::vector<TrendRow>& rows,
                      std::string_view swept_name);

// CSV with header "epsilon,mean_pp,mean_pr" over the examined points.
std::string sweep_csv(const SweepResult& result);

}  // namespace skemb
