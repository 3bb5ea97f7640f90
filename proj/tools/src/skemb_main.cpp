#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "skemb/cluster.hpp"
#include "skemb/error.hpp"
#include "skemb/io.hpp"
#include "skemb/metrics.hpp"
#include "skemb/rng.hpp"
#include "skemb/sbm.hpp"
#include "skemb/sketch.hpp"
#include "skemb/stream.hpp"

namespace {

using namespace skemb;

UpdateStream random_stream(std::uint64_t n, std::uint64_t edges, std::uint64_t seed) {
  if (n < 2) throw ParameterError("bench: need at least two vertices");
  UpdateStream stream;
  stream.reserve(edges);
  rng::Engine g = rng::make_engine(seed);
  for (std::uint64_t i = 0; i < edges; ++i) {
    std::uint64_t u = rng::uniform_below(g, n);
    std::uint64_t v = rng::uniform_below(g, n - 1);
    if (v >= u) ++v;  // uniform over v != u
    stream.push_back({u, v, 1});
  }
  return stream;
}

int cmd_gen(std::uint64_t n, std::uint32_t communities, double ratio,
            double row_sum, std::optional<double> rho_in,
            std::optional<double> rho_out, bool graphchallenge,
            std::uint64_t seed, const std::string& out, std::string labels_out) {
  SbmSpec spec;
  if (graphchallenge) {
    spec = graphchallenge_spec(n, seed);
  } else if (rho_in || rho_out) {
    if (!rho_in || !rho_out)
      throw ParameterError("gen: --rho-in and --rho-out must be given together");
    spec = sbm_spec_from_densities(n, communities, *rho_in, *rho_out, seed);
  } else {
    spec = flat_sbm_spec(n, communities, ratio, row_sum, seed);
  }
  SbmSample sample = sample_sbm(spec);
  if (out == "-") {
    // Stdout carries the edge stream itself, so labels need an explicit path
    // and the status line moves to stderr to keep the pipe parseable.
    if (labels_out.empty())
      throw ParameterError("gen: --labels-out is required when --out -");
    write_update_stream(std::cout, sample.stream);
    write_labels_file(labels_out, sample.truth);
    std::cerr << "wrote " << sample.stream.size() << " edges to stdout and "
              << spec.vertex_count() << " labels to " << labels_out << " ("
              << spec.communities << " communities)\n";
    return 0;
  }
  if (labels_out.empty()) labels_out = out + ".labels";
  write_update_stream_file(out, sample.stream);
  write_labels_file(labels_out, sample.truth);
  std::cout << "wrote " << sample.stream.size() << " edges to " << out
            << " and " << spec.vertex_count() << " labels to " << labels_out
            << " (" << spec.communities << " communities)\n";
  return 0;
}

int cmd_embed(const std::string& input, std::uint64_t n, SketchKind kind,
              double epsilon, double c_const, std::uint32_t workers,
              std::uint64_t seed, bool threaded, const std::string& out) {
  std::uint32_t s = dimension_for(epsilon, n, c_const);
  StreamEngine engine(PartitionMap::round_robin(n, workers),
                      make_operator(kind, n, s, seed),
                      threaded ? ExecutionMode::threaded : ExecutionMode::serial);
  auto feed = [&](std::istream& in, std::string_view source) {
    for_each_update(in, source, [&](const EdgeUpdate& u) { engine.ingest(u); });
  };
  if (input == "-") {
    feed(std::cin, "<stdin>");
  } else {
    std::ifstream in(input);
    if (!in) throw InputFormatError("cannot open " + input + " for reading");
    feed(in, input);
  }
  EmbeddingMatrix emb = engine.gather();
  write_embedding_file(out, {kind, n, s, epsilon, c_const, seed}, emb);
  std::cout << "wrote " << n << " x " << s << " " << to_string(kind)
            << " embedding to " << out << "\n";
  return 0;
}

int cmd_cluster(const std::string& input, std::uint32_t k, std::uint64_t seed,
                std::uint32_t restarts, std::uint32_t max_iters,
                const std::string& out) {
  EmbeddingFile file = read_embedding_file(input);
  KmeansResult result = kmeans_best_of(file.matrix, k, seed, restarts, max_iters);
  write_labels_file(out, result.partition);
  std::cout << "wrote " << result.partition.size() << " labels to " << out
            << " (inertia " << format_double(result.inertia) << ", "
            << result.iterations << " iterations)\n";
  return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path,
             const std::string& out) {
  Partition pred = read_labels_file(pred_path);
  Partition truth = read_labels_file(truth_path);
  MetricsReport report = evaluate(pred, truth);
  nlohmann::json j{{"pp", report.pp},
                   {"pr", report.pr},
                   {"acc", report.acc},
                   {"trials", report.trials},
                   {"pp_trials", report.pp_trials},
                   {"pr_trials", report.pr_trials},
                   {"acc_trials", report.acc_trials}};
  std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) write_text_file(out, text);
  return 0;
}

int cmd_sweep(std::uint64_t n, std::uint32_t communities, double ratio,
              double row_sum, SketchKind kind, double c_const,
              std::uint32_t workers, std::uint32_t restarts, double threshold,
              std::uint32_t trials, std::vector<double> grid, std::uint64_t seed,
              const std::string& trend, bool paper_scale, const std::string& out) {
  PipelineConfig pipeline;
  pipeline.kind = kind;
  pipeline.c_const = c_const;
  pipeline.workers = workers;
  pipeline.kmeans_restarts = restarts;

  if (!trend.empty()) {
    TrendConfig config =
        paper_scale ? TrendConfig::paper_scale() : TrendConfig::desk_scale();
    config.trials = trials;
    config.seed = seed;
    config.pipeline = pipeline;
    if (!grid.empty()) config.eps_grid = std::move(grid);
    if (trend != "all" && trend != "ratio") config.ratio_grid.clear();
    if (trend != "all" && trend != "communities") config.community_grid.clear();
    if (trend != "all" && trend != "vertices") config.vertex_grid.clear();

    TrendTables tables = trend_experiments(config);
    std::string prefix = out.empty() ? "trend_" : out;
    if (!tables.ratio_sweep.empty())
      write_text_file(prefix + "ratio.csv", trend_csv(tables.ratio_sweep, "ratio"));
    if (!tables.community_sweep.empty())
      write_text_file(prefix + "communities.csv",
                      trend_csv(tables.community_sweep, "communities"));
    if (!tables.vertex_sweep.empty())
      write_text_file(prefix + "vertices.csv",
                      trend_csv(tables.vertex_sweep, "vertices"));
    std::cout << "wrote trend tables with prefix " << prefix << "\n";
    return 0;
  }

  SbmSpec spec = flat_sbm_spec(n, communities, ratio, row_sum, 0);
  if (grid.empty()) grid = default_epsilon_grid();
  SweepResult result =
      max_viable_epsilon(spec, pipeline, std::move(grid), threshold, trials, seed);
  std::string csv = sweep_csv(result);
  if (out.empty())
    std::cout << csv;
  else
    write_text_file(out, csv);
  std::cout << "max_viable_eps "
            << (result.max_viable_eps ? format_double(*result.max_viable_eps)
                                      : std::string("none"))
            << " at threshold " << format_double(threshold) << "\n";
  return 0;
}

int cmd_bench(const std::vector<std::uint64_t>& edge_counts, std::uint64_t n,
              SketchKind kind, std::uint32_t sketch_dim, double epsilon,
              double c_const, std::uint32_t workers, std::uint64_t seed,
              bool threaded, const std::string& out) {
  std::uint32_t s = sketch_dim != 0 ? sketch_dim : dimension_for(epsilon, n, c_const);
  ExecutionMode mode = threaded ? ExecutionMode::threaded : ExecutionMode::serial;
  std::string csv = "operator,edges,workers,sketch_dim,seconds,updates_per_second\n";
  for (std::size_t i = 0; i < edge_counts.size(); ++i) {
    UpdateStream stream =
        random_stream(n, edge_counts[i], derive_seed(seed, "bench.stream", i));
    SketchOperator op =
        make_operator(kind, n, s, derive_seed(seed, "bench.operator", i));
    ThroughputReport report = throughput_bench(stream, op, n, workers, mode);
    csv += std::string(to_string(kind)) + "," + std::to_string(report.edge_updates) +
           "," + std::to_string(report.workers) + "," + std::to_string(s) + "," +
           format_double(report.seconds) + "," +
           format_double(report.updates_per_second) + "\n";
    std::cout << to_string(kind) << " s=" << s << " edges=" << report.edge_updates
              << ": " << format_double(report.seconds) << " s, "
              << format_double(report.updates_per_second) << " updates/s\n";
  }
  if (!out.empty()) write_text_file(out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skemb: linear-sketch graph embeddings with an SBM experiment harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (key=value; section per subcommand)");

  // gen
  auto* gen = app.add_subcommand("gen", "Sample an SBM edge stream and its ground-truth labels");
  std::uint64_t gen_n = 0;
  std::uint32_t gen_c = 2;
  double gen_ratio = 50.0, gen_row_sum = 0.5;
  std::optional<double> gen_rho_in, gen_rho_out;
  bool gen_gc = false;
  std::uint64_t gen_seed = 1;
  std::string gen_out, gen_labels_out;
  gen->add_option("--vertices", gen_n, "Vertex count n")->required();
  auto* gen_c_opt = gen->add_option("--communities", gen_c, "Community count c (default 2)");
  auto* gen_ratio_opt = gen->add_option("--ratio", gen_ratio, "rho_in / rho_out (default 50)");
  auto* gen_rs_opt = gen->add_option("--row-sum", gen_row_sum, "Row sum of P (default 0.5)");
  auto* gen_ri_opt = gen->add_option("--rho-in", gen_rho_in, "Within-block density (with --rho-out)");
  auto* gen_ro_opt = gen->add_option("--rho-out", gen_rho_out, "Between-block density (with --rho-in)");
  auto* gen_gc_opt = gen->add_flag("--graphchallenge", gen_gc,
                                   "Derive all SBM parameters from n via the GraphChallenge fits");
  gen_gc_opt->excludes(gen_c_opt)->excludes(gen_ratio_opt)->excludes(gen_rs_opt)
      ->excludes(gen_ri_opt)->excludes(gen_ro_opt);
  gen_ri_opt->excludes(gen_ratio_opt)->excludes(gen_rs_opt);
  gen_ro_opt->excludes(gen_ratio_opt)->excludes(gen_rs_opt);
  gen->add_option("--seed", gen_seed, "Master seed (default 1)");
  gen->add_option("--out", gen_out, "Edge-list output path, or '-' for stdout")->required();
  gen->add_option("--labels-out", gen_labels_out, "Truth-label output path (default <out>.labels)");

  // embed
  auto* embed = app.add_subcommand("embed", "Stream edge updates into a sketch embedding");
  std::string embed_input = "-";
  std::uint64_t embed_n = 0;
  std::string embed_op = "cst";
  double embed_eps = 0.1, embed_cc = 1.0;
  std::uint32_t embed_workers = 1;
  std::uint64_t embed_seed = 1;
  bool embed_threaded = false;
  std::string embed_out;
  embed->add_option("--input", embed_input, "Update-stream file, or '-' for stdin (default)");
  embed->add_option("--vertices", embed_n, "Vertex count n")->required();
  embed->add_option("--operator", embed_op, "Sketch kind: cst or fwht (default cst)")
      ->check(CLI::IsMember({"cst", "fwht"}));
  embed->add_option("--epsilon", embed_eps, "Distortion parameter in (0,1) (default 0.1)");
  embed->add_option("--c-const", embed_cc, "Constant in s = ceil(c * eps^-2 * ln n) (default 1)");
  embed->add_option("--workers", embed_workers, "Logical worker count (default 1)");
  embed->add_option("--seed", embed_seed, "Operator seed (default 1)");
  embed->add_flag("--threaded", embed_threaded, "Run workers on real threads");
  embed->add_option("--out", embed_out, "Embedding output path")->required();

  // cluster
  auto* cluster = app.add_subcommand("cluster", "k-means over an embedding file");
  std::string cluster_input;
  std::uint32_t cluster_k = 0;
  std::uint64_t cluster_seed = 1;
  std::uint32_t cluster_restarts = 4, cluster_max_iters = 100;
  std::string cluster_out;
  cluster->add_option("--input", cluster_input, "Embedding file")->required();
  cluster->add_option("-k,--clusters", cluster_k, "Cluster count")->required();
  cluster->add_option("--seed", cluster_seed, "Clustering seed (default 1)");
  cluster->add_option("--restarts", cluster_restarts, "k-means restarts (default 4)");
  cluster->add_option("--max-iters", cluster_max_iters, "Lloyd iteration cap (default 100)");
  cluster->add_option("--out", cluster_out, "Label output path")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Score predicted labels against ground truth (JSON)");
  std::string eval_pred, eval_truth, eval_out;
  eval->add_option("--pred", eval_pred, "Predicted label file")->required();
  eval->add_option("--truth", eval_truth, "Ground-truth label file")->required();
  eval->add_option("--out", eval_out, "Also write the JSON report here");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Max-viable-epsilon sweeps and trend tables (CSV)");
  std::uint64_t sweep_n = 1024;
  std::uint32_t sweep_c = 8;
  double sweep_ratio = 50.0, sweep_row_sum = 0.5;
  std::string sweep_op = "cst";
  double sweep_cc = 1.0;
  std::uint32_t sweep_workers = 1, sweep_restarts = 4;
  double sweep_threshold = 0.9;
  std::uint32_t sweep_trials = 10;
  std::vector<double> sweep_grid;
  std::uint64_t sweep_seed = 1;
  std::string sweep_trend;
  bool sweep_paper_scale = false;
  std::string sweep_out;
  sweep->add_option("--vertices", sweep_n, "Vertex count n (default 1024)");
  sweep->add_option("--communities", sweep_c, "Community count c (default 8)");
  sweep->add_option("--ratio", sweep_ratio, "rho_in / rho_out (default 50)");
  sweep->add_option("--row-sum", sweep_row_sum, "Row sum of P (default 0.5)");
  sweep->add_option("--operator", sweep_op, "Sketch kind: cst or fwht (default cst)")
      ->check(CLI::IsMember({"cst", "fwht"}));
  sweep->add_option("--c-const", sweep_cc, "Sketch dimension constant (default 1)");
  sweep->add_option("--workers", sweep_workers, "Logical worker count (default 1)");
  sweep->add_option("--restarts", sweep_restarts, "k-means restarts per trial (default 4)");
  sweep->add_option("--threshold", sweep_threshold, "Metric threshold (default 0.9)");
  sweep->add_option("--trials", sweep_trials, "Trials per grid point (default 10)");
  sweep->add_option("--grid", sweep_grid, "Descending epsilon grid (comma separated)")
      ->delimiter(',');
  sweep->add_option("--seed", sweep_seed, "Master seed (default 1)");
  sweep->add_option("--trend", sweep_trend,
                    "Run trend tables instead: ratio, communities, vertices, or all")
      ->check(CLI::IsMember({"ratio", "communities", "vertices", "all"}));
  sweep->add_flag("--paper-scale", sweep_paper_scale,
                  "Trend tables at the original scale (n=4096, c=16 base; hours)");
  sweep->add_option("--out", sweep_out, "CSV output path (trend mode: path prefix)");

  // bench
  auto* bench = app.add_subcommand("bench", "Ingestion throughput on random streams (CSV)");
  std::vector<std::uint64_t> bench_edges = {1000000};
  std::uint64_t bench_n = 1u << 17;
  std::string bench_op = "cst";
  std::uint32_t bench_s = 0;
  double bench_eps = 0.1, bench_cc = 1.0;
  std::uint32_t bench_workers = 1;
  std::uint64_t bench_seed = 1;
  bool bench_threaded = false;
  std::string bench_out;
  bench->add_option("--edges", bench_edges, "Edge counts to run (comma separated)")
      ->delimiter(',');
  bench->add_option("--vertices", bench_n, "Vertex count n (default 131072)");
  bench->add_option("--operator", bench_op, "Sketch kind: cst or fwht (default cst)")
      ->check(CLI::IsMember({"cst", "fwht"}));
  bench->add_option("--sketch-dim", bench_s, "Sketch dimension s (overrides --epsilon)");
  bench->add_option("--epsilon", bench_eps, "Distortion parameter (default 0.1)");
  bench->add_option("--c-const", bench_cc, "Sketch dimension constant (default 1)");
  bench->add_option("--workers", bench_workers, "Logical worker count (default 1)");
  bench->add_option("--seed", bench_seed, "Stream/operator seed (default 1)");
  bench->add_flag("--threaded", bench_threaded, "Run workers on real threads");
  bench->add_option("--out", bench_out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed())
      return cmd_gen(gen_n, gen_c, gen_ratio, gen_row_sum, gen_rho_in, gen_rho_out,
                     gen_gc, gen_seed, gen_out, gen_labels_out);
    if (embed->parsed())
      return cmd_embed(embed_input, embed_n, sketch_kind_from_string(embed_op),
                       embed_eps, embed_cc, embed_workers, embed_seed,
                       embed_threaded, embed_out);
    if (cluster->parsed())
      return cmd_cluster(cluster_input, cluster_k, cluster_seed, cluster_restarts,
                         cluster_max_iters, cluster_out);
    if (eval->parsed()) return cmd_eval(eval_pred, eval_truth, eval_out);
    if (sweep->parsed())
      return cmd_sweep(sweep_n, sweep_c, sweep_ratio, sweep_row_sum,
                       sketch_kind_from_string(sweep_op), sweep_cc, sweep_workers,
                       sweep_restarts, sweep_threshold, sweep_trials, sweep_grid,
                       sweep_seed, sweep_trend, sweep_paper_scale, sweep_out);
    if (bench->parsed())
      return cmd_bench(bench_edges, bench_n, sketch_kind_from_string(bench_op),
                       bench_s, bench_eps, bench_cc, bench_workers, bench_seed,
                       bench_threaded, bench_out);
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const InputFormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
