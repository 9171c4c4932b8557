#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "maze/approx.hpp"
#include "maze/bench.hpp"
#include "maze/core.hpp"
#include "maze/dataset.hpp"
#include "maze/error.hpp"
#include "maze/exact.hpp"
#include "maze/instance_io.hpp"
#include "maze/raster.hpp"
#include "maze/tc.hpp"
#include "maze/train.hpp"

namespace {

using maze::InputError;

nlohmann::json load_json_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw maze::FormatError(path.string() + ": " + e.what());
  }
  return j;
}

int cmd_generate(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                 std::optional<std::uint64_t> seed_override, std::optional<int> count_override) {
  maze::dataset::GenerateConfig cfg;
  if (!config_path.empty()) {
    const nlohmann::json j = load_json_config(config_path);
    cfg.rows = j.value("rows", cfg.rows);
    cfg.cols = j.value("cols", cfg.cols);
    cfg.count = j.value("count", cfg.count);
    cfg.wall_removals = j.value("wall_removals", cfg.wall_removals);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.id_prefix = j.value("id_prefix", cfg.id_prefix);
    if (j.contains("terminal_counts")) {
      cfg.terminal_counts = j.at("terminal_counts").get<std::vector<int>>();
    }
  }
  if (seed_override) cfg.seed = *seed_override;
  if (count_override) cfg.count = *count_override;
  maze::dataset::generate(cfg, out_dir);
  std::cout << "wrote " << cfg.count << " instances to " << out_dir.string() << "\n";
  return 0;
}

maze::SteinerTree solve_with(maze::bench::SolverKind kind, const maze::MazeInstance& instance,
                             const maze::net::NetworkWeights& weights,
                             const maze::tc::TCConfig& tc_config) {
  switch (kind) {
    case maze::bench::SolverKind::Exhaustive: return maze::exact::dijkstra_exhaustive(instance).tree;
    case maze::bench::SolverKind::Dreyfus: return maze::exact::dreyfus_wagner(instance).tree;
    case maze::bench::SolverKind::Kou: return maze::approx::kou(instance).tree;
    case maze::bench::SolverKind::Mehlhorn: return maze::approx::mehlhorn(instance).tree;
    case maze::bench::SolverKind::Net: return maze::tc::solve(instance, weights, tc_config).tree;
  }
  return {};
}

int cmd_solve(const std::filesystem::path& instance_path, const std::string& solver,
              const std::filesystem::path& weights_path, const std::filesystem::path& pixmap_out,
              const maze::tc::TCConfig& tc_config) {
  const maze::MazeInstance instance = maze::read_instance(instance_path);
  const auto kind = maze::bench::parse_solver(solver);
  if (!kind) throw InputError("unknown solver '" + solver + "'");

  maze::net::NetworkWeights weights;
  maze::bench::NetOptions net_options;
  net_options.tc = tc_config;
  if (*kind == maze::bench::SolverKind::Net) {
    if (weights_path.empty()) throw InputError("solver 'net' requires --weights");
    weights = maze::net::load_weights(weights_path);
    net_options.weights = &weights;
  }

  const int optimal = maze::exact::dreyfus_wagner(instance).length;
  const maze::bench::BenchRecord record =
      maze::bench::run_solver(instance, optimal, *kind, net_options);

  std::cout << "instance: " << record.instance_id << "\n"
            << "solver:   " << record.solver << "\n"
            << "length:   " << record.length << " (optimal " << record.optimal_length << ")\n"
            << "valid:    " << (record.valid ? "yes" : "no") << "\n"
            << "correct:  " << (record.correct ? "yes" : "no") << "\n"
            << "elapsed:  " << record.elapsed_seconds * 1e6 << " us\n";
  if (record.iterations > 0) std::cout << "iterations: " << record.iterations << "\n";

  if (!pixmap_out.empty()) {
    const maze::SteinerTree tree = solve_with(*kind, instance, weights, tc_config);
    maze::write_pixmap(maze::raster::tree_to_target(instance, tree), pixmap_out);
    std::cout << "solution pixmap: " << pixmap_out.string() << "\n";
  }
  return 0;
}

maze::trainer::TrainConfig train_config_from_json(const std::filesystem::path& path) {
  maze::trainer::TrainConfig cfg;
  const nlohmann::json j = load_json_config(path);
  cfg.m = j.value("m", cfg.m);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.width = j.value("width", cfg.width);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.probe_low = j.value("probe_low", cfg.probe_low);
  cfg.probe_high = j.value("probe_high", cfg.probe_high);
  cfg.probe_step = j.value("probe_step", cfg.probe_step);
  cfg.eval_every_epochs = j.value("eval_every_epochs", cfg.eval_every_epochs);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  cfg.stop_when_eval_perfect = j.value("stop_when_eval_perfect", cfg.stop_when_eval_perfect);
  if (j.value("rb_activation", "none") == "relu") {
    cfg.rb_activation = maze::net::RbActivation::Relu;
  }
  if (j.contains("train_dataset")) cfg.train_dataset = j.at("train_dataset").get<std::string>();
  if (j.contains("eval_dataset")) cfg.eval_dataset = j.at("eval_dataset").get<std::string>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("eval_tc")) {
    const auto& t = j.at("eval_tc");
    cfg.eval_tc.whiteness_threshold = t.value("whiteness_threshold", 0.65);
    cfg.eval_tc.first_batch = t.value("first_batch", 30);
    cfg.eval_tc.batch_step = t.value("batch_step", 10);
    cfg.eval_tc.max_iterations = t.value("max_iterations", 200);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steiner-tree maze solving: generation, exact and approximate solvers, a "
               "recurrent convolutional pipeline, and benchmarks"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "Generate a dataset with oracle targets");
  std::filesystem::path gen_config, gen_out;
  std::optional<std::uint64_t> gen_seed;
  std::optional<int> gen_count;
  generate->add_option("--config", gen_config, "JSON generation config");
  generate->add_option("--out", gen_out, "output dataset directory")->required();
  generate->add_option("--seed", gen_seed, "override the config seed");
  generate->add_option("--count", gen_count, "override the instance count");

  auto* solve = app.add_subcommand("solve", "Solve one instance file");
  std::filesystem::path solve_instance, solve_weights, solve_pixmap;
  std::string solve_solver = "dreyfus";
  maze::tc::TCConfig solve_tc;
  solve->add_option("--instance", solve_instance, "instance file")->required();
  solve->add_option("--solver", solve_solver, "exhaustive|dreyfus|kou|mehlhorn|net");
  solve->add_option("--weights", solve_weights, "weights file (net solver)");
  solve->add_option("--out-pixmap", solve_pixmap, "write the solution as a pixmap");
  solve->add_option("--tc-first-batch", solve_tc.first_batch,
                    "iterations before the first check");
  solve->add_option("--tc-batch-step", solve_tc.batch_step, "iterations between checks");
  solve->add_option("--tc-max-iterations", solve_tc.max_iterations, "iteration cap");
  solve->add_option("--tc-threshold", solve_tc.whiteness_threshold, "whiteness threshold");

  auto* train = app.add_subcommand("train", "Train the recurrent network");
  std::filesystem::path train_config;
  std::optional<std::uint64_t> train_seed;
  std::optional<int> train_epochs;
  std::filesystem::path train_data, train_out;
  train->add_option("--config", train_config, "JSON training config")->required();
  train->add_option("--seed", train_seed, "override the config seed");
  train->add_option("--epochs", train_epochs, "override the epoch count");
  train->add_option("--dataset", train_data, "override the training dataset");
  train->add_option("--out", train_out, "override the output directory");

  auto* bench = app.add_subcommand("bench", "Benchmark solvers on a dataset");
  std::filesystem::path bench_dataset, bench_weights, bench_csv;
  std::string bench_solvers = "kou,mehlhorn,dreyfus";
  maze::tc::TCConfig bench_tc;
  bench->add_option("--dataset", bench_dataset, "dataset directory")->required();
  bench->add_option("--solvers", bench_solvers, "comma-separated solver list");
  bench->add_option("--weights", bench_weights, "weights file (net solver)");
  bench->add_option("--csv", bench_csv, "write per-instance records to this CSV");
  bench->add_option("--tc-first-batch", bench_tc.first_batch, "iterations before the first check");
  bench->add_option("--tc-batch-step", bench_tc.batch_step, "iterations between checks");
  bench->add_option("--tc-max-iterations", bench_tc.max_iterations, "iteration cap");

  auto* iterations = app.add_subcommand("iterations", "Iterations-to-solve statistics");
  std::filesystem::path iter_dataset, iter_weights, iter_csv;
  maze::tc::TCConfig iter_tc;
  iterations->add_option("--dataset", iter_dataset, "dataset directory")->required();
  iterations->add_option("--weights", iter_weights, "weights file")->required();
  iterations->add_option("--csv", iter_csv, "output CSV")->required();
  iterations->add_option("--tc-first-batch", iter_tc.first_batch, "");
  iterations->add_option("--tc-batch-step", iter_tc.batch_step, "");
  iterations->add_option("--tc-max-iterations", iter_tc.max_iterations, "");

  auto* plot = app.add_subcommand("plot", "Render a chart from a CSV");
  std::filesystem::path plot_csv_path, plot_out;
  std::string plot_kind;
  plot->add_option("--csv", plot_csv_path, "input CSV")->required();
  plot->add_option("--kind", plot_kind, "runtime|accuracy|iterations|sections")->required();
  plot->add_option("--out", plot_out, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen_config, gen_out, gen_seed, gen_count);
    if (solve->parsed()) {
      return cmd_solve(solve_instance, solve_solver, solve_weights, solve_pixmap, solve_tc);
    }
    if (train->parsed()) {
      maze::trainer::TrainConfig cfg = train_config_from_json(train_config);
      if (train_seed) cfg.seed = *train_seed;
      if (train_epochs) cfg.epochs = *train_epochs;
      if (!train_data.empty()) cfg.train_dataset = train_data;
      if (!train_out.empty()) cfg.out_dir = train_out;
      const maze::trainer::TrainOutcome outcome = maze::trainer::train(cfg);
      std::cout << "steps: " << outcome.steps_run << "\n"
                << "best epoch: " << outcome.best_epoch << " (peak accuracy "
                << outcome.best_peak_accuracy << " at iteration " << outcome.best_peak_iteration
                << ")\n"
                << "best weights: " << outcome.best_weights.string() << "\n";
      return 0;
    }
    if (bench->parsed()) {
      const maze::dataset::Dataset ds = maze::dataset::load(bench_dataset);
      maze::net::NetworkWeights weights;
      maze::bench::NetOptions net_options;
      net_options.tc = bench_tc;
      const std::vector<maze::bench::SolverKind> solvers =
          maze::bench::parse_solver_list(bench_solvers);
      const bool wants_net = std::any_of(solvers.begin(), solvers.end(), [](auto k) {
        return k == maze::bench::SolverKind::Net;
      });
      if (wants_net) {
        if (bench_weights.empty()) throw InputError("solver 'net' requires --weights");
        weights = maze::net::load_weights(bench_weights);
        net_options.weights = &weights;
      }
      const std::vector<maze::bench::BenchRecord> records =
          maze::bench::run_bench(ds, solvers, net_options);
      if (!bench_csv.empty()) maze::bench::write_csv(records, bench_csv);
      std::cout << maze::bench::summary_table(records);
      return 0;
    }
    if (iterations->parsed()) {
      const maze::dataset::Dataset ds = maze::dataset::load(iter_dataset);
      const maze::net::NetworkWeights weights = maze::net::load_weights(iter_weights);
      maze::bench::write_iterations_csv(maze::bench::iterations_summary(ds, weights, iter_tc),
                                        iter_csv);
      std::cout << "wrote " << iter_csv.string() << "\n";
      return 0;
    }
    if (plot->parsed()) {
      maze::bench::plot_csv(plot_csv_path, plot_kind, plot_out);
      std::cout << "wrote " << plot_out.string() << "\n";
      return 0;
    }
  } catch (const maze::ContractError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {  // input, format, capacity, plan errors
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
