#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "maze/dataset.hpp"
#include "maze/net.hpp"
#include "maze/tc.hpp"

namespace maze::bench {

enum class SolverKind { Exhaustive, Dreyfus, Kou, Mehlhorn, Net };

std::optional<SolverKind> parse_solver(const std::string& name);
std::string solver_name(SolverKind kind);
std::vector<SolverKind> parse_solver_list(const std::string& comma_separated);

struct BenchRecord {
  std::string instance_id;
  std::string solver;
  int terminals = 0;
  int length = 0;
  int optimal_length = 0;
  bool valid = false;
  bool correct = false;  // valid and length == optimal, recomputed here
  double elapsed_seconds = 0;
  int iterations = 0;  // network pipeline only
};

struct NetOptions {
  const net::NetworkWeights* weights = nullptr;
  tc::TCConfig tc;
};

// Runs one solver on one instance and judges the answer against the oracle
// optimum: `correct` is recomputed from is_valid_tree and the length, never
// trusted from the solver.
BenchRecord run_solver(const MazeInstance& instance, int optimal_length, SolverKind kind,
                       const NetOptions& net_options);

std::vector<BenchRecord> run_bench(const dataset::Dataset& ds,
                                   const std::vector<SolverKind>& solvers,
                                   const NetOptions& net_options);

// CSV schema v1 header:
//   instance_id,solver,terminals,length,optimal_length,valid,correct,elapsed_us,iterations
void write_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path);
std::string csv_header_line();

// Aligned accuracy and mean-runtime tables per solver and terminal count.
std::string summary_table(const std::vector<BenchRecord>& records);

struct IterationsRow {
  int terminals = 0;
  int count = 0;
  double mean_iterations = 0;
  int p50 = 0;
  int p90 = 0;
  int max = 0;
  double solved_fraction = 0;
};

std::vector<IterationsRow> iterations_summary(const dataset::Dataset& ds,
                                              const net::NetworkWeights& weights,
                                              const tc::TCConfig& tc_config);
void write_iterations_csv(const std::vector<IterationsRow>& rows,
                          const std::filesystem::path& path);

// Renders a chart from a CSV produced by this tool.
// kind: runtime | accuracy | iterations | sections.
void plot_csv(const std::filesystem::path& csv_path, const std::string& kind,
              const std::filesystem::path& out_svg);

}  // namespace maze::bench
