#include "maze/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "maze/approx.hpp"
#include "maze/chart.hpp"
#include "maze/csv.hpp"
#include "maze/error.hpp"
#include "maze/exact.hpp"

namespace maze::bench {

namespace {

constexpr const char* kCsvSchemaComment = "# maze-bench-csv v1";
constexpr const char* kCsvHeader =
    "instance_id,solver,terminals,length,optimal_length,valid,correct,elapsed_us,iterations";

struct Key {
  std::string solver;
  int terminals;
  bool operator<(const Key& o) const {
    return std::tie(solver, terminals) < std::tie(o.solver, o.terminals);
  }
};

double to_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw FormatError("csv field '" + s + "' is not numeric");
  }
}

}  // namespace

std::optional<SolverKind> parse_solver(const std::string& name) {
  if (name == "exhaustive") return SolverKind::Exhaustive;
  if (name == "dreyfus") return SolverKind::Dreyfus;
  if (name == "kou") return SolverKind::Kou;
  if (name == "mehlhorn") return SolverKind::Mehlhorn;
  if (name == "net") return SolverKind::Net;
  return std::nullopt;
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Exhaustive: return "exhaustive";
    case SolverKind::Dreyfus: return "dreyfus";
    case SolverKind::Kou: return "kou";
    case SolverKind::Mehlhorn: return "mehlhorn";
    case SolverKind::Net: return "net";
  }
  return "?";
}

std::vector<SolverKind> parse_solver_list(const std::string& comma_separated) {
  std::vector<SolverKind> out;
  std::istringstream in(comma_separated);
  std::string token;
  while (std::getline(in, token, ',')) {
    const auto kind = parse_solver(token);
    if (!kind) throw InputError("unknown solver '" + token + "'");
    out.push_back(*kind);
  }
  if (out.empty()) throw InputError("empty solver list");
  return out;
}

BenchRecord run_solver(const MazeInstance& instance, int optimal_length, SolverKind kind,
                       const NetOptions& net_options) {
  BenchRecord record;
  record.instance_id = instance.id;
  record.solver = solver_name(kind);
  record.terminals = static_cast<int>(instance.terminals.size());
  record.optimal_length = optimal_length;

  SteinerTree tree;
  switch (kind) {
    case SolverKind::Exhaustive: {
      const exact::ExactResult r = exact::dijkstra_exhaustive(instance);
      tree = r.tree;
      record.length = r.length;
      record.elapsed_seconds = r.elapsed.count();
      break;
    }
    case SolverKind::Dreyfus: {
      const exact::ExactResult r = exact::dreyfus_wagner(instance);
      tree = r.tree;
      record.length = r.length;
      record.elapsed_seconds = r.elapsed.count();
      break;
    }
    case SolverKind::Kou: {
      const approx::ApproxResult r = approx::kou(instance);
      tree = r.tree;
      record.length = r.length;
      record.elapsed_seconds = r.elapsed.count();
      break;
    }
    case SolverKind::Mehlhorn: {
      const approx::ApproxResult r = approx::mehlhorn(instance);
      tree = r.tree;
      record.length = r.length;
      record.elapsed_seconds = r.elapsed.count();
      break;
    }
    case SolverKind::Net: {
      if (net_options.weights == nullptr) throw InputError("the net solver requires weights");
      const tc::SolveResult r = tc::solve(instance, *net_options.weights, net_options.tc);
      tree = r.tree;
      record.length = r.length;
      record.elapsed_seconds = r.elapsed.count();
      record.iterations = r.iterations_used;
      break;
    }
  }

  record.valid = is_valid_tree(instance, tree).all();
  record.correct = record.valid && record.length == optimal_length;
  return record;
}

std::vector<BenchRecord> run_bench(const dataset::Dataset& ds,
                                   const std::vector<SolverKind>& solvers,
                                   const NetOptions& net_options) {
  std::vector<BenchRecord> records;
  records.reserve(ds.entries.size() * solvers.size());
  for (const auto& entry : ds.entries) {
    for (SolverKind kind : solvers) {
      records.push_back(run_solver(entry.instance, entry.optimal_length, kind, net_options));
    }
  }
  return records;
}

std::string csv_header_line() { return kCsvHeader; }

void write_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << kCsvSchemaComment << "\n" << kCsvHeader << "\n";
  for (const BenchRecord& r : records) {
    out << r.instance_id << "," << r.solver << "," << r.terminals << "," << r.length << ","
        << r.optimal_length << "," << (r.valid ? 1 : 0) << "," << (r.correct ? 1 : 0) << ","
        << static_cast<long long>(std::llround(r.elapsed_seconds * 1e6)) << "," << r.iterations
        << "\n";
  }
}

std::string summary_table(const std::vector<BenchRecord>& records) {
  std::map<Key, std::pair<int, int>> hits;     // correct / total
  std::map<Key, std::pair<double, int>> time;  // elapsed sum / count
  std::set<int> terminal_counts;
  std::vector<std::string> solver_order;
  for (const BenchRecord& r : records) {
    const Key key{r.solver, r.terminals};
    auto& h = hits[key];
    h.first += r.correct ? 1 : 0;
    h.second += 1;
    auto& t = time[key];
    t.first += r.elapsed_seconds;
    t.second += 1;
    terminal_counts.insert(r.terminals);
    if (std::find(solver_order.begin(), solver_order.end(), r.solver) == solver_order.end()) {
      solver_order.push_back(r.solver);
    }
  }

  std::ostringstream out;
  auto print_block = [&](const std::string& heading, auto value) {
    out << heading << "\n";
    out << "  " << std::left << std::setw(12) << "solver";
    for (int n : terminal_counts) out << std::right << std::setw(12) << ("N=" + std::to_string(n));
    out << "\n";
    for (const std::string& solver : solver_order) {
      out << "  " << std::left << std::setw(12) << solver;
      for (int n : terminal_counts) {
        const auto it = hits.find({solver, n});
        if (it == hits.end()) {
          out << std::right << std::setw(12) << "-";
        } else {
          out << std::right << std::setw(12) << value(Key{solver, n});
        }
      }
      out << "\n";
    }
  };

  print_block("accuracy (% correct = optimal length and valid)", [&](const Key& k) {
    const auto& h = hits.at(k);
    std::ostringstream v;
    v.precision(1);
    v << std::fixed << 100.0 * h.first / std::max(1, h.second);
    return v.str();
  });
  out << "\n";
  print_block("mean runtime (us)", [&](const Key& k) {
    const auto& t = time.at(k);
    std::ostringstream v;
    v.precision(1);
    v << std::fixed << 1e6 * t.first / std::max(1, t.second);
    return v.str();
  });
  return out.str();
}

std::vector<IterationsRow> iterations_summary(const dataset::Dataset& ds,
                                              const net::NetworkWeights& weights,
                                              const tc::TCConfig& tc_config) {
  std::map<int, std::vector<std::pair<int, bool>>> by_terminals;  // (iterations, solved)
  for (const auto& entry : ds.entries) {
    const tc::SolveResult r = tc::solve(entry.instance, weights, tc_config);
    by_terminals[static_cast<int>(entry.instance.terminals.size())].push_back(
        {r.iterations_used, r.solved});
  }
  std::vector<IterationsRow> rows;
  for (auto& [terminals, values] : by_terminals) {
    IterationsRow row;
    row.terminals = terminals;
    row.count = static_cast<int>(values.size());
    std::vector<int> iters;
    int solved = 0;
    for (const auto& [it, ok] : values) {
      iters.push_back(it);
      solved += ok ? 1 : 0;
    }
    std::sort(iters.begin(), iters.end());
    double sum = 0;
    for (int it : iters) sum += it;
    row.mean_iterations = sum / static_cast<double>(iters.size());
    row.p50 = iters[iters.size() / 2];
    row.p90 = iters[(iters.size() * 9) / 10];
    row.max = iters.back();
    row.solved_fraction = static_cast<double>(solved) / static_cast<double>(values.size());
    rows.push_back(row);
  }
  return rows;
}

void write_iterations_csv(const std::vector<IterationsRow>& rows,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << "# maze-iterations-csv v1\n";
  out << "terminals,count,mean_iterations,p50_iterations,p90_iterations,max_iterations,"
         "solved_fraction\n";
  for (const IterationsRow& r : rows) {
    out << r.terminals << "," << r.count << "," << r.mean_iterations << "," << r.p50 << ","
        << r.p90 << "," << r.max << "," << r.solved_fraction << "\n";
  }
}

void plot_csv(const std::filesystem::path& csv_path, const std::string& kind,
              const std::filesystem::path& out_svg) {
  const csv::Table table = csv::read(csv_path);

  if (kind == "runtime" || kind == "accuracy") {
    const std::size_t c_solver = table.require_column("solver");
    const std::size_t c_terminals = table.require_column("terminals");
    const std::size_t c_value =
        table.require_column(kind == "runtime" ? "elapsed_us" : "correct");
    std::map<std::string, std::map<int, std::pair<double, int>>> agg;
    for (const auto& row : table.rows) {
      const int n = static_cast<int>(to_double(row[c_terminals]));
      auto& cell = agg[row[c_solver]][n];
      cell.first += to_double(row[c_value]);
      cell.second += 1;
    }
    if (kind == "runtime") {
      std::vector<chart::Series> series;
      for (const auto& [solver, by_n] : agg) {
        chart::Series s{solver, {}};
        for (const auto& [n, cell] : by_n) {
          s.points.push_back({n, std::max(cell.first / cell.second, 1e-3)});
        }
        series.push_back(std::move(s));
      }
      chart::write_line_chart(out_svg, "Mean runtime per terminal count", "terminals",
                              "mean runtime (us, log scale)", series, /*log_y=*/true);
    } else {
      std::vector<std::string> names;
      for (const auto& [solver, by_n] : agg) names.push_back(solver);
      std::set<int> ns;
      for (const auto& [solver, by_n] : agg) {
        for (const auto& [n, cell] : by_n) ns.insert(n);
      }
      std::vector<chart::BarGroup> groups;
      for (int n : ns) {
        chart::BarGroup g{"N=" + std::to_string(n), {}};
        for (const std::string& solver : names) {
          const auto& by_n = agg.at(solver);
          const auto it = by_n.find(n);
          g.values.push_back(it == by_n.end() ? 0.0
                                              : 100.0 * it->second.first / it->second.second);
        }
        groups.push_back(std::move(g));
      }
      chart::write_bar_chart(out_svg, "Exact-match accuracy per terminal count", "terminals",
                             "accuracy (%)", names, groups);
    }
    return;
  }

  if (kind == "iterations") {
    const std::size_t c_terminals = table.require_column("terminals");
    const std::size_t c_mean = table.require_column("mean_iterations");
    const std::size_t c_p90 = table.require_column("p90_iterations");
    chart::Series mean{"mean", {}};
    chart::Series p90{"p90", {}};
    for (const auto& row : table.rows) {
      mean.points.push_back({to_double(row[c_terminals]), to_double(row[c_mean])});
      p90.points.push_back({to_double(row[c_terminals]), to_double(row[c_p90])});
    }
    chart::write_line_chart(out_svg, "Recurrent iterations until the check accepts", "terminals",
                            "iterations", {mean, p90}, /*log_y=*/false);
    return;
  }

  if (kind == "sections") {
    const std::size_t c_sections = table.require_column("sections");
    const std::size_t c_elapsed = table.require_column("elapsed_us");
    std::map<int, std::pair<double, int>> agg;
    for (const auto& row : table.rows) {
      auto& cell = agg[static_cast<int>(to_double(row[c_sections]))];
      cell.first += to_double(row[c_elapsed]);
      cell.second += 1;
    }
    chart::Series s{"one superstep", {}};
    for (const auto& [n, cell] : agg) s.points.push_back({n, cell.first / cell.second});
    chart::write_line_chart(out_svg, "Tiled superstep runtime vs section count", "sections",
                            "mean runtime (us)", {s}, /*log_y=*/false);
    return;
  }

  throw InputError("unknown plot kind '" + kind + "'");
}

}  // namespace maze::bench
