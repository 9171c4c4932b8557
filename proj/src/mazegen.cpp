#include "maze/mazegen.hpp"

#include <algorithm>
#include <numeric>

#include "maze/error.hpp"
#include "maze/rng.hpp"

namespace maze::mazegen {

int default_wall_removals(int rows, int cols) {
  // Calibrated against the published baseline-accuracy table: one injected
  // cycle per maze lands Kou and Mehlhorn within tolerance of the reported
  // rates at seven terminals, while more cycles depress them far below.
  // Every dataset manifest records the value actually used.
  (void)rows;
  (void)cols;
  return 1;
}

GridGraph generate_perfect_maze(int rows, int cols, std::uint64_t seed) {
  GridGraph g(rows, cols);  // validates dimensions
  Rng rng(seed);

  std::vector<char> visited(static_cast<std::size_t>(g.node_count()), 0);
  std::vector<NodeCoord> stack;
  stack.push_back({0, 0});
  visited[0] = 1;

  while (!stack.empty()) {
    const NodeCoord cur = stack.back();
    Dir options[4];
    int n_options = 0;
    for (Dir d : kDirs) {
      const NodeCoord nb = step(cur, d);
      if (g.in_bounds(nb) && !visited[static_cast<std::size_t>(g.node_index(nb))]) {
        options[n_options++] = d;
      }
    }
    if (n_options == 0) {
      stack.pop_back();  // dead end: backtrack
      continue;
    }
    const Dir d = options[rng.uniform_below(static_cast<std::uint64_t>(n_options))];
    const NodeCoord nb = step(cur, d);
    g.open_passage(cur, d);
    visited[static_cast<std::size_t>(g.node_index(nb))] = 1;
    stack.push_back(nb);
  }
  return g;
}

std::vector<GridEdge> cycle_candidate_order(const GridGraph& graph, std::uint64_t seed) {
  std::vector<GridEdge> dead_end_pool;
  std::vector<GridEdge> other_pool;
  for (int r = 0; r < graph.rows(); ++r) {
    for (int c = 0; c < graph.cols(); ++c) {
      const NodeCoord n{r, c};
      for (Dir d : {Dir::East, Dir::South}) {
        const NodeCoord m = step(n, d);
        if (!graph.in_bounds(m) || graph.is_open(n, d)) continue;
        const GridEdge wall(n, m);
        if (graph.degree(n) == 1 || graph.degree(m) == 1) {
          dead_end_pool.push_back(wall);
        } else {
          other_pool.push_back(wall);
        }
      }
    }
  }
  Rng rng(seed);
  rng.shuffle(dead_end_pool);
  rng.shuffle(other_pool);
  dead_end_pool.insert(dead_end_pool.end(), other_pool.begin(), other_pool.end());
  return dead_end_pool;
}

GridGraph add_cycles(const GridGraph& graph, int wall_removals, std::uint64_t seed) {
  if (wall_removals < 0) throw InputError("wall_removals must be non-negative");
  const std::vector<GridEdge> order = cycle_candidate_order(graph, seed);
  if (static_cast<std::size_t>(wall_removals) > order.size()) {
    throw InputError("wall_removals " + std::to_string(wall_removals) +
                     " exceeds available closed interior walls " + std::to_string(order.size()));
  }
  GridGraph out = graph;
  for (int i = 0; i < wall_removals; ++i) out.open_passage(order[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<NodeCoord> place_terminals(const GridGraph& graph, int n, std::uint64_t seed) {
  const int v = graph.node_count();
  if (n < 1 || n > v) {
    throw InputError("terminal count " + std::to_string(n) + " out of range for " +
                     std::to_string(v) + " nodes");
  }
  std::vector<int> indices(static_cast<std::size_t>(v));
  std::iota(indices.begin(), indices.end(), 0);
  Rng rng(seed);
  // Partial Fisher-Yates: the first n slots are a uniform sample without
  // replacement, in draw order.
  std::vector<NodeCoord> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t j =
        static_cast<std::size_t>(i) +
        static_cast<std::size_t>(rng.uniform_below(static_cast<std::uint64_t>(v - i)));
    std::swap(indices[static_cast<std::size_t>(i)], indices[j]);
    const int idx = indices[static_cast<std::size_t>(i)];
    out.push_back({idx / graph.cols(), idx % graph.cols()});
  }
  return out;
}

MazeInstance generate_instance(const GenConfig& config) {
  if (config.n_terminals < 2) throw InputError("instance needs at least 2 terminals");
  if (config.n_terminals > config.rows * config.cols) {
    throw InputError("more terminals than nodes");
  }

  MazeInstance inst;
  const GridGraph perfect =
      generate_perfect_maze(config.rows, config.cols, derive_seed(config.seed, kSeedStreamWalls));
  inst.graph = add_cycles(perfect, config.wall_removals, derive_seed(config.seed, kSeedStreamCycles));
  inst.terminals =
      place_terminals(inst.graph, config.n_terminals, derive_seed(config.seed, kSeedStreamTerminals));
  inst.seed = config.seed;
  inst.id = "gen-" + std::to_string(config.rows) + "x" + std::to_string(config.cols) + "-t" +
            std::to_string(config.n_terminals) + "-w" + std::to_string(config.wall_removals) +
            "-s" + std::to_string(config.seed);
  return inst;
}

}  // namespace maze::mazegen
