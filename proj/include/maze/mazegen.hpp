#pragma once

#include <cstdint>
#include <vector>

#include "maze/core.hpp"

namespace maze::mazegen {

struct GenConfig {
  int rows = 0;
  int cols = 0;
  int n_terminals = 2;
  int wall_removals = 0;
  std::uint64_t seed = 0;
};

// Cycle-injection count used by the benchmark datasets when none is given.
int default_wall_removals(int rows, int cols);

// Depth-first backtracker with an explicit stack, start cell fixed at (0,0).
// Result is a spanning tree: connected, rows*cols - 1 open edges,
// deterministic per seed.
GridGraph generate_perfect_maze(int rows, int cols, std::uint64_t seed);

// Opens exactly `wall_removals` closed interior walls. Candidates incident to
// degree-1 nodes form a first pool that is exhausted before any other wall is
// touched; each pool is shuffled by the seed. Pools are computed on the input
// graph. Throws InputError when fewer candidates exist than requested.
GridGraph add_cycles(const GridGraph& graph, int wall_removals, std::uint64_t seed);

// The order in which add_cycles would open walls, before truncation to the
// requested count. Exposed for tests that verify dead-end priority.
std::vector<GridEdge> cycle_candidate_order(const GridGraph& graph, std::uint64_t seed);

// n distinct nodes drawn uniformly without replacement, deterministic per seed.
std::vector<NodeCoord> place_terminals(const GridGraph& graph, int n, std::uint64_t seed);

// Composes the three steps with sub-seeds derived from config.seed
// (stream tags kSeedStreamWalls / kSeedStreamCycles / kSeedStreamTerminals).
MazeInstance generate_instance(const GenConfig& config);

}  // namespace maze::mazegen
