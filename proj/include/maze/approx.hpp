#pragma once

#include <chrono>

#include "maze/core.hpp"

namespace maze::approx {

struct ApproxResult {
  SteinerTree tree;
  int length = 0;
  std::chrono::duration<double> elapsed{};
};

// Classical KMB pipeline: metric closure over the terminals via one
// breadth-first search per terminal, MST of the closure, expansion of the
// closure MST edges into grid paths, MST of the expanded subgraph, then
// iterative pruning of non-terminal leaves. MST ties break on the canonical
// edge id so near-equidistant instances resolve deterministically.
ApproxResult kou(const MazeInstance& instance);

// Single multi-source pass variant: every vertex is assigned to its nearest
// terminal (Voronoi regions); each boundary grid edge (u,v) induces an
// auxiliary terminal edge of weight d(s,u) + 1 + d(v,t); the auxiliary MST is
// expanded and pruned exactly as the kou pipeline.
ApproxResult mehlhorn(const MazeInstance& instance);

}  // namespace maze::approx
