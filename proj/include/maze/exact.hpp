#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "maze/core.hpp"

namespace maze::exact {

struct ExactResult {
  SteinerTree tree;
  int length = 0;
  std::uint64_t explored_permutations = 0;
  std::chrono::duration<double> elapsed{};
};

// Minimum-edge-count path from a to b, endpoints inclusive. Breadth-first
// search is used because every edge has unit weight, which makes it
// equivalent to Dijkstra's algorithm at a lower constant; ties break by the
// fixed North, East, South, West expansion order. Throws InputError when b is
// unreachable from a.
std::vector<NodeCoord> bfs_shortest_path(const GridGraph& graph, NodeCoord a, NodeCoord b);

// The permutation method: for every ordering of the terminals, chain the
// pairwise shortest paths, measure the edge-set union (shared edges counted
// once) and keep the smallest union, returned as a spanning tree of its
// induced subgraph. Orderings are enumerated up to reversal, which halves the
// work; pairwise paths are computed from the lexicographically smaller
// endpoint so a chain and its reversal produce the same union.
ExactResult dijkstra_exhaustive(const MazeInstance& instance);

// Provably minimum Steiner tree via the subset dynamic program over
// (vertex, terminal-subset) states. Capacity-limited to 12 terminals.
ExactResult dreyfus_wagner(const MazeInstance& instance);

// Micro-scale ground truth: minimum over all vertex supersets S of the
// terminals of the metric-closure MST cost restricted to S. Exact by
// exhaustion; capacity-limited to 16 nodes.
int subset_enumeration_oracle(const MazeInstance& instance);

}  // namespace maze::exact
