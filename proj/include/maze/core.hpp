#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace maze {

// Node-lattice coordinate; row 0 is the top row to match image orientation.
struct NodeCoord {
  int row = 0;
  int col = 0;
  auto operator<=>(const NodeCoord&) const = default;
};

// Lattice directions in the fixed traversal order used everywhere
// (deterministic tie-breaking depends on this order).
enum class Dir : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline constexpr std::array<Dir, 4> kDirs = {Dir::North, Dir::East, Dir::South, Dir::West};

constexpr NodeCoord step(NodeCoord n, Dir d) {
  switch (d) {
    case Dir::North: return {n.row - 1, n.col};
    case Dir::East: return {n.row, n.col + 1};
    case Dir::South: return {n.row + 1, n.col};
    case Dir::West: return {n.row, n.col - 1};
  }
  return n;
}

constexpr Dir opposite(Dir d) {
  return static_cast<Dir>((static_cast<unsigned>(d) + 2u) % 4u);
}

// Undirected lattice edge between adjacent nodes, stored with the
// lexicographically smaller endpoint first so (a,b) and (b,a) deduplicate.
struct GridEdge {
  NodeCoord a;
  NodeCoord b;

  GridEdge() = default;
  GridEdge(NodeCoord u, NodeCoord v) {
    if (v < u) std::swap(u, v);
    a = u;
    b = v;
  }
  auto operator<=>(const GridEdge&) const = default;
};

// Rectangular node lattice with per-node passage flags. Closed flags realize
// the obstacle set; flags are kept symmetric and closed across the boundary.
class GridGraph {
 public:
  GridGraph() = default;
  GridGraph(int rows, int cols);  // all passages closed

  static GridGraph full_lattice(int rows, int cols);  // every interior passage open

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int node_count() const { return rows_ * cols_; }
  int node_index(NodeCoord n) const { return n.row * cols_ + n.col; }

  bool in_bounds(NodeCoord n) const {
    return n.row >= 0 && n.row < rows_ && n.col >= 0 && n.col < cols_;
  }

  bool is_open(NodeCoord n, Dir d) const;
  bool is_open(const GridEdge& e) const;

  // Opens the passage in both directions; both endpoints must be in bounds.
  void open_passage(NodeCoord n, Dir d);
  void open_passage(const GridEdge& e);
  void close_passage(NodeCoord n, Dir d);

  int degree(NodeCoord n) const;
  int edge_count() const;  // half the sum of open flags
  std::vector<GridEdge> open_edges() const;  // canonical, sorted

  bool is_connected() const;  // BFS from (0,0) reaches all nodes

  bool operator==(const GridGraph&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> open_;  // 4-bit mask per node, bit i = kDirs[i]
};

// A grid graph plus the terminals to connect; the unit of solving and
// benchmarking. Immutable after construction by convention.
struct MazeInstance {
  GridGraph graph;
  std::vector<NodeCoord> terminals;  // ordered for reproducibility; >= 2, distinct
  std::uint64_t seed = 0;
  std::string id;

  bool operator==(const MazeInstance&) const = default;
};

// An edge set intended to connect all terminals of an instance.
class SteinerTree {
 public:
  SteinerTree() = default;
  explicit SteinerTree(std::vector<GridEdge> edges);

  void insert(GridEdge e) { edges_.insert(e); }
  bool contains(const GridEdge& e) const { return edges_.count(e) > 0; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  const std::set<GridEdge>& edges() const { return edges_; }
  std::vector<NodeCoord> vertices() const;  // induced vertex set, sorted

  bool operator==(const SteinerTree&) const = default;

 private:
  std::set<GridEdge> edges_;
};

// Adjacent open neighbors of `node` in fixed North, East, South, West order.
std::vector<NodeCoord> neighbors(const GridGraph& graph, NodeCoord node);

// Total length under unit edge weights, i.e. the edge count.
int tree_length(const SteinerTree& tree);

struct TreeValidity {
  bool connected = false;
  bool spans_terminals = false;
  bool acyclic = false;
  bool uses_only_open_edges = false;

  bool all() const { return connected && spans_terminals && acyclic && uses_only_open_edges; }
};

// Each flag is computed independently; a tree is optimal-eligible iff all
// four hold. The empty edge set counts as connected and acyclic.
TreeValidity is_valid_tree(const MazeInstance& instance, const SteinerTree& tree);

}  // namespace maze
