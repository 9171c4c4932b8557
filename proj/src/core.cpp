#include "maze/core.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <queue>

#include "maze/error.hpp"

namespace maze {

namespace {

std::string coord_str(NodeCoord n) {
  return "(" + std::to_string(n.row) + "," + std::to_string(n.col) + ")";
}

}  // namespace

GridGraph::GridGraph(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 2 || cols < 2) {
    throw InputError("grid dimensions must be at least 2x2, got " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  open_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
}

GridGraph GridGraph::full_lattice(int rows, int cols) {
  GridGraph g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) g.open_passage({r, c}, Dir::East);
      if (r + 1 < rows) g.open_passage({r, c}, Dir::South);
    }
  }
  return g;
}

bool GridGraph::is_open(NodeCoord n, Dir d) const {
  if (!in_bounds(n) || !in_bounds(step(n, d))) return false;  // boundary flags stay closed
  return (open_[static_cast<std::size_t>(node_index(n))] >> static_cast<unsigned>(d)) & 1u;
}

bool GridGraph::is_open(const GridEdge& e) const {
  for (Dir d : kDirs) {
    if (step(e.a, d) == e.b) return is_open(e.a, d);
  }
  return false;
}

void GridGraph::open_passage(NodeCoord n, Dir d) {
  const NodeCoord m = step(n, d);
  if (!in_bounds(n) || !in_bounds(m)) {
    throw InputError("cannot open passage off the lattice at " + coord_str(n));
  }
  open_[static_cast<std::size_t>(node_index(n))] |= (1u << static_cast<unsigned>(d));
  open_[static_cast<std::size_t>(node_index(m))] |= (1u << static_cast<unsigned>(opposite(d)));
}

void GridGraph::open_passage(const GridEdge& e) {
  for (Dir d : kDirs) {
    if (step(e.a, d) == e.b) {
      open_passage(e.a, d);
      return;
    }
  }
  throw InputError("edge endpoints are not lattice-adjacent: " + coord_str(e.a) + "-" +
                   coord_str(e.b));
}

void GridGraph::close_passage(NodeCoord n, Dir d) {
  const NodeCoord m = step(n, d);
  if (!in_bounds(n) || !in_bounds(m)) return;
  open_[static_cast<std::size_t>(node_index(n))] &= ~(1u << static_cast<unsigned>(d));
  open_[static_cast<std::size_t>(node_index(m))] &= ~(1u << static_cast<unsigned>(opposite(d)));
}

int GridGraph::degree(NodeCoord n) const {
  return std::popcount(static_cast<unsigned>(open_[static_cast<std::size_t>(node_index(n))]));
}

int GridGraph::edge_count() const {
  int flags = 0;
  for (std::uint8_t m : open_) flags += std::popcount(static_cast<unsigned>(m));
  return flags / 2;
}

std::vector<GridEdge> GridGraph::open_edges() const {
  std::vector<GridEdge> edges;
  edges.reserve(static_cast<std::size_t>(edge_count()));
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const NodeCoord n{r, c};
      if (is_open(n, Dir::East)) edges.emplace_back(n, step(n, Dir::East));
      if (is_open(n, Dir::South)) edges.emplace_back(n, step(n, Dir::South));
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

bool GridGraph::is_connected() const {
  if (node_count() == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(node_count()), 0);
  std::queue<NodeCoord> q;
  q.push({0, 0});
  seen[0] = 1;
  int visited = 1;
  while (!q.empty()) {
    const NodeCoord n = q.front();
    q.pop();
    for (Dir d : kDirs) {
      if (!is_open(n, d)) continue;
      const NodeCoord m = step(n, d);
      auto& flag = seen[static_cast<std::size_t>(node_index(m))];
      if (!flag) {
        flag = 1;
        ++visited;
        q.push(m);
      }
    }
  }
  return visited == node_count();
}

SteinerTree::SteinerTree(std::vector<GridEdge> edges) : edges_(edges.begin(), edges.end()) {}

std::vector<NodeCoord> SteinerTree::vertices() const {
  std::set<NodeCoord> verts;
  for (const GridEdge& e : edges_) {
    verts.insert(e.a);
    verts.insert(e.b);
  }
  return {verts.begin(), verts.end()};
}

std::vector<NodeCoord> neighbors(const GridGraph& graph, NodeCoord node) {
  if (!graph.in_bounds(node)) {
    throw InputError("node " + coord_str(node) + " outside " + std::to_string(graph.rows()) +
                     "x" + std::to_string(graph.cols()) + " lattice");
  }
  std::vector<NodeCoord> out;
  out.reserve(4);
  for (Dir d : kDirs) {
    if (graph.is_open(node, d)) out.push_back(step(node, d));
  }
  return out;
}

int tree_length(const SteinerTree& tree) { return static_cast<int>(tree.size()); }

TreeValidity is_valid_tree(const MazeInstance& instance, const SteinerTree& tree) {
  TreeValidity v;

  v.uses_only_open_edges = true;
  for (const GridEdge& e : tree.edges()) {
    if (!instance.graph.in_bounds(e.a) || !instance.graph.in_bounds(e.b) ||
        !instance.graph.is_open(e)) {
      v.uses_only_open_edges = false;
      break;
    }
  }

  // Union-find over induced vertices: component count for connectivity,
  // cycle detection for acyclicity.
  const std::vector<NodeCoord> verts = tree.vertices();
  std::map<NodeCoord, int> index;
  for (std::size_t i = 0; i < verts.size(); ++i) index[verts[i]] = static_cast<int>(i);
  std::vector<int> parent(verts.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  v.acyclic = true;
  for (const GridEdge& e : tree.edges()) {
    const int ra = find(index.at(e.a));
    const int rb = find(index.at(e.b));
    if (ra == rb) {
      v.acyclic = false;
    } else {
      parent[static_cast<std::size_t>(ra)] = rb;
    }
  }

  int components = 0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (find(static_cast<int>(i)) == static_cast<int>(i)) ++components;
  }
  v.connected = components <= 1;  // empty edge set is vacuously connected

  // Pure membership flag; together with `connected` it implies mutual
  // reachability of the terminals.
  v.spans_terminals = !instance.terminals.empty();
  for (const NodeCoord& t : instance.terminals) {
    if (!index.count(t)) {
      v.spans_terminals = false;
      break;
    }
  }

  return v;
}

}  // namespace maze
