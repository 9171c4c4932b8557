#include "maze/approx.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "maze/error.hpp"

namespace maze::approx {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kUnreached = std::numeric_limits<int>::max();

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

// Weighted edge between two terminal indices, with the realizing grid path
// identified by how each solver expands it.
struct TerminalEdge {
  int weight = 0;
  int ti = 0;  // terminal indices, ti < tj by sorted coordinate order
  int tj = 0;
};

NodeCoord coord_of(const GridGraph& g, int index) { return {index / g.cols(), index % g.cols()}; }

// MST over terminal edges; ties resolved by the canonical (coordinate-sorted)
// terminal pair, which the callers encode in (ti, tj).
std::vector<TerminalEdge> closure_mst(std::vector<TerminalEdge> edges, int n_terminals) {
  std::sort(edges.begin(), edges.end(), [](const TerminalEdge& a, const TerminalEdge& b) {
    return std::tie(a.weight, a.ti, a.tj) < std::tie(b.weight, b.ti, b.tj);
  });
  UnionFind uf(static_cast<std::size_t>(n_terminals));
  std::vector<TerminalEdge> mst;
  for (const TerminalEdge& e : edges) {
    if (uf.unite(e.ti, e.tj)) mst.push_back(e);
  }
  return mst;
}

// Spanning tree of a connected grid-edge subgraph followed by iterative
// removal of non-terminal leaves. Kruskal over canonical edge order keeps the
// result deterministic.
SteinerTree mst_and_prune(const std::set<GridEdge>& subgraph, const MazeInstance& instance) {
  std::map<NodeCoord, int> vertex_id;
  for (const GridEdge& e : subgraph) {
    vertex_id.emplace(e.a, 0);
    vertex_id.emplace(e.b, 0);
  }
  int next = 0;
  for (auto& [node, id] : vertex_id) id = next++;

  UnionFind uf(vertex_id.size());
  std::map<NodeCoord, std::vector<GridEdge>> adjacency;
  std::size_t kept = 0;
  for (const GridEdge& e : subgraph) {  // std::set iterates in canonical order
    if (uf.unite(vertex_id.at(e.a), vertex_id.at(e.b))) {
      adjacency[e.a].push_back(e);
      adjacency[e.b].push_back(e);
      ++kept;
    }
  }

  std::set<NodeCoord> terminals(instance.terminals.begin(), instance.terminals.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = adjacency.begin(); it != adjacency.end();) {
      if (it->second.size() == 1 && !terminals.count(it->first)) {
        const GridEdge e = it->second.front();
        const NodeCoord other = (e.a == it->first) ? e.b : e.a;
        auto& other_adj = adjacency.at(other);
        other_adj.erase(std::find(other_adj.begin(), other_adj.end(), e));
        it = adjacency.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }

  SteinerTree tree;
  for (const auto& [node, adj] : adjacency) {
    for (const GridEdge& e : adj) tree.insert(e);
  }
  (void)kept;
  return tree;
}

// Breadth-first distances and parents from one source, expansion in the fixed
// direction order.
void bfs_from(const GridGraph& g, int source, std::vector<int>& dist, std::vector<int>& parent) {
  const int v = g.node_count();
  dist.assign(static_cast<std::size_t>(v), kUnreached);
  parent.assign(static_cast<std::size_t>(v), -1);
  std::vector<int> queue;
  queue.push_back(source);
  dist[static_cast<std::size_t>(source)] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int ni = queue[head];
    const NodeCoord n = coord_of(g, ni);
    for (Dir d : kDirs) {
      if (!g.is_open(n, d)) continue;
      const int mi = g.node_index(step(n, d));
      if (dist[static_cast<std::size_t>(mi)] != kUnreached) continue;
      dist[static_cast<std::size_t>(mi)] = dist[static_cast<std::size_t>(ni)] + 1;
      parent[static_cast<std::size_t>(mi)] = ni;
      queue.push_back(mi);
    }
  }
}

// Terminals sorted by coordinate give both solvers a terminal-order-invariant
// tie-break base.
std::vector<NodeCoord> sorted_terminals(const MazeInstance& instance) {
  std::vector<NodeCoord> ts = instance.terminals;
  std::sort(ts.begin(), ts.end());
  return ts;
}

}  // namespace

ApproxResult kou(const MazeInstance& instance) {
  const auto t0 = Clock::now();
  if (instance.terminals.size() < 2) throw InputError("kou needs at least 2 terminals");
  const GridGraph& g = instance.graph;
  const std::vector<NodeCoord> terms = sorted_terminals(instance);
  const int n = static_cast<int>(terms.size());

  std::vector<std::vector<int>> dist(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> parent(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    bfs_from(g, g.node_index(terms[static_cast<std::size_t>(i)]), dist[static_cast<std::size_t>(i)],
             parent[static_cast<std::size_t>(i)]);
  }

  std::vector<TerminalEdge> closure;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      closure.push_back({dist[static_cast<std::size_t>(i)]
                             [static_cast<std::size_t>(g.node_index(terms[static_cast<std::size_t>(j)]))],
                         i, j});
    }
  }

  std::set<GridEdge> expanded;
  for (const TerminalEdge& e : closure_mst(std::move(closure), n)) {
    // Walk from terminal tj back to terminal ti along ti's BFS parents.
    const auto& par = parent[static_cast<std::size_t>(e.ti)];
    const int start = g.node_index(terms[static_cast<std::size_t>(e.tj)]);
    for (int cur = start; par[static_cast<std::size_t>(cur)] != -1;) {
      const int prev = par[static_cast<std::size_t>(cur)];
      expanded.insert(GridEdge(coord_of(g, cur), coord_of(g, prev)));
      cur = prev;
    }
  }

  ApproxResult result;
  result.tree = mst_and_prune(expanded, instance);
  result.length = tree_length(result.tree);
  result.elapsed = Clock::now() - t0;
  return result;
}

ApproxResult mehlhorn(const MazeInstance& instance) {
  const auto t0 = Clock::now();
  if (instance.terminals.size() < 2) throw InputError("mehlhorn needs at least 2 terminals");
  const GridGraph& g = instance.graph;
  const std::vector<NodeCoord> terms = sorted_terminals(instance);
  const int n = static_cast<int>(terms.size());
  const int v_count = g.node_count();

  // One multi-source pass: nearest terminal, distance, and parent per vertex.
  std::vector<int> dist(static_cast<std::size_t>(v_count), kUnreached);
  std::vector<int> parent(static_cast<std::size_t>(v_count), -1);
  std::vector<int> source(static_cast<std::size_t>(v_count), -1);
  std::vector<int> queue;
  for (int i = 0; i < n; ++i) {
    const int ti = g.node_index(terms[static_cast<std::size_t>(i)]);
    dist[static_cast<std::size_t>(ti)] = 0;
    source[static_cast<std::size_t>(ti)] = i;
    queue.push_back(ti);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int ni = queue[head];
    const NodeCoord nc = coord_of(g, ni);
    for (Dir d : kDirs) {
      if (!g.is_open(nc, d)) continue;
      const int mi = g.node_index(step(nc, d));
      if (dist[static_cast<std::size_t>(mi)] != kUnreached) continue;
      dist[static_cast<std::size_t>(mi)] = dist[static_cast<std::size_t>(ni)] + 1;
      parent[static_cast<std::size_t>(mi)] = ni;
      source[static_cast<std::size_t>(mi)] = source[static_cast<std::size_t>(ni)];
      queue.push_back(mi);
    }
  }

  // Cheapest boundary grid edge per terminal pair, scanned in canonical edge
  // order so ties pick a deterministic realizing edge.
  std::map<std::pair<int, int>, std::pair<int, GridEdge>> best_boundary;
  for (const GridEdge& e : g.open_edges()) {
    const int u = g.node_index(e.a);
    const int v = g.node_index(e.b);
    int su = source[static_cast<std::size_t>(u)];
    int sv = source[static_cast<std::size_t>(v)];
    if (su == sv) continue;
    const int w = dist[static_cast<std::size_t>(u)] + 1 + dist[static_cast<std::size_t>(v)];
    const std::pair<int, int> key{std::min(su, sv), std::max(su, sv)};
    auto it = best_boundary.find(key);
    if (it == best_boundary.end() || w < it->second.first) {
      best_boundary[key] = {w, e};
    }
  }

  std::vector<TerminalEdge> aux;
  aux.reserve(best_boundary.size());
  for (const auto& [key, value] : best_boundary) {
    aux.push_back({value.first, key.first, key.second});
  }

  std::set<GridEdge> expanded;
  for (const TerminalEdge& e : closure_mst(std::move(aux), n)) {
    const GridEdge boundary = best_boundary.at({e.ti, e.tj}).second;
    expanded.insert(boundary);
    for (int cur : {g.node_index(boundary.a), g.node_index(boundary.b)}) {
      while (parent[static_cast<std::size_t>(cur)] != -1) {
        const int prev = parent[static_cast<std::size_t>(cur)];
        expanded.insert(GridEdge(coord_of(g, cur), coord_of(g, prev)));
        cur = prev;
      }
    }
  }

  ApproxResult result;
  result.tree = mst_and_prune(expanded, instance);
  result.length = tree_length(result.tree);
  result.elapsed = Clock::now() - t0;
  return result;
}

}  // namespace maze::approx
