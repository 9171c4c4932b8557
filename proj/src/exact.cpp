#include "maze/exact.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <map>
#include <numeric>

#include "maze/error.hpp"

namespace maze::exact {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kUnreached = std::numeric_limits<int>::max();

// Flat-index BFS over the grid, reusable across many calls.
struct BfsScratch {
  std::vector<int> dist;
  std::vector<int> parent;  // node index of the predecessor, -1 at sources
  std::vector<int> queue;

  void run(const GridGraph& g, int source) {
    run_multi(g, {source});
  }

  void run_multi(const GridGraph& g, const std::vector<int>& sources) {
    const int v = g.node_count();
    dist.assign(static_cast<std::size_t>(v), kUnreached);
    parent.assign(static_cast<std::size_t>(v), -1);
    queue.clear();
    for (int s : sources) {
      dist[static_cast<std::size_t>(s)] = 0;
      queue.push_back(s);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int ni = queue[head];
      const NodeCoord n{ni / g.cols(), ni % g.cols()};
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
};

NodeCoord coord_of(const GridGraph& g, int index) { return {index / g.cols(), index % g.cols()}; }

// Open-edge index: 2 slots per node, slot 0 = East, slot 1 = South.
int edge_slot(const GridGraph& g, const GridEdge& e) {
  const Dir d = (e.a.row == e.b.row) ? Dir::East : Dir::South;
  return g.node_index(e.a) * 2 + (d == Dir::East ? 0 : 1);
}

// Deterministic spanning tree of an edge set: BFS from the smallest vertex,
// neighbors visited in canonical edge order.
SteinerTree spanning_tree_of(const std::vector<GridEdge>& edges) {
  SteinerTree out;
  if (edges.empty()) return out;
  std::map<NodeCoord, std::vector<GridEdge>> adjacency;
  for (const GridEdge& e : edges) {
    adjacency[e.a].push_back(e);
    adjacency[e.b].push_back(e);
  }
  for (auto& [node, adj] : adjacency) std::sort(adj.begin(), adj.end());

  std::set<NodeCoord> seen;
  std::vector<NodeCoord> frontier;
  const NodeCoord start = adjacency.begin()->first;
  seen.insert(start);
  frontier.push_back(start);
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const NodeCoord n = frontier[head];
    for (const GridEdge& e : adjacency.at(n)) {
      const NodeCoord other = (e.a == n) ? e.b : e.a;
      if (seen.insert(other).second) {
        out.insert(e);
        frontier.push_back(other);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<NodeCoord> bfs_shortest_path(const GridGraph& graph, NodeCoord a, NodeCoord b) {
  if (!graph.in_bounds(a) || !graph.in_bounds(b)) {
    throw InputError("bfs_shortest_path endpoint outside lattice");
  }
  BfsScratch scratch;
  scratch.run(graph, graph.node_index(a));
  const int bi = graph.node_index(b);
  if (scratch.dist[static_cast<std::size_t>(bi)] == kUnreached) {
    throw InputError("no path between the requested nodes");
  }
  std::vector<NodeCoord> path;
  for (int cur = bi; cur != -1; cur = scratch.parent[static_cast<std::size_t>(cur)]) {
    path.push_back(coord_of(graph, cur));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

ExactResult dijkstra_exhaustive(const MazeInstance& instance) {
  const auto t0 = Clock::now();
  const int n = static_cast<int>(instance.terminals.size());
  if (n < 2) throw InputError("dijkstra_exhaustive needs at least 2 terminals");

  const GridGraph& g = instance.graph;
  std::vector<int> term_idx(instance.terminals.size());
  for (std::size_t i = 0; i < instance.terminals.size(); ++i) {
    term_idx[i] = g.node_index(instance.terminals[i]);
  }

  BfsScratch scratch;
  const int slots = g.node_count() * 2;
  std::vector<std::uint32_t> stamp(static_cast<std::size_t>(slots), 0);
  std::uint32_t epoch = 0;

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);

  int best_union = std::numeric_limits<int>::max();
  std::vector<int> best_perm;
  std::uint64_t explored = 0;

  do {
    // Canonical representative under reversal: skip the larger of the pair.
    bool keep = true;
    for (int i = 0, j = n - 1; i < j; ++i, --j) {
      if (perm[static_cast<std::size_t>(i)] != perm[static_cast<std::size_t>(j)]) {
        keep = perm[static_cast<std::size_t>(i)] < perm[static_cast<std::size_t>(j)];
        break;
      }
    }
    if (!keep) continue;
    ++explored;

    ++epoch;
    int union_size = 0;
    for (int i = 0; i + 1 < n; ++i) {
      // Orient each pair by node index so a chain and its reversal chain the
      // exact same per-pair paths.
      int u = term_idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
      int v = term_idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(i + 1)])];
      if (u > v) std::swap(u, v);
      scratch.run(g, u);
      for (int cur = v; cur != u;) {
        const int prev = scratch.parent[static_cast<std::size_t>(cur)];
        const GridEdge e(coord_of(g, cur), coord_of(g, prev));
        const int slot = edge_slot(g, e);
        if (stamp[static_cast<std::size_t>(slot)] != epoch) {
          stamp[static_cast<std::size_t>(slot)] = epoch;
          ++union_size;
        }
        cur = prev;
      }
    }
    if (union_size < best_union) {
      best_union = union_size;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  // Rebuild the winning union and extract its spanning tree.
  std::set<GridEdge> union_edges;
  for (int i = 0; i + 1 < static_cast<int>(best_perm.size()); ++i) {
    int u = term_idx[static_cast<std::size_t>(best_perm[static_cast<std::size_t>(i)])];
    int v = term_idx[static_cast<std::size_t>(best_perm[static_cast<std::size_t>(i + 1)])];
    if (u > v) std::swap(u, v);
    scratch.run(g, u);
    for (int cur = v; cur != u;) {
      const int prev = scratch.parent[static_cast<std::size_t>(cur)];
      union_edges.insert(GridEdge(coord_of(g, cur), coord_of(g, prev)));
      cur = prev;
    }
  }

  ExactResult result;
  result.tree = spanning_tree_of({union_edges.begin(), union_edges.end()});
  result.length = tree_length(result.tree);
  result.explored_permutations = explored;
  result.elapsed = Clock::now() - t0;
  return result;
}

ExactResult dreyfus_wagner(const MazeInstance& instance) {
  const auto t0 = Clock::now();
  const int n = static_cast<int>(instance.terminals.size());
  if (n < 2) throw InputError("dreyfus_wagner needs at least 2 terminals");
  if (n > 12) {
    throw CapacityError("dreyfus_wagner capped at 12 terminals, got " + std::to_string(n));
  }

  const GridGraph& g = instance.graph;
  const int v_count = g.node_count();
  const int root = g.node_index(instance.terminals[0]);

  // Subsets range over terminals[1..]; the DP state dp[S][v] is the minimum
  // cost of a tree connecting {terminals[i+1] : i in S} together with v.
  const int k = n - 1;
  const int full = (1 << k) - 1;
  constexpr int kInf = std::numeric_limits<int>::max() / 4;

  std::vector<std::vector<int>> dp(static_cast<std::size_t>(full) + 1,
                                   std::vector<int>(static_cast<std::size_t>(v_count), kInf));
  // Backtracking records: -2 none, -1 base, >= 0 merge split mask. A
  // separate predecessor table holds extension steps (neighbor index or -1).
  std::vector<std::vector<int>> choice(static_cast<std::size_t>(full) + 1,
                                       std::vector<int>(static_cast<std::size_t>(v_count), -2));
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(full) + 1,
                                     std::vector<int>(static_cast<std::size_t>(v_count), -1));

  BfsScratch base_scratch;
  std::vector<std::vector<int>> base_parent(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const int ti = g.node_index(instance.terminals[static_cast<std::size_t>(i + 1)]);
    base_scratch.run(g, ti);
    base_parent[static_cast<std::size_t>(i)] = base_scratch.parent;
    auto& row = dp[static_cast<std::size_t>(1 << i)];
    for (int vtx = 0; vtx < v_count; ++vtx) {
      row[static_cast<std::size_t>(vtx)] = base_scratch.dist[static_cast<std::size_t>(vtx)];
      choice[static_cast<std::size_t>(1 << i)][static_cast<std::size_t>(vtx)] = -1;
    }
  }

  // Relaxation with arbitrary initial labels on unit weights: a bucket queue
  // over label values replaces the usual priority queue (tree costs are
  // bounded by the vertex count, so labels fit in [0, 2V]).
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(2 * v_count + 2));
  for (int mask = 1; mask <= full; ++mask) {
    auto& row = dp[static_cast<std::size_t>(mask)];
    if ((mask & (mask - 1)) != 0) {  // not a singleton: merge sub-splits
      for (int sub = (mask - 1) & mask; sub > (mask ^ sub); sub = (sub - 1) & mask) {
        const auto& a = dp[static_cast<std::size_t>(sub)];
        const auto& b = dp[static_cast<std::size_t>(mask ^ sub)];
        for (int vtx = 0; vtx < v_count; ++vtx) {
          const int cost = a[static_cast<std::size_t>(vtx)] + b[static_cast<std::size_t>(vtx)];
          if (cost < row[static_cast<std::size_t>(vtx)]) {
            row[static_cast<std::size_t>(vtx)] = cost;
            choice[static_cast<std::size_t>(mask)][static_cast<std::size_t>(vtx)] = sub;
            pred[static_cast<std::size_t>(mask)][static_cast<std::size_t>(vtx)] = -1;
          }
        }
      }
    }
    const int max_label = 2 * v_count + 1;
    for (auto& bucket : buckets) bucket.clear();
    for (int vtx = 0; vtx < v_count; ++vtx) {
      const int label = row[static_cast<std::size_t>(vtx)];
      if (label < max_label) buckets[static_cast<std::size_t>(label)].push_back(vtx);
    }
    for (int d = 0; d <= max_label; ++d) {
      for (std::size_t at = 0; at < buckets[static_cast<std::size_t>(d)].size(); ++at) {
        const int vtx = buckets[static_cast<std::size_t>(d)][at];
        if (row[static_cast<std::size_t>(vtx)] != d) continue;  // stale entry
        const NodeCoord nc = coord_of(g, vtx);
        for (Dir dir : kDirs) {
          if (!g.is_open(nc, dir)) continue;
          const int next = g.node_index(step(nc, dir));
          if (d + 1 < row[static_cast<std::size_t>(next)]) {
            row[static_cast<std::size_t>(next)] = d + 1;
            choice[static_cast<std::size_t>(mask)][static_cast<std::size_t>(next)] = -2;
            pred[static_cast<std::size_t>(mask)][static_cast<std::size_t>(next)] = vtx;
            buckets[static_cast<std::size_t>(d + 1)].push_back(next);
          }
        }
      }
    }
  }

  // Reconstruct edges by unwinding extensions, merges, and base paths.
  SteinerTree tree;
  std::vector<std::pair<int, int>> work;  // (mask, vertex)
  if (k > 0) work.push_back({full, root});
  while (!work.empty()) {
    auto [mask, vtx] = work.back();
    work.pop_back();
    // Walk extension predecessors back to the decision point.
    while (pred[static_cast<std::size_t>(mask)][static_cast<std::size_t>(vtx)] != -1) {
      const int prev = pred[static_cast<std::size_t>(mask)][static_cast<std::size_t>(vtx)];
      tree.insert(GridEdge(coord_of(g, vtx), coord_of(g, prev)));
      vtx = prev;
    }
    const int c = choice[static_cast<std::size_t>(mask)][static_cast<std::size_t>(vtx)];
    if (c == -1) {
      // Base: walk the BFS parents back to the singleton terminal.
      int bit = 0;
      while ((mask & (1 << bit)) == 0) ++bit;
      const auto& parents = base_parent[static_cast<std::size_t>(bit)];
      for (int cur = vtx; parents[static_cast<std::size_t>(cur)] != -1;) {
        const int prev = parents[static_cast<std::size_t>(cur)];
        tree.insert(GridEdge(coord_of(g, cur), coord_of(g, prev)));
        cur = prev;
      }
    } else if (c >= 0) {
      work.push_back({c, vtx});
      work.push_back({mask ^ c, vtx});
    }
    // c == -2 with no predecessor means dp came straight from initialization,
    // which only happens for singleton masks handled above.
  }

  ExactResult result;
  result.tree = tree;
  result.length = tree_length(tree);
  assert(result.length == dp[static_cast<std::size_t>(full)][static_cast<std::size_t>(root)]);
  result.explored_permutations = 0;
  result.elapsed = Clock::now() - t0;
  return result;
}

int subset_enumeration_oracle(const MazeInstance& instance) {
  const GridGraph& g = instance.graph;
  const int v_count = g.node_count();
  if (v_count > 16) {
    throw CapacityError("subset_enumeration_oracle capped at 16 nodes, got " +
                        std::to_string(v_count));
  }

  // All-pairs distances by BFS from every node.
  BfsScratch scratch;
  std::vector<std::vector<int>> dist(static_cast<std::size_t>(v_count));
  for (int s = 0; s < v_count; ++s) {
    scratch.run(g, s);
    dist[static_cast<std::size_t>(s)] = scratch.dist;
  }

  std::uint32_t terminal_mask = 0;
  for (const NodeCoord& t : instance.terminals) {
    terminal_mask |= (1u << g.node_index(t));
  }
  std::vector<int> free_nodes;
  for (int i = 0; i < v_count; ++i) {
    if (!(terminal_mask & (1u << i))) free_nodes.push_back(i);
  }

  int best = std::numeric_limits<int>::max();
  const std::uint32_t n_free = static_cast<std::uint32_t>(free_nodes.size());
  std::vector<int> members;
  std::vector<int> key(static_cast<std::size_t>(v_count));
  std::vector<char> in_mst(static_cast<std::size_t>(v_count));
  for (std::uint32_t fs = 0; fs < (1u << n_free); ++fs) {
    members.clear();
    for (int i = 0; i < v_count; ++i) {
      if (terminal_mask & (1u << i)) members.push_back(i);
    }
    for (std::uint32_t b = 0; b < n_free; ++b) {
      if (fs & (1u << b)) members.push_back(free_nodes[static_cast<std::size_t>(b)]);
    }
    // Prim over the metric closure restricted to `members`.
    int cost = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      key[i] = std::numeric_limits<int>::max();
      in_mst[i] = 0;
    }
    key[0] = 0;
    for (std::size_t round = 0; round < members.size(); ++round) {
      int best_i = -1;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (!in_mst[i] && (best_i < 0 || key[i] < key[static_cast<std::size_t>(best_i)])) {
          best_i = static_cast<int>(i);
        }
      }
      in_mst[static_cast<std::size_t>(best_i)] = 1;
      cost += key[static_cast<std::size_t>(best_i)];
      const auto& drow = dist[static_cast<std::size_t>(members[static_cast<std::size_t>(best_i)])];
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (!in_mst[i]) {
          key[i] = std::min(key[i], drow[static_cast<std::size_t>(members[i])]);
        }
      }
    }
    best = std::min(best, cost);
  }
  return best;
}

}  // namespace maze::exact
