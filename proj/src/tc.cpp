#include "maze/tc.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <vector>

#include "maze/error.hpp"

namespace maze::tc {

namespace {

using raster::CellCoord;

// Neighbor offsets in the N,E,W,S evaluation order.
constexpr std::array<std::pair<int, int>, 4> kNews = {{{-1, 0}, {0, 1}, {0, -1}, {1, 0}}};

struct CellLattice {
  int rows = 0;  // cell rows
  int cols = 0;

  bool contains(CellCoord c) const { return c.ci >= 0 && c.ci < rows && c.cj >= 0 && c.cj < cols; }
  int index(CellCoord c) const { return c.ci * cols + c.cj; }
};

CellLattice lattice_of(const ImageTensor& pred) {
  const int interior_h = pred.height - 2 * raster::kPadding;
  const int interior_w = pred.width - 2 * raster::kPadding;
  if (interior_h <= 0 || interior_w <= 0 || interior_h % raster::kCellPixels != 0 ||
      interior_w % raster::kCellPixels != 0) {
    throw InputError("prediction dims do not form a cell lattice");
  }
  return {interior_h / raster::kCellPixels, interior_w / raster::kCellPixels};
}

}  // namespace

void TCConfig::validate() const {
  if (!(whiteness_threshold > 0.0 && whiteness_threshold < 1.0)) {
    throw InputError("whiteness threshold must lie in (0,1)");
  }
  if (first_batch < 1 || batch_step < 1) throw InputError("batch sizes must be at least 1");
  if (max_iterations < first_batch) throw InputError("max_iterations below the first batch");
}

double whiteness(const ImageTensor& pred, CellCoord cell) {
  if (pred.channels != 1) throw InputError("whiteness expects a single-channel prediction");
  const CellLattice lattice = lattice_of(pred);
  if (!lattice.contains(cell)) {
    throw InputError("cell (" + std::to_string(cell.ci) + "," + std::to_string(cell.cj) +
                     ") outside the " + std::to_string(lattice.rows) + "x" +
                     std::to_string(lattice.cols) + " cell lattice");
  }
  const int y0 = raster::cell_pixel_origin(cell.ci);
  const int x0 = raster::cell_pixel_origin(cell.cj);
  double sum = 0;
  for (int dy = 0; dy < raster::kCellPixels; ++dy) {
    for (int dx = 0; dx < raster::kCellPixels; ++dx) sum += pred.at(0, y0 + dy, x0 + dx);
  }
  return sum / (raster::kCellPixels * raster::kCellPixels);
}

TCReport tc_explore(const ImageTensor& pred, const MazeInstance& instance,
                    double whiteness_threshold) {
  const auto [h, w] = raster::image_dims(instance.graph.rows(), instance.graph.cols());
  if (pred.channels != 1 || pred.height != h || pred.width != w) {
    throw InputError("prediction dims do not match the instance raster");
  }
  const CellLattice lattice{raster::cell_rows(instance.graph.rows()),
                            raster::cell_cols(instance.graph.cols())};

  TCReport report;
  const NodeCoord start_terminal =
      *std::min_element(instance.terminals.begin(), instance.terminals.end());
  const CellCoord start = raster::node_cell(start_terminal);

  std::vector<char> visited(static_cast<std::size_t>(lattice.rows * lattice.cols), 0);
  auto traversable = [&](CellCoord c) { return whiteness(pred, c) > whiteness_threshold; };

  if (traversable(start)) {
    // Depth-first exploration with an explicit stack (cell counts can exceed
    // safe recursion depth). At each position every traversable unvisited
    // direction is pursued, higher whiteness first, N,E,W,S on ties; a branch
    // that reaches a visited cell ends there. The global visited set makes
    // the walk terminate after at most 4 pushes per cell.
    std::vector<CellCoord> stack{start};
    std::size_t budget = 4u * static_cast<std::size_t>(lattice.rows) *
                         static_cast<std::size_t>(lattice.cols);
    while (!stack.empty()) {
      const CellCoord cur = stack.back();
      stack.pop_back();
      auto& mark = visited[static_cast<std::size_t>(lattice.index(cur))];
      if (mark) continue;  // a revisited position terminates that branch
      mark = 1;

      struct Move {
        double whiteness;
        int news_rank;
        CellCoord cell;
      };
      std::array<Move, 4> moves;
      int n_moves = 0;
      for (int d = 0; d < 4; ++d) {
        const CellCoord next{cur.ci + kNews[static_cast<std::size_t>(d)].first,
                             cur.cj + kNews[static_cast<std::size_t>(d)].second};
        if (!lattice.contains(next) || visited[static_cast<std::size_t>(lattice.index(next))]) {
          continue;
        }
        const double white = whiteness(pred, next);
        if (white > whiteness_threshold) moves[static_cast<std::size_t>(n_moves++)] = {white, d, next};
      }
      std::sort(moves.begin(), moves.begin() + n_moves, [](const Move& a, const Move& b) {
        return a.whiteness != b.whiteness ? a.whiteness > b.whiteness : a.news_rank < b.news_rank;
      });
      // Push in reverse so the preferred direction is explored first.
      for (int i = n_moves - 1; i >= 0; --i) {
        if (budget-- == 0) throw ContractError("exploration exceeded its visit budget");
        stack.push_back(moves[static_cast<std::size_t>(i)].cell);
      }
    }
  }

  for (int ci = 0; ci < lattice.rows; ++ci) {
    for (int cj = 0; cj < lattice.cols; ++cj) {
      if (visited[static_cast<std::size_t>(lattice.index({ci, cj}))]) {
        report.visited_cells.insert({ci, cj});
      }
    }
  }

  bool all_terminals_visited = true;
  for (const NodeCoord& t : instance.terminals) {
    if (!visited[static_cast<std::size_t>(lattice.index(raster::node_cell(t)))]) {
      all_terminals_visited = false;
      break;
    }
  }
  if (!all_terminals_visited) return report;

  // Traversed grid edges: connector and both endpoint cells visited. The
  // walk can loop in cell space, so reduce to a spanning tree and certify
  // that the start component still contains every terminal.
  auto cell_visited = [&](CellCoord c) {
    return visited[static_cast<std::size_t>(lattice.index(c))] != 0;
  };
  std::map<NodeCoord, std::vector<GridEdge>> adjacency;
  for (int r = 0; r < instance.graph.rows(); ++r) {
    for (int c = 0; c < instance.graph.cols(); ++c) {
      const NodeCoord a{r, c};
      for (Dir d : {Dir::East, Dir::South}) {
        const NodeCoord b = step(a, d);
        if (!instance.graph.in_bounds(b)) continue;
        const GridEdge e(a, b);
        if (cell_visited(raster::node_cell(a)) && cell_visited(raster::node_cell(b)) &&
            cell_visited(raster::edge_cell(e))) {
          adjacency[a].push_back(e);
          adjacency[b].push_back(e);
        }
      }
    }
  }

  SteinerTree tree;
  std::set<NodeCoord> in_tree{start_terminal};
  std::vector<NodeCoord> frontier{start_terminal};
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    auto it = adjacency.find(frontier[head]);
    if (it == adjacency.end()) continue;
    for (const GridEdge& e : it->second) {
      const NodeCoord other = (e.a == frontier[head]) ? e.b : e.a;
      if (in_tree.insert(other).second) {
        tree.insert(e);
        frontier.push_back(other);
      }
    }
  }

  bool spans = true;
  for (const NodeCoord& t : instance.terminals) {
    if (!in_tree.count(t)) {
      spans = false;
      break;
    }
  }
  if (spans) {
    report.solved = true;
    report.extracted_tree = std::move(tree);
  }
  return report;
}

ImageTensor visited_overlay(const ImageTensor& pred, const TCReport& report) {
  ImageTensor out = pred;
  for (float& v : out.data) v *= 0.5f;
  for (const CellCoord& cell : report.visited_cells) {
    const int y0 = raster::cell_pixel_origin(cell.ci);
    const int x0 = raster::cell_pixel_origin(cell.cj);
    for (int dy = 0; dy < raster::kCellPixels; ++dy) {
      for (int dx = 0; dx < raster::kCellPixels; ++dx) out.at(0, y0 + dy, x0 + dx) = 1.0f;
    }
  }
  return out;
}

SolveResult solve(const MazeInstance& instance, const net::NetworkWeights& weights,
                  const TCConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  net::validate_chain(weights);
  if (weights.config.input_channels != 3) {
    throw ContractError("weights are incompatible with 3-channel instance rasters");
  }

  const ImageTensor input = raster::instance_to_image(instance);
  SolveResult result;

  ImageTensor state = net::project(input, weights.config, weights.layers);
  int iterations_done = 0;
  ImageTensor last_pred;
  for (int checkpoint = config.first_batch; checkpoint <= config.max_iterations;
       checkpoint += config.batch_step) {
    while (iterations_done < checkpoint) {
      state = net::rb_iterate(input, state, weights.config, weights.layers);
      ++iterations_done;
    }
    last_pred = net::argmax_image(net::head(state, weights.config, weights.layers));
    ++result.tc_checks;
    result.iterations_used = iterations_done;
    TCReport report = tc_explore(last_pred, instance, config.whiteness_threshold);
    if (report.solved) {
      result.solved = true;
      result.tree = std::move(*report.extracted_tree);
      result.length = tree_length(result.tree);
      result.elapsed = std::chrono::steady_clock::now() - t0;
      return result;
    }
  }

  // Cap reached: best-effort decode of the last checked prediction.
  if (last_pred.channels == 1) {
    result.tree = raster::prediction_to_edges(last_pred, instance);
    result.length = tree_length(result.tree);
  }
  result.solved = false;
  result.elapsed = std::chrono::steady_clock::now() - t0;
  return result;
}

}  // namespace maze::tc
