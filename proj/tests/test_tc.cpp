#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maze/error.hpp"
#include "maze/exact.hpp"
#include "maze/mazegen.hpp"
#include "maze/raster.hpp"
#include "maze/tc.hpp"

using namespace maze;
using namespace maze::tc;

namespace {

MazeInstance random_instance(int rows, int cols, int n, std::uint64_t seed) {
  mazegen::GenConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.n_terminals = n;
  cfg.wall_removals = mazegen::default_wall_removals(rows, cols);
  cfg.seed = seed;
  return mazegen::generate_instance(cfg);
}

void paint_cell(ImageTensor& img, raster::CellCoord cell, float v) {
  for (int dy = 0; dy < raster::kCellPixels; ++dy) {
    for (int dx = 0; dx < raster::kCellPixels; ++dx) {
      img.at(0, raster::cell_pixel_origin(cell.ci) + dy, raster::cell_pixel_origin(cell.cj) + dx) =
          v;
    }
  }
}

// Weights that argmax to all-ones: only the class-1 bias of the last head
// layer is set. Useful to drive solve() to a deterministic success.
net::NetworkWeights all_white_weights() {
  net::NetworkConfig cfg;
  cfg.width = 8;
  net::NetworkWeights w = net::init_weights(cfg, 1);
  for (auto& l : w.layers) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0f);
    std::fill(l.bias.begin(), l.bias.end(), 0.0f);
  }
  w.layers[8].bias[1] = 1.0f;
  return w;
}

}  // namespace

TEST_CASE("whiteness averages the cell block") {
  const MazeInstance inst = random_instance(3, 3, 2, 4);
  ImageTensor pred(1, 16, 16);

  paint_cell(pred, {0, 0}, 1.0f);
  CHECK(whiteness(pred, {0, 0}) == doctest::Approx(1.0));

  pred.at(0, raster::kPadding, raster::kPadding) = 0.0f;  // 3 of 4 pixels lit
  CHECK(whiteness(pred, {0, 0}) == doctest::Approx(0.75));
  CHECK(whiteness(pred, {0, 0}) > 0.65);  // traversable

  pred.at(0, raster::kPadding, raster::kPadding + 1) = 0.0f;  // 2 of 4
  CHECK(whiteness(pred, {0, 0}) == doctest::Approx(0.5));
  CHECK_FALSE(whiteness(pred, {0, 0}) > 0.65);

  CHECK(whiteness(pred, {1, 1}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(whiteness(pred, {5, 0}), InputError);
}

TEST_CASE("exploring a rendered oracle tree recovers it exactly") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const MazeInstance inst = random_instance(5, 5, 2 + static_cast<int>(seed % 4), seed);
    const SteinerTree oracle = exact::dreyfus_wagner(inst).tree;
    const TCReport report = tc_explore(raster::tree_to_target(inst, oracle), inst);
    REQUIRE(report.solved);
    REQUIRE(report.extracted_tree.has_value());
    CHECK(*report.extracted_tree == oracle);
    CHECK(tree_length(*report.extracted_tree) == tree_length(oracle));
  }
}

TEST_CASE("all-black prediction fails after zero moves") {
  const MazeInstance inst = random_instance(5, 5, 3, 7);
  const auto [h, w] = raster::image_dims(5, 5);
  const TCReport report = tc_explore(ImageTensor(1, h, w), inst);
  CHECK_FALSE(report.solved);
  CHECK(report.visited_cells.empty());
  CHECK_FALSE(report.extracted_tree.has_value());
}

TEST_CASE("deleting one terminal's arm breaks the exploration") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 80 && checked < 25; ++seed) {
    const MazeInstance inst = random_instance(5, 5, 3, 900 + seed);
    const SteinerTree oracle = exact::dreyfus_wagner(inst).tree;

    // Remove the leaf edge at a terminal that is not the start terminal.
    const NodeCoord start = *std::min_element(inst.terminals.begin(), inst.terminals.end());
    NodeCoord leaf{-1, -1};
    for (const NodeCoord& t : inst.terminals) {
      if (t == start) continue;
      int degree = 0;
      for (const GridEdge& e : oracle.edges()) {
        if (e.a == t || e.b == t) ++degree;
      }
      if (degree == 1) {
        leaf = t;
        break;
      }
    }
    if (leaf.row < 0) continue;  // all candidate terminals are interior

    SteinerTree cut;
    for (const GridEdge& e : oracle.edges()) {
      if (e.a == leaf || e.b == leaf) continue;
      cut.insert(e);
    }
    ImageTensor pred = raster::tree_to_target(inst, oracle);
    // Repaint from the cut tree: the leaf terminal's branch goes dark.
    pred = ImageTensor(1, pred.height, pred.width);
    for (const NodeCoord& v : cut.vertices()) paint_cell(pred, raster::node_cell(v), 1.0f);
    for (const GridEdge& e : cut.edges()) paint_cell(pred, raster::edge_cell(e), 1.0f);

    const TCReport report = tc_explore(pred, inst);
    CHECK_FALSE(report.solved);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("junction-heavy prediction still certifies a spanning tree") {
  // An all-white prediction is one giant junction lattice: the walk must
  // terminate, visit every terminal, and certify a spanning tree of the
  // full node lattice (cycles reduced away).
  const MazeInstance inst = random_instance(5, 5, 4, 31);
  const auto [h, w] = raster::image_dims(5, 5);
  ImageTensor pred(1, h, w);
  for (float& v : pred.data) v = 1.0f;
  const TCReport report = tc_explore(pred, inst);
  REQUIRE(report.solved);
  CHECK(tree_length(*report.extracted_tree) == 24);  // spanning tree of 25 nodes
  const TreeValidity validity = is_valid_tree(inst, *report.extracted_tree);
  CHECK(validity.connected);
  CHECK(validity.acyclic);
  CHECK(validity.spans_terminals);
}

TEST_CASE("visited overlay marks explored cells at full intensity") {
  const MazeInstance inst = random_instance(5, 5, 2, 8);
  const SteinerTree oracle = exact::dreyfus_wagner(inst).tree;
  const ImageTensor target = raster::tree_to_target(inst, oracle);
  const TCReport report = tc_explore(target, inst);
  REQUIRE(report.solved);
  const ImageTensor overlay = visited_overlay(target, report);
  CHECK(overlay.height == target.height);
  const raster::CellCoord start = raster::node_cell(
      *std::min_element(inst.terminals.begin(), inst.terminals.end()));
  CHECK(overlay.at(0, raster::cell_pixel_origin(start.ci), raster::cell_pixel_origin(start.cj)) ==
        1.0f);
  CHECK(overlay.at(0, 0, 0) == 0.0f);  // padding stays dark
}

TEST_CASE("tc config validation") {
  TCConfig cfg;
  cfg.whiteness_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = TCConfig{};
  cfg.max_iterations = 5;
  CHECK_THROWS_AS(cfg.validate(), InputError);  // below first_batch
  cfg = TCConfig{};
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("solve accepts at the first checkpoint when the prediction spans") {
  const MazeInstance inst = random_instance(5, 5, 3, 77);
  const net::NetworkWeights w = all_white_weights();
  TCConfig cfg;
  cfg.first_batch = 4;
  cfg.batch_step = 2;
  cfg.max_iterations = 10;
  const SolveResult result = solve(inst, w, cfg);
  CHECK(result.solved);
  CHECK(result.iterations_used == 4);
  CHECK(result.tc_checks == 1);
  CHECK(result.length == 24);  // all-white extracts the full spanning tree
}

TEST_CASE("solve runs the full schedule on hopeless predictions") {
  const MazeInstance inst = random_instance(5, 5, 3, 78);
  net::NetworkConfig ncfg;
  ncfg.width = 8;
  // Random weights: argmax images are noise and essentially never connect.
  const net::NetworkWeights w = net::init_weights(ncfg, 5151);
  TCConfig cfg;
  cfg.first_batch = 3;
  cfg.batch_step = 2;
  cfg.max_iterations = 9;
  const SolveResult result = solve(inst, w, cfg);
  CHECK_FALSE(result.solved);
  CHECK(result.iterations_used == 9);  // 3,5,7,9
  CHECK(result.tc_checks == 4);
}
