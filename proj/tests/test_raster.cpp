#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "maze/error.hpp"
#include "maze/exact.hpp"
#include "maze/mazegen.hpp"
#include "maze/raster.hpp"
#include "maze/tensor.hpp"

using namespace maze;
using namespace maze::raster;

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

bool same_maze(const MazeInstance& a, const MazeInstance& b) {
  // Seed, id and terminal order are not image-borne.
  const std::set<NodeCoord> ta(a.terminals.begin(), a.terminals.end());
  const std::set<NodeCoord> tb(b.terminals.begin(), b.terminals.end());
  return a.graph == b.graph && ta == tb;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("image_dims follows the cell/padding formula") {
  CHECK(image_dims(11, 11) == std::pair{48, 48});
  CHECK(image_dims(5, 5) == std::pair{24, 24});
  CHECK(image_dims(2, 2) == std::pair{12, 12});
  CHECK(image_dims(3, 7) == std::pair{16, 32});
  CHECK_THROWS_AS(image_dims(1, 5), InputError);
}

TEST_CASE("instance_to_image geometry and counts") {
  const MazeInstance inst = random_instance(11, 11, 3, 5);
  const ImageTensor img = instance_to_image(inst);
  CHECK(img.channels == 3);
  CHECK(img.height == 48);
  CHECK(img.width == 48);

  // Closed-form white-pixel count: node cells + open-edge cells, 4 px each;
  // terminals are green, i.e. white only in the green channel.
  const int open_edges = inst.graph.edge_count();
  const int white_cells = 121 + open_edges - 3;  // minus green terminal cells
  int all_white = 0, green_only = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const bool r = img.at(0, y, x) == 1.0f;
      const bool g = img.at(1, y, x) == 1.0f;
      const bool b = img.at(2, y, x) == 1.0f;
      if (r && g && b) ++all_white;
      if (!r && g && !b) ++green_only;
    }
  }
  CHECK(all_white == 4 * white_cells);
  CHECK(green_only == 4 * 3);
}

TEST_CASE("codec roundtrip recovers walls and terminals") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MazeInstance inst =
        random_instance(3 + static_cast<int>(seed % 6), 3 + static_cast<int>((seed / 2) % 5),
                        2 + static_cast<int>(seed % 3), seed);
    CHECK(same_maze(image_to_instance(instance_to_image(inst)), inst));
  }
}

TEST_CASE("hand-made 12x12 image of the full 2x2 lattice decodes") {
  const MazeInstance full{GridGraph::full_lattice(2, 2), {{0, 0}, {1, 1}}, 0, "full"};
  const MazeInstance decoded = image_to_instance(instance_to_image(full));
  CHECK(decoded.graph.node_count() == 4);
  CHECK(decoded.graph.edge_count() == 4);
}

TEST_CASE("decode rejects malformed geometry") {
  const MazeInstance inst = random_instance(3, 3, 2, 9);
  ImageTensor img = instance_to_image(inst);

  SUBCASE("half-painted cell") {
    img.at(0, kPadding, kPadding) = 0.0f;  // damage one pixel of node cell (0,0)
    CHECK_THROWS_WITH_AS(image_to_instance(img), doctest::Contains("half-painted"), FormatError);
  }
  SUBCASE("non-binary pixel") {
    img.at(1, kPadding, kPadding) = 0.5f;
    CHECK_THROWS_AS(image_to_instance(img), FormatError);
  }
  SUBCASE("painted padding") {
    img.at(0, 0, 0) = 1.0f;
    CHECK_THROWS_AS(image_to_instance(img), FormatError);
  }
  SUBCASE("green edge cell") {
    // Edge cell between nodes (0,0) and (0,1) painted green.
    const CellCoord edge{0, 1};
    for (int dy = 0; dy < kCellPixels; ++dy) {
      for (int dx = 0; dx < kCellPixels; ++dx) {
        img.at(0, cell_pixel_origin(edge.ci) + dy, cell_pixel_origin(edge.cj) + dx) = 0.0f;
        img.at(1, cell_pixel_origin(edge.ci) + dy, cell_pixel_origin(edge.cj) + dx) = 1.0f;
        img.at(2, cell_pixel_origin(edge.ci) + dy, cell_pixel_origin(edge.cj) + dx) = 0.0f;
      }
    }
    CHECK_THROWS_AS(image_to_instance(img), FormatError);
  }
  SUBCASE("wrong dims") {
    CHECK_THROWS_AS(image_to_instance(ImageTensor(3, 13, 12)), FormatError);
  }
}

TEST_CASE("tree_to_target renders vertices and edges") {
  const MazeInstance inst = random_instance(5, 5, 3, 21);

  SUBCASE("empty tree renders all-zero") {
    const ImageTensor img = tree_to_target(inst, SteinerTree{});
    for (float v : img.data) CHECK(v == 0.0f);
  }

  SUBCASE("single edge lights three cells, twelve pixels") {
    GridEdge first{};
    bool found = false;
    for (const GridEdge& e : inst.graph.open_edges()) {
      first = e;
      found = true;
      break;
    }
    REQUIRE(found);
    SteinerTree t;
    t.insert(first);
    const ImageTensor img = tree_to_target(inst, t);
    float sum = 0;
    for (float v : img.data) sum += v;
    CHECK(sum == 12.0f);
  }

  SUBCASE("a cyclic edge set is rejected") {
    const MazeInstance open_inst{GridGraph::full_lattice(3, 3), {{0, 0}, {2, 2}}, 0, "x"};
    SteinerTree cycle;
    cycle.insert(GridEdge({0, 0}, {0, 1}));
    cycle.insert(GridEdge({0, 1}, {1, 1}));
    cycle.insert(GridEdge({1, 1}, {1, 0}));
    cycle.insert(GridEdge({1, 0}, {0, 0}));
    CHECK_THROWS_AS(tree_to_target(open_inst, cycle), InputError);
  }
}

TEST_CASE("prediction decoding inverts target rendering") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const MazeInstance inst = random_instance(5, 5, 2 + static_cast<int>(seed % 3), seed + 50);
    const SteinerTree oracle = exact::dreyfus_wagner(inst).tree;
    const SteinerTree decoded = prediction_to_edges(tree_to_target(inst, oracle), inst);
    CHECK(decoded == oracle);
  }
}

TEST_CASE("prediction decoding prunes junk") {
  const MazeInstance inst = random_instance(7, 7, 2, 11);
  const SteinerTree oracle = exact::dreyfus_wagner(inst).tree;
  ImageTensor pred = tree_to_target(inst, oracle);

  SUBCASE("all-black prediction yields the empty tree") {
    const ImageTensor black(1, pred.height, pred.width);
    const SteinerTree t = prediction_to_edges(black, inst);
    CHECK(t.empty());
    CHECK_FALSE(is_valid_tree(inst, t).spans_terminals);
  }

  SUBCASE("an off-path white blob is discarded by component pruning") {
    // Find a node with no adjacency to the oracle tree and paint it plus one
    // neighbor: a 1-edge blob, smaller than the main component.
    const std::vector<NodeCoord> verts = oracle.vertices();
    const std::set<NodeCoord> in_tree(verts.begin(), verts.end());
    bool planted = false;
    for (int r = 0; r < 7 && !planted; ++r) {
      for (int c = 0; c + 1 < 7 && !planted; ++c) {
        const NodeCoord a{r, c}, b{r, c + 1};
        if (in_tree.count(a) || in_tree.count(b)) continue;
        for (const CellCoord cell : {node_cell(a), node_cell(b), edge_cell(GridEdge(a, b))}) {
          for (int dy = 0; dy < kCellPixels; ++dy) {
            for (int dx = 0; dx < kCellPixels; ++dx) {
              pred.at(0, cell_pixel_origin(cell.ci) + dy, cell_pixel_origin(cell.cj) + dx) = 1.0f;
            }
          }
        }
        planted = true;
      }
    }
    REQUIRE(planted);
    CHECK(prediction_to_edges(pred, inst) == oracle);
  }
}

TEST_CASE("pixmap golden files pin the pixel geometry") {
  const MazeInstance full{GridGraph::full_lattice(2, 2), {{0, 0}, {1, 1}}, 0, "full"};
  CHECK(to_pixmap(instance_to_image(full)) ==
        read_file(std::string(MAZE_GOLDEN_DIR) + "/lattice_2x2.ppm"));

  SteinerTree path;
  path.insert(GridEdge({0, 0}, {0, 1}));
  path.insert(GridEdge({0, 1}, {1, 1}));
  CHECK(to_pixmap(tree_to_target(full, path)) ==
        read_file(std::string(MAZE_GOLDEN_DIR) + "/target_2x2.pgm"));
}

TEST_CASE("pixmap text roundtrips through the reader") {
  const MazeInstance inst = random_instance(4, 5, 2, 3);
  const ImageTensor img = instance_to_image(inst);
  const auto tmp = std::filesystem::temp_directory_path() / "maze_px_roundtrip.ppm";
  write_pixmap(img, tmp);
  CHECK(read_pixmap(tmp) == img);
  std::filesystem::remove(tmp);
}

TEST_CASE("binary tensor block roundtrips byte-exactly") {
  ImageTensor t(2, 3, 4);
  for (std::size_t i = 0; i < t.data.size(); ++i) t.data[i] = 0.125f * static_cast<float>(i) - 1.0f;
  const auto tmp = std::filesystem::temp_directory_path() / "maze_tensor_roundtrip.mztb";
  write_tensor(t, tmp);
  CHECK(read_tensor(tmp) == t);
  std::filesystem::remove(tmp);

  SUBCASE("truncated tensor fails") {
    std::ofstream out(tmp, std::ios::binary);
    out << "MZTB";
    out.close();
    CHECK_THROWS_AS(read_tensor(tmp), FormatError);
    std::filesystem::remove(tmp);
  }
}
