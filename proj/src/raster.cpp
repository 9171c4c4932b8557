#include "maze/raster.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "maze/error.hpp"

namespace maze::raster {

namespace {

void fill_cell(ImageTensor& img, CellCoord cell, float r, float g, float b) {
  const int y0 = cell_pixel_origin(cell.ci);
  const int x0 = cell_pixel_origin(cell.cj);
  for (int dy = 0; dy < kCellPixels; ++dy) {
    for (int dx = 0; dx < kCellPixels; ++dx) {
      img.at(0, y0 + dy, x0 + dx) = r;
      if (img.channels > 1) {
        img.at(1, y0 + dy, x0 + dx) = g;
        img.at(2, y0 + dy, x0 + dx) = b;
      }
    }
  }
}

std::string cell_str(CellCoord c) {
  return "cell (" + std::to_string(c.ci) + "," + std::to_string(c.cj) + ")";
}

// Mean over the cell's pixel block in one channel.
float cell_mean(const ImageTensor& img, int channel, CellCoord cell) {
  const int y0 = cell_pixel_origin(cell.ci);
  const int x0 = cell_pixel_origin(cell.cj);
  float sum = 0.0f;
  for (int dy = 0; dy < kCellPixels; ++dy) {
    for (int dx = 0; dx < kCellPixels; ++dx) sum += img.at(channel, y0 + dy, x0 + dx);
  }
  return sum / static_cast<float>(kCellPixels * kCellPixels);
}

}  // namespace

std::pair<int, int> image_dims(int rows, int cols) {
  if (rows < 2 || cols < 2) throw InputError("image_dims requires at least a 2x2 lattice");
  return {kCellPixels * cell_rows(rows) + 2 * kPadding,
          kCellPixels * cell_cols(cols) + 2 * kPadding};
}

ImageTensor instance_to_image(const MazeInstance& instance) {
  const auto [h, w] = image_dims(instance.graph.rows(), instance.graph.cols());
  ImageTensor img(3, h, w);  // all black

  for (int r = 0; r < instance.graph.rows(); ++r) {
    for (int c = 0; c < instance.graph.cols(); ++c) {
      fill_cell(img, node_cell({r, c}), 1.0f, 1.0f, 1.0f);
    }
  }
  for (const GridEdge& e : instance.graph.open_edges()) {
    fill_cell(img, edge_cell(e), 1.0f, 1.0f, 1.0f);
  }
  for (const NodeCoord& t : instance.terminals) {
    fill_cell(img, node_cell(t), 0.0f, 1.0f, 0.0f);
  }
  return img;
}

ImageTensor tree_to_target(const MazeInstance& instance, const SteinerTree& tree) {
  // Structural validity only: the empty tree renders to an all-zero target,
  // so terminal coverage is not required here.
  const TreeValidity v = is_valid_tree(instance, tree);
  if (!v.uses_only_open_edges || !v.acyclic || !v.connected) {
    throw InputError("tree_to_target requires an open-edge, connected, acyclic tree");
  }

  const auto [h, w] = image_dims(instance.graph.rows(), instance.graph.cols());
  ImageTensor img(1, h, w);
  for (const NodeCoord& n : tree.vertices()) fill_cell(img, node_cell(n), 1.0f, 0, 0);
  for (const GridEdge& e : tree.edges()) fill_cell(img, edge_cell(e), 1.0f, 0, 0);
  return img;
}

MazeInstance image_to_instance(const ImageTensor& image) {
  if (image.channels != 3) throw FormatError("instance image must have 3 channels");
  if (image.height < 12 || image.width < 12 ||
      (image.height - 2 * kPadding) % (2 * kCellPixels) != kCellPixels ||
      (image.width - 2 * kPadding) % (2 * kCellPixels) != kCellPixels) {
    throw FormatError("image dimensions do not match the cell/padding geometry");
  }
  const int rows = (image.height - 2 * kPadding + kCellPixels) / (2 * kCellPixels);
  const int cols = (image.width - 2 * kPadding + kCellPixels) / (2 * kCellPixels);

  // All pixels must be exact 0/1 and every cell block uniform.
  for (float v : image.data) {
    if (v != 0.0f && v != 1.0f) throw FormatError("instance image is not binary");
  }
  // Pixels outside cell blocks (padding and the 1-pixel seams between blocks
  // do not exist in this geometry: blocks tile the interior) must be black.
  const int interior0 = kPadding;
  const int interior_h = kCellPixels * cell_rows(rows);
  const int interior_w = kCellPixels * cell_cols(cols);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const bool inside = y >= interior0 && y < interior0 + interior_h && x >= interior0 &&
                          x < interior0 + interior_w;
      if (!inside) {
        for (int c = 0; c < 3; ++c) {
          if (image.at(c, y, x) != 0.0f) {
            throw FormatError("padding pixel (" + std::to_string(y) + "," + std::to_string(x) +
                              ") is not black");
          }
        }
      }
    }
  }

  enum class CellColor { Black, White, Green };
  auto classify = [&](CellCoord cell) {
    const int y0 = cell_pixel_origin(cell.ci);
    const int x0 = cell_pixel_origin(cell.cj);
    const std::array<float, 3> first = {image.at(0, y0, x0), image.at(1, y0, x0),
                                        image.at(2, y0, x0)};
    for (int dy = 0; dy < kCellPixels; ++dy) {
      for (int dx = 0; dx < kCellPixels; ++dx) {
        for (int c = 0; c < 3; ++c) {
          if (image.at(c, y0 + dy, x0 + dx) != first[static_cast<std::size_t>(c)]) {
            throw FormatError("half-painted " + cell_str(cell));
          }
        }
      }
    }
    if (first == std::array<float, 3>{0, 0, 0}) return CellColor::Black;
    if (first == std::array<float, 3>{1, 1, 1}) return CellColor::White;
    if (first == std::array<float, 3>{0, 1, 0}) return CellColor::Green;
    throw FormatError("unrecognized color in " + cell_str(cell));
  };

  MazeInstance inst;
  inst.graph = GridGraph(rows, cols);
  inst.id = "decoded";

  for (int ci = 0; ci < cell_rows(rows); ++ci) {
    for (int cj = 0; cj < cell_cols(cols); ++cj) {
      const CellColor color = classify({ci, cj});
      const bool node = (ci % 2 == 0) && (cj % 2 == 0);
      const bool pillar = (ci % 2 == 1) && (cj % 2 == 1);
      if (node) {
        if (color == CellColor::Black) {
          throw FormatError("node " + cell_str(CellCoord{ci, cj}) + " must be white or green");
        }
        if (color == CellColor::Green) inst.terminals.push_back({ci / 2, cj / 2});
      } else if (pillar) {
        if (color != CellColor::Black) {
          throw FormatError("pillar " + cell_str(CellCoord{ci, cj}) + " must be black");
        }
      } else {
        if (color == CellColor::Green) {
          throw FormatError("edge " + cell_str(CellCoord{ci, cj}) + " cannot be a terminal");
        }
        if (color == CellColor::White) {
          const NodeCoord a{(ci - ci % 2) / 2, (cj - cj % 2) / 2};
          const NodeCoord b{(ci + ci % 2) / 2, (cj + cj % 2) / 2};
          inst.graph.open_passage(GridEdge(a, b));
        }
      }
    }
  }
  return inst;
}

SteinerTree prediction_to_edges(const ImageTensor& pred, const MazeInstance& instance) {
  if (pred.channels != 1) throw ContractError("prediction must be single-channel");
  const auto [h, w] = image_dims(instance.graph.rows(), instance.graph.cols());
  if (pred.height != h || pred.width != w) {
    throw ContractError("prediction dims do not match the instance raster");
  }

  auto lit = [&](CellCoord cell) { return cell_mean(pred, 0, cell) >= 0.5f; };

  // Candidate edges over the whole lattice; the prediction may claim closed
  // passages and validity is judged later.
  std::map<NodeCoord, std::vector<GridEdge>> adjacency;
  for (int r = 0; r < instance.graph.rows(); ++r) {
    for (int c = 0; c < instance.graph.cols(); ++c) {
      const NodeCoord a{r, c};
      for (Dir d : {Dir::East, Dir::South}) {
        const NodeCoord b = step(a, d);
        if (!instance.graph.in_bounds(b)) continue;
        const GridEdge e(a, b);
        if (lit(edge_cell(e)) && lit(node_cell(a)) && lit(node_cell(b))) {
          adjacency[a].push_back(e);
          adjacency[b].push_back(e);
        }
      }
    }
  }

  // Largest component containing at least one terminal (ties: the component
  // holding the smallest vertex), then a BFS spanning tree of it.
  std::set<NodeCoord> terminals(instance.terminals.begin(), instance.terminals.end());
  std::set<NodeCoord> assigned;
  std::vector<NodeCoord> best_component;
  for (const auto& [start, _] : adjacency) {
    if (assigned.count(start)) continue;
    std::vector<NodeCoord> component{start};
    assigned.insert(start);
    bool has_terminal = terminals.count(start) > 0;
    for (std::size_t head = 0; head < component.size(); ++head) {
      for (const GridEdge& e : adjacency.at(component[head])) {
        const NodeCoord other = (e.a == component[head]) ? e.b : e.a;
        if (assigned.insert(other).second) {
          component.push_back(other);
          has_terminal = has_terminal || terminals.count(other) > 0;
        }
      }
    }
    if (has_terminal && component.size() > best_component.size()) {
      best_component = std::move(component);
    }
  }

  SteinerTree tree;
  if (best_component.empty()) return tree;
  std::sort(best_component.begin(), best_component.end());
  std::set<NodeCoord> in_tree{best_component.front()};
  std::vector<NodeCoord> frontier{best_component.front()};
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    auto adj = adjacency.at(frontier[head]);
    std::sort(adj.begin(), adj.end());
    for (const GridEdge& e : adj) {
      const NodeCoord other = (e.a == frontier[head]) ? e.b : e.a;
      if (in_tree.insert(other).second) {
        tree.insert(e);
        frontier.push_back(other);
      }
    }
  }
  return tree;
}

}  // namespace maze::raster
