#pragma once

#include <compare>
#include <utility>

#include "maze/core.hpp"
#include "maze/tensor.hpp"

namespace maze::raster {

// Pixel geometry: every cell is a kCellPixels square block and the cell
// lattice sits inside a kPadding frame. These two constants define the whole
// codec and appear nowhere else.
inline constexpr int kCellPixels = 2;
inline constexpr int kPadding = 3;

// Coordinate on the (2*rows-1) x (2*cols-1) cell lattice. Node (r,c) maps to
// cell (2r,2c); the cell between two adjacent nodes represents their edge.
struct CellCoord {
  int ci = 0;
  int cj = 0;
  auto operator<=>(const CellCoord&) const = default;
};

inline int cell_rows(int rows) { return 2 * rows - 1; }
inline int cell_cols(int cols) { return 2 * cols - 1; }
inline CellCoord node_cell(NodeCoord n) { return {2 * n.row, 2 * n.col}; }
inline CellCoord edge_cell(const GridEdge& e) {
  return {e.a.row + e.b.row, e.a.col + e.b.col};
}
inline int cell_pixel_origin(int cell_index) { return kPadding + kCellPixels * cell_index; }

std::pair<int, int> image_dims(int rows, int cols);

// 3-channel raster: node cells and open-edge cells white, terminal node cells
// green (0,1,0), everything else (walls, blocked edges, padding) black.
ImageTensor instance_to_image(const MazeInstance& instance);

// 1-channel target: cells of tree vertices and tree edges set to 1, terminal
// cells included; all else 0. Throws InputError for trees that fail validity.
ImageTensor tree_to_target(const MazeInstance& instance, const SteinerTree& tree);

// Exact inverse of instance_to_image. Seed and id are not image-borne, so the
// decode leaves them at 0 / "decoded"; terminals come back in row-major
// order. Throws FormatError naming the offending pixel block on malformed
// geometry.
MazeInstance image_to_instance(const ImageTensor& image);

// Decodes a binary prediction into an edge set: an edge counts iff its
// connector cell and both endpoint node cells average >= 0.5, then the result
// is pruned to a spanning tree of the largest terminal-containing component.
// May return an invalid tree; callers judge it via is_valid_tree.
SteinerTree prediction_to_edges(const ImageTensor& pred, const MazeInstance& instance);

}  // namespace maze::raster
