#pragma once

#include <chrono>
#include <optional>
#include <set>

#include "maze/core.hpp"
#include "maze/net.hpp"
#include "maze/raster.hpp"

namespace maze::tc {

struct TCConfig {
  double whiteness_threshold = 0.65;
  int first_batch = 30;  // recurrent iterations before the first check
  int batch_step = 10;   // iterations between subsequent checks
  int max_iterations = 200;

  void validate() const;
};

struct TCReport {
  bool solved = false;
  std::set<raster::CellCoord> visited_cells;
  std::optional<SteinerTree> extracted_tree;
  int iterations_used = 0;  // filled by solve(); explore alone leaves it 0
};

// Mean of the cell's pixel block in a binary prediction; one of
// {0, 0.25, 0.5, 0.75, 1} for well-formed inputs.
double whiteness(const ImageTensor& pred, raster::CellCoord cell);

// Guided search over the prediction: starting at the upper-leftmost terminal
// cell, repeatedly moves through neighboring cells whose whiteness exceeds
// the threshold (preferring higher whiteness, then N,E,W,S order), branching
// at junctions and cutting any branch that reaches a visited cell. Consults
// only the prediction and the terminal coordinates, never the walls. Reports
// solved only when every terminal cell was visited and the traversed edges
// certify one connected, acyclic tree spanning the terminals.
TCReport tc_explore(const ImageTensor& pred, const MazeInstance& instance,
                    double whiteness_threshold = 0.65);

// Debug overlay: the prediction dimmed to half intensity with every visited
// cell painted full white. Written next to failing runs when tracing.
ImageTensor visited_overlay(const ImageTensor& pred, const TCReport& report);

struct SolveResult {
  SteinerTree tree;
  int length = 0;
  int iterations_used = 0;
  int tc_checks = 0;
  std::chrono::duration<double> elapsed{};
  bool solved = false;
};

// Batch-scheduled inference: rasterize, run first_batch recurrent iterations,
// check, then batch_step more per round until solved or the cap. On the cap
// the best-effort decode of the last prediction is returned with
// solved=false.
SolveResult solve(const MazeInstance& instance, const net::NetworkWeights& weights,
                  const TCConfig& config);

}  // namespace maze::tc
