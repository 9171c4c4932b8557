#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "maze/core.hpp"

namespace maze::dataset {

struct GenerateConfig {
  int rows = 5;
  int cols = 5;
  std::vector<int> terminal_counts = {2, 3, 4};  // cycled over instances
  int count = 0;
  int wall_removals = -1;  // -1: ceil(0.1 * rows * cols)
  std::uint64_t seed = 0;
  std::string id_prefix = "gen";

  void validate() const;
  int resolved_wall_removals() const;
};

struct Entry {
  MazeInstance instance;
  int optimal_length = 0;
  std::filesystem::path instance_path;
  std::filesystem::path target_path;
};

struct Dataset {
  std::vector<Entry> entries;
};

// Writes instances/NNNNNN.maze, targets/NNNNNN.pgm (the optimal tree raster)
// and manifest.json. Validates the config before touching the filesystem;
// reruns with the same config are byte-identical.
void generate(const GenerateConfig& config, const std::filesystem::path& out_dir);

Dataset load(const std::filesystem::path& dir);

}  // namespace maze::dataset
