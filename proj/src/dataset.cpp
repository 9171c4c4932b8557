#include "maze/dataset.hpp"

#include <fstream>

#include <json.hpp>

#include "maze/error.hpp"
#include "maze/exact.hpp"
#include "maze/instance_io.hpp"
#include "maze/mazegen.hpp"
#include "maze/raster.hpp"
#include "maze/rng.hpp"
#include "maze/tensor.hpp"

namespace maze::dataset {

namespace {

constexpr const char* kManifestSchema = "maze-dataset.v1";
constexpr const char* kGeneratorName = "dfs-backtracker/splitmix64";
constexpr int kGeneratorVersion = 1;

std::string padded(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return buf;
}

}  // namespace

void GenerateConfig::validate() const {
  if (rows < 2 || cols < 2) throw InputError("dataset grids must be at least 2x2");
  if (count < 1) throw InputError("dataset instance count must be positive");
  if (terminal_counts.empty()) throw InputError("dataset needs at least one terminal count");
  for (int n : terminal_counts) {
    if (n < 2) throw InputError("terminal counts must be at least 2");
    if (n > rows * cols) {
      throw InputError("terminal count " + std::to_string(n) + " exceeds the " +
                       std::to_string(rows * cols) + " nodes");
    }
    if (n > 12) throw InputError("terminal counts above 12 cannot be oracle-labeled");
  }
}

int GenerateConfig::resolved_wall_removals() const {
  return wall_removals >= 0 ? wall_removals : mazegen::default_wall_removals(rows, cols);
}

void generate(const GenerateConfig& config, const std::filesystem::path& out_dir) {
  config.validate();  // fail before any file is written

  std::filesystem::create_directories(out_dir / "instances");
  std::filesystem::create_directories(out_dir / "targets");

  nlohmann::json manifest;
  manifest["schema"] = kManifestSchema;
  manifest["generator"] = {{"name", kGeneratorName}, {"version", kGeneratorVersion}};
  manifest["config"] = {{"rows", config.rows},
                        {"cols", config.cols},
                        {"terminal_counts", config.terminal_counts},
                        {"count", config.count},
                        {"wall_removals", config.resolved_wall_removals()},
                        {"seed", config.seed},
                        {"id_prefix", config.id_prefix}};
  manifest["instances"] = nlohmann::json::array();

  Rng seed_stream(derive_seed(config.seed, 20));
  for (int i = 0; i < config.count; ++i) {
    mazegen::GenConfig gc;
    gc.rows = config.rows;
    gc.cols = config.cols;
    gc.n_terminals =
        config.terminal_counts[static_cast<std::size_t>(i) % config.terminal_counts.size()];
    gc.wall_removals = config.resolved_wall_removals();
    gc.seed = seed_stream.next_u64();

    MazeInstance inst = mazegen::generate_instance(gc);
    inst.id = config.id_prefix + "-" + padded(i);

    const exact::ExactResult oracle = exact::dreyfus_wagner(inst);
    const ImageTensor target = raster::tree_to_target(inst, oracle.tree);

    const std::string stem = padded(i);
    write_instance(inst, out_dir / "instances" / (stem + ".maze"));
    write_pixmap(target, out_dir / "targets" / (stem + ".pgm"));

    manifest["instances"].push_back({{"index", i},
                                     {"file", "instances/" + stem + ".maze"},
                                     {"target", "targets/" + stem + ".pgm"},
                                     {"id", inst.id},
                                     {"seed", gc.seed},
                                     {"terminals", gc.n_terminals},
                                     {"optimal_length", oracle.length}});
  }

  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  if (!out) throw InputError("cannot write manifest in " + out_dir.string());
  out << manifest.dump(2) << "\n";
}

Dataset load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in) throw InputError("no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(dir.string() + "/manifest.json: " + e.what());
  }
  if (manifest.value("schema", "") != kManifestSchema) {
    throw FormatError(dir.string() + ": unsupported manifest schema");
  }

  Dataset ds;
  for (const auto& item : manifest.at("instances")) {
    Entry entry;
    entry.instance_path = dir / item.at("file").get<std::string>();
    entry.target_path = dir / item.at("target").get<std::string>();
    entry.optimal_length = item.at("optimal_length").get<int>();
    entry.instance = read_instance(entry.instance_path);
    ds.entries.push_back(std::move(entry));
  }
  return ds;
}

}  // namespace maze::dataset
