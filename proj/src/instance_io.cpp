#include "maze/instance_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "maze/error.hpp"

namespace maze {

namespace {

constexpr const char* kHeader = "maze-instance v1";

std::string next_line(std::istringstream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(std::string("unexpected end of instance: missing ") + what);
  return line;
}

long long parse_field(const std::string& line, const std::string& key) {
  std::istringstream ls(line);
  std::string k;
  long long value = 0;
  if (!(ls >> k >> value) || k != key) {
    throw FormatError("expected '" + key + " <value>', got '" + line + "'");
  }
  return value;
}

}  // namespace

std::string serialize_instance(const MazeInstance& instance) {
  std::ostringstream out;
  out << kHeader << "\n";
  out << "id " << instance.id << "\n";
  out << "seed " << instance.seed << "\n";
  out << "rows " << instance.graph.rows() << "\n";
  out << "cols " << instance.graph.cols() << "\n";
  out << "terminals " << instance.terminals.size() << "\n";
  for (const NodeCoord& t : instance.terminals) out << t.row << " " << t.col << "\n";
  const std::vector<GridEdge> edges = instance.graph.open_edges();
  out << "open_edges " << edges.size() << "\n";
  for (const GridEdge& e : edges) {
    out << e.a.row << " " << e.a.col << " " << e.b.row << " " << e.b.col << "\n";
  }
  out << "end\n";
  return out.str();
}

void write_instance(const MazeInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << serialize_instance(instance);
}

MazeInstance parse_instance(const std::string& text) {
  std::istringstream in(text);
  if (next_line(in, "header") != kHeader) throw FormatError("bad instance header; expected '" + std::string(kHeader) + "'");

  MazeInstance inst;

  const std::string id_line = next_line(in, "id");
  if (id_line.rfind("id ", 0) != 0) throw FormatError("expected 'id <string>', got '" + id_line + "'");
  inst.id = id_line.substr(3);

  {
    const std::string seed_line = next_line(in, "seed");
    std::istringstream ls(seed_line);
    std::string k;
    std::uint64_t seed = 0;
    if (!(ls >> k >> seed) || k != "seed") throw FormatError("expected 'seed <u64>', got '" + seed_line + "'");
    inst.seed = seed;
  }

  const long long rows = parse_field(next_line(in, "rows"), "rows");
  const long long cols = parse_field(next_line(in, "cols"), "cols");
  if (rows < 2 || cols < 2 || rows > 1 << 16 || cols > 1 << 16) {
    throw FormatError("rows/cols out of range: " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  inst.graph = GridGraph(static_cast<int>(rows), static_cast<int>(cols));

  const long long n_terminals = parse_field(next_line(in, "terminals"), "terminals");
  if (n_terminals < 2) throw FormatError("instance needs at least 2 terminals");
  std::set<NodeCoord> seen;
  for (long long i = 0; i < n_terminals; ++i) {
    std::istringstream ls(next_line(in, "terminal entry"));
    NodeCoord t;
    if (!(ls >> t.row >> t.col)) throw FormatError("malformed terminal entry");
    if (!inst.graph.in_bounds(t)) throw FormatError("terminal outside lattice");
    if (!seen.insert(t).second) throw FormatError("duplicate terminal");
    inst.terminals.push_back(t);
  }

  const long long n_edges = parse_field(next_line(in, "open_edges"), "open_edges");
  for (long long i = 0; i < n_edges; ++i) {
    std::istringstream ls(next_line(in, "edge entry"));
    NodeCoord a, b;
    if (!(ls >> a.row >> a.col >> b.row >> b.col)) throw FormatError("malformed edge entry");
    if (!inst.graph.in_bounds(a) || !inst.graph.in_bounds(b)) throw FormatError("edge endpoint outside lattice");
    inst.graph.open_passage(GridEdge(a, b));  // rejects non-adjacent pairs
  }

  if (next_line(in, "end marker") != "end") throw FormatError("missing 'end' marker");

  if (!inst.graph.is_connected()) throw InputError("instance graph is not connected");
  return inst;
}

MazeInstance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open instance file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace maze
