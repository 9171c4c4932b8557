#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "maze/core.hpp"

namespace maze {

// Line-oriented instance interchange format, version 1:
//
//   maze-instance v1
//   id <opaque string, no newline>
//   seed <u64>
//   rows <int>
//   cols <int>
//   terminals <count>
//   <row> <col>          (count lines, generator order)
//   open_edges <count>
//   <r1> <c1> <r2> <c2>  (count lines, canonical order, lexicographically sorted)
//   end
//
// Serialization is byte-deterministic; golden files pin the schema.
std::string serialize_instance(const MazeInstance& instance);
void write_instance(const MazeInstance& instance, const std::filesystem::path& path);

// Parses and validates: field ranges, edge adjacency, terminal distinctness,
// and graph connectivity. Throws FormatError / InputError.
MazeInstance parse_instance(const std::string& text);
MazeInstance read_instance(const std::filesystem::path& path);

}  // namespace maze
