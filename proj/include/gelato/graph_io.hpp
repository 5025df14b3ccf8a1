#pragma once

#include <filesystem>
#include <iosfwd>

#include "gelato/attributes.hpp"
#include "gelato/graph.hpp"

namespace gelato {

// Edge-list text: one "u v" or "u v w" per line, 0-based ids, '#' starts a
// comment. An optional "n <count>" header fixes the node count; otherwise
// n = max id + 1. Each undirected edge is listed once.
Graph read_edge_list(std::istream& in, bool undirected = true);
Graph read_edge_list(const std::filesystem::path& path, bool undirected = true);
void write_edge_list(std::ostream& out, const Graph& g);

// Attribute files are either CSV (one row per node) or binary:
//   "GATR" | u64 n | u64 r | n*r f32 row-major, all little-endian.
// The binary form is detected by its magic bytes.
AttributeMatrix read_attributes(const std::filesystem::path& path);
AttributeMatrix read_attributes_csv(std::istream& in);
AttributeMatrix read_attributes_binary(std::istream& in);
void write_attributes_binary(std::ostream& out, const AttributeMatrix& x);
void write_attributes_csv(std::ostream& out, const AttributeMatrix& x);

}  // namespace gelato
