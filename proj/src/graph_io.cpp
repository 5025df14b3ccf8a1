#include "gelato/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gelato/binary_io.hpp"
#include "gelato/errors.hpp"
#include "gelato/text_format.hpp"

namespace gelato {

Graph read_edge_list(std::istream& in, bool undirected) {
  std::vector<Edge> edges;
  bool have_n = false;
  std::uint64_t n = 0;
  std::uint64_t max_id = 0;
  bool any_edge = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first == "n") {
      if (have_n || any_edge) {
        throw DataError("line " + std::to_string(lineno) + ": header must precede edges");
      }
      if (!(fields >> n)) throw DataError("line " + std::to_string(lineno) + ": bad header");
      have_n = true;
      continue;
    }
    std::string second, third, extra;
    if (!(fields >> second)) {
      throw DataError("line " + std::to_string(lineno) + ": expected 'u v [w]'");
    }
    Edge e;
    std::uint64_t u = 0, v = 0;
    if (!text::parse_u64(first, u) || !text::parse_u64(second, v) || u > 0xFFFFFFFEull ||
        v > 0xFFFFFFFEull) {
      throw DataError("line " + std::to_string(lineno) + ": bad node id");
    }
    e.u = static_cast<NodeId>(u);
    e.v = static_cast<NodeId>(v);
    if (fields >> third) {
      if (!text::parse_double(third, e.w)) {
        throw DataError("line " + std::to_string(lineno) + ": bad weight '" + third + "'");
      }
    }
    if (fields >> extra) throw DataError("line " + std::to_string(lineno) + ": trailing fields");
    max_id = std::max<std::uint64_t>(max_id, std::max(u, v));
    any_edge = true;
    edges.push_back(e);
  }
  if (!have_n) n = any_edge ? max_id + 1 : 0;
  if (n > 0xFFFFFFFFull) throw DataError("node count too large");
  return Graph::from_edges(static_cast<NodeId>(n), edges, undirected);
}

Graph read_edge_list(const std::filesystem::path& path, bool undirected) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list " + path.string());
  return read_edge_list(in, undirected);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n " << g.num_nodes() << '\n';
  for (const Edge& e : g.edge_list()) {
    out << e.u << ' ' << e.v;
    if (e.w != 1.0) out << ' ' << text::format_double(e.w);
    out << '\n';
  }
}

AttributeMatrix read_attributes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open attribute file " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  const bool binary = in.gcount() == 4 && std::string(magic, 4) == "GATR";
  in.clear();
  in.seekg(0);
  return binary ? read_attributes_binary(in) : read_attributes_csv(in);
}

AttributeMatrix read_attributes_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                       : comma - start);
      double x = 0.0;
      if (!text::parse_double(text::trim(cell), x)) {
        throw DataError("attribute row " + std::to_string(rows) + ": bad value '" + cell + "'");
      }
      values.push_back(x);
      ++count;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw DataError("attribute row " + std::to_string(rows) + " has " + std::to_string(count) +
                      " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  return AttributeMatrix(rows, cols, std::move(values));
}

AttributeMatrix read_attributes_binary(std::istream& in) {
  binio::expect_magic(in, "GATR");
  const auto n = binio::read_le<std::uint64_t>(in, "attribute rows");
  const auto r = binio::read_le<std::uint64_t>(in, "attribute cols");
  if (r != 0 && n > (std::uint64_t{1} << 40) / r) throw DataError("attribute matrix too large");
  std::vector<double> values(n * r);
  for (auto& x : values) x = binio::read_le<float>(in, "attribute value");
  return AttributeMatrix(n, r, std::move(values));
}

void write_attributes_binary(std::ostream& out, const AttributeMatrix& x) {
  out.write("GATR", 4);
  binio::write_le<std::uint64_t>(out, x.rows());
  binio::write_le<std::uint64_t>(out, x.cols());
  for (double v : x.values()) binio::write_le<float>(out, static_cast<float>(v));
}

void write_attributes_csv(std::ostream& out, const AttributeMatrix& x) {
  for (NodeId u = 0; u < x.rows(); ++u) {
    const auto row = x.row(u);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      out << text::format_double(row[k]);
    }
    out << '\n';
  }
}

}  // namespace gelato
