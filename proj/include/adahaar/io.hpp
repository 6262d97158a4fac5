#pragma once

// JSON and CSV formats for partitions, graphs, chains, framelet systems,
// vertex blocks, coefficients and signals. Object keys come out sorted, so
// output is byte-stable for identical input.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adahaar/embedding.hpp"
#include "adahaar/framelets.hpp"
#include "adahaar/graphs.hpp"
#include "adahaar/hierarchy.hpp"

namespace adahaar::io {

using Json = nlohmann::json;

/// Throws ParseError on malformed text.
Json parse_json(std::string_view text);
/// Two-space indent, trailing newline.
std::string dump_json(const Json& j);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);
Json read_json_file(const std::filesystem::path& path);

/// 17 significant digits.
std::string format_double(double x);

// {dimension, depth, blocks: [{id, sides: [[lo_num, lo_den, hi_num, hi_den]]}], children: {id: [ids]}}
Json partition_to_json(const HierarchicalPartition& p);
HierarchicalPartition partition_from_json(const Json& j);

// {labels, directed, edges: [[u, v, w]]}; u, v are indices or labels. A dense
// "matrix" may replace "edges". Undirected graphs list each edge once, u ≤ v.
Json graph_to_json(const Digraph& g, bool directed);
Digraph digraph_from_json(const Json& j);
Graph graph_from_json(const Json& j);

// {graphs: [finest .. root], parents: [[...]]}
Json chain_to_json(const Chain& chain);
Chain chain_from_json(const Json& j);

/// {label: leaf block id}
Json vertex_blocks_to_json(const VertexBlockMap& vbm);
/// Vertices come back ordered by label.
VertexBlockMap vertex_blocks_from_json(const Json& j, PartitionPtr partition);

struct LoadedSystem {
  FrameletSystem system;
  std::optional<VertexBlockMap> vertices;
};

// {depth, partition, atoms: [[level, parent, l1, l2]], vertex_blocks?}
Json system_to_json(const FrameletSystem& system, const VertexBlockMap* vertices = nullptr);
LoadedSystem system_from_json(const Json& j);

/// level,parent,l1,l2,value with φ0 written as -1,0,0,0.
std::string coefficients_to_csv(const FrameletSystem& system, const CoefficientVector& c);
/// Rows must list φ0 and the system's atoms in order; throws IndexMismatch.
CoefficientVector coefficients_from_csv(std::string_view text, const FrameletSystem& system);

/// vertex,value
std::string signal_to_csv(const std::vector<std::string>& labels, const std::vector<double>& values);
std::map<std::string, double> signal_from_csv(std::string_view text);

}  // namespace adahaar::io
