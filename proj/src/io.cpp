#include "adahaar/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "adahaar/error.hpp"

namespace adahaar::io {

namespace {

// Keeps structural JSON problems (missing keys, wrong types) in ParseError.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string(what) + ": " + e.what());
  }
}

Json integer_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return Json(v.convert_to<std::int64_t>());
  }
  return Json(v.str());
}

BigInt integer_from_json(const Json& j) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return BigInt(j.get<std::string>());
    } catch (const std::runtime_error&) {
    }
  }
  throw Error(ErrorKind::ParseError, "expected an integer, got " + j.dump());
}

Rational rational_from_json(const Json& num, const Json& den) {
  const BigInt d = integer_from_json(den);
  if (d == 0) throw Error(ErrorKind::ParseError, "zero denominator");
  return Rational(integer_from_json(num), d);
}

// Integral weights stay integers in the output.
Json weight_json(double w) {
  if (w == std::floor(w) && std::abs(w) < 9007199254740992.0) return Json(static_cast<std::int64_t>(w));
  return Json(w);
}

std::size_t vertex_ref(const Json& ref, const std::vector<std::string>& labels) {
  if (ref.is_number_unsigned() || ref.is_number_integer()) {
    const auto i = ref.get<std::int64_t>();
    if (i < 0 || static_cast<std::size_t>(i) >= labels.size()) {
      throw Error(ErrorKind::ParseError, "vertex index " + std::to_string(i) + " out of range");
    }
    return static_cast<std::size_t>(i);
  }
  const auto name = ref.get<std::string>();
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] == name) return v;
  }
  throw Error(ErrorKind::UnknownVertex, "edge mentions unknown vertex '" + name + "'");
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::vector<std::string>> csv_rows(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    for (auto& f : fields) f = trim(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::int64_t parse_int(const std::string& s) {
  std::size_t used = 0;
  try {
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::ParseError, "expected an integer, got '" + s + "'");
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw Error(ErrorKind::ValidationError, "cannot write " + path.string());
}

Json read_json_file(const std::filesystem::path& path) { return parse_json(read_file(path)); }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json partition_to_json(const HierarchicalPartition& p) {
  Json blocks = Json::array();
  for (const Block& b : p.blocks()) {
    Json sides = Json::array();
    for (const Interval& iv : b.sides()) {
      sides.push_back({integer_json(numerator(iv.lo)), integer_json(denominator(iv.lo)),
                       integer_json(numerator(iv.hi)), integer_json(denominator(iv.hi))});
    }
    blocks.push_back({{"id", b.id()}, {"sides", std::move(sides)}});
  }
  Json children = Json::object();
  for (const auto& [parent, kids] : p.child_map()) {
    if (!kids.empty()) children[std::to_string(parent)] = kids;
  }
  return {{"dimension", p.dimension()}, {"depth", p.depth()}, {"blocks", std::move(blocks)}, {"children", children}};
}

HierarchicalPartition partition_from_json(const Json& j) {
  return guarded("partition", [&] {
    const auto dimension = j.at("dimension").get<std::size_t>();
    std::vector<Block> blocks;
    for (const Json& b : j.at("blocks")) {
      std::vector<Interval> sides;
      for (const Json& s : b.at("sides")) {
        if (!s.is_array() || s.size() != 4) throw Error(ErrorKind::ParseError, "side must be [lo_num, lo_den, hi_num, hi_den]");
        sides.push_back({rational_from_json(s[0], s[1]), rational_from_json(s[2], s[3])});
      }
      blocks.emplace_back(b.at("id").get<BlockId>(), std::move(sides));
    }
    HierarchicalPartition::ChildMap children;
    for (const auto& [key, kids] : j.at("children").items()) {
      BlockId parent = 0;
      try {
        parent = static_cast<BlockId>(std::stoul(key));
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "child map key '" + key + "' is not a block id");
      }
      children[parent] = kids.get<std::vector<BlockId>>();
    }
    HierarchicalPartition p(dimension, std::move(blocks), std::move(children));
    if (j.contains("depth") && j.at("depth").get<std::size_t>() != p.depth()) {
      throw Error(ErrorKind::DepthMismatch, "declared depth does not match the block tree");
    }
    return p;
  });
}

Json graph_to_json(const Digraph& g, bool directed) {
  Json edges = Json::array();
  for (std::size_t u = 0; u < g.size(); ++u) {
    for (std::size_t v = directed ? 0 : u; v < g.size(); ++v) {
      const double w = g.weight(u, v);
      if (w != 0.0) edges.push_back({u, v, weight_json(w)});
    }
  }
  return {{"labels", g.labels()}, {"directed", directed}, {"edges", std::move(edges)}};
}

Digraph digraph_from_json(const Json& j) {
  return guarded("graph", [&] {
    const auto labels = j.at("labels").get<std::vector<std::string>>();
    const bool directed = j.value("directed", true);
    const auto n = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    if (j.contains("matrix")) {
      const auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
      if (rows.size() != labels.size()) throw Error(ErrorKind::ParseError, "matrix row count differs from labels");
      for (Eigen::Index r = 0; r < n; ++r) {
        if (rows[r].size() != labels.size()) throw Error(ErrorKind::ParseError, "matrix is not square");
        for (Eigen::Index c = 0; c < n; ++c) w(r, c) = rows[r][c];
      }
    } else {
      for (const Json& e : j.at("edges")) {
        if (!e.is_array() || e.size() < 2 || e.size() > 3) throw Error(ErrorKind::ParseError, "edge must be [u, v, w]");
        const auto u = static_cast<Eigen::Index>(vertex_ref(e[0], labels));
        const auto v = static_cast<Eigen::Index>(vertex_ref(e[1], labels));
        const double weight = e.size() == 3 ? e[2].get<double>() : 1.0;
        w(u, v) += weight;
        if (!directed && u != v) w(v, u) += weight;
      }
    }
    return Digraph(labels, std::move(w));
  });
}

Graph graph_from_json(const Json& j) {
  const Digraph d = digraph_from_json(j);
  return Graph(d.labels(), d.weights());
}

Json chain_to_json(const Chain& chain) {
  Json graphs = Json::array();
  for (const Graph& g : chain.graphs()) graphs.push_back(graph_to_json(g, false));
  return {{"graphs", std::move(graphs)}, {"parents", chain.parents()}};
}

Chain chain_from_json(const Json& j) {
  return guarded("chain", [&] {
    std::vector<Graph> graphs;
    for (const Json& g : j.at("graphs")) graphs.push_back(graph_from_json(g));
    return Chain(std::move(graphs), j.at("parents").get<std::vector<std::vector<std::size_t>>>());
  });
}

Json vertex_blocks_to_json(const VertexBlockMap& vbm) {
  Json out = Json::object();
  for (std::size_t v = 0; v < vbm.size(); ++v) out[vbm.label(v)] = vbm.block(v);
  return out;
}

VertexBlockMap vertex_blocks_from_json(const Json& j, PartitionPtr partition) {
  return guarded("vertex blocks", [&] {
    std::vector<std::string> labels;
    std::vector<BlockId> blocks;
    for (const auto& [label, id] : j.items()) {
      labels.push_back(label);
      blocks.push_back(id.get<BlockId>());
    }
    return VertexBlockMap(std::move(partition), std::move(labels), std::move(blocks));
  });
}

Json system_to_json(const FrameletSystem& system, const VertexBlockMap* vertices) {
  Json atoms = Json::array();
  for (const auto& a : system.atoms()) atoms.push_back({a.key.level, a.key.parent, a.key.l1, a.key.l2});
  Json out = {{"depth", system.depth()}, {"partition", partition_to_json(*system.partition())}, {"atoms", atoms}};
  if (vertices) out["vertex_blocks"] = vertex_blocks_to_json(*vertices);
  return out;
}

LoadedSystem system_from_json(const Json& j) {
  return guarded("system", [&] {
    auto partition = std::make_shared<const HierarchicalPartition>(partition_from_json(j.at("partition")));
    const auto depth = j.at("depth").get<std::size_t>();
    if (depth > partition->depth()) throw Error(ErrorKind::DepthMismatch, "system depth exceeds partition depth");

    std::map<BlockId, std::vector<FrameletAtom>> generators;
    std::vector<FrameletAtom> atoms;
    for (const Json& a : j.at("atoms")) {
      if (!a.is_array() || a.size() != 4) throw Error(ErrorKind::ParseError, "atom must be [level, parent, l1, l2]");
      const AtomKey key{a[0].get<std::size_t>(), a[1].get<BlockId>(), a[2].get<std::size_t>(), a[3].get<std::size_t>()};
      if (key.parent >= partition->block_count() || partition->level_of(key.parent) != key.level) {
        throw Error(ErrorKind::IndexMismatch, "atom parent " + std::to_string(key.parent) + " is not on level " +
                                                  std::to_string(key.level));
      }
      auto it = generators.find(key.parent);
      if (it == generators.end()) it = generators.emplace(key.parent, build_generators(partition, key.parent)).first;
      const std::size_t m = partition->children(key.parent).size();
      const std::size_t flat = pair_to_flat(key.l1, key.l2, m);
      atoms.push_back(it->second.at(flat - 1));
    }
    LoadedSystem out{FrameletSystem(partition, depth, std::move(atoms)), std::nullopt};
    if (j.contains("vertex_blocks")) out.vertices = vertex_blocks_from_json(j.at("vertex_blocks"), partition);
    return out;
  });
}

std::string coefficients_to_csv(const FrameletSystem& system, const CoefficientVector& c) {
  if (c.atoms.size() != system.atoms().size()) throw Error(ErrorKind::IndexMismatch, "coefficients do not match the system");
  std::string out = "level,parent,l1,l2,value\n";
  out += "-1,0,0,0," + format_double(c.phi0) + "\n";
  for (std::size_t i = 0; i < c.atoms.size(); ++i) {
    const AtomKey& k = system.atoms()[i].key;
    out += std::to_string(k.level) + "," + std::to_string(k.parent) + "," + std::to_string(k.l1) + "," +
           std::to_string(k.l2) + "," + format_double(c.atoms[i]) + "\n";
  }
  return out;
}

CoefficientVector coefficients_from_csv(std::string_view text, const FrameletSystem& system) {
  auto rows = csv_rows(text);
  if (!rows.empty() && rows[0].size() == 5 && rows[0][0] == "level") rows.erase(rows.begin());
  if (rows.size() != system.size()) {
    throw Error(ErrorKind::IndexMismatch, std::to_string(rows.size()) + " coefficient rows for " +
                                              std::to_string(system.size()) + " functions");
  }
  CoefficientVector c;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 5) throw Error(ErrorKind::ParseError, "coefficient row " + std::to_string(r + 1) + " needs 5 fields");
    const auto value = parse_double(row[4]);
    if (!value) throw Error(ErrorKind::ParseError, "bad coefficient '" + row[4] + "'");
    if (r == 0) {
      if (parse_int(row[0]) != -1) throw Error(ErrorKind::IndexMismatch, "first row must be phi0 (level -1)");
      c.phi0 = *value;
      continue;
    }
    const AtomKey& k = system.atoms()[r - 1].key;
    const auto level = parse_int(row[0]);
    const auto parent = parse_int(row[1]);
    const auto l1 = parse_int(row[2]);
    const auto l2 = parse_int(row[3]);
    if (level != static_cast<std::int64_t>(k.level) || parent != static_cast<std::int64_t>(k.parent) ||
        l1 != static_cast<std::int64_t>(k.l1) || l2 != static_cast<std::int64_t>(k.l2)) {
      throw Error(ErrorKind::IndexMismatch, "coefficient row " + std::to_string(r + 1) + " names a different atom");
    }
    c.atoms.push_back(*value);
  }
  return c;
}

std::string signal_to_csv(const std::vector<std::string>& labels, const std::vector<double>& values) {
  if (labels.size() != values.size()) throw Error(ErrorKind::IndexMismatch, "one value per vertex expected");
  std::string out = "vertex,value\n";
  for (std::size_t v = 0; v < labels.size(); ++v) out += labels[v] + "," + format_double(values[v]) + "\n";
  return out;
}

std::map<std::string, double> signal_from_csv(std::string_view text) {
  std::map<std::string, double> out;
  const auto rows = csv_rows(text);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 2) throw Error(ErrorKind::ParseError, "signal row " + std::to_string(r + 1) + " needs 2 fields");
    const auto value = parse_double(row[1]);
    if (!value) {
      if (r == 0) continue;  // header
      throw Error(ErrorKind::ParseError, "bad signal value '" + row[1] + "'");
    }
    if (!out.emplace(row[0], *value).second) throw Error(ErrorKind::ParseError, "vertex '" + row[0] + "' listed twice");
  }
  return out;
}

}  // namespace adahaar::io
