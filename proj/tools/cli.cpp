#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "adahaar/embedding.hpp"
#include "adahaar/error.hpp"
#include "adahaar/framelets.hpp"
#include "adahaar/graphs.hpp"
#include "adahaar/hierarchy.hpp"
#include "adahaar/io.hpp"

namespace adahaar::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr double kParsevalTol = 1e-10;
constexpr double kStructureTol = 1e-12;

std::string fmt(double x) { return io::format_double(x); }

void emit(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (path) {
    io::write_file(*path, text);
  } else {
    out << text;
  }
}

Chain load_valid_chain(const std::string& path, std::ostream& err) {
  Chain chain = io::chain_from_json(io::read_json_file(path));
  const auto problems = chain.validate();
  if (!problems.empty()) {
    for (const auto& p : problems) err << path << ": " << p << "\n";
    throw Error(ErrorKind::ValidationError, path + " is not a coarse-grained chain");
  }
  return chain;
}

std::string chain_sizes(const Chain& chain) {
  std::string s;
  for (const Graph& g : chain.graphs()) s += (s.empty() ? "" : " ") + std::to_string(g.size());
  return s;
}

// Systems saved without vertex blocks are read and written per leaf, labelled
// by leaf block id.
VertexBlockMap vertices_of(const io::LoadedSystem& loaded) {
  if (loaded.vertices) return *loaded.vertices;
  const auto& p = loaded.system.partition();
  std::vector<std::string> labels;
  std::vector<BlockId> blocks(p->leaves().begin(), p->leaves().end());
  for (BlockId b : blocks) labels.push_back(std::to_string(b));
  return VertexBlockMap(p, std::move(labels), std::move(blocks));
}

Json bounds_json(const FrameBounds& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

// ---- symmetrize -----------------------------------------------------------

struct SymmetrizeArgs {
  std::string graph;
  std::string out_dir;
};

int cmd_symmetrize(const SymmetrizeArgs& a, std::ostream& out, std::ostream& err) {
  const Digraph g = io::digraph_from_json(io::read_json_file(a.graph));
  const SymmetrizedPair pair = symmetrize(g);
  io::write_file(fs::path(a.out_dir) / "Gx.json", io::dump_json(io::graph_to_json(pair.x, false)));
  io::write_file(fs::path(a.out_dir) / "Gy.json", io::dump_json(io::graph_to_json(pair.y, false)));
  const bool connected = is_weakly_connected(g);
  out << "vertices: " << g.size() << "\n";
  out << "weakly connected: " << (connected ? "yes" : "no") << "\n";
  if (!connected) err << "warning: digraph is not weakly connected; Gx and Gy written anyway\n";
  return kOk;
}

// ---- chain ----------------------------------------------------------------

struct ChainArgs {
  std::optional<std::string> graph;
  std::optional<std::string> chain;
  std::vector<std::size_t> targets;
  std::optional<std::size_t> depth;
  std::optional<std::string> out_file;
};

int cmd_chain(const ChainArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.graph && !a.chain) throw Error(ErrorKind::ValidationError, "chain needs a graph file or --chain");
  std::optional<Graph> graph;
  if (a.graph) graph = io::graph_from_json(io::read_json_file(*a.graph));

  std::optional<Chain> chain;
  if (a.chain) {
    chain = load_valid_chain(*a.chain, err);
    if (graph && (chain->finest().labels() != graph->labels() || chain->finest().weights() != graph->weights())) {
      throw Error(ErrorKind::ValidationError, "finest graph of " + *a.chain + " differs from " + *a.graph);
    }
  } else {
    GreedyClusterer clusterer(a.targets);
    chain = build_chain(*graph, clusterer);
  }
  if (a.depth) chain = pad_chain(*chain, *a.depth);

  out << "depth: " << chain->depth() << "\n";
  out << "sizes: " << chain_sizes(*chain) << "\n";
  out << "valid: yes\n";
  if (a.out_file) io::write_file(*a.out_file, io::dump_json(io::chain_to_json(*chain)));
  return kOk;
}

// ---- build ----------------------------------------------------------------

struct BuildArgs {
  std::string chain_x;
  std::optional<std::string> chain_y;
  std::optional<std::size_t> depth;
  std::string out_dir;
  bool prune = false;
};

int cmd_build(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  const Chain cx = load_valid_chain(a.chain_x, err);
  std::optional<Chain> cy;
  if (a.chain_y) cy = load_valid_chain(*a.chain_y, err);

  std::size_t depth = std::max(cx.depth(), cy ? cy->depth() : 0);
  if (a.depth) {
    if (*a.depth < depth) {
      throw Error(ErrorKind::DepthMismatch, "--depth " + std::to_string(*a.depth) + " is below the chain depth " +
                                                std::to_string(depth));
    }
    depth = *a.depth;
  }
  const VertexBlockMap vbm = cy ? digraph_embedding(cx.finest(), pad_chain(cx, depth), pad_chain(*cy, depth))
                                : graph_embedding(pad_chain(cx, depth));

  const FrameletSystem full = build_system(vbm.partition());
  const FrameletSystem restricted = restrict_system(full, vbm);
  const auto space = vertex_indicators(vbm);

  const fs::path dir(a.out_dir);
  io::write_file(dir / "partition.json", io::dump_json(io::partition_to_json(*vbm.partition())));
  io::write_file(dir / "vertex_blocks.json", io::dump_json(io::vertex_blocks_to_json(vbm)));
  io::write_file(dir / "system_full.json", io::dump_json(io::system_to_json(full, &vbm)));
  io::write_file(dir / "system_restricted.json", io::dump_json(io::system_to_json(restricted, &vbm)));

  Json counts = {{"full", full.size()}, {"restricted", restricted.size()}};
  Json levels = {{"full", full.atoms_per_level()}, {"restricted", restricted.atoms_per_level()}};
  Json bounds = {{"restricted", bounds_json(frame_bounds(restricted.functions(), space))}};
  if (a.prune) {
    const PruneResult pruned = prune_redundant(restricted, vbm);
    io::write_file(dir / "system_pruned.json", io::dump_json(io::system_to_json(pruned.system, &vbm)));
    counts["pruned"] = pruned.system.size();
    levels["pruned"] = pruned.system.atoms_per_level();
    bounds["pruned"] = bounds_json(pruned.bounds);
  }
  const Json report = {{"depth", depth},
                       {"vertices", vbm.size()},
                       {"blocks", vbm.partition()->block_count()},
                       {"counts", counts},
                       {"atoms_per_level", levels},
                       {"frame_bounds", bounds}};
  io::write_file(dir / "report.json", io::dump_json(report));

  out << "depth: " << depth << "\n";
  out << "blocks: " << vbm.partition()->block_count() << "\n";
  for (const auto& [name, count] : counts.items()) {
    out << name << ": " << count.get<std::size_t>() << " functions (atoms per level";
    for (const auto& n : levels[name]) out << " " << n.get<std::size_t>();
    out << ")\n";
  }
  for (const auto& [name, b] : bounds.items()) {
    out << name << " frame bounds on span of vertex blocks: [" << fmt(b["lower"].get<double>()) << ", "
        << fmt(b["upper"].get<double>()) << "]\n";
  }
  return kOk;
}

// ---- analyze / synthesize -------------------------------------------------

struct TransformArgs {
  std::string system;
  std::string input;
  std::optional<std::string> out_file;
};

int cmd_analyze(const TransformArgs& a, std::ostream& out) {
  const io::LoadedSystem loaded = io::system_from_json(io::read_json_file(a.system));
  const VertexBlockMap vbm = vertices_of(loaded);
  const PwcFunction f = signal_to_function(io::signal_from_csv(io::read_file(a.input)), vbm);
  emit(a.out_file, io::coefficients_to_csv(loaded.system, analyze(loaded.system, f)), out);
  return kOk;
}

int cmd_synthesize(const TransformArgs& a, std::ostream& out) {
  const io::LoadedSystem loaded = io::system_from_json(io::read_json_file(a.system));
  const VertexBlockMap vbm = vertices_of(loaded);
  const CoefficientVector c = io::coefficients_from_csv(io::read_file(a.input), loaded.system);
  const PwcFunction f = synthesize(loaded.system, c);
  emit(a.out_file, io::signal_to_csv(vbm.labels(), function_to_signal(f, vbm)), out);
  return kOk;
}

// ---- verify ---------------------------------------------------------------

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

Check check_matrix_a(const FrameletSystem& system) {
  const auto& p = system.partition();
  std::set<BlockId> parents;
  for (const auto& atom : system.atoms()) parents.insert(atom.key.parent);
  double worst = 0.0;
  for (BlockId b : parents) {
    std::vector<double> weights;
    for (BlockId c : p->children(b)) weights.push_back(to_double(p->block(c).measure() / p->block(b).measure()));
    const Eigen::MatrixXd a = build_matrix_a(weights);
    const auto m = static_cast<Eigen::Index>(weights.size());
    worst = std::max(worst, (a.transpose() * a - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff());
  }
  return {"matrix-a", worst <= kStructureTol,
          std::to_string(parents.size()) + " parent blocks, max |A^T A - I| = " + fmt(worst)};
}

std::vector<PwcFunction> random_signals(const io::LoadedSystem& loaded, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<PwcFunction> out;
  const FrameletSystem& system = loaded.system;
  const auto& p = system.partition();
  for (std::size_t k = 0; k < count; ++k) {
    if (loaded.vertices) {
      std::vector<double> values(loaded.vertices->size());
      for (double& v : values) v = dist(rng);
      out.push_back(signal_to_function(values, *loaded.vertices));
    } else {
      // Random element of V_J: constant on each block of the cut-off level.
      std::vector<double> dense(p->leaf_count(), 0.0);
      for (BlockId b : p->level(system.depth())) {
        const double v = dist(rng);
        for (std::size_t leaf : p->leaves_under(b)) dense[leaf] = v;
      }
      out.push_back(PwcFunction::from_dense(p, dense));
    }
  }
  return out;
}

std::vector<Check> check_signals(const FrameletSystem& system, const std::vector<PwcFunction>& signals) {
  double parseval = 0.0;
  double reconstruction = 0.0;
  for (const PwcFunction& f : signals) {
    const double norm2 = inner_product(f, f);
    if (norm2 == 0.0) continue;
    const CoefficientVector c = analyze(system, f);
    parseval = std::max(parseval, std::abs(c.squared_norm() - norm2) / norm2);
    reconstruction = std::max(reconstruction, distance(synthesize(system, c), f) / std::sqrt(norm2));
  }
  const std::string n = std::to_string(signals.size()) + " random signals, ";
  return {{"parseval", parseval <= kParsevalTol, n + "max relative error " + fmt(parseval)},
          {"reconstruction", reconstruction <= kParsevalTol, n + "max relative error " + fmt(reconstruction)}};
}

Check check_orthogonality(const FrameletSystem& system) {
  double worst = 0.0;
  const auto& atoms = system.atoms();
  for (const auto& a : atoms) worst = std::max(worst, std::abs(inner_product(system.phi0(), a.function)));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t k = i + 1; k < atoms.size(); ++k) {
      if (atoms[i].key.level == atoms[k].key.level) continue;
      worst = std::max(worst, std::abs(inner_product(atoms[i].function, atoms[k].function)));
    }
  }
  return {"orthogonality", worst <= kStructureTol, "max cross-level |<h, h'>| = " + fmt(worst)};
}

Check check_moments(const FrameletSystem& system) {
  const auto& p = system.partition();
  double moment = 0.0;
  double norm = 0.0;
  for (const auto& a : system.atoms()) {
    moment = std::max(moment, std::abs(a.function.integral()));
    const Rational& parent = p->block(a.key.parent).measure();
    const double expected = to_double((p->block(a.child1).measure() + p->block(a.child2).measure()) / parent);
    norm = std::max(norm, std::abs(inner_product(a.function, a.function) - expected));
  }
  return {"moments", moment <= kStructureTol && norm <= kStructureTol,
          "max |integral| = " + fmt(moment) + ", max |norm^2 - (b1 + b2)| = " + fmt(norm)};
}

struct VerifyArgs {
  std::string system;
  std::size_t signals = 100;
};

std::uint64_t seed_from_env() {
  const char* s = std::getenv("ADAHAAR_SEED");
  if (!s || !*s) return 0;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, std::string("ADAHAAR_SEED is not an integer: ") + s);
  }
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const io::LoadedSystem loaded = io::system_from_json(io::read_json_file(a.system));
  const FrameletSystem& system = loaded.system;
  const std::uint64_t seed = seed_from_env();

  std::vector<Check> checks;
  checks.push_back(check_matrix_a(system));
  for (auto& c : check_signals(system, random_signals(loaded, a.signals, seed))) checks.push_back(std::move(c));
  checks.push_back(check_orthogonality(system));
  checks.push_back(check_moments(system));

  out << "system: " << system.size() << " functions, depth " << system.depth() << ", "
      << (loaded.vertices ? "space = span of " + std::to_string(loaded.vertices->size()) + " vertex blocks"
                          : "space = V_" + std::to_string(system.depth()))
      << ", seed " << seed << "\n";
  bool all = true;
  for (const Check& c : checks) {
    out << (c.ok ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    all = all && c.ok;
  }
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive directional Haar tight framelets on graphs and digraphs", "adahaar"};
  app.require_subcommand(1);

  SymmetrizeArgs sym;
  auto* s = app.add_subcommand("symmetrize", "Write the symmetrized pair Gx, Gy of a digraph");
  s->add_option("graph", sym.graph, "Digraph JSON")->required();
  s->add_option("--out", sym.out_dir, "Output directory")->required();

  ChainArgs ch;
  auto* c = app.add_subcommand("chain", "Build or validate a coarse-grained chain");
  c->add_option("graph", ch.graph, "Undirected graph JSON");
  c->add_option("--chain", ch.chain, "Explicit chain JSON to validate");
  c->add_option("--target-per-level", ch.targets, "Cluster counts per coarsening step, finest first")->delimiter(',');
  c->add_option("--depth", ch.depth, "Pad the chain to this depth");
  c->add_option("--out", ch.out_file, "Chain JSON output");

  BuildArgs bu;
  auto* b = app.add_subcommand("build", "Embed chains and write partition, systems and report");
  b->add_option("--chain-x", bu.chain_x, "Chain of the graph (or of Gx)")->required();
  b->add_option("--chain-y", bu.chain_y, "Chain of Gy; omit for a 1-D embedding");
  b->add_option("--depth", bu.depth, "Pad both chains to this depth");
  b->add_option("--out", bu.out_dir, "Output directory")->required();
  b->add_flag("--prune", bu.prune, "Also write the pruned system");

  TransformArgs an;
  auto* a = app.add_subcommand("analyze", "Framelet coefficients of a signal");
  a->add_option("--system", an.system, "System JSON")->required();
  a->add_option("--signal", an.input, "Signal CSV (vertex,value)")->required();
  a->add_option("--out", an.out_file, "Coefficient CSV output");

  TransformArgs sy;
  auto* y = app.add_subcommand("synthesize", "Signal from framelet coefficients");
  y->add_option("--system", sy.system, "System JSON")->required();
  y->add_option("--coefficients", sy.input, "Coefficient CSV")->required();
  y->add_option("--out", sy.out_file, "Signal CSV output");

  VerifyArgs ve;
  auto* v = app.add_subcommand("verify", "Check A^T A = I, Parseval, reconstruction, orthogonality and moments");
  v->add_option("system", ve.system, "System JSON")->required();
  v->add_option("--signals", ve.signals, "Number of random test signals");

  std::vector<const char*> argv{"adahaar"};
  for (const auto& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (*s) return cmd_symmetrize(sym, out, err);
    if (*c) return cmd_chain(ch, out, err);
    if (*b) return cmd_build(bu, out, err);
    if (*a) return cmd_analyze(an, out);
    if (*y) return cmd_synthesize(sy, out);
    return cmd_verify(ve, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ParseError ? kParseError : kValidationError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
}

}  // namespace adahaar::cli
