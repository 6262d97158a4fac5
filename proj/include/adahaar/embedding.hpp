#pragma once

// Chains to interval partitions of [0,1], digraphs to vertex blocks of
// [0,1]², graph signals to piecewise-constant functions, and the restriction
// and pruning of a framelet system to the blocks a graph actually occupies.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adahaar/framelets.hpp"
#include "adahaar/graphs.hpp"
#include "adahaar/hierarchy.hpp"

namespace adahaar {

struct IntervalEmbedding {
  PartitionPtr partition;
  /// node_blocks[j][u]: interval block of node u of G_j.
  std::vector<std::vector<BlockId>> node_blocks;

  const Interval& interval(std::size_t j, std::size_t u) const {
    return partition->block(node_blocks.at(j).at(u)).side(0);
  }
};

/// [0,1] at the root; each node's interval is split among its children in
/// proportion to their degrees in the child graph, children ordered by their
/// smallest original vertex. A lone child inherits the whole interval.
/// Throws ZeroDegreeCluster when a split has a child of degree zero.
IntervalEmbedding chain_to_intervals(const Chain& chain);

/// Vertex label → leaf block B_v of a partition.
class VertexBlockMap {
 public:
  /// Throws ValidationError unless labels are unique, every block is a leaf
  /// and distinct vertices get interior-disjoint blocks.
  VertexBlockMap(PartitionPtr partition, std::vector<std::string> labels, std::vector<BlockId> blocks);

  const PartitionPtr& partition() const { return partition_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<BlockId>& blocks() const { return blocks_; }
  const std::string& label(std::size_t v) const { return labels_.at(v); }
  BlockId block(std::size_t v) const { return blocks_.at(v); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  /// True when some B_v meets the block in positive measure.
  bool is_effective(BlockId id) const;

 private:
  PartitionPtr partition_;
  std::vector<std::string> labels_;
  std::vector<BlockId> blocks_;
};

/// B_j = I^x_j ⊗ I^y_j from two chains (padded to a common depth first) and
/// B_v = I^x_v × I^y_v. Vertices are matched across g and the chains by label;
/// throws UnknownVertex if a label is missing from a chain.
VertexBlockMap digraph_embedding(const Digraph& g, const Chain& chain_x, const Chain& chain_y);

/// One chain, d = 1: every vertex owns its own leaf interval.
VertexBlockMap graph_embedding(const Chain& chain);

/// f = Σ_v f(v) χ_{B_v}. Throws UnknownVertex for unknown or missing labels.
PwcFunction signal_to_function(const std::map<std::string, double>& signal, const VertexBlockMap& vbm);
/// Same, with values listed in vertex order.
PwcFunction signal_to_function(std::span<const double> values, const VertexBlockMap& vbm);
/// f(v) read back from B_v.
std::vector<double> function_to_signal(const PwcFunction& f, const VertexBlockMap& vbm);

std::vector<PwcFunction> vertex_indicators(const VertexBlockMap& vbm);

/// φ0 plus the atoms whose support meets some B_v in positive measure.
/// Throws PartitionMismatch.
FrameletSystem restrict_system(const FrameletSystem& system, const VertexBlockMap& vbm);

struct PruneResult {
  FrameletSystem system;
  FrameBounds bounds;  // on span{χ_{B_v}}
};

/// Drops atoms at the finest atom level that only separate non-effective
/// children. At a parent with effective children E ≠ all children, the kept
/// pairs are those inside E ∪ {first non-effective child}.
PruneResult prune_redundant(const FrameletSystem& restricted, const VertexBlockMap& vbm);

}  // namespace adahaar
