#include "adahaar/embedding.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <set>

#include "adahaar/error.hpp"

namespace adahaar {

IntervalEmbedding chain_to_intervals(const Chain& chain) {
  const std::size_t depth = chain.depth();
  if (chain.level(0).size() != 1) {
    throw Error(ErrorKind::ValidationError, "chain root has " + std::to_string(chain.level(0).size()) + " nodes");
  }

  // intervals[j][u] for every node u of G_j.
  std::vector<std::vector<Interval>> intervals(depth + 1);
  intervals[0] = {Interval{Rational(0), Rational(1)}};
  for (std::size_t j = 0; j < depth; ++j) {
    const Graph& child_graph = chain.level(j + 1);
    intervals[j + 1].assign(child_graph.size(), Interval{});
    for (std::size_t u = 0; u < chain.level(j).size(); ++u) {
      std::vector<std::size_t> kids = chain.children_of(j, u);
      std::vector<std::size_t> first_member(child_graph.size());
      for (std::size_t v : kids) first_member[v] = chain.members(j + 1, v).front();
      std::sort(kids.begin(), kids.end(),
                [&](std::size_t a, std::size_t b) { return first_member[a] < first_member[b]; });

      const Interval& parent = intervals[j][u];
      if (kids.size() == 1) {
        intervals[j + 1][kids[0]] = parent;
        continue;
      }
      std::vector<Rational> deg;
      Rational total = 0;
      for (std::size_t v : kids) {
        deg.emplace_back(degree(child_graph, v));
        if (deg.back() <= 0) {
          throw Error(ErrorKind::ZeroDegreeCluster,
                      "node '" + child_graph.label(v) + "' of level " + std::to_string(j + 1) + " has zero degree");
        }
        total += deg.back();
      }
      Rational lo = parent.lo;
      Rational consumed = 0;
      for (std::size_t s = 0; s < kids.size(); ++s) {
        consumed += deg[s];
        // The last endpoint is the parent's hi exactly.
        const Rational hi = parent.lo + parent.length() * consumed / total;
        intervals[j + 1][kids[s]] = Interval{lo, hi};
        lo = hi;
      }
    }
  }

  auto partition = std::make_shared<const HierarchicalPartition>(refine_interval_levels(intervals));
  IntervalEmbedding out{partition, std::vector<std::vector<BlockId>>(depth + 1)};
  for (std::size_t j = 0; j <= depth; ++j) {
    const auto ids = partition->level(j);
    for (std::size_t u = 0; u < intervals[j].size(); ++u) {
      const auto it = std::find_if(ids.begin(), ids.end(),
                                   [&](BlockId b) { return partition->block(b).side(0) == intervals[j][u]; });
      out.node_blocks[j].push_back(*it);
    }
  }
  return out;
}

VertexBlockMap::VertexBlockMap(PartitionPtr partition, std::vector<std::string> labels, std::vector<BlockId> blocks)
    : partition_(std::move(partition)), labels_(std::move(labels)), blocks_(std::move(blocks)) {
  if (!partition_) throw Error(ErrorKind::ValidationError, "vertex blocks need a partition");
  if (labels_.size() != blocks_.size()) throw Error(ErrorKind::ValidationError, "one block per vertex expected");
  std::set<std::string_view> seen;
  for (std::size_t v = 0; v < labels_.size(); ++v) {
    if (!seen.insert(labels_[v]).second) throw Error(ErrorKind::ValidationError, "duplicate vertex '" + labels_[v] + "'");
    if (blocks_[v] >= partition_->block_count() || partition_->level_of(blocks_[v]) != partition_->depth()) {
      throw Error(ErrorKind::ValidationError, "block of vertex '" + labels_[v] + "' is not a leaf");
    }
    for (std::size_t w = 0; w < v; ++w) {
      if (intersection_measure(partition_->block(blocks_[v]), partition_->block(blocks_[w])) > 0) {
        throw Error(ErrorKind::ValidationError, "vertices '" + labels_[w] + "' and '" + labels_[v] + "' overlap");
      }
    }
  }
}

std::optional<std::size_t> VertexBlockMap::index_of(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

bool VertexBlockMap::is_effective(BlockId id) const {
  const Block& b = partition_->block(id);
  return std::any_of(blocks_.begin(), blocks_.end(),
                     [&](BlockId v) { return intersection_measure(b, partition_->block(v)) > 0; });
}

namespace {

std::size_t finest_index(const Chain& chain, const std::string& label, const char* axis) {
  const auto idx = chain.finest().index_of(label);
  if (!idx) throw Error(ErrorKind::UnknownVertex, std::string("vertex '") + label + "' is missing from the " + axis + " chain");
  return *idx;
}

}  // namespace

VertexBlockMap digraph_embedding(const Digraph& g, const Chain& chain_x, const Chain& chain_y) {
  const std::size_t depth = std::max(chain_x.depth(), chain_y.depth());
  const IntervalEmbedding ex = chain_to_intervals(pad_chain(chain_x, depth));
  const IntervalEmbedding ey = chain_to_intervals(pad_chain(chain_y, depth));
  auto partition = std::make_shared<const HierarchicalPartition>(tensor_partitions(*ex.partition, *ey.partition));

  std::vector<BlockId> blocks;
  for (const std::string& label : g.labels()) {
    const Interval& ix = ex.interval(depth, finest_index(chain_x, label, "x"));
    const Interval& iy = ey.interval(depth, finest_index(chain_y, label, "y"));
    const auto leaves = partition->leaves();
    const auto it = std::find_if(leaves.begin(), leaves.end(), [&](BlockId b) {
      const Block& block = partition->block(b);
      return block.side(0) == ix && block.side(1) == iy;
    });
    blocks.push_back(*it);
  }
  return VertexBlockMap(partition, g.labels(), std::move(blocks));
}

VertexBlockMap graph_embedding(const Chain& chain) {
  const IntervalEmbedding e = chain_to_intervals(chain);
  return VertexBlockMap(e.partition, chain.finest().labels(), e.node_blocks.back());
}

PwcFunction signal_to_function(const std::map<std::string, double>& signal, const VertexBlockMap& vbm) {
  for (const auto& [label, value] : signal) {
    if (!vbm.index_of(label)) throw Error(ErrorKind::UnknownVertex, "unknown vertex '" + label + "'");
  }
  std::vector<double> values;
  for (const std::string& label : vbm.labels()) {
    const auto it = signal.find(label);
    if (it == signal.end()) throw Error(ErrorKind::UnknownVertex, "no value for vertex '" + label + "'");
    values.push_back(it->second);
  }
  return signal_to_function(values, vbm);
}

PwcFunction signal_to_function(std::span<const double> values, const VertexBlockMap& vbm) {
  if (values.size() != vbm.size()) {
    throw Error(ErrorKind::UnknownVertex, "signal has " + std::to_string(values.size()) + " values for " +
                                              std::to_string(vbm.size()) + " vertices");
  }
  const auto& p = vbm.partition();
  std::vector<double> dense(p->leaf_count(), 0.0);
  for (std::size_t v = 0; v < values.size(); ++v) dense[p->leaf_position(vbm.block(v))] = values[v];
  return PwcFunction::from_dense(p, dense);
}

std::vector<double> function_to_signal(const PwcFunction& f, const VertexBlockMap& vbm) {
  if (f.partition() != vbm.partition()) throw Error(ErrorKind::PartitionMismatch, "function and vertex blocks differ");
  std::vector<double> out;
  for (BlockId b : vbm.blocks()) out.push_back(f.value_at(vbm.partition()->leaf_position(b)));
  return out;
}

std::vector<PwcFunction> vertex_indicators(const VertexBlockMap& vbm) {
  std::vector<PwcFunction> out;
  for (BlockId b : vbm.blocks()) out.push_back(PwcFunction::indicator(vbm.partition(), b));
  return out;
}

FrameletSystem restrict_system(const FrameletSystem& system, const VertexBlockMap& vbm) {
  if (system.partition() != vbm.partition()) {
    throw Error(ErrorKind::PartitionMismatch, "system and vertex blocks live on different partitions");
  }
  return system.filtered(
      [&](const FrameletAtom& a) { return vbm.is_effective(a.child1) || vbm.is_effective(a.child2); });
}

PruneResult prune_redundant(const FrameletSystem& restricted, const VertexBlockMap& vbm) {
  if (restricted.partition() != vbm.partition()) {
    throw Error(ErrorKind::PartitionMismatch, "system and vertex blocks live on different partitions");
  }
  const auto& p = restricted.partition();
  const std::size_t finest = restricted.depth() == 0 ? 0 : restricted.depth() - 1;

  // Kept child indices (1-based) per pruned parent; absent = keep everything.
  std::map<BlockId, std::vector<bool>> kept;
  for (const auto& atom : restricted.atoms()) {
    if (atom.key.level != finest || kept.count(atom.key.parent)) continue;
    const auto kids = p->children(atom.key.parent);
    std::vector<bool> keep(kids.size() + 1, false);
    bool added_spare = false;
    bool all_effective = true;
    for (std::size_t l = 1; l <= kids.size(); ++l) {
      if (vbm.is_effective(kids[l - 1])) {
        keep[l] = true;
      } else {
        all_effective = false;
        if (!added_spare) keep[l] = added_spare = true;
      }
    }
    if (!all_effective) kept.emplace(atom.key.parent, std::move(keep));
  }

  FrameletSystem pruned = restricted.filtered([&](const FrameletAtom& a) {
    if (a.key.level != finest) return true;
    const auto it = kept.find(a.key.parent);
    return it == kept.end() || (it->second[a.key.l1] && it->second[a.key.l2]);
  });
  const auto functions = pruned.functions();
  const auto space = vertex_indicators(vbm);
  FrameBounds bounds = frame_bounds(functions, space);
  return {std::move(pruned), bounds};
}

}  // namespace adahaar
