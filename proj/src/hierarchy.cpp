#include "adahaar/hierarchy.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "adahaar/error.hpp"

namespace adahaar {

Rational overlap_length(const Interval& a, const Interval& b) {
  const Rational lo = std::max(a.lo, b.lo);
  const Rational hi = std::min(a.hi, b.hi);
  return hi > lo ? Rational(hi - lo) : Rational(0);
}

Block::Block(BlockId id, std::vector<Interval> sides) : id_(id), sides_(std::move(sides)), measure_(1) {
  if (sides_.empty()) throw Error(ErrorKind::MalformedPartition, "block " + std::to_string(id) + " has no sides");
  for (const Interval& side : sides_) {
    if (!(side.lo < side.hi)) {
      throw Error(ErrorKind::MalformedPartition,
                  "block " + std::to_string(id) + " has empty side [" + to_string(side.lo) + ", " +
                      to_string(side.hi) + "]");
    }
    measure_ *= side.length();
  }
}

bool Block::contains(const Block& other) const {
  if (other.dimension() != dimension()) return false;
  for (std::size_t axis = 0; axis < sides_.size(); ++axis) {
    if (!sides_[axis].contains(other.sides_[axis])) return false;
  }
  return true;
}

Rational intersection_measure(const Block& a, const Block& b) {
  if (a.dimension() != b.dimension()) throw Error(ErrorKind::MalformedPartition, "dimension mismatch");
  Rational m = 1;
  for (std::size_t axis = 0; axis < a.dimension(); ++axis) {
    m *= overlap_length(a.side(axis), b.side(axis));
    if (m == 0) break;
  }
  return m;
}

HierarchicalPartition::HierarchicalPartition(std::size_t dimension, std::vector<Block> blocks, ChildMap children)
    : dimension_(dimension), blocks_(std::move(blocks)), children_(std::move(children)) {
  if (dimension_ == 0) throw Error(ErrorKind::MalformedPartition, "dimension must be positive");
  if (blocks_.empty()) throw Error(ErrorKind::MalformedPartition, "partition has no blocks");

  std::sort(blocks_.begin(), blocks_.end(), [](const Block& a, const Block& b) { return a.id() < b.id(); });
  const std::size_t n = blocks_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (blocks_[i].id() != i) {
      throw Error(ErrorKind::MalformedPartition, "block ids must be exactly 0.." + std::to_string(n - 1));
    }
    if (blocks_[i].dimension() != dimension_) {
      throw Error(ErrorKind::MalformedPartition, "block " + std::to_string(i) + " has wrong dimension");
    }
  }

  parent_.assign(n, std::nullopt);
  for (auto it = children_.begin(); it != children_.end();) {
    const auto& [parent, kids] = *it;
    if (parent >= n) throw Error(ErrorKind::MalformedPartition, "unknown parent id " + std::to_string(parent));
    for (BlockId child : kids) {
      if (child >= n || child == 0) {
        throw Error(ErrorKind::MalformedPartition, "invalid child id " + std::to_string(child));
      }
      if (parent_[child]) {
        throw Error(ErrorKind::MalformedPartition, "block " + std::to_string(child) + " has two parents");
      }
      parent_[child] = parent;
    }
    it = kids.empty() ? children_.erase(it) : std::next(it);
  }

  // Breadth-first levels from the root.
  constexpr std::size_t unreached = static_cast<std::size_t>(-1);
  level_of_.assign(n, unreached);
  level_of_[0] = 0;
  std::deque<BlockId> queue{0};
  std::size_t max_level = 0;
  while (!queue.empty()) {
    const BlockId b = queue.front();
    queue.pop_front();
    for (BlockId c : this->children(b)) {
      level_of_[c] = level_of_[b] + 1;
      max_level = std::max(max_level, level_of_[c]);
      queue.push_back(c);
    }
  }
  levels_.assign(max_level + 1, {});
  for (BlockId b = 0; b < n; ++b) {
    if (level_of_[b] == unreached) {
      throw Error(ErrorKind::MalformedPartition, "block " + std::to_string(b) + " is not reachable from the root");
    }
    levels_[level_of_[b]].push_back(b);
    if (this->children(b).empty() && level_of_[b] != max_level) {
      throw Error(ErrorKind::MalformedPartition,
                  "leaf " + std::to_string(b) + " sits above the finest level " + std::to_string(max_level));
    }
  }

  const auto& leaf_level = levels_.back();
  leaf_position_.assign(n, unreached);
  leaf_measures_.reserve(leaf_level.size());
  for (std::size_t pos = 0; pos < leaf_level.size(); ++pos) {
    leaf_position_[leaf_level[pos]] = pos;
    leaf_measures_.push_back(to_double(blocks_[leaf_level[pos]].measure()));
  }

  leaves_under_.assign(n, {});
  for (std::size_t j = levels_.size(); j-- > 0;) {
    for (BlockId b : levels_[j]) {
      auto& under = leaves_under_[b];
      if (j + 1 == levels_.size()) {
        under.push_back(leaf_position_[b]);
        continue;
      }
      for (BlockId c : this->children(b)) under.insert(under.end(), leaves_under_[c].begin(), leaves_under_[c].end());
      std::sort(under.begin(), under.end());
    }
  }
}

const Block& HierarchicalPartition::block(BlockId id) const {
  if (id >= blocks_.size()) throw Error(ErrorKind::MalformedPartition, "unknown block id " + std::to_string(id));
  return blocks_[id];
}

std::span<const BlockId> HierarchicalPartition::level(std::size_t j) const {
  if (j >= levels_.size()) throw Error(ErrorKind::MalformedPartition, "level " + std::to_string(j) + " out of range");
  return levels_[j];
}

std::span<const BlockId> HierarchicalPartition::children(BlockId id) const {
  const auto it = children_.find(id);
  if (it == children_.end()) return {};
  return it->second;
}

std::optional<BlockId> HierarchicalPartition::parent(BlockId id) const { return parent_.at(id); }

std::size_t HierarchicalPartition::leaf_position(BlockId leaf) const {
  const std::size_t pos = leaf_position_.at(leaf);
  if (pos == static_cast<std::size_t>(-1)) {
    throw Error(ErrorKind::MalformedPartition, "block " + std::to_string(leaf) + " is not a leaf");
  }
  return pos;
}

HierarchicalPartition refine_interval_levels(const std::vector<std::vector<Interval>>& levels) {
  if (levels.empty()) throw Error(ErrorKind::GapOrOverlap, "no levels given");
  const Interval unit{Rational(0), Rational(1)};
  if (levels[0].size() != 1 || !(levels[0][0] == unit)) {
    throw Error(ErrorKind::GapOrOverlap, "level 0 must be exactly {[0,1]}");
  }

  std::vector<std::vector<Interval>> sorted(levels);
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    auto& lv = sorted[j];
    if (lv.empty()) throw Error(ErrorKind::GapOrOverlap, "level " + std::to_string(j) + " is empty");
    std::sort(lv.begin(), lv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    Rational expected = 0;
    for (const Interval& iv : lv) {
      if (iv.lo != expected || !(iv.lo < iv.hi)) {
        throw Error(ErrorKind::GapOrOverlap,
                    "level " + std::to_string(j) + " does not tile [0,1] near " + to_string(expected));
      }
      expected = iv.hi;
    }
    if (expected != 1) throw Error(ErrorKind::GapOrOverlap, "level " + std::to_string(j) + " ends at " + to_string(expected));
  }

  std::vector<Block> blocks;
  HierarchicalPartition::ChildMap children;
  std::vector<BlockId> previous_ids;
  BlockId next_id = 0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    std::vector<BlockId> ids;
    for (const Interval& iv : sorted[j]) {
      const BlockId id = next_id++;
      ids.push_back(id);
      blocks.emplace_back(id, std::vector<Interval>{iv});
      if (j == 0) continue;
      std::optional<BlockId> owner;
      for (std::size_t p = 0; p < sorted[j - 1].size(); ++p) {
        if (sorted[j - 1][p].contains(iv)) {
          owner = previous_ids[p];
          break;
        }
      }
      if (!owner) {
        throw Error(ErrorKind::NotNested, "interval [" + to_string(iv.lo) + ", " + to_string(iv.hi) +
                                              ") at level " + std::to_string(j) + " straddles two parents");
      }
      children[*owner].push_back(id);
    }
    previous_ids = std::move(ids);
  }
  return HierarchicalPartition(1, std::move(blocks), std::move(children));
}

HierarchicalPartition tensor_product(const std::vector<const HierarchicalPartition*>& factors) {
  if (factors.empty()) throw Error(ErrorKind::MalformedPartition, "tensor product of no factors");
  const std::size_t depth = factors.front()->depth();
  std::size_t dimension = 0;
  for (const auto* f : factors) {
    if (f->depth() != depth) {
      throw Error(ErrorKind::DepthMismatch,
                  "factor depths " + std::to_string(depth) + " and " + std::to_string(f->depth()) + " differ");
    }
    dimension += f->dimension();
  }
  const std::size_t k = factors.size();

  // Per level: offset of the first id and mixed-radix strides (factor 0 fastest).
  std::vector<BlockId> offset(depth + 2, 0);
  std::vector<std::vector<std::size_t>> stride(depth + 1, std::vector<std::size_t>(k));
  std::vector<std::vector<std::size_t>> position_in_level(k);
  for (std::size_t f = 0; f < k; ++f) {
    position_in_level[f].assign(factors[f]->block_count(), 0);
    for (std::size_t j = 0; j <= depth; ++j) {
      const auto lv = factors[f]->level(j);
      for (std::size_t p = 0; p < lv.size(); ++p) position_in_level[f][lv[p]] = p;
    }
  }
  for (std::size_t j = 0; j <= depth; ++j) {
    std::size_t count = 1;
    for (std::size_t f = 0; f < k; ++f) {
      stride[j][f] = count;
      count *= factors[f]->level(j).size();
    }
    offset[j + 1] = static_cast<BlockId>(offset[j] + count);
  }

  std::vector<Block> blocks;
  blocks.reserve(offset[depth + 1]);
  HierarchicalPartition::ChildMap children;
  std::vector<std::size_t> digits(k);
  for (std::size_t j = 0; j <= depth; ++j) {
    const std::size_t count = offset[j + 1] - offset[j];
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rest = idx;
      std::vector<Interval> sides;
      std::vector<std::span<const BlockId>> factor_children(k);
      for (std::size_t f = 0; f < k; ++f) {
        const auto lv = factors[f]->level(j);
        digits[f] = rest % lv.size();
        rest /= lv.size();
        const BlockId fb = lv[digits[f]];
        const auto& fs = factors[f]->block(fb).sides();
        sides.insert(sides.end(), fs.begin(), fs.end());
        factor_children[f] = factors[f]->children(fb);
      }
      const BlockId id = static_cast<BlockId>(offset[j] + idx);
      blocks.emplace_back(id, std::move(sides));
      if (j == depth) continue;

      std::size_t combos = 1;
      for (const auto& fc : factor_children) combos *= fc.size();
      auto& kids = children[id];
      kids.reserve(combos);
      for (std::size_t c = 0; c < combos; ++c) {
        std::size_t r = c;
        std::size_t child = offset[j + 1];
        for (std::size_t f = 0; f < k; ++f) {
          const BlockId fc = factor_children[f][r % factor_children[f].size()];
          r /= factor_children[f].size();
          child += position_in_level[f][fc] * stride[j + 1][f];
        }
        kids.push_back(static_cast<BlockId>(child));
      }
    }
  }
  return HierarchicalPartition(dimension, std::move(blocks), std::move(children));
}

HierarchicalPartition tensor_partitions(const HierarchicalPartition& px, const HierarchicalPartition& py) {
  if (px.dimension() != 1 || py.dimension() != 1) {
    throw Error(ErrorKind::MalformedPartition, "tensor_partitions expects two 1-D partitions");
  }
  return tensor_product({&px, &py});
}

HierarchicalPartition make_dyadic_partition(std::size_t dimension, std::size_t depth) {
  if (dimension == 0) throw Error(ErrorKind::MalformedPartition, "dimension must be at least 1");
  std::vector<std::vector<Interval>> levels(depth + 1);
  for (std::size_t j = 0; j <= depth; ++j) {
    const std::int64_t n = std::int64_t{1} << j;
    for (std::int64_t i = 0; i < n; ++i) levels[j].push_back({make_rational(i, n), make_rational(i + 1, n)});
  }
  const HierarchicalPartition line = refine_interval_levels(levels);
  if (dimension == 1) return line;
  return tensor_product(std::vector<const HierarchicalPartition*>(dimension, &line));
}

bool PartitionReport::ok() const {
  const bool tiled = std::all_of(levels.begin(), levels.end(), [](const LevelTiling& t) { return t.residual == 0; });
  return tiled && not_nested.empty() && measure_mismatch.empty() && sibling_overlap.empty();
}

std::string PartitionReport::summary() const {
  std::ostringstream out;
  for (const auto& t : levels) {
    if (t.residual != 0) out << "level " << t.level << ": tiling residual " << to_string(t.residual) << "\n";
  }
  for (BlockId b : not_nested) out << "NotNested: block " << b << " lies outside its parent\n";
  for (BlockId b : measure_mismatch) out << "block " << b << ": children measures do not sum to its measure\n";
  for (const auto& [a, b] : sibling_overlap) out << "GapOrOverlap: siblings " << a << " and " << b << " overlap\n";
  return out.str();
}

PartitionReport validate_partition(const HierarchicalPartition& partition) {
  PartitionReport report;
  const Rational& total = partition.root().measure();
  for (std::size_t j = 0; j <= partition.depth(); ++j) {
    Rational sum = 0;
    for (BlockId b : partition.level(j)) sum += partition.block(b).measure();
    report.levels.push_back({j, total - sum});
  }
  for (const auto& [parent, kids] : partition.child_map()) {
    const Block& pb = partition.block(parent);
    Rational sum = 0;
    for (std::size_t a = 0; a < kids.size(); ++a) {
      const Block& cb = partition.block(kids[a]);
      sum += cb.measure();
      if (!pb.contains(cb)) report.not_nested.push_back(kids[a]);
      for (std::size_t b = a + 1; b < kids.size(); ++b) {
        if (intersection_measure(cb, partition.block(kids[b])) > 0) report.sibling_overlap.emplace_back(kids[a], kids[b]);
      }
    }
    if (sum != pb.measure()) report.measure_mismatch.push_back(parent);
  }
  return report;
}

}  // namespace adahaar
