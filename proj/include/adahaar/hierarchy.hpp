#pragma once

// Compact boxes, nested block partitions of them, and their exact measures.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adahaar/rational.hpp"

namespace adahaar {

using BlockId = std::uint32_t;

struct Interval {
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }

  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};

/// Positive length of the overlap of two intervals, zero if they only touch.
Rational overlap_length(const Interval& a, const Interval& b);

/// Axis-aligned box. Half-open except on the upper boundary of K; only the
/// measure enters the framelet construction.
class Block {
 public:
  Block(BlockId id, std::vector<Interval> sides);

  BlockId id() const { return id_; }
  std::size_t dimension() const { return sides_.size(); }
  const std::vector<Interval>& sides() const { return sides_; }
  const Interval& side(std::size_t axis) const { return sides_[axis]; }
  const Rational& measure() const { return measure_; }

  bool contains(const Block& other) const;

 private:
  BlockId id_;
  std::vector<Interval> sides_;
  Rational measure_;
};

/// |a ∩ b| (Lebesgue measure of the intersection).
Rational intersection_measure(const Block& a, const Block& b);

/// The nested block tree {B_j}, j = 0..depth, of a box K.
///
/// The constructor checks the tree structure only: block ids are dense
/// 0..n-1, block 0 is the root K, every other block has exactly one parent,
/// and every leaf sits at the same depth. Geometric consistency (children
/// inside and tiling their parent) is reported by validate_partition(), so a
/// malformed hand-built partition can still be inspected.
///
/// Blocks of a level are ordered by ascending id; leaf positions index that
/// order and are the coordinates PwcFunction uses.
class HierarchicalPartition {
 public:
  using ChildMap = std::map<BlockId, std::vector<BlockId>>;

  HierarchicalPartition(std::size_t dimension, std::vector<Block> blocks, ChildMap children);

  std::size_t dimension() const { return dimension_; }
  std::size_t depth() const { return levels_.size() - 1; }
  std::size_t block_count() const { return blocks_.size(); }

  const Block& block(BlockId id) const;
  const Block& root() const { return blocks_.front(); }
  const std::vector<Block>& blocks() const { return blocks_; }

  std::span<const BlockId> level(std::size_t j) const;
  std::size_t level_of(BlockId id) const { return level_of_.at(id); }
  std::span<const BlockId> children(BlockId id) const;
  std::optional<BlockId> parent(BlockId id) const;
  const ChildMap& child_map() const { return children_; }

  std::span<const BlockId> leaves() const { return level(depth()); }
  std::size_t leaf_count() const { return leaves().size(); }
  /// Position of a leaf block in leaves().
  std::size_t leaf_position(BlockId leaf) const;
  /// Leaf positions of all leaves below (or equal to) a block, ascending.
  std::span<const std::size_t> leaves_under(BlockId id) const { return leaves_under_.at(id); }
  /// |leaf| as a double, indexed by leaf position.
  std::span<const double> leaf_measures() const { return leaf_measures_; }

 private:
  std::size_t dimension_;
  std::vector<Block> blocks_;
  ChildMap children_;
  std::vector<std::optional<BlockId>> parent_;
  std::vector<std::size_t> level_of_;
  std::vector<std::vector<BlockId>> levels_;
  std::vector<std::size_t> leaf_position_;
  std::vector<std::vector<std::size_t>> leaves_under_;
  std::vector<double> leaf_measures_;
};

using PartitionPtr = std::shared_ptr<const HierarchicalPartition>;

/// Dyadic partition of [0,1]^d: level j holds 2^{jd} congruent cubes, each
/// split into 2^d children. Ids and children run with the first axis fastest.
HierarchicalPartition make_dyadic_partition(std::size_t dimension, std::size_t depth);

/// 1-D partition of [0,1] from explicit levels; levels[0] must be {[0,1]}.
/// Throws GapOrOverlap if a level does not tile [0,1] and NotNested if an
/// interval straddles two intervals of the previous level.
HierarchicalPartition refine_interval_levels(const std::vector<std::vector<Interval>>& levels);

/// Level-wise product of equally deep partitions. Level j of the result holds
/// every product of level-j blocks; the first factor varies fastest, both in
/// block ids and in child order. Throws DepthMismatch.
HierarchicalPartition tensor_product(const std::vector<const HierarchicalPartition*>& factors);

/// B_j = I_j^x ⊗ I_j^y for two 1-D partitions.
HierarchicalPartition tensor_partitions(const HierarchicalPartition& px, const HierarchicalPartition& py);

struct LevelTiling {
  std::size_t level = 0;
  Rational residual;  // |K| - sum of block measures on the level
};

struct PartitionReport {
  std::vector<LevelTiling> levels;
  std::vector<BlockId> not_nested;                          // children outside their parent
  std::vector<BlockId> measure_mismatch;                    // parents whose children do not sum to them
  std::vector<std::pair<BlockId, BlockId>> sibling_overlap;  // siblings meeting in positive measure

  bool ok() const;
  std::string summary() const;
};

/// Root/nested property check with exact arithmetic. Sibling overlaps plus
/// child containment plus measure sums imply level-wise tiling by induction;
/// the per-level residual is reported independently.
PartitionReport validate_partition(const HierarchicalPartition& partition);

}  // namespace adahaar
