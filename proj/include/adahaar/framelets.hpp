#pragma once

// Haar-type tight framelets on a hierarchical partition: the generator matrix,
// the per-block generators, cut-off systems, and analysis/synthesis.

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adahaar/hierarchy.hpp"

namespace adahaar {

/// A piecewise-constant function on the leaf level of a partition, stored as
/// sorted (leaf position, value) pairs. Absent leaves are zero.
class PwcFunction {
 public:
  struct Entry {
    std::size_t leaf;
    double value;
  };

  explicit PwcFunction(PartitionPtr partition);
  PwcFunction(PartitionPtr partition, std::vector<Entry> entries);

  static PwcFunction from_dense(PartitionPtr partition, std::span<const double> leaf_values);
  /// χ_B for any block of the partition.
  static PwcFunction indicator(PartitionPtr partition, BlockId block);

  const PartitionPtr& partition() const { return partition_; }
  std::span<const Entry> entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  double value_at(std::size_t leaf) const;
  std::vector<double> dense() const;

  /// ∫ f = Σ f(leaf)·|leaf|.
  double integral() const;
  double norm() const;

  PwcFunction& axpy(double alpha, const PwcFunction& g);
  PwcFunction& scale(double alpha);

 private:
  PartitionPtr partition_;
  std::vector<Entry> entries_;
};

/// ⟨f, g⟩ = Σ f(leaf)·g(leaf)·|leaf|. Throws PartitionMismatch.
double inner_product(const PwcFunction& f, const PwcFunction& g);
/// ⟨f, g⟩ with f given densely over leaf positions.
double inner_product(std::span<const double> f_dense, const PwcFunction& g);
/// ‖f − g‖₂.
double distance(const PwcFunction& f, const PwcFunction& g);

/// (i1, i2) ↦ (2m − i1)(i1 − 1)/2 + i2 − i1, a bijection from
/// 1 ≤ i1 < i2 ≤ m onto 1..m(m−1)/2. Throws BadPair.
std::size_t pair_to_flat(std::size_t i1, std::size_t i2, std::size_t m);
std::pair<std::size_t, std::size_t> flat_to_pair(std::size_t i, std::size_t m);

/// The (n+1)×m matrix whose first row is (√b_ℓ) and whose row (i1,i2) holds
/// √b_{i2} at column i1 and −√b_{i1} at column i2. AᵀA = I_m.
/// Throws BadWeights unless every b_ℓ > 0 and |Σ b_ℓ − 1| ≤ 1e−12.
Eigen::MatrixXd build_matrix_a(std::span<const double> weights);

struct AtomKey {
  std::size_t level = 0;
  BlockId parent = 0;
  std::size_t l1 = 0;  // 1-based child indices, l1 < l2
  std::size_t l2 = 0;

  friend auto operator<=>(const AtomKey&, const AtomKey&) = default;
};

/// ψ^{(ℓ1,ℓ2)}_{j,B} = √b_{ℓ2} γ_{ℓ1} − √b_{ℓ1} γ_{ℓ2}, γ_ℓ = χ_{B_ℓ}/√|B_ℓ|.
struct FrameletAtom {
  AtomKey key;
  BlockId child1 = 0;
  BlockId child2 = 0;
  PwcFunction function;
};

/// The generators of one parent block, in pair_to_flat order. Empty when the
/// block has fewer than two children.
std::vector<FrameletAtom> build_generators(const PartitionPtr& partition, BlockId parent);

/// {φ0} together with a set of atoms, ordered by (level, parent, flat pair).
/// Cut-off systems, their restrictions and prunings all share this type.
class FrameletSystem {
 public:
  FrameletSystem(PartitionPtr partition, std::size_t depth, std::vector<FrameletAtom> atoms);

  const PartitionPtr& partition() const { return partition_; }
  std::size_t depth() const { return depth_; }
  const PwcFunction& phi0() const { return phi0_; }
  const std::vector<FrameletAtom>& atoms() const { return atoms_; }
  /// Number of functions including φ0.
  std::size_t size() const { return atoms_.size() + 1; }

  std::optional<std::size_t> find(const AtomKey& key) const;
  /// Atom count per level 0..depth−1.
  std::vector<std::size_t> atoms_per_level() const;
  /// φ0 first, then the atoms.
  std::vector<PwcFunction> functions() const;

  FrameletSystem filtered(const std::function<bool(const FrameletAtom&)>& keep) const;
  FrameletSystem without(const AtomKey& key) const;

 private:
  PartitionPtr partition_;
  std::size_t depth_;
  PwcFunction phi0_;
  std::vector<FrameletAtom> atoms_;
};

/// Cut-off system X({B_j}_{j=0}^J): φ0 plus the generators of every block on
/// levels 0..J−1. Requires J ≤ partition depth.
FrameletSystem build_system(const PartitionPtr& partition, std::size_t depth);
FrameletSystem build_system(const PartitionPtr& partition);

struct CoefficientVector {
  double phi0 = 0.0;
  std::vector<double> atoms;  // aligned with FrameletSystem::atoms()

  double squared_norm() const;
};

CoefficientVector analyze(const FrameletSystem& system, const PwcFunction& f);
PwcFunction synthesize(const FrameletSystem& system, const CoefficientVector& c);

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Extreme eigenvalues of Σ_h ⟨·, h⟩h restricted to span(space). The span is
/// orthonormalised through its Gram matrix; throws DegenerateSpan when that
/// Gram matrix has an eigenvalue below 1e−10 relative to the largest.
FrameBounds frame_bounds(std::span<const PwcFunction> functions, std::span<const PwcFunction> space);

/// Pairwise inner products of φ0 and all atoms, in functions() order.
Eigen::MatrixXd gram_matrix(const FrameletSystem& system);

/// Indicators χ_B of the blocks of level j, the natural spanning set of V_j.
std::vector<PwcFunction> level_indicators(const PartitionPtr& partition, std::size_t level);

}  // namespace adahaar
