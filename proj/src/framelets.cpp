#include "adahaar/framelets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adahaar/error.hpp"

namespace adahaar {

namespace {

void require_same_partition(const PartitionPtr& a, const PartitionPtr& b) {
  if (a != b) throw Error(ErrorKind::PartitionMismatch, "functions live on different partitions");
}

}  // namespace

PwcFunction::PwcFunction(PartitionPtr partition) : partition_(std::move(partition)) {
  if (!partition_) throw Error(ErrorKind::PartitionMismatch, "null partition");
}

PwcFunction::PwcFunction(PartitionPtr partition, std::vector<Entry> entries)
    : partition_(std::move(partition)), entries_(std::move(entries)) {
  if (!partition_) throw Error(ErrorKind::PartitionMismatch, "null partition");
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.leaf < b.leaf; });
  const std::size_t n = partition_->leaf_count();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].leaf >= n) throw Error(ErrorKind::IndexMismatch, "leaf position out of range");
    if (i > 0 && entries_[i].leaf == entries_[i - 1].leaf) {
      throw Error(ErrorKind::IndexMismatch, "duplicate leaf " + std::to_string(entries_[i].leaf));
    }
  }
}

PwcFunction PwcFunction::from_dense(PartitionPtr partition, std::span<const double> leaf_values) {
  if (leaf_values.size() != partition->leaf_count()) {
    throw Error(ErrorKind::IndexMismatch, "dense values do not match the leaf count");
  }
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < leaf_values.size(); ++i) {
    if (leaf_values[i] != 0.0) entries.push_back({i, leaf_values[i]});
  }
  PwcFunction f(std::move(partition));
  f.entries_ = std::move(entries);
  return f;
}

PwcFunction PwcFunction::indicator(PartitionPtr partition, BlockId block) {
  std::vector<Entry> entries;
  for (std::size_t leaf : partition->leaves_under(block)) entries.push_back({leaf, 1.0});
  PwcFunction f(std::move(partition));
  f.entries_ = std::move(entries);
  return f;
}

double PwcFunction::value_at(std::size_t leaf) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), leaf,
                                   [](const Entry& e, std::size_t l) { return e.leaf < l; });
  return (it != entries_.end() && it->leaf == leaf) ? it->value : 0.0;
}

std::vector<double> PwcFunction::dense() const {
  std::vector<double> out(partition_->leaf_count(), 0.0);
  for (const Entry& e : entries_) out[e.leaf] = e.value;
  return out;
}

double PwcFunction::integral() const {
  const auto measures = partition_->leaf_measures();
  double sum = 0.0;
  for (const Entry& e : entries_) sum += e.value * measures[e.leaf];
  return sum;
}

double PwcFunction::norm() const { return std::sqrt(inner_product(*this, *this)); }

PwcFunction& PwcFunction::axpy(double alpha, const PwcFunction& g) {
  require_same_partition(partition_, g.partition_);
  std::vector<Entry> merged;
  merged.reserve(entries_.size() + g.entries_.size());
  auto a = entries_.begin();
  auto b = g.entries_.begin();
  while (a != entries_.end() || b != g.entries_.end()) {
    if (b == g.entries_.end() || (a != entries_.end() && a->leaf < b->leaf)) {
      merged.push_back(*a++);
    } else if (a == entries_.end() || b->leaf < a->leaf) {
      merged.push_back({b->leaf, alpha * b->value});
      ++b;
    } else {
      merged.push_back({a->leaf, a->value + alpha * b->value});
      ++a;
      ++b;
    }
  }
  entries_ = std::move(merged);
  return *this;
}

PwcFunction& PwcFunction::scale(double alpha) {
  for (Entry& e : entries_) e.value *= alpha;
  return *this;
}

double inner_product(const PwcFunction& f, const PwcFunction& g) {
  require_same_partition(f.partition(), g.partition());
  const auto measures = f.partition()->leaf_measures();
  const auto fe = f.entries();
  const auto ge = g.entries();
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t k = 0;
  while (i < fe.size() && k < ge.size()) {
    if (fe[i].leaf < ge[k].leaf) {
      ++i;
    } else if (ge[k].leaf < fe[i].leaf) {
      ++k;
    } else {
      sum += fe[i].value * ge[k].value * measures[fe[i].leaf];
      ++i;
      ++k;
    }
  }
  return sum;
}

double inner_product(std::span<const double> f_dense, const PwcFunction& g) {
  if (f_dense.size() != g.partition()->leaf_count()) {
    throw Error(ErrorKind::PartitionMismatch, "dense function does not match the leaf count");
  }
  const auto measures = g.partition()->leaf_measures();
  double sum = 0.0;
  for (const auto& e : g.entries()) sum += f_dense[e.leaf] * e.value * measures[e.leaf];
  return sum;
}

double distance(const PwcFunction& f, const PwcFunction& g) {
  PwcFunction d = f;
  d.axpy(-1.0, g);
  return d.norm();
}

std::size_t pair_to_flat(std::size_t i1, std::size_t i2, std::size_t m) {
  if (!(1 <= i1 && i1 < i2 && i2 <= m)) {
    throw Error(ErrorKind::BadPair, "need 1 <= i1 < i2 <= m, got (" + std::to_string(i1) + ", " +
                                        std::to_string(i2) + ", m=" + std::to_string(m) + ")");
  }
  return (2 * m - i1) * (i1 - 1) / 2 + i2 - i1;
}

std::pair<std::size_t, std::size_t> flat_to_pair(std::size_t i, std::size_t m) {
  if (m < 2 || i < 1 || i > m * (m - 1) / 2) {
    throw Error(ErrorKind::BadPair, "flat index " + std::to_string(i) + " out of range for m=" + std::to_string(m));
  }
  // Row i1 covers flat indices start+1 .. start+(m−i1).
  std::size_t start = 0;
  for (std::size_t i1 = 1; i1 < m; ++i1) {
    const std::size_t row = m - i1;
    if (i <= start + row) return {i1, i1 + (i - start)};
    start += row;
  }
  throw Error(ErrorKind::BadPair, "unreachable");
}

Eigen::MatrixXd build_matrix_a(std::span<const double> weights) {
  const std::size_t m = weights.size();
  if (m == 0) throw Error(ErrorKind::BadWeights, "no weights");
  double sum = 0.0;
  for (double b : weights) {
    if (!(b > 0.0)) throw Error(ErrorKind::BadWeights, "weights must be positive");
    sum += b;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorKind::BadWeights, "weights sum to " + std::to_string(sum));

  const std::size_t n = m * (m - 1) / 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(m));
  for (std::size_t l = 0; l < m; ++l) a(0, static_cast<Eigen::Index>(l)) = std::sqrt(weights[l]);
  for (std::size_t i1 = 1; i1 < m; ++i1) {
    for (std::size_t i2 = i1 + 1; i2 <= m; ++i2) {
      const auto row = static_cast<Eigen::Index>(pair_to_flat(i1, i2, m));
      a(row, static_cast<Eigen::Index>(i1 - 1)) = std::sqrt(weights[i2 - 1]);
      a(row, static_cast<Eigen::Index>(i2 - 1)) = -std::sqrt(weights[i1 - 1]);
    }
  }
  return a;
}

std::vector<FrameletAtom> build_generators(const PartitionPtr& partition, BlockId parent) {
  const auto kids = partition->children(parent);
  const std::size_t m = kids.size();
  std::vector<FrameletAtom> atoms;
  if (m < 2) return atoms;
  atoms.reserve(m * (m - 1) / 2);

  const Rational& parent_measure = partition->block(parent).measure();
  const std::size_t level = partition->level_of(parent);
  for (std::size_t l1 = 1; l1 < m; ++l1) {
    for (std::size_t l2 = l1 + 1; l2 <= m; ++l2) {
      const Rational& m1 = partition->block(kids[l1 - 1]).measure();
      const Rational& m2 = partition->block(kids[l2 - 1]).measure();
      // √b2·γ1 has height √(|B2| / (|B|·|B1|)); −√b1·γ2 has height −√(|B1| / (|B|·|B2|)).
      const double v1 = std::sqrt(to_double(Rational(m2 / (parent_measure * m1))));
      const double v2 = -std::sqrt(to_double(Rational(m1 / (parent_measure * m2))));
      std::vector<PwcFunction::Entry> entries;
      for (std::size_t leaf : partition->leaves_under(kids[l1 - 1])) entries.push_back({leaf, v1});
      for (std::size_t leaf : partition->leaves_under(kids[l2 - 1])) entries.push_back({leaf, v2});
      atoms.push_back(FrameletAtom{AtomKey{level, parent, l1, l2}, kids[l1 - 1], kids[l2 - 1],
                                   PwcFunction(partition, std::move(entries))});
    }
  }
  return atoms;
}

FrameletSystem::FrameletSystem(PartitionPtr partition, std::size_t depth, std::vector<FrameletAtom> atoms)
    : partition_(std::move(partition)), depth_(depth), phi0_(partition_), atoms_(std::move(atoms)) {
  if (depth_ > partition_->depth()) {
    throw Error(ErrorKind::DepthMismatch, "system depth " + std::to_string(depth_) + " exceeds partition depth " +
                                              std::to_string(partition_->depth()));
  }
  std::vector<double> values(partition_->leaf_count(), 1.0 / std::sqrt(to_double(partition_->root().measure())));
  phi0_ = PwcFunction::from_dense(partition_, values);

  std::sort(atoms_.begin(), atoms_.end(), [](const FrameletAtom& a, const FrameletAtom& b) { return a.key < b.key; });
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    require_same_partition(partition_, atoms_[i].function.partition());
    if (atoms_[i].key.level >= depth_) throw Error(ErrorKind::IndexMismatch, "atom level beyond the system depth");
    if (i > 0 && atoms_[i].key == atoms_[i - 1].key) throw Error(ErrorKind::IndexMismatch, "duplicate atom");
  }
}

std::optional<std::size_t> FrameletSystem::find(const AtomKey& key) const {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), key,
                                   [](const FrameletAtom& a, const AtomKey& k) { return a.key < k; });
  if (it == atoms_.end() || it->key != key) return std::nullopt;
  return static_cast<std::size_t>(it - atoms_.begin());
}

std::vector<std::size_t> FrameletSystem::atoms_per_level() const {
  std::vector<std::size_t> counts(depth_, 0);
  for (const auto& a : atoms_) ++counts[a.key.level];
  return counts;
}

std::vector<PwcFunction> FrameletSystem::functions() const {
  std::vector<PwcFunction> out;
  out.reserve(size());
  out.push_back(phi0_);
  for (const auto& a : atoms_) out.push_back(a.function);
  return out;
}

FrameletSystem FrameletSystem::filtered(const std::function<bool(const FrameletAtom&)>& keep) const {
  std::vector<FrameletAtom> kept;
  for (const auto& a : atoms_) {
    if (keep(a)) kept.push_back(a);
  }
  return FrameletSystem(partition_, depth_, std::move(kept));
}

FrameletSystem FrameletSystem::without(const AtomKey& key) const {
  return filtered([&](const FrameletAtom& a) { return a.key != key; });
}

FrameletSystem build_system(const PartitionPtr& partition, std::size_t depth) {
  if (depth > partition->depth()) {
    throw Error(ErrorKind::DepthMismatch, "cut-off level " + std::to_string(depth) + " exceeds partition depth");
  }
  std::vector<FrameletAtom> atoms;
  for (std::size_t j = 0; j < depth; ++j) {
    for (BlockId b : partition->level(j)) {
      auto generators = build_generators(partition, b);
      std::move(generators.begin(), generators.end(), std::back_inserter(atoms));
    }
  }
  return FrameletSystem(partition, depth, std::move(atoms));
}

FrameletSystem build_system(const PartitionPtr& partition) { return build_system(partition, partition->depth()); }

double CoefficientVector::squared_norm() const {
  double sum = phi0 * phi0;
  for (double c : atoms) sum += c * c;
  return sum;
}

CoefficientVector analyze(const FrameletSystem& system, const PwcFunction& f) {
  require_same_partition(system.partition(), f.partition());
  const std::vector<double> values = f.dense();
  CoefficientVector c;
  c.phi0 = inner_product(values, system.phi0());
  c.atoms.reserve(system.atoms().size());
  for (const auto& atom : system.atoms()) c.atoms.push_back(inner_product(values, atom.function));
  return c;
}

PwcFunction synthesize(const FrameletSystem& system, const CoefficientVector& c) {
  if (c.atoms.size() != system.atoms().size()) {
    throw Error(ErrorKind::IndexMismatch, "coefficient count " + std::to_string(c.atoms.size()) +
                                              " does not match " + std::to_string(system.atoms().size()) + " atoms");
  }
  std::vector<double> values(system.partition()->leaf_count(), 0.0);
  for (const auto& e : system.phi0().entries()) values[e.leaf] += c.phi0 * e.value;
  for (std::size_t i = 0; i < c.atoms.size(); ++i) {
    if (c.atoms[i] == 0.0) continue;
    for (const auto& e : system.atoms()[i].function.entries()) values[e.leaf] += c.atoms[i] * e.value;
  }
  return PwcFunction::from_dense(system.partition(), values);
}

FrameBounds frame_bounds(std::span<const PwcFunction> functions, std::span<const PwcFunction> space) {
  if (functions.empty() || space.empty()) throw Error(ErrorKind::DegenerateSpan, "empty function or space list");
  const auto k = static_cast<Eigen::Index>(space.size());
  const auto n = static_cast<Eigen::Index>(functions.size());

  Eigen::MatrixXd gram(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      gram(a, b) = gram(b, a) = inner_product(space[static_cast<std::size_t>(a)], space[static_cast<std::size_t>(b)]);
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> space_eig(gram);
  const Eigen::VectorXd lambda = space_eig.eigenvalues();
  if (!(lambda.maxCoeff() > 0.0) || lambda.minCoeff() < 1e-10 * lambda.maxCoeff()) {
    throw Error(ErrorKind::DegenerateSpan, "space basis is numerically rank-deficient");
  }
  // Orthonormal basis q_i = Σ_j s_j U_ji / √λ_i.
  const Eigen::MatrixXd to_orthonormal = space_eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal();

  Eigen::MatrixXd projections(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      projections(i, j) = inner_product(functions[static_cast<std::size_t>(i)], space[static_cast<std::size_t>(j)]);
    }
  }
  const Eigen::MatrixXd coords = projections * to_orthonormal;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> frame_eig(coords.transpose() * coords,
                                                                  Eigen::EigenvaluesOnly);
  return {frame_eig.eigenvalues().minCoeff(), frame_eig.eigenvalues().maxCoeff()};
}

Eigen::MatrixXd gram_matrix(const FrameletSystem& system) {
  const auto fs = system.functions();
  const auto n = static_cast<Eigen::Index>(fs.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      g(a, b) = g(b, a) = inner_product(fs[static_cast<std::size_t>(a)], fs[static_cast<std::size_t>(b)]);
    }
  }
  return g;
}

std::vector<PwcFunction> level_indicators(const PartitionPtr& partition, std::size_t level) {
  std::vector<PwcFunction> out;
  for (BlockId b : partition->level(level)) out.push_back(PwcFunction::indicator(partition, b));
  return out;
}

}  // namespace adahaar
