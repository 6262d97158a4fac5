#pragma once

// Weighted graphs and digraphs, symmetrization of digraphs, coarse-graining
// by clustering, and coarse-grained chains G_J, ..., G_0.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace adahaar {

/// Vertex labels plus a dense non-negative weight matrix; W(u,v) is the arc
/// u → v. Self-loops live on the diagonal.
class Digraph {
 public:
  Digraph(std::vector<std::string> labels, Eigen::MatrixXd weights);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t v) const { return labels_.at(v); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  const Eigen::MatrixXd& weights() const { return weights_; }
  double weight(std::size_t u, std::size_t v) const {
    return weights_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
  }
  double total_weight() const { return weights_.sum(); }
  bool has_integer_weights() const;

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd weights_;
};

/// Undirected graph: W(u,v) = W(v,u) exactly.
class Graph : public Digraph {
 public:
  Graph(std::vector<std::string> labels, Eigen::MatrixXd weights);
};

/// d(v) = Σ_u W(v,u); a self-loop counts once.
double degree(const Digraph& g, std::size_t v);

/// Connectivity of the underlying undirected graph (W + Wᵀ)/2.
bool is_weakly_connected(const Digraph& g);

struct SymmetrizedPair {
  Graph x;  // (I+W)(I+W)ᵀ without its diagonal
  Graph y;  // (I+W)ᵀ(I+W) without its diagonal
};

SymmetrizedPair symmetrize(const Digraph& g);

/// A partition of the vertex set into clusters 0..count−1.
class Clustering {
 public:
  /// Throws BadClustering unless ids are dense and every cluster non-empty.
  explicit Clustering(std::vector<std::size_t> assignment);

  std::size_t vertex_count() const { return assignment_.size(); }
  std::size_t cluster_count() const { return clusters_.size(); }
  std::size_t cluster_of(std::size_t v) const { return assignment_.at(v); }
  const std::vector<std::size_t>& assignment() const { return assignment_; }
  /// Members of each cluster, ascending.
  const std::vector<std::vector<std::size_t>>& clusters() const { return clusters_; }

  static Clustering singletons(std::size_t n);
  static Clustering single_cluster(std::size_t n);

 private:
  std::vector<std::size_t> assignment_;
  std::vector<std::vector<std::size_t>> clusters_;
};

/// W^cg([u],[v]) = Σ_{u∈[u]} Σ_{v∈[v]} W(u,v); the diagonal keeps the
/// ordered-pair sum inside each cluster. Cluster labels join member labels
/// with '+'. Throws BadClustering if the clustering does not cover g.
Graph coarse_grain(const Graph& g, const Clustering& clustering);

struct ClusterParams {
  /// Number of clusters to stop at; ⌈n/2⌉ when unset.
  std::optional<std::size_t> target;
};

/// Deterministic greedy agglomeration: repeatedly merge the two clusters
/// maximising W(A,B) / (d(A)·d(B)), ties going to the lexicographically
/// smallest (min vertex of A, min vertex of B). Clusters come out ordered by
/// their smallest vertex.
Clustering default_cluster(const Graph& g, const ClusterParams& params = {});

class Clusterer {
 public:
  virtual ~Clusterer() = default;
  /// Clustering of the current finest graph; step counts from 0 at G_J.
  virtual Clustering cluster(const Graph& g, std::size_t step) = 0;
};

/// default_cluster with one target per step; steps past the list use ⌈n/2⌉.
class GreedyClusterer : public Clusterer {
 public:
  explicit GreedyClusterer(std::vector<std::size_t> targets = {}) : targets_(std::move(targets)) {}
  Clustering cluster(const Graph& g, std::size_t step) override;

 private:
  std::vector<std::size_t> targets_;
};

/// Replays a fixed list of clusterings, e.g. to reproduce a published chain.
class FixedClusterer : public Clusterer {
 public:
  explicit FixedClusterer(std::vector<Clustering> steps) : steps_(std::move(steps)) {}
  Clustering cluster(const Graph& g, std::size_t step) override;

 private:
  std::vector<Clustering> steps_;
};

/// Coarse-grained chain, stored finest first: graphs()[0] = G_J and
/// graphs()[J] = G_0. parents()[k][v] is the node of graphs()[k+1] that
/// contains node v of graphs()[k].
class Chain {
 public:
  /// Checks shapes only (counts, parent ranges, surjectivity); weights are
  /// checked by validate().
  Chain(std::vector<Graph> graphs, std::vector<std::vector<std::size_t>> parents);

  std::size_t depth() const { return graphs_.size() - 1; }
  const std::vector<Graph>& graphs() const { return graphs_; }
  const std::vector<std::vector<std::size_t>>& parents() const { return parents_; }

  /// G_j for j = 0..depth.
  const Graph& level(std::size_t j) const { return graphs_.at(depth() - j); }
  const Graph& finest() const { return graphs_.front(); }
  /// Node of G_{j−1} containing node v of G_j, for j ≥ 1.
  std::size_t parent_of(std::size_t j, std::size_t v) const { return parents_.at(depth() - j).at(v); }
  /// Nodes of G_{j+1} inside node u of G_j, ascending.
  std::vector<std::size_t> children_of(std::size_t j, std::size_t u) const;
  /// Original vertices (nodes of G_J) inside node u of G_j, ascending.
  std::vector<std::size_t> members(std::size_t j, std::size_t u) const;

  /// Empty when the chain is a valid coarse-grained chain with a one-node
  /// root; otherwise one message per violation.
  std::vector<std::string> validate() const;

 private:
  std::vector<Graph> graphs_;
  std::vector<std::vector<std::size_t>> parents_;
};

/// Applies the clusterer until one node remains or max_steps clusterings were
/// made, then appends a one-node root if needed. Throws ClustererStalled when
/// a step merges nothing.
Chain build_chain(const Graph& g, Clusterer& clusterer, std::size_t max_steps = 64);

/// Repeats the finest graph with identity parent maps until the chain has
/// the target depth.
Chain pad_chain(const Chain& chain, std::size_t target_depth);

}  // namespace adahaar
