#include "adahaar/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "adahaar/error.hpp"

namespace adahaar {

Digraph::Digraph(std::vector<std::string> labels, Eigen::MatrixXd weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (n == 0) throw Error(ErrorKind::ValidationError, "graph needs at least one vertex");
  if (weights_.rows() != n || weights_.cols() != n) {
    throw Error(ErrorKind::ValidationError, "weight matrix does not match the vertex count");
  }
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw Error(ErrorKind::ValidationError, "weights must be finite and non-negative");
  }
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorKind::ValidationError, "duplicate vertex label '" + l + "'");
  }
}

std::optional<std::size_t> Digraph::index_of(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

bool Digraph::has_integer_weights() const {
  return (weights_.array() == weights_.array().round()).all();
}

Graph::Graph(std::vector<std::string> labels, Eigen::MatrixXd weights)
    : Digraph(std::move(labels), std::move(weights)) {
  if (this->weights() != this->weights().transpose()) {
    throw Error(ErrorKind::ValidationError, "undirected graph needs a symmetric weight matrix");
  }
}

double degree(const Digraph& g, std::size_t v) {
  if (v >= g.size()) throw Error(ErrorKind::UnknownVertex, "vertex " + std::to_string(v) + " out of range");
  return g.weights().row(static_cast<Eigen::Index>(v)).sum();
}

bool is_weakly_connected(const Digraph& g) {
  const std::size_t n = g.size();
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      if (!seen[v] && (g.weight(u, v) + g.weight(v, u)) > 0.0) {
        seen[v] = true;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return reached == n;
}

SymmetrizedPair symmetrize(const Digraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  const Eigen::MatrixXd extended = Eigen::MatrixXd::Identity(n, n) + g.weights();
  Eigen::MatrixXd pre = extended * extended.transpose();
  Eigen::MatrixXd post = extended.transpose() * extended;
  pre.diagonal().setZero();
  post.diagonal().setZero();
  return {Graph(g.labels(), std::move(pre)), Graph(g.labels(), std::move(post))};
}

Clustering::Clustering(std::vector<std::size_t> assignment) : assignment_(std::move(assignment)) {
  if (assignment_.empty()) throw Error(ErrorKind::BadClustering, "empty assignment");
  const std::size_t count = *std::max_element(assignment_.begin(), assignment_.end()) + 1;
  clusters_.assign(count, {});
  for (std::size_t v = 0; v < assignment_.size(); ++v) clusters_[assignment_[v]].push_back(v);
  for (std::size_t c = 0; c < count; ++c) {
    if (clusters_[c].empty()) throw Error(ErrorKind::BadClustering, "cluster " + std::to_string(c) + " is empty");
  }
}

Clustering Clustering::singletons(std::size_t n) {
  std::vector<std::size_t> a(n);
  for (std::size_t v = 0; v < n; ++v) a[v] = v;
  return Clustering(std::move(a));
}

Clustering Clustering::single_cluster(std::size_t n) { return Clustering(std::vector<std::size_t>(n, 0)); }

Graph coarse_grain(const Graph& g, const Clustering& clustering) {
  if (clustering.vertex_count() != g.size()) {
    throw Error(ErrorKind::BadClustering, "clustering covers " + std::to_string(clustering.vertex_count()) +
                                              " vertices, graph has " + std::to_string(g.size()));
  }
  const auto m = static_cast<Eigen::Index>(clustering.cluster_count());
  Eigen::MatrixXd coarse = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t u = 0; u < g.size(); ++u) {
    const auto cu = static_cast<Eigen::Index>(clustering.cluster_of(u));
    for (std::size_t v = 0; v < g.size(); ++v) {
      coarse(cu, static_cast<Eigen::Index>(clustering.cluster_of(v))) += g.weight(u, v);
    }
  }
  std::vector<std::string> labels;
  for (const auto& members : clustering.clusters()) {
    std::string label;
    for (std::size_t v : members) label += (label.empty() ? "" : "+") + g.label(v);
    labels.push_back(std::move(label));
  }
  return Graph(std::move(labels), std::move(coarse));
}

Clustering default_cluster(const Graph& g, const ClusterParams& params) {
  const std::size_t n = g.size();
  const std::size_t target = std::max<std::size_t>(1, params.target.value_or((n + 1) / 2));

  // Clusters stay sorted by smallest member, so index order is min-id order.
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<double> deg(n);
  Eigen::MatrixXd between = g.weights();
  for (std::size_t v = 0; v < n; ++v) {
    members[v] = {v};
    deg[v] = degree(g, v);
  }

  while (members.size() > target) {
    const std::size_t m = members.size();
    std::size_t best_a = 0;
    std::size_t best_b = 1;
    double best_w = -1.0;
    double best_p = 1.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        double w = between(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        double p = deg[a] * deg[b];
        if (!(p > 0.0)) {
          w = 0.0;
          p = 1.0;
        }
        // w / p > best_w / best_p, without dividing.
        if (w * best_p > best_w * p) {
          best_a = a;
          best_b = b;
          best_w = w;
          best_p = p;
        }
      }
    }

    const auto ia = static_cast<Eigen::Index>(best_a);
    const auto ib = static_cast<Eigen::Index>(best_b);
    between.row(ia) += between.row(ib);
    between.col(ia) += between.col(ib);
    const Eigen::Index last = static_cast<Eigen::Index>(m) - 1;
    if (ib < last) {
      between.block(ib, 0, last - ib, m) = between.block(ib + 1, 0, last - ib, m).eval();
      between.block(0, ib, m, last - ib) = between.block(0, ib + 1, m, last - ib).eval();
    }
    between.conservativeResize(last, last);

    members[best_a].insert(members[best_a].end(), members[best_b].begin(), members[best_b].end());
    std::sort(members[best_a].begin(), members[best_a].end());
    deg[best_a] += deg[best_b];
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(best_b));
    deg.erase(deg.begin() + static_cast<std::ptrdiff_t>(best_b));
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t c = 0; c < members.size(); ++c) {
    for (std::size_t v : members[c]) assignment[v] = c;
  }
  return Clustering(std::move(assignment));
}

Clustering GreedyClusterer::cluster(const Graph& g, std::size_t step) {
  ClusterParams params;
  if (step < targets_.size()) params.target = targets_[step];
  return default_cluster(g, params);
}

Clustering FixedClusterer::cluster(const Graph& g, std::size_t step) {
  if (step >= steps_.size()) {
    throw Error(ErrorKind::ClustererStalled, "no clustering supplied for step " + std::to_string(step));
  }
  if (steps_[step].vertex_count() != g.size()) {
    throw Error(ErrorKind::BadClustering, "clustering for step " + std::to_string(step) + " has the wrong size");
  }
  return steps_[step];
}

Chain::Chain(std::vector<Graph> graphs, std::vector<std::vector<std::size_t>> parents)
    : graphs_(std::move(graphs)), parents_(std::move(parents)) {
  if (graphs_.empty()) throw Error(ErrorKind::ValidationError, "chain has no graphs");
  if (parents_.size() + 1 != graphs_.size()) {
    throw Error(ErrorKind::ValidationError, "chain needs one parent map per coarsening step");
  }
  for (std::size_t k = 0; k < parents_.size(); ++k) {
    if (parents_[k].size() != graphs_[k].size()) {
      throw Error(ErrorKind::ValidationError, "parent map " + std::to_string(k) + " has the wrong length");
    }
    std::vector<bool> hit(graphs_[k + 1].size(), false);
    for (std::size_t p : parents_[k]) {
      if (p >= hit.size()) throw Error(ErrorKind::ValidationError, "parent map " + std::to_string(k) + " out of range");
      hit[p] = true;
    }
    if (std::find(hit.begin(), hit.end(), false) != hit.end()) {
      throw Error(ErrorKind::ValidationError, "graph " + std::to_string(k + 1) + " has a node without members");
    }
  }
}

std::vector<std::size_t> Chain::children_of(std::size_t j, std::size_t u) const {
  std::vector<std::size_t> out;
  if (j >= depth()) return out;
  const auto& map = parents_.at(depth() - j - 1);
  for (std::size_t v = 0; v < map.size(); ++v) {
    if (map[v] == u) out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> Chain::members(std::size_t j, std::size_t u) const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < finest().size(); ++v) {
    std::size_t node = v;
    for (std::size_t k = 0; k < depth() - j; ++k) node = parents_[k][node];
    if (node == u) out.push_back(v);
  }
  return out;
}

std::vector<std::string> Chain::validate() const {
  std::vector<std::string> problems;
  if (graphs_.back().size() != 1) {
    problems.push_back("coarsest graph has " + std::to_string(graphs_.back().size()) + " nodes, expected 1");
  }
  for (std::size_t k = 0; k < parents_.size(); ++k) {
    const Graph expected = coarse_grain(graphs_[k], Clustering(parents_[k]));
    const Eigen::MatrixXd& actual = graphs_[k + 1].weights();
    const bool exact = graphs_[k].has_integer_weights() && graphs_[k + 1].has_integer_weights();
    for (Eigen::Index a = 0; a < actual.rows(); ++a) {
      for (Eigen::Index b = 0; b < actual.cols(); ++b) {
        const double want = expected.weights()(a, b);
        const double got = actual(a, b);
        const bool match = exact ? want == got : std::abs(want - got) <= 1e-12 * std::max(1.0, std::abs(want));
        if (!match) {
          problems.push_back("graph " + std::to_string(k + 1) + " weight (" + graphs_[k + 1].label(a) + ", " +
                             graphs_[k + 1].label(b) + ") is " + std::to_string(got) + ", coarse-graining gives " +
                             std::to_string(want));
        }
      }
    }
  }
  return problems;
}

Chain build_chain(const Graph& g, Clusterer& clusterer, std::size_t max_steps) {
  std::vector<Graph> graphs{g};
  std::vector<std::vector<std::size_t>> parents;
  for (std::size_t step = 0; graphs.back().size() > 1 && step < max_steps; ++step) {
    const Graph& current = graphs.back();
    const Clustering c = clusterer.cluster(current, step);
    if (c.vertex_count() != current.size()) throw Error(ErrorKind::BadClustering, "clusterer returned the wrong size");
    if (c.cluster_count() == current.size()) {
      throw Error(ErrorKind::ClustererStalled, "step " + std::to_string(step) + " left all " +
                                                   std::to_string(current.size()) + " nodes unmerged");
    }
    Graph coarse = coarse_grain(current, c);
    parents.push_back(c.assignment());
    graphs.push_back(std::move(coarse));
  }
  if (graphs.back().size() > 1) {
    const Clustering all = Clustering::single_cluster(graphs.back().size());
    Graph root = coarse_grain(graphs.back(), all);
    parents.push_back(all.assignment());
    graphs.push_back(std::move(root));
  }
  return Chain(std::move(graphs), std::move(parents));
}

Chain pad_chain(const Chain& chain, std::size_t target_depth) {
  if (target_depth < chain.depth()) {
    throw Error(ErrorKind::DepthMismatch, "cannot pad a depth-" + std::to_string(chain.depth()) + " chain down to " +
                                              std::to_string(target_depth));
  }
  const std::size_t extra = target_depth - chain.depth();
  std::vector<Graph> graphs(extra, chain.finest());
  graphs.insert(graphs.end(), chain.graphs().begin(), chain.graphs().end());
  std::vector<std::vector<std::size_t>> parents(extra, Clustering::singletons(chain.finest().size()).assignment());
  parents.insert(parents.end(), chain.parents().begin(), chain.parents().end());
  return Chain(std::move(graphs), std::move(parents));
}

}  // namespace adahaar
