#include <doctest.h>

#include <map>

#include "adahaar/error.hpp"
#include "test_support.hpp"

using namespace adahaar;
using testsupport::q;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an adahaar::Error");
  return ErrorKind::ValidationError;
}

struct Example2 {
  Digraph g = testsupport::load_digraph("example2_digraph.json");
  Chain cx = testsupport::load_chain("example2_chain_x.json");
  Chain cy = testsupport::load_chain("example2_chain_y.json");
  VertexBlockMap vbm = digraph_embedding(g, cx, cy);
  FrameletSystem full = build_system(vbm.partition());
  FrameletSystem restricted = restrict_system(full, vbm);
};

const Example2& example2() {
  static const Example2 e;
  return e;
}

std::map<BlockId, std::size_t> atoms_per_parent(const FrameletSystem& s, std::size_t level) {
  std::map<BlockId, std::size_t> out;
  for (const auto& a : s.atoms()) {
    if (a.key.level == level) ++out[a.key.parent];
  }
  return out;
}

}  // namespace

TEST_CASE("example 1 chain gives the reference intervals at every level") {
  const auto e = chain_to_intervals(testsupport::load_chain("example1_chain.json"));
  const std::vector<Interval> leaves{{q(0), q(1, 6)},     {q(1, 6), q(1, 4)},   {q(1, 4), q(7, 12)},
                                     {q(7, 12), q(3, 4)}, {q(3, 4), q(11, 12)}, {q(11, 12), q(1)}};
  for (std::size_t v = 0; v < 6; ++v) CHECK(e.interval(3, v) == leaves[v]);
  CHECK(e.interval(2, 0) == Interval{q(0), q(1, 4)});
  CHECK(e.interval(2, 1) == Interval{q(1, 4), q(11, 12)});
  CHECK(e.interval(2, 2) == Interval{q(11, 12), q(1)});
  CHECK(e.interval(1, 0) == Interval{q(0), q(1, 4)});
  CHECK(e.interval(1, 1) == Interval{q(1, 4), q(1)});
  CHECK(e.interval(0, 0) == Interval{q(0), q(1)});
}

TEST_CASE("example 2 y-chain gives the reference intervals") {
  const auto e = chain_to_intervals(testsupport::load_chain("example2_chain_y.json"));
  // Vertex order a..f; d sits between b and c.
  const std::vector<Interval> leaves{{q(0), q(2, 9)},      {q(2, 9), q(5, 18)},   {q(1, 2), q(13, 18)},
                                     {q(5, 18), q(1, 2)}, {q(13, 18), q(5, 6)}, {q(5, 6), q(1)}};
  for (std::size_t v = 0; v < 6; ++v) CHECK(e.interval(3, v) == leaves[v]);
  CHECK(e.interval(1, 0) == Interval{q(0), q(1, 2)});
  CHECK(e.interval(1, 1) == Interval{q(1, 2), q(1)});
  CHECK(e.interval(2, 1) == Interval{q(1, 2), q(5, 6)});
}

TEST_CASE("one-node chain embeds as [0,1]") {
  const Chain c({Graph({"v"}, Eigen::MatrixXd::Zero(1, 1))}, {});
  const auto e = chain_to_intervals(c);
  CHECK(e.partition->block_count() == 1);
  CHECK(e.interval(0, 0) == Interval{q(0), q(1)});
}

TEST_CASE("interval splits are exactly degree-proportional on random chains") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    Graph g = testsupport::random_integer_graph(rng, 3 + static_cast<std::size_t>(trial), 7, 0.5);
    // A ring keeps every degree positive.
    Eigen::MatrixXd w = g.weights();
    for (Eigen::Index v = 0; v < w.rows(); ++v) {
      const Eigen::Index u = (v + 1) % w.rows();
      w(v, u) += 1;
      w(u, v) += 1;
    }
    g = Graph(g.labels(), w);
    GreedyClusterer clusterer;
    const Chain chain = build_chain(g, clusterer);
    const auto e = chain_to_intervals(chain);
    CHECK(validate_partition(*e.partition).ok());
    for (std::size_t j = 0; j < chain.depth(); ++j) {
      for (std::size_t u = 0; u < chain.level(j).size(); ++u) {
        const auto kids = chain.children_of(j, u);
        Rational total = 0;
        for (std::size_t v : kids) total += Rational(degree(chain.level(j + 1), v));
        const Interval& parent = e.interval(j, u);
        Rational covered = 0;
        for (std::size_t v : kids) {
          const Interval& iv = e.interval(j + 1, v);
          CHECK(parent.contains(iv));
          if (kids.size() > 1) CHECK(iv.length() * total == parent.length() * Rational(degree(chain.level(j + 1), v)));
          covered += iv.length();
        }
        CHECK(covered == parent.length());
        // Children follow their smallest original vertex from left to right.
        for (std::size_t a = 0; a < kids.size(); ++a) {
          for (std::size_t b = 0; b < kids.size(); ++b) {
            if (chain.members(j + 1, kids[a]).front() < chain.members(j + 1, kids[b]).front()) {
              CHECK(e.interval(j + 1, kids[a]).hi <= e.interval(j + 1, kids[b]).lo);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("zero-degree cluster in a split is an error") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 1) = w(1, 0) = 1;
  const Graph g({"a", "b", "c"}, w);
  GreedyClusterer clusterer({2});
  const Chain chain = build_chain(g, clusterer);
  CHECK(kind_of([&] { chain_to_intervals(chain); }) == ErrorKind::ZeroDegreeCluster);
}

TEST_CASE("example 2 vertex blocks match the reference rectangles and ids") {
  const auto& e = example2();
  struct Expected {
    BlockId id;
    Interval x, y;
  };
  const std::vector<Expected> expected{
      {14, {q(0), q(1, 6)}, {q(0), q(2, 9)}},
      {21, {q(1, 6), q(1, 4)}, {q(2, 9), q(5, 18)}},
      {34, {q(1, 4), q(7, 12)}, {q(1, 2), q(13, 18)}},
      {29, {q(7, 12), q(3, 4)}, {q(5, 18), q(1, 2)}},
      {42, {q(3, 4), q(11, 12)}, {q(13, 18), q(5, 6)}},
      {49, {q(11, 12), q(1)}, {q(5, 6), q(1)}},
  };
  REQUIRE(e.vbm.size() == 6);
  for (std::size_t v = 0; v < 6; ++v) {
    const Block& b = e.vbm.partition()->block(e.vbm.block(v));
    CHECK(e.vbm.block(v) == expected[v].id);
    CHECK(b.side(0) == expected[v].x);
    CHECK(b.side(1) == expected[v].y);
  }
  for (std::size_t v = 0; v < 6; ++v) {
    for (std::size_t w = v + 1; w < 6; ++w) {
      CHECK(intersection_measure(e.vbm.partition()->block(e.vbm.block(v)),
                                 e.vbm.partition()->block(e.vbm.block(w))) == 0);
    }
  }
}

TEST_CASE("single-vertex digraph sits on the whole square") {
  const Digraph g({"v"}, Eigen::MatrixXd::Zero(1, 1));
  const Chain c({Graph({"v"}, Eigen::MatrixXd::Zero(1, 1))}, {});
  const auto vbm = digraph_embedding(g, c, c);
  CHECK(vbm.partition()->block(vbm.block(0)).measure() == 1);
  CHECK(vbm.partition()->dimension() == 2);
}

TEST_CASE("digraph embedding pads the shallower chain") {
  const Digraph g({"u", "v"}, Eigen::MatrixXd::Zero(2, 2));
  Eigen::MatrixXd w(2, 2);
  w << 0, 1, 1, 0;
  const Graph pair({"u", "v"}, w);
  const Chain one_step({pair, coarse_grain(pair, Clustering({0, 0}))}, {{0, 0}});
  GreedyClusterer clusterer;
  const Chain deep = build_chain(Graph({"u", "v"}, w), clusterer);
  const auto vbm = digraph_embedding(g, one_step, pad_chain(deep, 3));
  CHECK(vbm.partition()->depth() == 3);
  CHECK(kind_of([&] {
          digraph_embedding(Digraph({"u", "z"}, Eigen::MatrixXd::Zero(2, 2)), one_step, one_step);
        }) == ErrorKind::UnknownVertex);
}

TEST_CASE("signals become piecewise-constant functions on vertex blocks") {
  const auto& e = example2();
  const auto& p = e.vbm.partition();
  const auto fa = signal_to_function(
      std::map<std::string, double>{{"a", 1}, {"b", 0}, {"c", 0}, {"d", 0}, {"e", 0}, {"f", 0}}, e.vbm);
  REQUIRE(fa.entries().size() == 1);
  CHECK(fa.entries()[0].leaf == p->leaf_position(14));

  const std::vector<double> ones(6, 1.0);
  Rational total = 0;
  for (BlockId b : e.vbm.blocks()) total += p->block(b).measure();
  CHECK(testsupport::direct_norm2(signal_to_function(ones, e.vbm)) == doctest::Approx(to_double(total)).epsilon(1e-14));
  CHECK(signal_to_function(std::vector<double>(6, 0.0), e.vbm).is_zero());

  const std::vector<double> values{1, 2, 3, 4, 5, 6};
  CHECK(function_to_signal(signal_to_function(values, e.vbm), e.vbm) == values);

  CHECK(kind_of([&] { signal_to_function(std::map<std::string, double>{{"a", 1}}, e.vbm); }) ==
        ErrorKind::UnknownVertex);
  std::map<std::string, double> extra{{"a", 1}, {"b", 0}, {"c", 0}, {"d", 0}, {"e", 0}, {"f", 0}, {"g", 2}};
  CHECK(kind_of([&] { signal_to_function(extra, e.vbm); }) == ErrorKind::UnknownVertex);
}

TEST_CASE("example 2 function counts: full 95, restricted 39") {
  const auto& e = example2();
  CHECK(e.full.size() == 95);
  CHECK(e.full.atoms_per_level() == std::vector<std::size_t>{6, 8, 80});
  CHECK(e.restricted.size() == 39);
  CHECK(e.restricted.atoms_per_level() == std::vector<std::size_t>{6, 6, 26});
  CHECK(atoms_per_parent(e.restricted, 1) == std::map<BlockId, std::size_t>{{2, 1}, {4, 5}});
  CHECK(atoms_per_parent(e.restricted, 2) == std::map<BlockId, std::size_t>{{5, 9}, {6, 8}, {9, 9}});
}

TEST_CASE("restricted system: support criterion and Parseval on the vertex span") {
  const auto& e = example2();
  const auto& p = e.vbm.partition();
  // Oracle: an atom survives iff one of its two child blocks contains a
  // vertex leaf.
  for (const auto& a : e.full.atoms()) {
    bool meets = false;
    for (BlockId v : e.vbm.blocks()) {
      for (BlockId child : {a.child1, a.child2}) {
        const auto under = p->leaves_under(child);
        meets = meets || std::binary_search(under.begin(), under.end(), p->leaf_position(v));
      }
    }
    CHECK(e.restricted.find(a.key).has_value() == meets);
  }
  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    const auto f = testsupport::random_vertex_function(rng, e.vbm);
    CHECK(testsupport::parseval_error(e.restricted, f) <= 1e-10);
    CHECK(testsupport::reconstruction_error(e.restricted, f) <= 1e-10);
  }
  const auto bounds = frame_bounds(e.restricted.functions(), vertex_indicators(e.vbm));
  CHECK(bounds.lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bounds.upper == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("restriction to every leaf is the full system") {
  const auto p = testsupport::share(make_dyadic_partition(2, 2));
  std::vector<std::string> labels;
  std::vector<BlockId> blocks(p->leaves().begin(), p->leaves().end());
  for (BlockId b : blocks) labels.push_back(std::to_string(b));
  const VertexBlockMap all(p, labels, blocks);
  const auto full = build_system(p);
  CHECK(restrict_system(full, all).size() == full.size());
  CHECK(prune_redundant(full, all).system.size() == full.size());
}

TEST_CASE("pruned example 2 system: 20 functions spanning the vertex space") {
  const auto& e = example2();
  const PruneResult pruned = prune_redundant(e.restricted, e.vbm);
  CHECK(pruned.system.size() == 20);
  CHECK(pruned.system.atoms_per_level() == std::vector<std::size_t>{6, 6, 7});
  CHECK(atoms_per_parent(pruned.system, 2) == std::map<BlockId, std::size_t>{{5, 3}, {6, 1}, {9, 3}});
  // Under block 6 only child #29 (index 8) is effective; it is paired with
  // the first non-effective child #16.
  CHECK(pruned.system.find({2, 6, 1, 8}).has_value());

  const Eigen::MatrixXd m = testsupport::analysis_on_vertices(pruned.system, e.vbm);
  CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank() == 6);
  CHECK(pruned.bounds.lower > 0.0);
  CHECK(pruned.bounds.upper <= 1.0 + 1e-12);

  // Least-squares recovery from the analysis coefficients via the normal
  // equations in vertex coordinates.
  const auto ind = vertex_indicators(e.vbm);
  Eigen::MatrixXd gram(6, 6);
  for (Eigen::Index a = 0; a < 6; ++a) {
    for (Eigen::Index b = 0; b < 6; ++b) gram(a, b) = testsupport::direct_inner(ind[a], ind[b]);
  }
  const Eigen::MatrixXd design = m;  // <h_i, f> = design * x for f = Σ x_v χ_{B_v}
  std::mt19937_64 rng(31);
  std::normal_distribution<double> dist;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd x(6);
    for (Eigen::Index v = 0; v < 6; ++v) x(v) = dist(rng);
    std::vector<double> values(x.data(), x.data() + 6);
    const auto f = signal_to_function(values, e.vbm);
    const auto c = analyze(pruned.system, f);
    Eigen::VectorXd y(static_cast<Eigen::Index>(pruned.system.size()));
    y(0) = c.phi0;
    for (std::size_t i = 0; i < c.atoms.size(); ++i) y(static_cast<Eigen::Index>(i + 1)) = c.atoms[i];
    const Eigen::VectorXd recovered = (design.transpose() * design).ldlt().solve(design.transpose() * y);
    const Eigen::VectorXd diff = recovered - x;
    CHECK(std::sqrt(diff.dot(gram * diff)) <= 1e-9 * std::sqrt(x.dot(gram * x)));
  }
}

TEST_CASE("vertex block map validation") {
  const auto p = testsupport::share(make_dyadic_partition(1, 2));
  CHECK(kind_of([&] { VertexBlockMap(p, {"a", "b"}, {3, 3}); }) == ErrorKind::ValidationError);
  CHECK(kind_of([&] { VertexBlockMap(p, {"a", "a"}, {3, 4}); }) == ErrorKind::ValidationError);
  CHECK(kind_of([&] { VertexBlockMap(p, {"a"}, {1}); }) == ErrorKind::ValidationError);
  const VertexBlockMap ok(p, {"a", "b"}, {3, 6});
  CHECK(ok.index_of("b") == std::optional<std::size_t>(1));
  CHECK(ok.is_effective(1));
  CHECK_FALSE(ok.is_effective(4));
  const auto other = build_system(testsupport::share(make_dyadic_partition(1, 2)));
  CHECK(kind_of([&] { restrict_system(other, ok); }) == ErrorKind::PartitionMismatch);
}

TEST_CASE("1-D graph embedding gives one leaf per vertex") {
  const auto vbm = graph_embedding(testsupport::load_chain("example1_chain.json"));
  CHECK(vbm.size() == 6);
  CHECK(vbm.partition()->leaf_count() == 6);
  const auto system = restrict_system(build_system(vbm.partition()), vbm);
  CHECK(system.size() == 7);
}
