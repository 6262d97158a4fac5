#include <doctest.h>

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

}  // namespace

TEST_CASE("partition JSON round trip keeps ids, sides and children") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = testsupport::random_guillotine_partition(rng, 2, 3, 3);
    const auto text = io::dump_json(io::partition_to_json(p));
    const auto back = io::partition_from_json(io::parse_json(text));
    REQUIRE(back.block_count() == p.block_count());
    for (BlockId b = 0; b < p.block_count(); ++b) {
      CHECK(back.block(b).sides() == p.block(b).sides());
      const auto c1 = p.children(b);
      const auto c2 = back.children(b);
      CHECK(std::vector<BlockId>(c1.begin(), c1.end()) == std::vector<BlockId>(c2.begin(), c2.end()));
    }
    CHECK(io::dump_json(io::partition_to_json(back)) == text);
  }
}

TEST_CASE("partition JSON layout") {
  const auto j = io::partition_to_json(make_dyadic_partition(1, 1));
  CHECK(j["dimension"] == 1);
  CHECK(j["depth"] == 1);
  CHECK(j["blocks"][2]["sides"][0] == io::Json::array({1, 2, 1, 1}));
  CHECK(j["children"]["0"] == io::Json::array({1, 2}));
}

TEST_CASE("partition JSON errors") {
  CHECK(kind_of([] { io::parse_json("{\"dimension\": 1"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { io::partition_from_json(io::parse_json("{\"dimension\": 1}")); }) == ErrorKind::ParseError);
  CHECK(kind_of([] {
          io::partition_from_json(io::parse_json(
              R"({"dimension": 1, "blocks": [{"id": 0, "sides": [[0, 0, 1, 1]]}], "children": {}})"));
        }) == ErrorKind::ParseError);
  CHECK(kind_of([] {
          io::partition_from_json(io::parse_json(
              R"({"dimension": 1, "depth": 2, "blocks": [{"id": 0, "sides": [[0, 1, 1, 1]]}], "children": {}})"));
        }) == ErrorKind::DepthMismatch);
}

TEST_CASE("huge rational endpoints survive as strings") {
  const Rational tiny(BigInt(1), BigInt(1) << 80);
  HierarchicalPartition p(1, {Block(0, {{q(0), q(1)}}), Block(1, {{q(0), tiny}}), Block(2, {{tiny, q(1)}})},
                          {{0, {1, 2}}});
  const auto back = io::partition_from_json(io::parse_json(io::dump_json(io::partition_to_json(p))));
  CHECK(back.block(1).side(0).hi == tiny);
}

TEST_CASE("graph JSON: edges by label or index, matrix form, round trip") {
  const auto d = io::digraph_from_json(io::parse_json(
      R"({"directed": true, "labels": ["x", "y", "z"], "edges": [["x", "y", 2], [2, 0, 0.5], ["z", "z"]]})"));
  CHECK(d.weight(0, 1) == 2.0);
  CHECK(d.weight(1, 0) == 0.0);
  CHECK(d.weight(2, 0) == 0.5);
  CHECK(d.weight(2, 2) == 1.0);
  const auto back = io::digraph_from_json(io::parse_json(io::dump_json(io::graph_to_json(d, true))));
  CHECK(back.weights() == d.weights());

  const auto g = io::graph_from_json(
      io::parse_json(R"({"directed": false, "labels": ["x", "y"], "matrix": [[1, 3], [3, 0]]})"));
  CHECK(g.weight(1, 0) == 3.0);
  const auto j = io::graph_to_json(g, false);
  CHECK(j["edges"] == io::Json::parse("[[0, 0, 1], [0, 1, 3]]"));
  CHECK(io::graph_from_json(j).weights() == g.weights());

  CHECK(kind_of([] {
          io::digraph_from_json(io::parse_json(R"({"labels": ["x"], "edges": [["x", "q", 1]]})"));
        }) == ErrorKind::UnknownVertex);
  CHECK(kind_of([] {
          io::graph_from_json(io::parse_json(R"({"labels": ["x", "y"], "directed": true, "edges": [[0, 1, 1]]})"));
        }) == ErrorKind::ValidationError);
  CHECK(kind_of([] { io::digraph_from_json(io::parse_json(R"({"labels": ["x"], "edges": [[5, 0]]})")); }) ==
        ErrorKind::ParseError);
}

TEST_CASE("chain JSON round trip") {
  const Chain c = testsupport::load_chain("example2_chain_y.json");
  const Chain back = io::chain_from_json(io::parse_json(io::dump_json(io::chain_to_json(c))));
  CHECK(back.parents() == c.parents());
  for (std::size_t j = 0; j <= c.depth(); ++j) {
    CHECK(back.level(j).weights() == c.level(j).weights());
    CHECK(back.level(j).labels() == c.level(j).labels());
  }
}

TEST_CASE("system JSON round trip rebuilds identical atoms") {
  const Digraph g = testsupport::load_digraph("example2_digraph.json");
  const auto vbm = digraph_embedding(g, testsupport::load_chain("example2_chain_x.json"),
                                     testsupport::load_chain("example2_chain_y.json"));
  const auto restricted = restrict_system(build_system(vbm.partition()), vbm);
  const auto text = io::dump_json(io::system_to_json(restricted, &vbm));
  const auto loaded = io::system_from_json(io::parse_json(text));
  REQUIRE(loaded.system.size() == restricted.size());
  REQUIRE(loaded.vertices.has_value());
  CHECK(loaded.vertices->labels() == vbm.labels());
  CHECK(loaded.vertices->blocks() == vbm.blocks());
  for (std::size_t i = 0; i < restricted.atoms().size(); ++i) {
    const auto& a = restricted.atoms()[i];
    const auto& b = loaded.system.atoms()[i];
    CHECK(a.key == b.key);
    CHECK(a.function.dense() == b.function.dense());
  }
  CHECK(io::dump_json(io::system_to_json(loaded.system, &*loaded.vertices)) == text);
}

TEST_CASE("system JSON rejects atoms that do not exist") {
  const auto p = make_dyadic_partition(1, 1);
  io::Json j = {{"depth", 1}, {"partition", io::partition_to_json(p)}, {"atoms", io::Json::parse("[[0, 0, 1, 3]]")}};
  CHECK(kind_of([&] { io::system_from_json(j); }) == ErrorKind::BadPair);
  j["atoms"] = io::Json::parse("[[0, 1, 1, 2]]");
  CHECK(kind_of([&] { io::system_from_json(j); }) == ErrorKind::IndexMismatch);
  j["atoms"] = io::Json::parse("[[0, 0, 1, 2]]");
  j["depth"] = 3;
  CHECK(kind_of([&] { io::system_from_json(j); }) == ErrorKind::DepthMismatch);
}

TEST_CASE("coefficient CSV round trip is exact") {
  const auto p = testsupport::share(make_dyadic_partition(2, 2));
  const auto system = build_system(p);
  std::mt19937_64 rng(5);
  const auto c = analyze(system, testsupport::random_level_function(rng, p, 2));
  const auto text = io::coefficients_to_csv(system, c);
  CHECK(text.rfind("level,parent,l1,l2,value\n-1,0,0,0,", 0) == 0);
  const auto back = io::coefficients_from_csv(text, system);
  CHECK(back.phi0 == c.phi0);
  CHECK(back.atoms == c.atoms);

  CHECK(kind_of([&] { io::coefficients_from_csv("-1,0,0,0,1\n", system); }) == ErrorKind::IndexMismatch);
  std::string wrong = text;
  wrong.replace(wrong.find("\n0,0,1,2,") + 1, 7, "0,0,1,3");
  CHECK(kind_of([&] { io::coefficients_from_csv(wrong, system); }) == ErrorKind::IndexMismatch);
}

TEST_CASE("signal CSV") {
  const auto s = io::signal_from_csv("vertex,value\na, 1.5\nb,-2\n\n");
  CHECK(s == std::map<std::string, double>{{"a", 1.5}, {"b", -2.0}});
  CHECK(io::signal_from_csv(io::signal_to_csv({"x", "y"}, {0.1, 1e-300})) ==
        std::map<std::string, double>{{"x", 0.1}, {"y", 1e-300}});
  CHECK(kind_of([] { io::signal_from_csv("a,1\nb,zz\n"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { io::signal_from_csv("a,1\na,2\n"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { io::signal_from_csv("a,1,2\n"); }) == ErrorKind::ParseError);
}

TEST_CASE("format_double uses 17 significant digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(2.0) == "2");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
