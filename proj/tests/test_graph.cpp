#include <random>
#include <sstream>

#include "doctest.h"
#include "layerforge/graph.hpp"
#include "oracle.hpp"

using namespace layerforge;

TEST_CASE("edge list parsing") {
  SUBCASE("header and arcs") {
    DiGraph g = parse_edge_list("n 3\n0 1\n1 2");
    CHECK(g == DiGraph(3, {{0, 1}, {1, 2}}));
  }
  SUBCASE("parallel arcs kept, n inferred") {
    DiGraph g = parse_edge_list("0 1\n0 1");
    CHECK(g.num_vertices() == 2);
    CHECK(g.arcs() == std::vector<Arc>{{0, 1}, {0, 1}});
  }
  SUBCASE("comments and blank lines") {
    DiGraph g = parse_edge_list("# a comment\n\nn 4   # four\n3 0\n\n2 1 # trailing\n");
    CHECK(g == DiGraph(4, {{3, 0}, {2, 1}}));
  }
  SUBCASE("header keeps isolated vertices") {
    CHECK(parse_edge_list("n 5\n0 1\n").num_vertices() == 5);
    CHECK(parse_edge_list("n 2\n").num_arcs() == 0);
  }
  SUBCASE("empty input") { CHECK(parse_edge_list("").num_vertices() == 0); }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_edge_list("0 0"), ParseError);
    CHECK_THROWS_AS(parse_edge_list("n 2\n0 2"), ParseError);
    CHECK_THROWS_AS(parse_edge_list("0 1 2"), ParseError);
    CHECK_THROWS_AS(parse_edge_list("0 x"), ParseError);
    CHECK_THROWS_AS(parse_edge_list("-1 2"), ParseError);
    CHECK_THROWS_AS(parse_edge_list("0 1\nn 3"), ParseError);
    try {
      parse_edge_list("n 3\n0 1\n\n2 2\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
  }
}

TEST_CASE("graph construction rejects bad arcs") {
  CHECK_THROWS_AS(DiGraph(2, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(DiGraph(2, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(DiGraph(-1, {}), std::invalid_argument);
}

TEST_CASE("DOT subset") {
  DiGraph g = parse_dot("digraph G {\n  rankdir=LR;\n  node [shape=box];\n  b -> a;\n  a -> c -> d [color=red];\n  e;\n}\n");
  CHECK(g.num_vertices() == 5);
  CHECK(g.arcs() == std::vector<Arc>{{0, 1}, {1, 2}, {2, 3}});
  CHECK_THROWS(parse_dot("digraph { a -> a; }"));
  CHECK_THROWS(parse_dot("digraph { a -> ; }"));
}

TEST_CASE("round trip through the edge-list writer") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.n_target = 5 + static_cast<int>(seed % 20);
    const DiGraph g = generate_random(spec).graph;
    std::ostringstream out;
    write_edge_list(g, out);
    CHECK(parse_edge_list(out.str()) == g);
  }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const DiGraph g = oracle::random_graph(rng, 6, 9);  // parallel arcs and cycles
    std::ostringstream out;
    write_edge_list(g, out);
    CHECK(parse_edge_list(out.str()) == g);
  }
}

TEST_CASE("acyclicity") {
  CHECK(is_acyclic(DiGraph(3, {{0, 1}, {1, 2}})));
  CHECK_FALSE(is_acyclic(DiGraph(2, {{0, 1}, {1, 0}})));
  CHECK(is_acyclic(DiGraph(4, {})));
  CHECK(is_acyclic(DiGraph(0, {})));
  CHECK_FALSE(is_acyclic(DiGraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 1}})));
  CHECK(topological_order(DiGraph(3, {{2, 1}, {1, 0}})) == std::vector<VertexId>{2, 1, 0});
}

TEST_CASE("greedy layer count examples") {
  CHECK(min_feasible_layers(DiGraph(3, {{0, 1}, {1, 2}})) == 2);
  CHECK(min_feasible_layers(DiGraph(1, {})) == 1);
  const DiGraph triangle(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(min_feasible_layers(triangle) == 3);
  CHECK(oracle::chromatic_number(triangle) == 3);
  CHECK_FALSE(is_colorable(triangle, 2));
  CHECK(is_colorable(triangle, 3));
}

TEST_CASE("greedy layer count bounds the chromatic number on small graphs") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int m = n < 2 ? 0 : static_cast<int>(rng() % 10);
    const DiGraph g = oracle::random_graph(rng, n, m);
    const int chi = oracle::chromatic_number(g);
    const int greedy = min_feasible_layers(g);
    CHECK(greedy >= chi);
    if (m > 0) CHECK(greedy >= 2);
    CHECK(is_colorable(g, chi));
    if (chi > 1) CHECK_FALSE(is_colorable(g, chi - 1));
  }
}

TEST_CASE("generator") {
  SUBCASE("default density") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      GeneratedGraph gg = generate_random(GenSpec{20, Rational(3, 2), seed});
      REQUIRE(gg.arcs_drawn == 30);
      REQUIRE(gg.graph.num_arcs() == 30);
      REQUIRE(gg.graph.num_vertices() <= 20);
      REQUIRE(is_acyclic(gg.graph));
      for (int d : gg.graph.degrees()) REQUIRE(d > 0);
    }
  }
  SUBCASE("deterministic per seed") {
    CHECK(generate_random(GenSpec{30, Rational(3, 2), 99}).graph ==
          generate_random(GenSpec{30, Rational(3, 2), 99}).graph);
    CHECK_FALSE(generate_random(GenSpec{30, Rational(3, 2), 99}).graph ==
                generate_random(GenSpec{30, Rational(3, 2), 100}).graph);
  }
  SUBCASE("minimal graph") {
    const DiGraph g = generate_random(GenSpec{2, Rational(1, 2), 5}).graph;
    CHECK(g.num_vertices() == 2);
    CHECK(g.num_arcs() == 1);
  }
  SUBCASE("no duplicate arcs") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const DiGraph g = generate_random(GenSpec{10, Rational(4), seed}).graph;
      auto copies = g.parallel_copy_index();
      for (int c : copies) REQUIRE(c == 0);
    }
  }
  SUBCASE("arc count rounds half up") {
    CHECK(GenSpec{5, Rational(3, 2), 1}.arc_count() == 8);
    CHECK(GenSpec{3, Rational(1, 2), 1}.arc_count() == 2);
    CHECK(GenSpec{4, Rational(1, 3), 1}.arc_count() == 1);
  }
  SUBCASE("invalid specs") {
    CHECK_THROWS(generate_random(GenSpec{1, Rational(3, 2), 1}));
    CHECK_THROWS(generate_random(GenSpec{5, Rational(0), 1}));
    CHECK_THROWS(generate_random(GenSpec{4, Rational(2), 1}));  // 8 arcs > 6 possible
  }
}
