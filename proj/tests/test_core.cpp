#include "doctest.h"

#include "hr3/construct.hpp"
#include "hr3/io.hpp"
#include "hr3/rng.hpp"
#include "hr3/three_graph.hpp"

using namespace hr3;

TEST_CASE("graph_of unrolls single edge") {
  ThreeGraph h(3);
  h.add_edge(0, 1, 2);
  BipartiteGraph g = graph_of(h);
  CHECK(g.left_size() == 3);
  CHECK(g.right_size() == 3);
  CHECK(g.edge_count() == 3);
  CHECK(g.has_edge(0, pair_rank(3, 1, 2)));
  CHECK(g.has_edge(1, pair_rank(3, 0, 2)));
  CHECK(g.has_edge(2, pair_rank(3, 0, 1)));
}

TEST_CASE("graph_of of empty 3-graph") {
  ThreeGraph h(4);
  BipartiteGraph g = graph_of(h);
  CHECK(g.left_size() == 4);
  CHECK(g.right_size() == 6);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("graph_of of Hbar(2) has 3|E| = 18 bipartite edges") {
  ThreeGraph h = build_three({.family = Family::HBAR, .k = 2});
  CHECK(h.edge_count() == 6);  // k * k(k+1)/2
  CHECK(graph_of(h).edge_count() == 18);
}

TEST_CASE("trip of a single edge has the 6 ordered images") {
  ThreeGraph h(3);
  h.add_edge(0, 1, 2);
  ThreeGraph t = trip(h);
  CHECK(t.n() == 9);
  CHECK(t.edge_count() == 6);
  CHECK(t.has_edge(0, 3 + 1, 6 + 2));
  CHECK(t.has_edge(2, 3 + 0, 6 + 1));
  REQUIRE(t.partition());
  CHECK(t.partition()->size() == 3);
}

TEST_CASE("trip of empty input") {
  ThreeGraph h(5);
  ThreeGraph t = trip(h);
  CHECK(t.n() == 15);
  CHECK(t.edge_count() == 0);
}

TEST_CASE("|E(Trip(h))| = 6|E(h)| on random simple hosts") {
  Rng rng(7);
  for (int it = 0; it < 10; ++it) {
    ThreeGraph h(8);
    for (int tr = 0; tr < 12; ++tr) {
      int a = int(rng.below(8)), b = int(rng.below(8)), c = int(rng.below(8));
      if (a != b && a != c && b != c) h.add_edge(a, b, c);
    }
    CHECK(trip(h).edge_count() == 6 * h.edge_count());
  }
}

TEST_CASE("bip of a triangle") {
  SimpleGraph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(0, 2);
  BipartiteGraph b = bip(g);
  CHECK(b.edge_count() == 6);
}

TEST_CASE("bip of empty and of a single path edge") {
  SimpleGraph e(4);
  CHECK(bip(e).edge_count() == 0);
  SimpleGraph p(2);
  p.add_edge(0, 1);
  BipartiteGraph b = bip(p);
  CHECK(b.edge_count() == 2);
  CHECK(b.has_edge(0, 1));
  CHECK(b.has_edge(1, 0));
  CHECK_FALSE(b.has_edge(0, 0));
}

TEST_CASE("triangle_triples of complete and near-complete 2,2,2") {
  TripartiteGraph g = TripartiteGraph::complete(2, 2, 2);
  CHECK(g.triangle_triples().size() == 8);
  g.pair(0, 1).remove_edge(0, 0);
  CHECK(g.triangle_triples().size() == 6);
  TripartiteGraph e(2, 2, 2);
  CHECK(e.triangle_triples().empty());
}

TEST_CASE("induce basics") {
  ThreeGraph h = build_three({.family = Family::HBAR, .k = 3});
  std::vector<int> all(h.n());
  for (int i = 0; i < h.n(); ++i) all[i] = i;
  ThreeGraph whole = h.induce(all);
  CHECK(whole.edge_count() == h.edge_count());

  // one vertex per part lying on an edge: a_1, b_1, c_1 (0-based 0, 3, 6)
  ThreeGraph single = h.induce({0, 3, 6});
  CHECK(single.n() == 3);
  CHECK(single.edge_count() == 1);

  ThreeGraph empty = h.induce({});
  CHECK(empty.n() == 0);
  CHECK(empty.edge_count() == 0);
}

TEST_CASE("induce composes") {
  ThreeGraph h = build_three({.family = Family::HP, .k = 4});
  std::vector<int> s = {0, 1, 4, 5, 8, 9, 10};
  std::vector<int> s2 = {0, 2, 3, 5};
  ThreeGraph a = h.induce(s).induce(s2);
  std::vector<int> composed;
  for (int i : s2) composed.push_back(s[i]);
  ThreeGraph b = h.induce(composed);
  CHECK(a.edge_count() == b.edge_count());
  for (const Triple& e : a.edges()) CHECK(b.has_edge(e[0], e[1], e[2]));
}

TEST_CASE("degenerate triples are rejected") {
  ThreeGraph h(4);
  CHECK_THROWS(h.add_edge(1, 1, 2));
  CHECK_THROWS(h.add_edge(0, 1, 4));
}

TEST_CASE("graph_of and trip commute with relabeling") {
  Rng rng(13);
  ThreeGraph h(7);
  for (int tr = 0; tr < 10; ++tr) {
    int a = int(rng.below(7)), b = int(rng.below(7)), c = int(rng.below(7));
    if (a != b && a != c && b != c) h.add_edge(a, b, c);
  }
  std::vector<int> perm(7);
  for (int i = 0; i < 7; ++i) perm[i] = i;
  rng.shuffle(perm);
  ThreeGraph hp(7);
  for (const Triple& e : h.edges()) hp.add_edge(perm[e[0]], perm[e[1]], perm[e[2]]);

  // vertex-degree multiset of Graph() is relabeling invariant
  BipartiteGraph g1 = graph_of(h), g2 = graph_of(hp);
  std::vector<int> d1, d2;
  for (int v = 0; v < 7; ++v) {
    d1.push_back(g1.row(v).count());
    d2.push_back(g2.row(v).count());
  }
  std::sort(d1.begin(), d1.end());
  std::sort(d2.begin(), d2.end());
  CHECK(d1 == d2);
  CHECK(trip(h).edge_count() == trip(hp).edge_count());
}

TEST_CASE("3G v1 round trip is bit exact") {
  ThreeGraph h = build_three({.family = Family::HBAR, .k = 3});
  std::string text = write_3g(h);
  ThreeGraph back = parse_3g(text);
  CHECK(write_3g(back) == text);
  CHECK(back.n() == h.n());
  CHECK(back.edge_count() == h.edge_count());
  REQUIRE(back.partition());
}

TEST_CASE("bip format round trip and parse errors") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 3});
  std::string text = write_bip(g);
  BipartiteGraph back = parse_bip(text);
  CHECK(write_bip(back) == text);

  CHECK_THROWS_AS(parse_3g("nope"), ParseError);
  CHECK_THROWS_AS(parse_3g("3graph 3\n0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_3g("3graph 3\n2 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_3g("3graph 3\n0 1 5\n"), ParseError);
  try {
    parse_3g("3graph 4\n0 1 2\n0 x 3\n");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("pair rank and unrank agree") {
  int n = 9;
  int r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      CHECK(pair_rank(n, i, j) == r);
      auto [a, b] = pair_unrank(n, r);
      CHECK(a == i);
      CHECK(b == j);
      ++r;
    }
}
