#include "doctest.h"

#include "hr3/construct.hpp"
#include "hr3/detect.hpp"
#include "hr3/rng.hpp"

using namespace hr3;

TEST_CASE("F(2) is found in its own Trip via the defining embedding") {
  ThreeGraph host = build_three({.family = Family::F, .ell = 2});
  ThreeGraph pat = build_three({.family = Family::F, .ell = 2});
  PatternWitness w = find_pattern(host, pat, "F");
  CHECK(w.status == SearchStatus::FOUND);
}

TEST_CASE("V(1) is certified absent in an edgeless host") {
  ThreeGraph host(10);
  ThreeGraph pat = build_three({.family = Family::V, .k = 1});
  PatternWitness w = find_pattern(host, pat, "V");
  CHECK(w.status == SearchStatus::ABSENT_CERTIFIED);
}

TEST_CASE("H(3) is found in Bip of Graph(Hbar(3))") {
  ThreeGraph h = build_three({.family = Family::HBAR, .k = 3});
  BipartiteGraph host = bip(SimpleGraph::from_bipartite(graph_of(h)));
  BipartiteGraph pat = build_bipartite({.family = Family::HALF_GRAPH, .k = 3});
  PatternWitness w = find_bipartite_pattern(host, pat, "H");
  CHECK(w.status == SearchStatus::FOUND);
}

TEST_CASE("tiny budget yields INCONCLUSIVE") {
  ThreeGraph host = build_three({.family = Family::HBAR, .k = 6});
  ThreeGraph pat = build_three({.family = Family::V, .k = 2});
  FindOptions opt;
  opt.budget = 3;
  PatternWitness w = find_pattern(host, pat, "V", opt);
  CHECK(w.status == SearchStatus::INCONCLUSIVE);
}

TEST_CASE("found witnesses imply found on induced supergraphs") {
  ThreeGraph small = build_three({.family = Family::HBAR, .k = 2});
  ThreeGraph big = build_three({.family = Family::HBAR, .k = 4});
  ThreeGraph pat = build_three({.family = Family::HSTAR, .k = 2});
  PatternWitness ws = find_pattern(small, pat, "HSTAR");
  if (ws.status == SearchStatus::FOUND)
    CHECK(find_pattern(big, pat, "HSTAR").status == SearchStatus::FOUND);
}

TEST_CASE("vc_dimension of the full power set is the ground size") {
  SetSystem sys;
  sys.ground_size = 3;
  for (int mask = 0; mask < 8; ++mask) {
    Bitset b(3);
    for (int i = 0; i < 3; ++i)
      if (mask & (1 << i)) b.set(i);
    sys.sets.push_back(b);
  }
  VcResult r = vc_dimension(sys, 4);
  CHECK(r.dimension == 3);
  CHECK(r.certified);
}

TEST_CASE("vc_dimension of singletons is 1") {
  SetSystem sys;
  sys.ground_size = 5;
  sys.sets.push_back(Bitset(5));  // empty set realizes the empty trace
  for (int i = 0; i < 5; ++i) {
    Bitset b(5);
    b.set(i);
    sys.sets.push_back(b);
  }
  VcResult r = vc_dimension(sys, 3);
  CHECK(r.dimension == 1);
  CHECK(r.certified);
}

TEST_CASE("vc_dimension is invariant under ground relabeling") {
  Rng rng(5);
  SetSystem sys;
  sys.ground_size = 6;
  for (int s = 0; s < 10; ++s) {
    Bitset b(6);
    for (int i = 0; i < 6; ++i)
      if (rng.chance(1, 2)) b.set(i);
    sys.sets.push_back(b);
  }
  std::vector<int> perm(6);
  for (int i = 0; i < 6; ++i) perm[i] = i;
  rng.shuffle(perm);
  SetSystem sys2;
  sys2.ground_size = 6;
  for (const Bitset& b : sys.sets) {
    Bitset c(6);
    for (int i = 0; i < 6; ++i)
      if (b.test(i)) c.set(perm[i]);
    sys2.sets.push_back(c);
  }
  CHECK(vc_dimension(sys, 6).dimension == vc_dimension(sys2, 6).dimension);
}

TEST_CASE("both VC trace directions of Graph(HP(6)) equal 1") {
  ThreeGraph h = build_three({.family = Family::HP, .k = 6});
  VcResult r1 = vc_dimension(vc_system_vertex_ground(h), 3);
  VcResult r2 = vc_dimension(vc_system_pair_ground(h), 3);
  CHECK(r1.dimension == 1);
  CHECK(r1.certified);
  CHECK(r2.dimension == 1);
  CHECK(r2.certified);
}

TEST_CASE("wvc of edgeless is 0, of USTAR(2) is >= 2") {
  ThreeGraph e(6);
  CHECK(wvc_dimension(e, 3).dimension == 0);
  ThreeGraph u = build_three({.family = Family::USTAR, .k = 2});
  WvcResult r = wvc_dimension(u, 3);
  CHECK(r.dimension >= 2);
  CHECK(r.witness_vertex == 0);  // the distinguished apex
}

TEST_CASE("wvc of a W1 member equals brute force over links") {
  ThreeGraph w1 = build_three({.family = Family::W1, .k = 4});
  WvcResult r = wvc_dimension(w1, 4);
  // brute force: per vertex a, exhaustively compute the link VC
  int best = 0;
  for (int a = 0; a < w1.n(); ++a) {
    SetSystem sys;
    sys.ground_size = w1.n();
    for (int b = 0; b < w1.n(); ++b) {
      Bitset nb(w1.n());
      if (b != a)
        for (int c = 0; c < w1.n(); ++c)
          if (c != a && c != b && w1.has_edge(a, b, c)) nb.set(c);
      sys.sets.push_back(nb);
    }
    best = std::max(best, vc_dimension(sys, 4).dimension);
  }
  CHECK(r.dimension == best);
}

TEST_CASE("tree rank of a singleton leaf set is 0") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 3});
  CHECK(tree_rank(g, {1}, 5).rank == 0);
}

TEST_CASE("tree rank of H(2) right side is 1") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 2});
  TreeRankResult r = tree_rank(g, {0, 1}, 5);
  CHECK(r.rank == 1);
  REQUIRE(r.witness);
  CHECK(verify_tree_witness(g, *r.witness));
}

TEST_CASE("tree rank of H(4) right side is 2") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 4});
  TreeRankResult r = tree_rank(g, {0, 1, 2, 3}, 5);
  CHECK(r.rank == 2);
  REQUIRE(r.witness);
  CHECK(verify_tree_witness(g, *r.witness));
}

TEST_CASE("tree rank is monotone under leaf subsets") {
  Rng rng(21);
  for (int it = 0; it < 6; ++it) {
    BipartiteGraph g = random_disc2_bipartite(7, 7, Rat::of(1, 2), it * 31 + 5);
    std::vector<int> all = {0, 1, 2, 3, 4, 5, 6};
    std::vector<int> sub;
    for (int v : all)
      if (rng.chance(1, 2)) sub.push_back(v);
    CHECK(tree_rank(g, sub, 6).rank <= tree_rank(g, all, 6).rank);
  }
}

TEST_CASE("half-graph rank grows with height and rank(H(2^d)) >= d") {
  int prev = 0;
  for (int k : {2, 4, 8}) {
    BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = k});
    std::vector<int> all(k);
    for (int i = 0; i < k; ++i) all[i] = i;
    int r = tree_rank(g, all, 8).rank;
    CHECK(r >= prev);
    prev = r;
  }
  for (int d : {1, 2, 3}) {
    int k = 1 << d;
    BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = k});
    std::vector<int> all(k);
    for (int i = 0; i < k; ++i) all[i] = i;
    CHECK(tree_rank(g, all, 8).rank >= d);
  }
}

TEST_CASE("d-tree counts match brute force for d=1") {
  // single edge plus an isolated right vertex
  BipartiteGraph g(2, 3);
  g.add_edge(0, 0);
  std::vector<int> nodes = {0, 1}, leaves = {0, 1, 2};
  // brute force over (b; a0, a1)
  long long brute = 0;
  for (int b : nodes)
    for (int a0 : leaves)
      for (int a1 : leaves)
        if (!g.has_edge(b, a0) && g.has_edge(b, a1)) ++brute;
  DTreeCount c = count_d_trees(g, nodes, leaves, 1);
  CHECK(c.exact);
  CHECK(c.value == double(brute));
}

TEST_CASE("complete bipartite has no 1-trees") {
  BipartiteGraph g(3, 3);
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 3; ++v) g.add_edge(u, v);
  DTreeCount c = count_d_trees(g, {0, 1, 2}, {0, 1, 2}, 1);
  CHECK(c.value == 0);
}

TEST_CASE("d=2 tree count in H(4) equals brute force") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 4});
  std::vector<int> nodes = {0, 1, 2, 3}, leaves = {0, 1, 2, 3};
  long long brute = 0;
  for (int b : nodes)
    for (int b0 : nodes)
      for (int b1 : nodes)
        for (int a00 : leaves)
          for (int a01 : leaves)
            for (int a10 : leaves)
              for (int a11 : leaves) {
                bool ok = !g.has_edge(b, a00) && !g.has_edge(b, a01) && g.has_edge(b, a10) &&
                          g.has_edge(b, a11) && !g.has_edge(b0, a00) && g.has_edge(b0, a01) &&
                          !g.has_edge(b1, a10) && g.has_edge(b1, a11);
                if (ok) ++brute;
              }
  DTreeCount c = count_d_trees(g, nodes, leaves, 2);
  CHECK(c.exact);
  CHECK(c.value == double(brute));
}

TEST_CASE("d=3 estimate is unbiased-ish on a half graph") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 8});
  std::vector<int> side(8);
  for (int i = 0; i < 8; ++i) side[i] = i;
  DTreeCount c = count_d_trees(g, side, side, 3, 1, 4000);
  CHECK_FALSE(c.exact);
  CHECK(c.value >= 0);
  CHECK(c.std_error >= 0);
}

TEST_CASE("dimension report of the edgeless graph is all zeros") {
  ThreeGraph e(8);
  DimensionReport rep = dimension_report(e);
  CHECK(rep.vc.value == 0);
  CHECK(rep.wvc.value == 0);
  CHECK(rep.vc2_lower.value == 0);
  CHECK(rep.order_property.value == 0);
  CHECK(rep.weak_stability.value == 0);
  CHECK(rep.fop2.value == 0);
  CHECK(rep.hop2.value == 0);
}

TEST_CASE("VCFOP example has FOP2 length >= 2 and no V(2) within budget") {
  ThreeGraph h = build_three({.family = Family::VCFOP_EXAMPLE, .k = 2, .n = 40, .seed = 3});
  ThreeGraph f2 = build_three({.family = Family::F, .ell = 2});
  FindOptions fo;
  fo.budget = 4'000'000;
  PatternWitness wf = find_pattern(h, f2, "F", fo);
  CHECK(wf.status == SearchStatus::FOUND);
  ThreeGraph v2 = build_three({.family = Family::V, .k = 2});
  PatternWitness wv = find_pattern(h, v2, "V", fo);
  CHECK(wv.status != SearchStatus::FOUND);
}

TEST_CASE("order-property length of Graph(Hbar(4)) is at least 4") {
  ThreeGraph h = build_three({.family = Family::HBAR, .k = 4});
  BipartiteGraph host = bip(SimpleGraph::from_bipartite(graph_of(h)));
  BipartiteGraph pat = build_bipartite({.family = Family::HALF_GRAPH, .k = 4});
  FindOptions fo;
  fo.budget = 50'000'000;
  CHECK(find_bipartite_pattern(host, pat, "H", fo).status == SearchStatus::FOUND);
}
