#include "doctest.h"

#include <set>

#include "hr3/construct.hpp"
#include "hr3/rng.hpp"
#include "hr3/stable.hpp"

using namespace hr3;

namespace {
BipartiteGraph complete(int m, int n) {
  BipartiteGraph g(m, n);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < n; ++v) g.add_edge(u, v);
  return g;
}
std::vector<int> iota(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}
}  // namespace

TEST_CASE("goodness of a singleton is zero") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 4});
  GoodnessLevel lvl = epsilon_good_level(g, {2});
  CHECK(lvl.level == Rat(0));
}

TEST_CASE("goodness of H(2)'s full right side is 1/2 attained at a_2") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 2});
  GoodnessLevel lvl = epsilon_good_level(g, {0, 1});
  CHECK(lvl.level == Rat::of(1, 2));
  CHECK(lvl.worst_vertex == 1);
}

TEST_CASE("complete bipartite graphs are 0-good") {
  BipartiteGraph g = complete(4, 5);
  CHECK(epsilon_good_level(g, iota(5)).level == Rat(0));
  CHECK_THROWS(epsilon_good_level(g, {}));
}

TEST_CASE("goodsets1 returns a 0-good set whole") {
  BipartiteGraph g = complete(4, 6);
  GoodPartition gp = goodsets1_partition(g, iota(6), 2, geometric_schedule(Rat::of(1, 2)));
  CHECK(gp.ok);
  CHECK(gp.sets.empty());
  CHECK(gp.residue.size() == 6);
}

TEST_CASE("goodsets1 on the empty leaf set terminates immediately") {
  BipartiteGraph g = complete(3, 3);
  GoodPartition gp = goodsets1_partition(g, {}, 2, geometric_schedule(Rat::of(1, 2)));
  CHECK(gp.ok);
  CHECK(gp.sets.empty());
  CHECK(gp.residue.empty());
}

TEST_CASE("goodsets1 on H(4) passes its own postconditions") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 4});
  Schedule f = geometric_schedule(Rat::of(1, 2));
  GoodPartition gp = goodsets1_partition(g, iota(4), 2, f);
  CHECK(gp.ok);
  std::set<int> seen;
  long long total = 0;
  for (const CarvedSet& cs : gp.sets) {
    for (int v : cs.vertices) CHECK(seen.insert(v).second);
    total += (long long)cs.vertices.size();
    if (!cs.rank_capped) CHECK(cs.rank < 2);
  }
  for (int v : gp.residue) CHECK(seen.insert(v).second);
  total += (long long)gp.residue.size();
  CHECK(total == 4);
  if (!gp.residue.empty() && gp.stages >= 1) CHECK(gp.residue_goodness <= f(gp.stages));
}

TEST_CASE("goodsets1 carve sizes follow the floor convention") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 8});
  Schedule f = geometric_schedule(Rat::of(1, 2));
  GoodPartition gp = goodsets1_partition(g, iota(8), 3, f);
  CHECK(gp.ok);
  long long zsize = 8;
  for (const CarvedSet& cs : gp.sets) {
    Rat want = cs.f_param * Rat(zsize);
    long long floor_want = (long long)(want.num() / want.den());
    CHECK((long long)cs.vertices.size() == floor_want);
    zsize -= (long long)cs.vertices.size();
  }
}

TEST_CASE("good pairs are homogeneous (goodsets1 output on Bip of H(16))") {
  // H(16) viewed as a 32-vertex graph; the leaf side is the right copy in Bip
  BipartiteGraph h16 = build_bipartite({.family = Family::HALF_GRAPH, .k = 16});
  SimpleGraph as_graph = SimpleGraph::from_bipartite(h16);
  BipartiteGraph host = bip(as_graph);
  GoodPartition gp = goodsets1_partition(host, iota(32), 5, geometric_schedule(Rat::of(1, 2)));
  REQUIRE(gp.ok);
  std::vector<std::vector<int>> sets;
  for (const CarvedSet& cs : gp.sets) sets.push_back(cs.vertices);
  if (!gp.residue.empty()) sets.push_back(gp.residue);
  Rat eps = Rat::of(1, 100);
  int certified_pairs = 0;
  for (size_t a = 0; a < sets.size(); ++a) {
    if (epsilon_good_level(host, sets[a]).level > eps) continue;
    for (size_t b = a + 1; b < sets.size(); ++b) {
      if (epsilon_good_level(host, sets[b]).level > eps) continue;
      ++certified_pairs;
      long long cross = 0;
      for (int u : sets[a])
        for (int v : sets[b])
          if (u != v && as_graph.has_edge(u, v)) ++cross;
      Rat density(int128(cross), int128((long long)sets[a].size() * sets[b].size()));
      bool hom = density < Rat::of(2, 10) || density > Rat::of(8, 10);
      CHECK(hom);
    }
  }
  CHECK(certified_pairs > 0);
}

TEST_CASE("goodstrong returns 0-good parts whole with empty omega") {
  BipartiteGraph g = complete(5, 12);
  std::vector<std::vector<int>> parts = {{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}};
  StrongPartition sp =
      goodstrong_partition(g, parts, 2, Rat::of(1, 10), geometric_schedule(Rat::of(1, 2)));
  CHECK(sp.ok);
  CHECK(sp.omega.empty());
  CHECK(sp.sets.size() == 3);
  for (const StrongSet& s : sp.sets) CHECK(s.vertices.size() == 4);
}

TEST_CASE("goodstrong on two disjoint H(4) copies passes post-hoc checks") {
  BipartiteGraph g(8, 8);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      g.add_edge(i, j);
      g.add_edge(4 + i, 4 + j);
    }
  std::vector<std::vector<int>> parts = {{0, 1, 2, 3}, {4, 5, 6, 7}};
  StrongPartition sp =
      goodstrong_partition(g, parts, 2, Rat::of(1, 4), geometric_schedule(Rat::of(1, 2)));
  CHECK(sp.ok);
  for (const StrongSet& s : sp.sets) CHECK(s.goodness <= sp.worst_goodness);
  std::vector<std::set<int>> got(2);
  for (const StrongSet& s : sp.sets)
    for (int v : s.vertices) CHECK(got[s.part].insert(v).second);
  for (int u = 0; u < 2; ++u)
    for (int v : sp.overflow[u]) CHECK(got[u].insert(v).second);
  CHECK(got[0] == std::set<int>(parts[0].begin(), parts[0].end()));
  CHECK(got[1] == std::set<int>(parts[1].begin(), parts[1].end()));
}

TEST_CASE("equitable mode produces sets of one exact size") {
  // two complete blocks; finished sets get chopped to the exact size
  BipartiteGraph g(4, 12);
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 7; ++v) g.add_edge(u, v);
  for (int u = 2; u < 4; ++u)
    for (int v = 7; v < 12; ++v) g.add_edge(u, v);
  GoodstrongOptions opt;
  opt.equitable = true;
  opt.equitable_size = 2;
  StrongPartition sp = goodstrong_partition(g, {{0, 1, 2, 3, 4, 5, 6}, {7, 8, 9, 10, 11}}, 2,
                                            Rat::of(1, 2), geometric_schedule(Rat::of(1, 2)), opt);
  CHECK(sp.ok);
  CHECK(!sp.sets.empty());
  for (const StrongSet& s : sp.sets) CHECK(s.vertices.size() == 2);
  // odd leftovers land in the overflow
  CHECK(sp.overflow[0].size() + sp.overflow[1].size() == 2);
}

TEST_CASE("fiberwise partition of an edgeless host is a single good piece") {
  ThreeGraph h(9);
  std::vector<std::pair<int, int>> alpha;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b)
      if (a != b) alpha.emplace_back(a, b);
  FiberwisePartition fp =
      fiberwise_good_partition(h, alpha, 1, Rat::of(1, 10), geometric_schedule(Rat::of(1, 2)));
  CHECK(fp.ok);
  CHECK(fp.overflow.empty());
  REQUIRE(fp.pieces.size() == 1);
  CHECK(fp.pieces[0].worst_goodness == Rat(0));
}

TEST_CASE("fiberwise partition of a W2 member verifies per-fiber goodness") {
  ThreeGraph h = build_three({.family = Family::W2, .k = 5});
  std::vector<std::pair<int, int>> alpha;
  for (int a = 0; a < h.n(); ++a)
    for (int b = 0; b < h.n(); ++b)
      if (a != b) alpha.emplace_back(a, b);
  FiberwisePartition fp =
      fiberwise_good_partition(h, alpha, 3, Rat::of(1, 4), geometric_schedule(Rat::of(1, 2)));
  CHECK(fp.ok);
  CHECK(fp.fibers_verified > 0);
  for (const FiberPiece& piece : fp.pieces) CHECK(piece.worst_goodness <= Rat::of(1, 2));
}

TEST_CASE("fiberwise partition of the empty relation is empty") {
  ThreeGraph h(6);
  FiberwisePartition fp =
      fiberwise_good_partition(h, {}, 2, Rat::of(1, 10), geometric_schedule(Rat::of(1, 2)));
  CHECK(fp.pieces.empty());
  CHECK(fp.overflow.empty());
}

TEST_CASE("symmetry classifier on complete and empty hosts") {
  BipartiteGraph full = complete(8, 8);
  SymmetryResult hi = symmetry_classify(full, iota(8), iota(8), Rat::of(1, 10));
  CHECK(hi.cls == SymmetryClass::DENSITY_HIGH);
  CHECK(hi.density == Rat(1));

  BipartiteGraph empty(8, 8);
  SymmetryResult lo = symmetry_classify(empty, iota(8), iota(8), Rat::of(1, 10));
  CHECK(lo.cls == SymmetryClass::DENSITY_LOW);
  CHECK(lo.density == Rat(0));
}

TEST_CASE("symmetry classifier rejects a density-1/2 random graph") {
  BipartiteGraph g = random_disc2_bipartite(16, 16, Rat::of(1, 2), 5);
  SymmetryResult r = symmetry_classify(g, iota(16), iota(16), Rat::of(1, 10));
  CHECK(r.cls == SymmetryClass::HYPOTHESES_FAIL);
  CHECK(r.witness_vertex >= 0);
}

TEST_CASE("symmetry classifier never misplaces the density") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    BipartiteGraph g = random_disc2_bipartite(10, 10, Rat::of(9, 10), seed);
    SymmetryResult r = symmetry_classify(g, iota(10), iota(10), Rat::of(1, 5));
    if (r.cls == SymmetryClass::DENSITY_LOW) CHECK(r.density * r.density < Rat::of(4, 5));
    if (r.cls == SymmetryClass::DENSITY_HIGH)
      CHECK((Rat(1) - r.density) * (Rat(1) - r.density) < Rat::of(4, 5));
  }
}

TEST_CASE("tree removal on a complete host keeps everything") {
  BipartiteGraph g = complete(6, 8);
  RemovalPartition rp =
      tree_removal_partition(g, iota(6), iota(8), 1, Rat::of(1, 4), Rat::of(1, 10));
  CHECK(rp.removed_nodes.empty());
  REQUIRE(rp.parts.size() == 1);
  CHECK(rp.parts[0].vertices.size() == 8);
  CHECK(rp.achieved_mu == Rat(0));
}

TEST_CASE("tree removal on H(8) yields parts good for the kept nodes") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 8});
  RemovalPartition rp =
      tree_removal_partition(g, iota(8), iota(8), 2, Rat::of(1, 4), Rat::of(1, 4));
  CHECK(rp.ok);
  long long covered = (long long)rp.w0.size();
  for (const RemovalPart& p : rp.parts) {
    covered += (long long)p.vertices.size();
    CHECK(p.goodness <= rp.achieved_mu);
  }
  CHECK(covered == 8);
}

TEST_CASE("tree removal terminates and reports on an adversarial random host") {
  BipartiteGraph g = random_disc2_bipartite(10, 10, Rat::of(1, 2), 77);
  RemovalPartition rp =
      tree_removal_partition(g, iota(10), iota(10), 2, Rat::of(1, 5), Rat::of(1, 5));
  CHECK(rp.ok);
  CHECK(rp.achieved_mu >= Rat(0));
}

TEST_CASE("cleanup of a block-structured host has zero defect and no trees") {
  BipartiteGraph g(6, 8);
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 4; ++v) g.add_edge(u, v);
  for (int u = 3; u < 6; ++u)
    for (int v = 4; v < 8; ++v) g.add_edge(u, v);
  RemovalPartition rp;
  rp.kept_nodes = iota(6);
  rp.parts.push_back({{0, 1, 2, 3}, Rat(0)});
  rp.parts.push_back({{4, 5, 6, 7}, Rat(0)});
  SignatureCleanup sc = stable_removal_cleanup(g, rp, 2, Rat::of(1, 10));
  CHECK(sc.ok);
  CHECK(sc.max_vertex_defect == Rat(0));
  CHECK(sc.residual_d_trees == 0);
  CHECK(sc.signature_classes.size() == 2);
}

TEST_CASE("cleanup pipeline on H(8) kills all 2-trees within the defect bound") {
  BipartiteGraph g = build_bipartite({.family = Family::HALF_GRAPH, .k = 8});
  RemovalPartition rp =
      tree_removal_partition(g, iota(8), iota(8), 2, Rat::of(1, 4), Rat::of(1, 4));
  Rat delta = rp.achieved_mu < Rat::of(1, 4) ? Rat::of(1, 4) : rp.achieved_mu;
  SignatureCleanup sc = stable_removal_cleanup(g, rp, 2, delta);
  REQUIRE(sc.ok);
  CHECK(sc.residual_exact);
  CHECK(sc.residual_d_trees == 0);
  CHECK(sc.max_vertex_defect <= delta);
}

TEST_CASE("cleanup with every node dropped is a vacuous pass") {
  BipartiteGraph g = complete(4, 4);
  RemovalPartition rp;
  rp.kept_nodes = iota(4);
  rp.parts.push_back({{0, 1, 2, 3}, Rat(0)});
  SignatureCleanup sc = stable_removal_cleanup(g, rp, 1, Rat::of(1, 10), Rat(2));
  CHECK(sc.ok);
  CHECK(sc.signature_classes.empty());
  CHECK((long long)sc.u0.size() == 4);
  CHECK(sc.residual_d_trees == 0);
}
