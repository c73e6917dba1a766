#include "doctest.h"

#include <set>

#include "hr3/decomp.hpp"
#include "hr3/rng.hpp"

using namespace hr3;

namespace {

// W-family member with its defining 2-binary edge partition: all of
// K2[A,B] and K2[A,C] in part 0; K2[B,C] split by "j in S".
std::pair<ThreeGraph, Decomposition> w_with_defining_partition(int k) {
  ThreeGraph h = build_three({.family = Family::W, .k = k});
  Decomposition d;
  d.ell = 2;
  const auto& parts = *h.partition();
  d.classes = {parts[0], parts[1], parts[2]};
  d.rebuild_index();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      d.labels[{i, j}].assign(d.classes[i].size() * d.classes[j].size(), 0);
  // BC pairs: label 0 iff some edge uses the pair (j in S)
  for (int b = 0; b < k; ++b)
    for (int c = 0; c < k; ++c) {
      bool in = h.has_edge(0, k + b, 2 * k + c);  // apex a_0 sees exactly j in S
      d.set_label(k + b, 2 * k + c, in ? 0 : 1);
    }
  d.validate();
  return {h, d};
}

// host of the slice-encoding pipeline: classes X, Y, Z_1..Z_k of size m,
// K2[X,Y] sliced into k parts, edge {x,y,z} iff block(z) <= slice(x,y)
struct OtherwayHost {
  ThreeGraph h;
  Decomposition d;
};

OtherwayHost otherway_host(int m, int k, uint64_t seed) {
  OtherwayHost out;
  int n = (2 + k) * m;
  ThreeGraph h(n);
  Rng rng = Rng::substream(seed, "otherway");
  std::vector<int> slice(size_t(m) * m);
  for (auto& s : slice) s = 1 + int(rng.below(k));
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) {
      int alpha = slice[size_t(x) * m + y];
      for (int beta = 1; beta <= alpha; ++beta)
        for (int z = 0; z < m; ++z) h.add_edge(x, m + y, (1 + beta) * m + z);
    }
  std::vector<std::vector<int>> tparts(3);
  for (int i = 0; i < m; ++i) {
    tparts[0].push_back(i);
    tparts[1].push_back(m + i);
  }
  for (int z = 2 * m; z < n; ++z) tparts[2].push_back(z);
  h.set_partition(tparts);

  Decomposition d;
  d.ell = k;
  d.classes.assign(2 + k, {});
  for (int c = 0; c < 2 + k; ++c)
    for (int i = 0; i < m; ++i) d.classes[c].push_back(c * m + i);
  d.rebuild_index();
  for (int i = 0; i < d.t; ++i)
    for (int j = i + 1; j < d.t; ++j) {
      auto& lab = d.labels[{i, j}];
      lab.assign(size_t(m) * m, 0);
      for (auto& a : lab) a = int(rng.below(k));
    }
  // the (X,Y) pair carries the defining slices
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) d.labels[{0, 1}][size_t(x) * m + y] = slice[size_t(x) * m + y] - 1;
  d.validate();
  out.h = std::move(h);
  out.d = std::move(d);
  return out;
}

}  // namespace

TEST_CASE("natural t=3 decomposition uses the host parts") {
  ThreeGraph h = build_three({.family = Family::HBAR, .k = 4});
  Decomposition d = build_decomposition(h, 3, 2, BuildStrategy::NATURAL, 1);
  CHECK(d.classes == *h.partition());
  CHECK(d.is_equipartition());
}

TEST_CASE("random decomposition invariants and bit-exact JSON round trip") {
  ThreeGraph h = build_three({.family = Family::HP, .k = 4});
  Decomposition d = build_decomposition(h, 4, 2, BuildStrategy::RANDOM, 7);
  CHECK(d.is_equipartition());
  CHECK_NOTHROW(d.validate());
  std::string js = write_decomposition_json(d);
  Decomposition back = parse_decomposition_json(js);
  CHECK(write_decomposition_json(back) == js);
}

TEST_CASE("binary host: every triangle-supported triad is homogeneous at {0,1}") {
  auto [h, d] = w_with_defining_partition(8);
  ClassifyOptions opt;
  opt.eps1 = Rat::of(1, 100);
  opt.eps2 = Rat::of(45, 100);  // the defining parts are lopsided by design
  auto reports = classify_triads(h, d, opt);
  int supported = 0;
  for (const auto& r : reports) {
    if (r.triangles == 0) continue;
    ++supported;
    CHECK((r.d3 == Rat(0) || r.d3 == Rat(1)));
    CHECK(r.homogeneous);
  }
  CHECK(supported > 0);
}

TEST_CASE("edgeless host: all triads have d3 = 0 and classify REGULAR") {
  ThreeGraph h(12);
  Decomposition d = build_decomposition(h, 3, 2, BuildStrategy::RANDOM, 3);
  ClassifyOptions opt;
  opt.eps1 = Rat::of(1, 2);
  opt.eps2 = Rat::of(1, 2);
  for (const auto& r : classify_triads(h, d, opt)) {
    CHECK(r.d3 == Rat(0));
    CHECK(r.classification == TriadClass::REGULAR);
  }
}

TEST_CASE("triad densities match brute force on tiny random hosts") {
  Rng rng(5);
  ThreeGraph h(9);
  for (int a = 0; a < 9; ++a)
    for (int b = a + 1; b < 9; ++b)
      for (int c = b + 1; c < 9; ++c)
        if (rng.chance(1, 2)) h.add_edge(a, b, c);
  Decomposition d = build_decomposition(h, 3, 2, BuildStrategy::RANDOM, 11);
  for (const auto& r : classify_triads(h, d)) {
    long long tri = 0, cov = 0;
    for (int x : d.classes[r.i])
      for (int y : d.classes[r.j])
        for (int z : d.classes[r.k]) {
          if (d.label(x, y) != r.alpha || d.label(x, z) != r.beta || d.label(y, z) != r.gamma)
            continue;
          ++tri;
          if (h.has_edge(x, y, z)) ++cov;
        }
    CHECK(r.triangles == tri);
    CHECK(r.covered_edges == cov);
  }
}

TEST_CASE("disc2/disc3 coherence: DISC3_IRREGULAR only when disc2-regular") {
  auto [h, d] = w_with_defining_partition(8);
  ClassifyOptions opt;
  opt.eps1 = Rat::of(1, 1000);
  opt.eps2 = Rat::of(1, 10);
  Rat target = Rat::of(1, 2);
  for (const auto& r : classify_triads(h, d, opt)) {
    if (r.classification == TriadClass::DISC3_IRREGULAR) {
      for (int s = 0; s < 3; ++s) {
        CHECK(r.pair_dev[s] <= opt.eps2);
        CHECK((r.pair_density[s] - target).abs() <= opt.eps2);
      }
    }
  }
}

TEST_CASE("triad triangle counts partition the complete cross block") {
  ThreeGraph h = build_three({.family = Family::HP, .k = 4});
  Decomposition d = build_decomposition(h, 4, 2, BuildStrategy::RANDOM, 2);
  auto reports = classify_triads(h, d);
  std::map<std::array<int, 3>, long long> sums;
  for (const auto& r : reports) sums[{r.i, r.j, r.k}] += r.triangles;
  for (auto& [ijk, total] : sums) {
    long long expect = (long long)d.classes[ijk[0]].size() * d.classes[ijk[1]].size() *
                       d.classes[ijk[2]].size();
    CHECK(total == expect);
  }
}

TEST_CASE("homogeneity report on the binary host counts cross triangles") {
  auto [h, d] = w_with_defining_partition(8);
  HomogeneityReport rep = homogeneity_report(h, d, Rat::of(1, 10));
  // every cross triple lies in a triad with density exactly 0 or 1
  CHECK(rep.homogeneous_triples == rep.covered_triples);
  CHECK(rep.covered_triples == 8LL * 8 * 8);
  long long n = h.n();
  CHECK(rep.total_triples == n * (n - 1) * (n - 2) / 6);
}

TEST_CASE("homogeneity at mu = 1/2 counts every covered triple") {
  ThreeGraph h(12);
  Rng rng(9);
  for (int a = 0; a < 12; ++a)
    for (int b = a + 1; b < 12; ++b)
      for (int c = b + 1; c < 12; ++c)
        if (rng.chance(1, 3)) h.add_edge(a, b, c);
  Decomposition d = build_decomposition(h, 3, 2, BuildStrategy::RANDOM, 1);
  HomogeneityReport rep = homogeneity_report(h, d, Rat::of(1, 2));
  // every covered triple counts except those in triads of density exactly 1/2
  long long at_half = 0;
  for (const auto& r : classify_triads(h, d))
    if (r.d3 == Rat::of(1, 2)) at_half += r.triangles;
  CHECK(rep.homogeneous_triples == rep.covered_triples - at_half);
}

TEST_CASE("edgeless host homogeneity counts covered triples at density 0") {
  ThreeGraph h(12);
  Decomposition d = build_decomposition(h, 4, 2, BuildStrategy::RANDOM, 1);
  HomogeneityReport rep = homogeneity_report(h, d, Rat::of(1, 100));
  CHECK(rep.homogeneous_triples == rep.covered_triples);
  CHECK(rep.fraction == Rat(int128(rep.covered_triples), int128(rep.total_triples)));
}

namespace {
TriadReport fake_report(int i, int j, int k, TriadClass c) {
  TriadReport r;
  r.i = i;
  r.j = j;
  r.k = k;
  r.classification = c;
  return r;
}
}  // namespace

TEST_CASE("error shape: zero, binary through a shared pair, linear projection") {
  std::vector<TriadReport> none = {fake_report(0, 1, 2, TriadClass::REGULAR)};
  CHECK(error_shape(none, 5).kind == ErrorKind::ZERO);

  std::vector<TriadReport> shared;
  for (int k = 2; k < 5; ++k) shared.push_back(fake_report(0, 1, k, TriadClass::DISC3_IRREGULAR));
  ErrorShape bin = error_shape(shared, 5, {Rat::of(1, 10)});
  CHECK(bin.kind == ErrorKind::BINARY);
  REQUIRE(bin.cover_pairs.size() == 1);
  CHECK(bin.cover_pairs[0] == std::pair{0, 1});
  CHECK(bin.cover_optimal);

  // scattered triples: minimum pair cover too large for the budget, but the
  // triple projection fits eps1 * t^3
  std::vector<TriadReport> scattered;
  scattered.push_back(fake_report(0, 1, 2, TriadClass::DISC2_IRREGULAR));
  scattered.push_back(fake_report(3, 4, 5, TriadClass::DISC2_IRREGULAR));
  scattered.push_back(fake_report(6, 7, 1, TriadClass::DISC3_IRREGULAR));
  ErrorShape lin = error_shape(scattered, 8, {Rat::of(1, 50)});
  CHECK(lin.kind == ErrorKind::LINEAR);
  CHECK(lin.cover_triples.size() == 3);
  // containment scan: every irregular triple is its own cover element
  std::set<std::array<int, 3>> sigma(lin.cover_triples.begin(), lin.cover_triples.end());
  for (const auto& r : scattered) CHECK(sigma.count({r.i, r.j, r.k}));
}

TEST_CASE("binary cover implies linear cover at matching budgets") {
  std::vector<TriadReport> shared;
  for (int k = 2; k < 6; ++k) shared.push_back(fake_report(0, 1, k, TriadClass::DISC3_IRREGULAR));
  ErrorShape bin = error_shape(shared, 6, {Rat::of(1, 10)});
  REQUIRE(bin.kind == ErrorKind::BINARY);
  // taking all triples with a pair in Gamma covers, and fits eps1 t^3
  long long triples_with_pair = 0;
  for (const auto& r : shared)
    for (auto [a, b] : bin.cover_pairs)
      if ((r.i == a && r.j == b) || (r.i == a && r.k == b) || (r.j == a && r.k == b))
        ++triples_with_pair;
  CHECK(triples_with_pair >= (long long)shared.size());
  CHECK(Rat((long long)shared.size()) <= Rat::of(1, 10) * Rat(6 * 6 * 6));
}

TEST_CASE("reduced encoding of a binary host has no undecided entries") {
  // the slice-built host is binary: every supported triad has density 0 or 1
  OtherwayHost ow = otherway_host(12, 2, 9);
  ClassifyOptions opt;
  opt.eps2 = Rat::of(3, 10);
  ReducedEncoding enc = reduced_encoding(ow.h, ow.d, Rat::of(1, 10), opt);
  CHECK(enc.count(ReducedState::UNDECIDED) == 0);
  CHECK(enc.count(ReducedState::E1) > 0);
  CHECK(enc.count(ReducedState::E0) > 0);
}

TEST_CASE("vacuous thresholds leave everything undecided") {
  // densities strictly between eps and 1-eps for all supported triads
  OtherwayHost ow = otherway_host(6, 2, 3);
  // overwrite h edges: keep roughly half of each triad's triangles
  ThreeGraph mixed(ow.h.n());
  Rng rng(17);
  for (const Triple& e : ow.h.edges())
    if (rng.chance(1, 2)) mixed.add_edge(e[0], e[1], e[2]);
  mixed.set_partition(*ow.h.partition());
  ClassifyOptions opt;
  opt.eps2 = Rat::of(45, 100);
  ReducedEncoding enc = reduced_encoding(mixed, ow.d, Rat::of(1, 100), opt);
  // E1/E0 disjoint by construction; most mid-density entries stay undecided
  CHECK(enc.count(ReducedState::UNDECIDED) > 0);
}

TEST_CASE("otherway pipeline: H(2) encoding FOUND and 2-FOP2 extracted") {
  OtherwayHost ow = otherway_host(48, 2, 2026);
  ClassifyOptions opt;
  opt.eps2 = Rat::of(2, 10);
  ReducedEncoding enc = reduced_encoding(ow.h, ow.d, Rat::of(1, 10), opt);
  EncodingWitness ewit = find_encoding(enc, "H", 2);
  REQUIRE(ewit.status == SearchStatus::FOUND);
  CHECK(ewit.j0 == 0);
  CHECK(ewit.k0 == 1);
  FopExtraction fe = extract_fop2_witness(ow.h, ow.d, ewit, 2);
  REQUIRE(fe.status == SearchStatus::FOUND);
  std::string why;
  CHECK(verify_fop_extraction(ow.h, fe, 2, &why));
}

TEST_CASE("empty E1 certifies absence of any H(k) encoding") {
  ThreeGraph h(12);  // edgeless: every supported triad has density 0
  Decomposition d = build_decomposition(h, 4, 2, BuildStrategy::RANDOM, 5);
  ClassifyOptions opt;
  opt.eps2 = Rat::of(3, 10);
  ReducedEncoding enc = reduced_encoding(h, d, Rat::of(1, 10), opt);
  CHECK(enc.count(ReducedState::E1) == 0);
  EncodingWitness w = find_encoding(enc, "H", 1);
  CHECK(w.status == SearchStatus::ABSENT_CERTIFIED);
}

TEST_CASE("budget zero extraction is INCONCLUSIVE") {
  OtherwayHost ow = otherway_host(48, 2, 2026);
  ClassifyOptions opt;
  opt.eps2 = Rat::of(2, 10);
  ReducedEncoding enc = reduced_encoding(ow.h, ow.d, Rat::of(1, 10), opt);
  EncodingWitness ewit = find_encoding(enc, "H", 2);
  REQUIRE(ewit.status == SearchStatus::FOUND);
  FopExtraction fe = extract_fop2_witness(ow.h, ow.d, ewit, 2, 0);
  CHECK(fe.status == SearchStatus::INCONCLUSIVE);
}

TEST_CASE("fix_disc2_irregular is the identity when parts already pass") {
  ThreeGraph h(16);
  Decomposition d = build_decomposition(h, 2, 2, BuildStrategy::RANDOM, 21);
  FixReport rep;
  Decomposition out = fix_disc2_irregular(h, d, Rat::of(3, 10), 5, &rep);
  CHECK(rep.failing_before == 0);
  CHECK(write_decomposition_json(out) == write_decomposition_json(d));
}

TEST_CASE("fix_disc2_irregular repairs an adversarial block part") {
  ThreeGraph h(24);
  Decomposition d = build_decomposition(h, 2, 2, BuildStrategy::RANDOM, 77);
  // make part 0 of the only pair a block: rows 0..5 entirely label 0
  auto& m = d.labels[{0, 1}];
  size_t sj = d.classes[1].size();
  for (size_t a = 0; a < 6; ++a)
    for (size_t b = 0; b < sj; ++b) m[a * sj + b] = 0;
  for (size_t a = 6; a < d.classes[0].size(); ++a)
    for (size_t b = 0; b < sj; ++b) m[a * sj + b] = 1;
  FixReport rep;
  Decomposition out = fix_disc2_irregular(h, d, Rat::of(15, 100), 5, &rep);
  CHECK(rep.failing_before > 0);
  CHECK(rep.failing_after < rep.failing_before);
  CHECK_NOTHROW(out.validate());
}

TEST_CASE("fix at l=1 reshuffles but preserves the part count") {
  ThreeGraph h(12);
  Decomposition d = build_decomposition(h, 2, 1, BuildStrategy::RANDOM, 3);
  FixReport rep;
  Decomposition out = fix_disc2_irregular(h, d, Rat::of(1, 100), 5, &rep);
  CHECK(out.ell == 1);
  CHECK_NOTHROW(out.validate());
}

TEST_CASE("refinement against the trivial one-class decomposition has no defects") {
  ThreeGraph h(12);
  Decomposition p = build_decomposition(h, 3, 2, BuildStrategy::RANDOM, 5);
  Decomposition q;
  q.ell = 1;
  q.classes = {{}};
  for (int v = 0; v < 12; ++v) q.classes[0].push_back(v);
  q.rebuild_index();
  q.validate();
  RefinementReport rep;
  Decomposition r = common_refinement(p, q, &rep);
  CHECK(rep.max_class_defect == Rat(0));
  CHECK(r.is_equipartition());
}

TEST_CASE("self-refinement has small defects and verifies at its own parameters") {
  ThreeGraph h(16);
  Decomposition p = build_decomposition(h, 4, 2, BuildStrategy::RANDOM, 13);
  RefinementReport rep;
  Decomposition r = common_refinement(p, p, &rep);
  CHECK(r.is_equipartition());
  // verify the refine-then-verify round at (reported eps1, reported eps2)
  Rat eps1 = rep.max_class_defect + rep.max_part_defect + Rat::of(1, 100);
  Rat eps2 = rep.max_diff_disc2 + Rat::of(1, 100);
  VerifyRefinementResult vr = verify_approx_refinement(r, p, eps1, eps2);
  CHECK(vr.pass);
}

TEST_CASE("verify passes with zero defects on an exactly nested refinement") {
  // t = 6 so the within-q-class pairs of the split fit the Sigma budget
  ThreeGraph h(48);
  Decomposition q = build_decomposition(h, 6, 1, BuildStrategy::RANDOM, 9);
  // split each class of q in two, refining exactly; labels all zero
  Decomposition r;
  r.ell = 1;
  for (const auto& c : q.classes) {
    std::vector<int> lo(c.begin(), c.begin() + c.size() / 2);
    std::vector<int> hi(c.begin() + c.size() / 2, c.end());
    r.classes.push_back(lo);
    r.classes.push_back(hi);
  }
  r.rebuild_index();
  for (int i = 0; i < r.t; ++i)
    for (int j = i + 1; j < r.t; ++j)
      r.labels[{i, j}].assign(r.classes[i].size() * r.classes[j].size(), 0);
  r.validate();
  VerifyRefinementResult vr = verify_approx_refinement(r, q, Rat::of(1, 10), Rat::of(1, 10));
  CHECK(vr.pass);
  CHECK(vr.report.max_class_defect == Rat(0));
}

TEST_CASE("verify fails and names the class when a class splits across q") {
  ThreeGraph h(16);
  Decomposition q = build_decomposition(h, 4, 1, BuildStrategy::RANDOM, 9);
  Decomposition r;
  r.ell = 1;
  // one class of r takes half its vertices from two different q classes
  std::vector<int> mixed;
  mixed.insert(mixed.end(), q.classes[0].begin(), q.classes[0].begin() + 2);
  mixed.insert(mixed.end(), q.classes[1].begin(), q.classes[1].begin() + 2);
  std::vector<int> rest;
  for (int v = 0; v < 16; ++v)
    if (std::find(mixed.begin(), mixed.end(), v) == mixed.end()) rest.push_back(v);
  r.classes = {mixed, rest};
  r.rebuild_index();
  for (int i = 0; i < r.t; ++i)
    for (int j = i + 1; j < r.t; ++j)
      r.labels[{i, j}].assign(r.classes[i].size() * r.classes[j].size(), 0);
  r.validate();
  VerifyRefinementResult vr = verify_approx_refinement(r, q, Rat::of(1, 10), Rat::of(1, 2));
  CHECK_FALSE(vr.pass);
  bool named = false;
  for (const auto& def : vr.report.defects)
    if (def.cls == 0) named = true;
  CHECK(named);
}
