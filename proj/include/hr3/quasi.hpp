#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hr3/rational.hpp"
#include "hr3/three_graph.hpp"

namespace hr3 {

/// Result of a deviation measurement. `witness` re-evaluates to `deviation`
/// by construction; `exact` is true only when the search space was exhausted.
struct DeviationReport {
  Rat deviation{0};
  Rat density_used{0};
  bool exact = true;
  std::vector<int> witness_left;    // U' (disc2) / V1' (vdisc3)
  std::vector<int> witness_right;   // V' / V2'
  std::vector<int> witness_third;   // V3' (vdisc3 only)
  // subgraph witness for disc23 search: per pair list of (u,v)
  std::vector<std::vector<std::pair<int, int>>> witness_subgraph;
};

struct Disc2Options {
  int exact_cap = 22;            // max smaller-side size for exhaustive search
  bool eps_regular = false;      // restrict to |U'| >= eps|U|, |W'| >= eps|W|
  Rat eps{0};
  int samples = 20000;           // sampling fallback draws
  uint64_t seed = 0;
  int threads = 1;
};

/// Exact max over subset pairs of |e(U',V') - d|U'||V'|| / (|U||V|), by
/// enumerating the smaller side and completing the other side greedily
/// (take exactly the rows with positive marginal). Falls back to sampling
/// with exact=false above the cap.
DeviationReport disc2_deviation(const BipartiteGraph& g, std::optional<Rat> d = {},
                                const Disc2Options& opt = {});

/// Ordered C4 quadruples (u0,u1,v0,v1), repeats allowed, all four pairs
/// edges; the fourth-moment convention matching the dev2 summation index.
long long cycle2_count(const BipartiteGraph& g);

/// Exact value of the dev2 quadruple sum normalized by |U|^2|V|^2.
Rat dev2_sum(const BipartiteGraph& g, const Rat& d2);

struct Vdisc3Options {
  int exact_cap = 26;  // max sum of the two smallest part sizes
  int samples = 4000;
  uint64_t seed = 0;
  int threads = 1;
};

/// Exact max over subset triples of |e(V1',V2',V3') - d|V1'||V2'||V3'|| over
/// |V1||V2||V3|, enumerating the two smallest parts and completing the third
/// greedily. The input must carry a 3-partition.
DeviationReport vdisc3_deviation(const ThreeGraph& h, std::optional<Rat> d = {},
                                 const Vdisc3Options& opt = {});

/// A 3-partite 3-graph laid over an explicit underlying tripartite graph,
/// with part-local vertex indices. The unit for the triad-level measures.
struct TriadInstance {
  TripartiteGraph g;
  std::vector<Triple> h_edges;  // part-local (i in part0, j in part1, k in part2)

  int size(int part) const { return g.size(part); }
  bool validate_underlying() const;  // every h edge sits atop a triangle of g
  long long triangle_count() const { return g.triangle_count(); }
  long long covered_edge_count() const;  // |E(H) cap K3(G)| = |h_edges| when underlying
  Rat d3() const;                        // density over triangles (0 if no triangles)
};

/// Build a TriadInstance from a 3-partite ThreeGraph (uses its partition) and
/// an underlying tripartite graph on the same part sizes.
TriadInstance make_triad(const ThreeGraph& h, const TripartiteGraph& g);

/// Exact dev_{2,3} eight-fold sum normalized by (|V1||V2||V3|)^2, via the
/// per-(w0,w1) factorization  sum = sum_{w0,w1} ||M^T M||_F^2  with
/// M[u][v] = f(u,v,w0) f(u,v,w1). Exact for part sizes <= 16.
Rat dev23_sum(const TriadInstance& t, std::optional<Rat> d3 = {});

/// Ordered 6-tuples (u0,u1,v0,v1,w0,w1), repeats allowed, all eight triples
/// edges of h.
long long oct23_count(const TriadInstance& t);

struct Disc23Options {
  long long budget = 20000;   // toggle evaluations for the local search
  int exact_edge_cap = 24;    // full enumeration when cross edges <= cap
  uint64_t seed = 0;
  int restarts = 4;
};

/// Best-found subgraph G' of t.g maximizing ||E cap K3(G')| - d3 |K3(G')||,
/// normalized by d2^3 |V1||V2||V3| with d2 = min of the three measured pair
/// densities. Exact (full enumeration) when the cross-edge count is small.
DeviationReport disc23_witness_search(const TriadInstance& t, std::optional<Rat> d3 = {},
                                      const Disc23Options& opt = {});

/// Exact count of tuples (one vertex per host class, classes listed in
/// pattern part order) realizing the pattern's cross-part edges and
/// non-edges. `pattern` must carry a 3-partition.
long long induced_pattern_count(const ThreeGraph& h, const std::vector<std::vector<int>>& classes,
                                const ThreeGraph& pattern);

}  // namespace hr3
