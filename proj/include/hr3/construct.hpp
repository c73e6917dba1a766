#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hr3/rational.hpp"
#include "hr3/three_graph.hpp"

namespace hr3 {

enum class Family {
  HALF_GRAPH,      // H(k), bipartite
  POWERSET_GRAPH,  // U(k), bipartite
  V,               // V(k)
  HBAR,            // Hbar(k)
  UBAR,            // Ubar(k)
  USTAR,           // U*(k)
  HSTAR,           // H*(k)
  F,               // F(l)
  HP,              // HP(k)
  GS,              // GS_p(n)
  W,               // finite member of the W family
  W1,
  W2,
  TENSOR,          // n (x) G for an attached bipartite G
  VCFOP_EXAMPLE,
};

Family family_from_name(const std::string& name);
std::string family_name(Family f);

struct FamilySpec {
  Family family = Family::HALF_GRAPH;
  int k = 0;       // height / index bound, family dependent
  int ell = 0;     // l for F(l) and VCFOP slicing count
  int n = 0;       // dimension for GS, tensor count, side size for VCFOP
  int p = 0;       // prime for GS
  uint64_t seed = 0;
  std::optional<BipartiteGraph> attached;  // for TENSOR
  long long vertex_cap = 2'000'000;        // guards F(l) and V(k) blowup
};

using BuiltGraph = std::variant<ThreeGraph, BipartiteGraph>;

/// Exact construction of the named family; 3-partite families carry their
/// partition. 1-based index families are shifted to 0-based vertex ids; the
/// shift is documented per builder in construct.cpp.
BuiltGraph build_canonical(const FamilySpec& spec);

ThreeGraph build_three(const FamilySpec& spec);        // throws if bipartite family
BipartiteGraph build_bipartite(const FamilySpec& spec);  // throws if 3-graph family

/// All p^n vectors over F_p with first nonzero coordinate 1, as base-p codes
/// (most significant coordinate first).
std::vector<int> gs_special_set(int p, int n);

std::vector<int> gs_digits(int p, int n, long long code);
long long gs_code(int p, const std::vector<int>& digits);

// value table of the rank-th function [l]^2 -> [l], lexicographic, row-major
std::vector<int> f_table_from_rank(int ell, long long rank);
long long f_table_rank(int ell, const std::vector<int>& table);

BipartiteGraph random_disc2_bipartite(int m, int n, const Rat& density, uint64_t seed);

struct SlicePart {
  std::vector<std::pair<int, int>> edges;
  Rat density{0};
  Rat disc2_deviation{0};
  bool disc2_exact = true;
  std::vector<int> source_parts;  // provenance (even_repartition)
};

struct SliceResult {
  int left_size = 0, right_size = 0;
  std::vector<SlicePart> parts;
  long long residue_mass = 0;  // pairs that moved relative to their source part
};

/// Edges assigned independently uniformly among l parts (the randomized
/// realization of the slicing lemma at integral 1/p, so no residue part);
/// per-part density and disc2 deviation are measured on return.
SliceResult slice_bipartite(const BipartiteGraph& g, int ell, uint64_t seed,
                            int disc2_cap = 22);

/// Re-partition parts of K2[U,V] into ell_target parts of near-equal density:
/// low-density parts are merged into a residue, oversized parts are split, and
/// the residue is re-sliced to fill the remaining slots.
SliceResult even_repartition(const SliceResult& parts, int ell_target, uint64_t seed,
                             int disc2_cap = 22);

struct IntegerBall {
  int center;
  int radius;             // open ball (center-radius, center+radius)
  std::vector<int> points;
};

/// Cover an open integer ball in [1,N] by <= 4*radius_big/radius_small
/// disjoint open sub-balls with radii in [radius_small/3, radius_small],
/// leaving at most 2m points uncovered (midpoint placement; the last two
/// balls are merged to keep the leftover small).
std::vector<IntegerBall> slice_interval(int N, int lo, int hi, int d_small);

/// Witness for the functional order property: vertices realizing an induced
/// F(l) in Trip(host). b_for maps the value table of f:[l]^2->[l] (row-major,
/// 1-based values) to the l chosen b-vertices.
struct Fop2Witness {
  int ell = 0;
  bool complemented = false;  // witness is for the complement relation
  std::vector<int> a;         // size ell
  std::vector<int> c;         // size ell
  std::vector<std::pair<std::vector<int>, std::vector<int>>> b_for;  // (table, b's)

  const std::vector<int>* b_row(const std::vector<int>& table) const;
};

bool verify_fop2_witness(const ThreeGraph& host, const Fop2Witness& w, std::string* why = nullptr);

/// Transform an l-FOP2 witness into a verified (l-1)-FOP2 witness for the
/// complement relation (u_i from reversed c's, b's re-indexed through the
/// reflected tables). Throws if the input witness fails verification.
Fop2Witness fop2_negation_transform(const ThreeGraph& host, const Fop2Witness& w);

}  // namespace hr3
