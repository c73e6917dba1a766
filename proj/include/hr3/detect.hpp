#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hr3/construct.hpp"
#include "hr3/three_graph.hpp"

namespace hr3 {

enum class SearchStatus { FOUND, ABSENT_CERTIFIED, INCONCLUSIVE };

std::string search_status_name(SearchStatus s);

/// Embedding of a named configuration into a host. For 3-graph patterns the
/// embedding targets Trip(host): each pattern vertex maps to (role, host
/// vertex) with roles the three copies of V(host); images are injective per
/// role but may coincide across roles. FOUND witnesses re-verify on
/// construction; ABSENT_CERTIFIED only after exhausting the search space.
struct PatternWitness {
  std::string pattern;
  SearchStatus status = SearchStatus::INCONCLUSIVE;
  std::vector<std::pair<int, int>> embedding;  // pattern vertex -> (role, host vertex)
  long long nodes_explored = 0;
};

struct FindOptions {
  long long budget = 2'000'000;  // node expansions
};

/// Backtracking induced-pattern search in Trip(host) with forward checking:
/// once two vertices of a pattern triple are placed, the third's candidate
/// set is filtered through the host pair neighborhood. Root candidates are
/// tried in ascending host order, so ties resolve deterministically.
PatternWitness find_pattern(const ThreeGraph& host, const ThreeGraph& pattern,
                            const std::string& name, const FindOptions& opt = {});

/// Induced bipartite pattern search inside a bipartite host; both side
/// orientations are tried.
PatternWitness find_bipartite_pattern(const BipartiteGraph& host, const BipartiteGraph& pattern,
                                      const std::string& name, const FindOptions& opt = {});

/// Convenience: instantiate the family and search for it in the right
/// derived host (Trip for 3-graph patterns, the host itself for bipartite
/// patterns searched in bipartite hosts).
PatternWitness find_pattern(const ThreeGraph& host, const FamilySpec& pattern,
                            const FindOptions& opt = {});

struct SetSystem {
  int ground_size = 0;
  std::vector<Bitset> sets;
};

struct VcResult {
  int dimension = 0;          // largest shattered size found (<= cap)
  bool certified = true;      // false when the cap stopped the search
  std::vector<int> shattered; // a witness set of size `dimension`
};

/// Exact VC dimension of a set system by level-wise shattering search
/// (candidates at level k extend shattered (k-1)-sets). `budget` caps the
/// number of shattering tests; exceeding it reports the best lower bound
/// with certified=false.
VcResult vc_dimension(const SetSystem& system, int cap, long long budget = (1LL << 62));

/// Both trace directions of a 3-graph's VC dimension: ground V with pair
/// neighborhoods, and ground pairs with vertex neighborhoods.
SetSystem vc_system_vertex_ground(const ThreeGraph& h);
SetSystem vc_system_pair_ground(const ThreeGraph& h);

/// max over vertices a of VC(link set system of a), capped.
struct WvcResult {
  int dimension = 0;
  bool certified = true;
  int witness_vertex = -1;
};
WvcResult wvc_dimension(const ThreeGraph& h, int cap);

/// d-tree witness: nodes indexed by binary strings of length < d (as
/// (level, index) pairs packed level-major), leaves by strings of length d.
struct TreeWitness {
  int depth = 0;
  std::vector<int> nodes;   // size 2^d - 1, level-major: <>,0,1,00,01,...
  std::vector<int> leaves;  // size 2^d
};

bool verify_tree_witness(const BipartiteGraph& g, const TreeWitness& w);

struct TreeRankResult {
  int rank = 0;
  bool capped = false;  // rank hit depth_cap
  std::optional<TreeWitness> witness;
};

/// Exact tree rank of a leaf-side subset via the splitting recursion,
/// memoized on leaf-set bitmaps (cap degrades to uncached recursion).
TreeRankResult tree_rank(const BipartiteGraph& g, const std::vector<int>& leaf_subset,
                         int depth_cap, size_t memo_cap = 1 << 22);

struct DTreeCount {
  double value = 0;      // exact count for d <= 2, estimate above
  bool exact = true;
  double std_error = 0;  // reported for estimates
};

/// Count of (A,B,d)-trees: nodes drawn from A (left side), leaves from B
/// (right side). Exact for d <= 2, Monte Carlo with reported standard error
/// for deeper trees.
DTreeCount count_d_trees(const BipartiteGraph& g, const std::vector<int>& node_side,
                         const std::vector<int>& leaf_side, int d, uint64_t seed = 0,
                         int samples = 2000);

struct DimensionEntry {
  int value = 0;
  SearchStatus certainty = SearchStatus::INCONCLUSIVE;
};

struct DimensionReport {
  DimensionEntry vc;               // VC(Graph(H)), max of both trace directions
  DimensionEntry wvc;
  DimensionEntry vc2_lower;        // max k with V(k) found
  DimensionEntry order_property;   // max k with H(k) in Bip(Graph(H))
  DimensionEntry weak_stability;   // max k with H*(k) in Trip(H)
  DimensionEntry fop2;             // max l with F(l) found
  DimensionEntry hop2;             // max k with HP(k) found
};

struct DimensionCaps {
  int vc_cap = 3;
  int wvc_cap = 3;
  int vc2_cap = 2;
  int order_cap = 4;
  int weak_stability_cap = 3;
  int fop_cap = 2;
  int hop_cap = 3;
  long long budget = 500'000;
};

DimensionReport dimension_report(const ThreeGraph& h, const DimensionCaps& caps = {});

}  // namespace hr3
