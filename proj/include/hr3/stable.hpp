#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hr3/detect.hpp"
#include "hr3/rational.hpp"
#include "hr3/three_graph.hpp"

namespace hr3 {

/// Non-increasing carve-fraction schedule; f(1), f(2), ... in (0,1].
using Schedule = std::function<Rat(int)>;

Schedule geometric_schedule(const Rat& ratio);  // f(i) = ratio^i

struct GoodnessLevel {
  Rat level{0};          // max over opposite vertices of min-side fraction
  int worst_vertex = -1;
};

/// Exact max over opposite-side v of min(|N(v) cap X|, |X \ N(v)|) / |X|.
/// X lives on the right side; nodes are the left side.
GoodnessLevel epsilon_good_level(const BipartiteGraph& g, const std::vector<int>& x);

/// Same measurement against a restricted node set.
GoodnessLevel epsilon_good_level(const BipartiteGraph& g, const std::vector<int>& x,
                                 const std::vector<int>& nodes);

struct CarvedSet {
  int stage = 0;          // alpha
  int index = 0;          // j within the stage
  std::vector<int> vertices;
  Rat f_param{0};         // f(stage)
  Rat goodness{0};        // verified exact level
  int rank = 0;           // capped tree rank
  bool rank_capped = false;
};

struct GoodPartition {
  std::vector<CarvedSet> sets;
  std::vector<int> residue;
  Rat residue_goodness{0};
  int stages = 0;
  bool ok = true;
  std::string error;
  int error_stage = -1;
  bool stage_cap_hit = false;
};

struct Goodsets1Options {
  int max_stages = 64;
  int rank_cap = 8;
};

/// The staged greedy partitioner: at stage alpha, repeatedly take the lowest
/// live node u (min side >= f(alpha)|Z|) and carve floor(f(alpha)|Z|) lowest
/// indices from u's side of smaller capped tree rank (tie: neighbor side).
/// A zero carve size mid-run is a hard error reported with the stage.
GoodPartition goodsets1_partition(const BipartiteGraph& g, const std::vector<int>& w, int d_cap,
                                  const Schedule& f, const Goodsets1Options& opt = {});

struct StrongSet {
  int part = 0;  // input part index
  std::vector<int> vertices;
  Rat goodness{0};
  bool from_residue = false;
};

struct StrongPartition {
  std::vector<StrongSet> sets;
  std::vector<std::vector<int>> overflow;  // W_{u,0} per input part
  std::vector<int> omega;  // input parts whose overflow exceeded eps
  int m_prime = 0;         // max sets per part
  Rat worst_goodness{0};
  Rat f_target{0};         // f(m_prime)
  Rat omega_mass{0};       // |union of omega parts| / |W|
  bool ok = true;
  std::string error;
};

struct GoodstrongOptions {
  int max_stages = 64;
  int rank_cap = 8;
  bool equitable = false;
  int equitable_size = 0;  // 0: use the smallest finished set
};

/// Recursion skeleton of the strong partitioner with a caller-supplied
/// schedule: rank-d parts are carved by goodsets1, carved pieces recurse at
/// d-1, residues finish as good sets. All output guarantees are verified
/// post-hoc and reported as achieved values. Equitable mode chops finished
/// sets to one exact size.
StrongPartition goodstrong_partition(const BipartiteGraph& g,
                                     const std::vector<std::vector<int>>& parts, int d,
                                     const Rat& eps, const Schedule& f,
                                     const GoodstrongOptions& opt = {});

struct FiberPiece {
  std::vector<int> path;  // stage indices along the recursion
  std::vector<std::pair<int, int>> pairs;
  Rat worst_goodness{0};  // exact level over the verified fibers
  int worst_fiber = -1;
};

struct FiberwisePartition {
  std::vector<FiberPiece> pieces;
  std::vector<std::pair<int, int>> overflow;
  Rat overflow_fraction{0};
  bool ok = true;
  std::string error;
  int fibers_verified = 0;
};

struct FiberwiseOptions {
  int max_stages = 16;
  int rank_cap = 6;
  int max_pieces = 4096;
  int verify_fibers = 0;  // 0: verify all
  uint64_t seed = 0;
};

/// Fiberwise variant: the relation alpha (pairs (a,b)) is split so that each
/// piece's fiber at every a is good in the link graph H_a. Post-hoc
/// verification measures fibers exactly (sampled above verify_fibers).
FiberwisePartition fiberwise_good_partition(const ThreeGraph& h,
                                            const std::vector<std::pair<int, int>>& alpha, int d,
                                            const Rat& eps, const Schedule& f,
                                            const FiberwiseOptions& opt = {});

enum class SymmetryClass { DENSITY_LOW, DENSITY_HIGH, HYPOTHESES_FAIL };

struct SymmetryResult {
  SymmetryClass cls = SymmetryClass::HYPOTHESES_FAIL;
  Rat density{0};
  std::string detail;   // names the failed hypothesis when HYPOTHESES_FAIL
  int witness_vertex = -1;
};

/// Verify the symmetry-lemma hypotheses exactly; when they hold, return the
/// side of [0,2*sqrt(eps)) u (1-2*sqrt(eps),1] containing the exact density.
/// The classifier never returns a class whose interval excludes the density;
/// below the lemma's scale the conclusion can fail, which reports
/// HYPOTHESES_FAIL with a detail note rather than a wrong class.
SymmetryResult symmetry_classify(const BipartiteGraph& g, const std::vector<int>& u_prime,
                                 const std::vector<int>& w_prime, const Rat& eps);

struct RemovalPart {
  std::vector<int> vertices;
  Rat goodness{0};  // exact level w.r.t. the kept nodes
};

struct RemovalPartition {
  std::vector<int> removed_nodes;   // U'
  std::vector<int> kept_nodes;      // U \ U'
  std::vector<RemovalPart> parts;
  std::vector<int> w0;              // leftover leaves
  Rat u_removed_fraction{0};
  Rat w0_fraction{0};
  Rat achieved_mu{0};               // worst part goodness w.r.t. kept nodes
  bool mu_target_met = false;
  bool eps_target_met = false;
  bool ok = true;
  std::string error;
};

struct RemovalOptions {
  int max_stages = 256;
  uint64_t seed = 0;
  int dtree_samples = 400;
};

/// Staged removal construction: repeatedly pick a mu-splitting node, keep the
/// side with fewer (d-1)-trees, and recurse; per-part goodness against the
/// kept nodes plus the removed-node and leftover masses are verified exactly
/// and reported even when the targets miss.
RemovalPartition tree_removal_partition(const BipartiteGraph& g, const std::vector<int>& u,
                                        const std::vector<int>& w, int d, const Rat& mu,
                                        const Rat& eps, const RemovalOptions& opt = {});

struct SignatureCleanup {
  std::vector<int> u0;             // dropped nodes (small signature classes)
  std::vector<int> w0;             // leftover leaves from the input partition
  std::vector<std::vector<int>> signature_classes;  // kept classes
  std::vector<std::vector<char>> signatures;        // xi per class per part
  Rat max_vertex_defect{0};        // max |N_G(u) delta N_G'(u)| / |W*|
  double residual_d_trees = 0;     // in G', exact for d <= 2
  bool residual_exact = true;
  bool ok = true;
  std::string error;
  std::vector<int> failing_parts;  // precondition failures, by part index
  BipartiteGraph rebuilt;          // G' on the original vertex ids
};

/// Group kept nodes by their majority-side signature over the parts, drop
/// classes below the size threshold, rebuild the edge relation as complete or
/// empty blocks, and verify uniform closeness per vertex plus the residual
/// d-tree count of the rebuilt graph.
SignatureCleanup stable_removal_cleanup(const BipartiteGraph& g, const RemovalPartition& rp,
                                        int d, const Rat& delta,
                                        const Rat& min_class_fraction = Rat(0));

}  // namespace hr3
