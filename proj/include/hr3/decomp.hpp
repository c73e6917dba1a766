#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hr3/construct.hpp"
#include "hr3/detect.hpp"
#include "hr3/quasi.hpp"
#include "hr3/three_graph.hpp"

namespace hr3 {

/// A (t,l)-decomposition: vertex equipartition V_1..V_t plus, per unordered
/// class pair, a partition of the cross pairs into l labeled edge parts.
/// Pairs inside a class are not partitioned (the decomposition only covers
/// K2[V_i,V_j] for i != j).
class Decomposition {
 public:
  int t = 0, ell = 0;
  double eps1 = 0, eps2 = 0;  // declared parameters (thresholds are inputs)
  std::vector<std::vector<int>> classes;  // class -> sorted global vertex ids
  std::vector<int> cls;                   // vertex -> class
  std::vector<int> loc;                   // vertex -> index within its class
  // unordered pair (i<j) -> row-major label matrix |V_i| x |V_j|
  std::map<std::pair<int, int>, std::vector<int>> labels;

  int n() const { return int(cls.size()); }
  int label(int u, int v) const;                       // classes must differ
  void set_label(int u, int v, int alpha);
  void rebuild_index();                                // classes -> cls/loc
  void validate() const;                               // invariants
  bool is_equipartition() const;

  std::vector<std::pair<int, int>> part_edges(int i, int j, int alpha) const;
};

std::string write_decomposition_json(const Decomposition& d);
Decomposition parse_decomposition_json(const std::string& text);

enum class BuildStrategy { RANDOM, NATURAL, GIVEN };

/// random: uniform vertex equipartition + independent uniform edge slices.
/// natural: use the host's 3-partition as the coarse classes, refined to t.
Decomposition build_decomposition(const ThreeGraph& h, int t, int ell, BuildStrategy strategy,
                                  uint64_t seed);

enum class TriadClass { DISC2_IRREGULAR, DISC3_IRREGULAR, REGULAR };

std::string triad_class_name(TriadClass c);

struct TriadReport {
  int i = 0, j = 0, k = 0;
  int alpha = 0, beta = 0, gamma = 0;
  Rat pair_dev[3];       // disc2 deviation of P_ij^a, P_ik^b, P_jk^c at own density
  Rat pair_density[3];
  bool pair_dev_exact[3] = {true, true, true};
  long long triangles = 0;
  long long covered_edges = 0;
  Rat d3{0};
  Rat dev23{0};
  bool dev23_available = false;
  Rat disc23_lower{0};
  bool disc23_exact = false;
  TriadClass classification = TriadClass::REGULAR;
  bool homogeneous = false;  // d3 in [0,mu) u (1-mu,1]
};

struct ClassifyOptions {
  Rat eps1 = Rat::of(1, 10);
  Rat eps2 = Rat::of(1, 10);
  Rat mu = Rat::of(1, 10);
  long long disc23_budget = 4000;
  int disc2_cap = 22;
  int dev23_cap = 16;        // exact dev23 only when all parts <= cap
  uint64_t seed = 0;
};

/// Measure every triad (ijk, alpha, beta, gamma): per-pair disc2 (exact
/// within caps), exact d3 over triangles, dev23 when parts are small, and a
/// disc23 lower-bound witness search. DISC3_IRREGULAR requires disc2-regular
/// by definition.
std::vector<TriadReport> classify_triads(const ThreeGraph& h, const Decomposition& d,
                                         const ClassifyOptions& opt = {});

struct HomogeneityReport {
  long long homogeneous_triples = 0;  // cross-class triples in a homogeneous triad
  long long covered_triples = 0;      // cross-class triples lying on a triad triangle
  long long total_triples = 0;        // C(n,3)
  Rat fraction{0};                    // homogeneous / C(n,3)
};

/// Exact count of vertex triples lying in some triad with density in
/// [0,mu) u (1-mu,1], normalized by C(n,3). Only cross-class triples can be
/// covered (triples meeting a class twice are never in a triad).
HomogeneityReport homogeneity_report(const ThreeGraph& h, const Decomposition& d, const Rat& mu);

enum class ErrorKind { ZERO, BINARY, LINEAR, NONE_OF_THESE };

std::string error_kind_name(ErrorKind k);

struct ErrorShape {
  ErrorKind kind = ErrorKind::ZERO;
  std::vector<std::pair<int, int>> cover_pairs;        // Gamma, when BINARY
  std::vector<std::array<int, 3>> cover_triples;       // Sigma, when LINEAR
  bool cover_optimal = true;  // exact minimum cover (t <= 8), greedy otherwise
  long long binary_budget = 0, linear_budget = 0;
};

struct ErrorBudgets {
  Rat eps1 = Rat::of(1, 10);  // binary budget eps1*t^2, linear budget eps1*t^3
};

ErrorShape error_shape(const std::vector<TriadReport>& reports, int t,
                       const ErrorBudgets& budgets = {});

/// Corner: two edge parts sharing the apex class i, legs to classes j < k.
struct Corner {
  int apex = 0;
  int j = 0, alpha = 0;  // part P_{apex,j}^alpha
  int k = 0, beta = 0;   // part P_{apex,k}^beta
};

enum class ReducedState { E1, E0, UNDECIDED };

struct ReducedEncoding {
  Rat eps{0};
  std::vector<Corner> corners;  // only disc2-regular leg pairs
  // (corner index, gamma of the edge part on pair (j,k)) -> state + density
  std::map<std::pair<int, int>, std::pair<ReducedState, Rat>> entries;
  int ell = 0, t = 0;

  long long count(ReducedState s) const;
};

/// Corner set and E1/E0 relations per the triad density thresholds 1-eps and
/// eps; mid-density pairs stay UNDECIDED (first-class, not forced).
ReducedEncoding reduced_encoding(const ThreeGraph& h, const Decomposition& d, const Rat& eps,
                                 const ClassifyOptions& opt = {});

struct EncodingWitness {
  SearchStatus status = SearchStatus::INCONCLUSIVE;
  std::string pattern;        // "H" or "U"
  int k = 0;
  int j0 = -1, k0 = -1;           // the single pair carrying Im(f)
  std::vector<Corner> corner_for_a;  // resolved corner per a_u
  std::vector<int> gamma_for_b;      // edge part per b (H) or per subset S (U)
  long long nodes_explored = 0;
};

/// Search for an encoding of H(k) or U(k) through E1/E0: f maps into the
/// edge parts of a single pair, g into corners over that pair. FOUND
/// witnesses re-verify against the encoding relations.
EncodingWitness find_encoding(const ReducedEncoding& enc, const std::string& pattern, int k,
                              long long budget = 1'000'000);

struct FopExtraction {
  SearchStatus status = SearchStatus::INCONCLUSIVE;
  // F(k) realization: threshold role from the corner apex classes
  std::vector<int> threshold_vertices;  // z_m per m in [k]
  std::vector<int> a_vertices;          // a_i per i in [k]
  std::vector<std::pair<std::vector<int>, std::vector<int>>> b_for;  // table -> b's
  long long nodes_explored = 0;
};

/// Instance-level realization of k-FOP2 (induced F(k) in Trip(h)) inside the
/// blocks named by an H(k)-encoding witness; both side orientations of
/// (j0,k0) are tried and the result re-verifies edge by edge.
FopExtraction extract_fop2_witness(const ThreeGraph& h, const Decomposition& d,
                                   const EncodingWitness& ew, int k,
                                   long long budget = 2'000'000);

bool verify_fop_extraction(const ThreeGraph& h, const FopExtraction& fe, int k,
                           std::string* why = nullptr);

struct FixReport {
  int failing_before = 0;
  int failing_after = 0;
  std::vector<std::pair<std::pair<int, int>, int>> residual_failures;  // ((i,j), alpha)
};

/// Keep edge parts meeting the disc2 target, re-slice the union of failing
/// parts per pair, re-measure, and report residual failures.
Decomposition fix_disc2_irregular(const ThreeGraph& h, const Decomposition& d,
                                  const Rat& eps2_target, uint64_t seed, FixReport* report,
                                  int disc2_cap = 22);

struct RefinementDefect {
  int cls = -1;        // class of r lacking a host class in q (condition 1)
  int i = -1, j = -1;  // pair of a failing part (condition 2)
  int alpha = -1;
  std::string reason;
};

struct RefinementReport {
  // achieved values for Def. refinement conditions (1)-(3)
  Rat max_class_defect{0};        // max |V_i \ best W_j| / |V_i|
  Rat max_part_defect{0};         // max |P \ best Q| / |P| away from Sigma
  std::vector<std::pair<int, int>> sigma;  // exceptional class pairs
  Rat max_diff_disc2{0};          // max disc2 deviation of P \ Q difference sets
  std::vector<RefinementDefect> defects;
};

/// Intersect vertex classes, rebalance to an equipartition (lowest-index
/// surplus vertices move first), intersect edge labels; the report carries
/// the witness data making the approximate-refinement relation checkable.
Decomposition common_refinement(const Decomposition& p, const Decomposition& q,
                                RefinementReport* report, int disc2_cap = 22);

struct VerifyRefinementResult {
  bool pass = false;
  RefinementReport report;
};

/// Check Def. refinement conditions (1)-(3) of r against q exactly,
/// measuring disc2 of each difference set.
VerifyRefinementResult verify_approx_refinement(const Decomposition& r, const Decomposition& q,
                                                const Rat& eps1, const Rat& eps2,
                                                int disc2_cap = 22);

}  // namespace hr3
