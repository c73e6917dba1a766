#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace hr3 {

using Triple = std::array<int, 3>;  // always sorted i<j<k

/// Dynamic bitset sized at construction; the workhorse for neighborhood and
/// subset arithmetic throughout the library.
class Bitset {
 public:
  Bitset() : n_(0) {}
  explicit Bitset(int n) : n_(n), w_((n + 63) / 64, 0) {}
  int size() const { return n_; }
  void set(int i) { w_[i >> 6] |= 1ULL << (i & 63); }
  void reset(int i) { w_[i >> 6] &= ~(1ULL << (i & 63)); }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  int count() const;
  Bitset& operator&=(const Bitset& o);
  Bitset& operator|=(const Bitset& o);
  Bitset operator&(const Bitset& o) const { Bitset r = *this; r &= o; return r; }
  Bitset operator|(const Bitset& o) const { Bitset r = *this; r |= o; return r; }
  Bitset andnot(const Bitset& o) const;      // this & ~o, within [0,n)
  Bitset complement() const;                 // ~this, within [0,n)
  int and_count(const Bitset& o) const;
  bool any() const;
  bool none() const { return !any(); }
  int first() const;                         // -1 if empty
  int next(int after) const;                 // first set bit > after, -1 if none
  std::vector<int> to_vector() const;
  bool operator==(const Bitset& o) const { return n_ == o.n_ && w_ == o.w_; }
  const std::vector<uint64_t>& words() const { return w_; }

 private:
  int n_;
  std::vector<uint64_t> w_;
};

Bitset bitset_of(int n, const std::vector<int>& idx);

/// Bipartite graph with labeled sides; edges are (left,right) index pairs.
class BipartiteGraph {
 public:
  BipartiteGraph() : m_(0), n_(0) {}
  BipartiteGraph(int left, int right);

  int left_size() const { return m_; }
  int right_size() const { return n_; }
  long long edge_count() const { return edges_; }

  void add_edge(int u, int v);
  void remove_edge(int u, int v);
  bool has_edge(int u, int v) const { return adj_[u].test(v); }

  const Bitset& row(int u) const { return adj_[u]; }       // neighbors of left u
  const Bitset& col(int v) const { return radj_[v]; }      // neighbors of right v

  std::vector<std::pair<int, int>> edges_sorted() const;

 private:
  int m_, n_;
  long long edges_ = 0;
  std::vector<Bitset> adj_;   // per left vertex
  std::vector<Bitset> radj_;  // per right vertex
};

/// 3-partite graph: three part sizes and the three cross edge sets.
class TripartiteGraph {
 public:
  TripartiteGraph() {}
  TripartiteGraph(int n1, int n2, int n3)
      : g12_(n1, n2), g13_(n1, n3), g23_(n2, n3) {}

  int size(int part) const {
    return part == 0 ? g12_.left_size() : part == 1 ? g12_.right_size() : g13_.right_size();
  }
  BipartiteGraph& pair(int a, int b);              // a<b in {0,1,2}
  const BipartiteGraph& pair(int a, int b) const;

  static TripartiteGraph complete(int n1, int n2, int n3);

  /// All (a,b,c) with all three cross pairs present, a in part 0, etc.
  std::vector<Triple> triangle_triples() const;
  long long triangle_count() const;

 private:
  BipartiteGraph g12_, g13_, g23_;
};

/// 3-uniform hypergraph on [0,n); edges stored canonically sorted, membership
/// answered through a hashed set. An optional 3-partition marks 3-partite
/// structure (each edge meets each declared part at most once).
class ThreeGraph {
 public:
  ThreeGraph() : n_(0) {}
  explicit ThreeGraph(int n) : n_(n) {}

  int n() const { return n_; }
  long long edge_count() const { return (long long)edges_.size(); }
  const std::vector<Triple>& edges() const { return edges_; }

  void add_edge(int a, int b, int c);
  bool has_edge(int a, int b, int c) const;

  void set_partition(std::vector<std::vector<int>> parts);
  const std::optional<std::vector<std::vector<int>>>& partition() const { return parts_; }

  /// Bitset of w with {u,v,w} an edge.
  Bitset pair_neighborhood(int u, int v) const;

  ThreeGraph induce(const std::vector<int>& s) const;

  void validate() const;  // throws on malformed edges or partition

 private:
  int n_;
  std::vector<Triple> edges_;
  std::unordered_set<uint64_t> keys_;
  std::optional<std::vector<std::vector<int>>> parts_;

  static uint64_t key(int a, int b, int c) {
    return (uint64_t(a) << 42) | (uint64_t(b) << 21) | uint64_t(c);
  }
};

struct VertexPartition {
  std::vector<int> cls;  // class of each vertex
  int t = 0;

  std::vector<std::vector<int>> classes() const;
  bool is_equipartition() const;
  static VertexPartition from_classes(int n, const std::vector<std::vector<int>>& classes);
};

// --- derived graphs -------------------------------------------------------

/// Graph(H): left V, right all vertex pairs (lexicographic), a ~ {b,c} iff
/// {a,b,c} in E(H).
BipartiteGraph graph_of(const ThreeGraph& h);

/// Lexicographic rank of pair {i,j}, i<j, among pairs of [0,n).
int pair_rank(int n, int i, int j);
std::pair<int, int> pair_unrank(int n, int r);

/// Trip(H): three disjoint copies of V, edge x_u y_v z_w iff {u,v,w} in E(H).
ThreeGraph trip(const ThreeGraph& h);

/// Simple graph as symmetric adjacency; used for Bip() and Graph(H) handling.
class SimpleGraph {
 public:
  SimpleGraph() : n_(0) {}
  explicit SimpleGraph(int n) : n_(n), adj_(n, Bitset(n)) {}
  int n() const { return n_; }
  void add_edge(int u, int v);
  bool has_edge(int u, int v) const { return adj_[u].test(v); }
  const Bitset& neighbors(int u) const { return adj_[u]; }
  static SimpleGraph from_bipartite(const BipartiteGraph& g);  // on m+n vertices

 private:
  int n_;
  std::vector<Bitset> adj_;
};

/// Bip(G): two disjoint copies of V(G), (u_v, w_v') edge iff vv' in E(G).
BipartiteGraph bip(const SimpleGraph& g);

}  // namespace hr3
