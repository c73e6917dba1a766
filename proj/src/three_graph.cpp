#include "hr3/three_graph.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace hr3 {

int Bitset::count() const {
  int c = 0;
  for (uint64_t w : w_) c += std::popcount(w);
  return c;
}

Bitset& Bitset::operator&=(const Bitset& o) {
  for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
  return *this;
}

Bitset& Bitset::operator|=(const Bitset& o) {
  for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
  return *this;
}

Bitset Bitset::andnot(const Bitset& o) const {
  Bitset r = *this;
  for (size_t i = 0; i < w_.size(); ++i) r.w_[i] &= ~o.w_[i];
  return r;
}

Bitset Bitset::complement() const {
  Bitset r(n_);
  for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = ~w_[i];
  if (n_ & 63) r.w_.back() &= (1ULL << (n_ & 63)) - 1;
  return r;
}

int Bitset::and_count(const Bitset& o) const {
  int c = 0;
  for (size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
  return c;
}

bool Bitset::any() const {
  for (uint64_t w : w_)
    if (w) return true;
  return false;
}

int Bitset::first() const { return next(-1); }

int Bitset::next(int after) const {
  int start = after + 1;
  if (start >= n_) return -1;
  size_t wi = start >> 6;
  uint64_t w = w_[wi] & ~((1ULL << (start & 63)) - 1);
  while (true) {
    if (w) return int(wi * 64 + std::countr_zero(w));
    if (++wi >= w_.size()) return -1;
    w = w_[wi];
  }
}

std::vector<int> Bitset::to_vector() const {
  std::vector<int> v;
  for (int i = first(); i >= 0; i = next(i)) v.push_back(i);
  return v;
}

Bitset bitset_of(int n, const std::vector<int>& idx) {
  Bitset b(n);
  for (int i : idx) b.set(i);
  return b;
}

BipartiteGraph::BipartiteGraph(int left, int right)
    : m_(left), n_(right), adj_(left, Bitset(right)), radj_(right, Bitset(left)) {
  if (left < 0 || right < 0) throw std::invalid_argument("negative side size");
}

void BipartiteGraph::add_edge(int u, int v) {
  if (u < 0 || u >= m_ || v < 0 || v >= n_) throw std::out_of_range("bipartite edge index");
  if (adj_[u].test(v)) return;
  adj_[u].set(v);
  radj_[v].set(u);
  ++edges_;
}

void BipartiteGraph::remove_edge(int u, int v) {
  if (!adj_[u].test(v)) return;
  adj_[u].reset(v);
  radj_[v].reset(u);
  --edges_;
}

std::vector<std::pair<int, int>> BipartiteGraph::edges_sorted() const {
  std::vector<std::pair<int, int>> es;
  es.reserve(edges_);
  for (int u = 0; u < m_; ++u)
    for (int v = adj_[u].first(); v >= 0; v = adj_[u].next(v)) es.emplace_back(u, v);
  return es;
}

BipartiteGraph& TripartiteGraph::pair(int a, int b) {
  if (a > b) std::swap(a, b);
  if (a == 0 && b == 1) return g12_;
  if (a == 0 && b == 2) return g13_;
  if (a == 1 && b == 2) return g23_;
  throw std::invalid_argument("tripartite pair index");
}

const BipartiteGraph& TripartiteGraph::pair(int a, int b) const {
  return const_cast<TripartiteGraph*>(this)->pair(a, b);
}

TripartiteGraph TripartiteGraph::complete(int n1, int n2, int n3) {
  TripartiteGraph g(n1, n2, n3);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b) g.g12_.add_edge(a, b);
  for (int a = 0; a < n1; ++a)
    for (int c = 0; c < n3; ++c) g.g13_.add_edge(a, c);
  for (int b = 0; b < n2; ++b)
    for (int c = 0; c < n3; ++c) g.g23_.add_edge(b, c);
  return g;
}

std::vector<Triple> TripartiteGraph::triangle_triples() const {
  std::vector<Triple> out;
  int n1 = size(0), n2 = size(1);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b) {
      if (!g12_.has_edge(a, b)) continue;
      Bitset common = g13_.row(a) & g23_.row(b);
      for (int c = common.first(); c >= 0; c = common.next(c)) out.push_back({a, b, c});
    }
  return out;
}

long long TripartiteGraph::triangle_count() const {
  long long total = 0;
  int n1 = size(0), n2 = size(1);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b) {
      if (!g12_.has_edge(a, b)) continue;
      total += g13_.row(a).and_count(g23_.row(b));
    }
  return total;
}

void ThreeGraph::add_edge(int a, int b, int c) {
  if (a == b || a == c || b == c) throw std::invalid_argument("degenerate triple");
  if (a < 0 || b < 0 || c < 0 || a >= n_ || b >= n_ || c >= n_)
    throw std::out_of_range("triple index out of range");
  Triple t{a, b, c};
  std::sort(t.begin(), t.end());
  uint64_t k = key(t[0], t[1], t[2]);
  if (keys_.count(k)) return;
  keys_.insert(k);
  edges_.push_back(t);
}

bool ThreeGraph::has_edge(int a, int b, int c) const {
  if (a == b || a == c || b == c) return false;
  Triple t{a, b, c};
  std::sort(t.begin(), t.end());
  return keys_.count(key(t[0], t[1], t[2])) > 0;
}

void ThreeGraph::set_partition(std::vector<std::vector<int>> parts) {
  parts_ = std::move(parts);
  validate();
}

Bitset ThreeGraph::pair_neighborhood(int u, int v) const {
  Bitset b(n_);
  for (int w = 0; w < n_; ++w)
    if (w != u && w != v && has_edge(u, v, w)) b.set(w);
  return b;
}

ThreeGraph ThreeGraph::induce(const std::vector<int>& s) const {
  std::vector<int> remap(n_, -1);
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= n_) throw std::out_of_range("induce: vertex out of range");
    remap[s[i]] = int(i);
  }
  ThreeGraph h(int(s.size()));
  for (const Triple& e : edges_) {
    int a = remap[e[0]], b = remap[e[1]], c = remap[e[2]];
    if (a >= 0 && b >= 0 && c >= 0) h.add_edge(a, b, c);
  }
  if (parts_) {
    std::vector<std::vector<int>> np(parts_->size());
    for (size_t p = 0; p < parts_->size(); ++p)
      for (int v : (*parts_)[p])
        if (remap[v] >= 0) np[p].push_back(remap[v]);
    h.parts_ = std::move(np);
  }
  return h;
}

void ThreeGraph::validate() const {
  for (const Triple& e : edges_) {
    if (!(0 <= e[0] && e[0] < e[1] && e[1] < e[2] && e[2] < n_))
      throw std::invalid_argument("triple not sorted or out of range");
  }
  if (parts_) {
    std::vector<int> cls(n_, -1);
    for (size_t p = 0; p < parts_->size(); ++p)
      for (int v : (*parts_)[p]) {
        if (v < 0 || v >= n_) throw std::invalid_argument("partition vertex out of range");
        if (cls[v] != -1) throw std::invalid_argument("partition classes overlap");
        cls[v] = int(p);
      }
    for (const Triple& e : edges_) {
      int pa = cls[e[0]], pb = cls[e[1]], pc = cls[e[2]];
      if ((pa != -1 && pa == pb) || (pa != -1 && pa == pc) || (pb != -1 && pb == pc))
        throw std::invalid_argument("edge meets a declared part twice");
    }
  }
}

std::vector<std::vector<int>> VertexPartition::classes() const {
  std::vector<std::vector<int>> cs(t);
  for (size_t v = 0; v < cls.size(); ++v) cs[cls[v]].push_back(int(v));
  return cs;
}

bool VertexPartition::is_equipartition() const {
  std::vector<int> sizes(t, 0);
  for (int c : cls) ++sizes[c];
  auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
  return *mx - *mn <= 1;
}

VertexPartition VertexPartition::from_classes(int n, const std::vector<std::vector<int>>& classes) {
  VertexPartition p;
  p.t = int(classes.size());
  p.cls.assign(n, -1);
  for (int c = 0; c < p.t; ++c)
    for (int v : classes[c]) {
      if (v < 0 || v >= n || p.cls[v] != -1) throw std::invalid_argument("bad partition classes");
      p.cls[v] = c;
    }
  for (int v = 0; v < n; ++v)
    if (p.cls[v] == -1) throw std::invalid_argument("partition does not cover all vertices");
  return p;
}

int pair_rank(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_unrank(int n, int r) {
  for (int i = 0; i < n; ++i) {
    int row = n - i - 1;
    if (r < row) return {i, i + 1 + r};
    r -= row;
  }
  throw std::out_of_range("pair_unrank");
}

BipartiteGraph graph_of(const ThreeGraph& h) {
  int n = h.n();
  BipartiteGraph g(n, n * (n - 1) / 2);
  for (const Triple& e : h.edges()) {
    g.add_edge(e[0], pair_rank(n, e[1], e[2]));
    g.add_edge(e[1], pair_rank(n, e[0], e[2]));
    g.add_edge(e[2], pair_rank(n, e[0], e[1]));
  }
  return g;
}

ThreeGraph trip(const ThreeGraph& h) {
  int n = h.n();
  ThreeGraph t(3 * n);
  for (const Triple& e : h.edges()) {
    int p[3] = {e[0], e[1], e[2]};
    std::sort(p, p + 3);
    do {
      t.add_edge(p[0], n + p[1], 2 * n + p[2]);
    } while (std::next_permutation(p, p + 3));
  }
  std::vector<std::vector<int>> parts(3);
  for (int i = 0; i < n; ++i) {
    parts[0].push_back(i);
    parts[1].push_back(n + i);
    parts[2].push_back(2 * n + i);
  }
  t.set_partition(parts);
  return t;
}

void SimpleGraph::add_edge(int u, int v) {
  if (u == v) throw std::invalid_argument("self loop");
  if (u < 0 || v < 0 || u >= n_ || v >= n_) throw std::out_of_range("graph edge index");
  adj_[u].set(v);
  adj_[v].set(u);
}

SimpleGraph SimpleGraph::from_bipartite(const BipartiteGraph& g) {
  SimpleGraph s(g.left_size() + g.right_size());
  for (auto [u, v] : g.edges_sorted()) s.add_edge(u, g.left_size() + v);
  return s;
}

BipartiteGraph bip(const SimpleGraph& g) {
  BipartiteGraph b(g.n(), g.n());
  for (int u = 0; u < g.n(); ++u)
    for (int v = g.neighbors(u).first(); v >= 0; v = g.neighbors(u).next(v)) b.add_edge(u, v);
  return b;
}

}  // namespace hr3
