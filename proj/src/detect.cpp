#include "hr3/detect.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "hr3/rng.hpp"

namespace hr3 {

std::string search_status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::FOUND: return "FOUND";
    case SearchStatus::ABSENT_CERTIFIED: return "ABSENT_CERTIFIED";
    case SearchStatus::INCONCLUSIVE: return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

// Backtracking engine for induced embeddings into Trip(host): pattern slots
// carry a role (copy of V), images are injective per role, and candidate
// sets are filtered forward whenever a triple gains its second assignment.
struct TripSearch {
  const ThreeGraph& host;
  std::vector<int> prole;
  std::vector<std::array<int, 3>> triples;
  std::vector<char> tedge;
  std::vector<std::vector<int>> triples_at;  // slot -> triples containing it
  std::vector<int> order;
  long long budget = LLONG_MAX;
  long long explored = 0;
  bool exhausted = true;
  std::vector<int> assign;
  std::vector<Bitset> cand;
  std::map<std::pair<int, int>, Bitset> nb_cache;

  explicit TripSearch(const ThreeGraph& h) : host(h) {}

  const Bitset& pair_nb(int u, int v) {
    auto key = std::minmax(u, v);
    auto it = nb_cache.find(key);
    if (it != nb_cache.end()) return it->second;
    return nb_cache.emplace(key, host.pair_neighborhood(key.first, key.second)).first->second;
  }

  // After `slot` takes value v, shrink candidates of unassigned slots: other
  // slots in the same role lose v, and slots completing a now-ready triple
  // keep only values matching the edge constraint.
  bool propagate(int slot, int v, std::vector<std::pair<int, Bitset>>& trail) {
    for (size_t f = 0; f < prole.size(); ++f) {
      if (assign[f] >= 0 || int(f) == slot) continue;
      if (prole[f] == prole[slot] && cand[f].test(v)) {
        trail.emplace_back(int(f), cand[f]);
        cand[f].reset(v);
        if (cand[f].none()) return false;
      }
    }
    for (int t : triples_at[slot]) {
      const auto& tr = triples[t];
      int free_slot = -1, o0 = -1, o1 = -1;
      for (int s : tr) {
        if (assign[s] < 0) {
          if (free_slot >= 0) { free_slot = -2; break; }
          free_slot = s;
        } else {
          (o0 < 0 ? o0 : o1) = assign[s];
        }
      }
      if (free_slot < 0) continue;  // fully assigned or not yet ready
      // pair_neighborhood excludes o0,o1, so the edge case bars coincident
      // images; the non-edge complement keeps them (degenerate = non-edge)
      Bitset allowed = pair_nb(o0, o1);
      if (!tedge[t]) allowed = allowed.complement();
      Bitset next = cand[free_slot] & allowed;
      if (next == cand[free_slot]) continue;
      trail.emplace_back(free_slot, cand[free_slot]);
      cand[free_slot] = std::move(next);
      if (cand[free_slot].none()) return false;
    }
    return true;
  }

  bool dfs(size_t depth) {
    if (depth == order.size()) return true;
    int slot = order[depth];
    for (int v = cand[slot].first(); v >= 0; v = cand[slot].next(v)) {
      if (++explored > budget) { exhausted = false; return false; }
      assign[slot] = v;
      std::vector<std::pair<int, Bitset>> trail;
      if (propagate(slot, v, trail) && dfs(depth + 1)) return true;
      for (auto it = trail.rbegin(); it != trail.rend(); ++it) cand[it->first] = it->second;
      assign[slot] = -1;
      if (!exhausted) return false;
    }
    return false;
  }
};

}  // namespace

PatternWitness find_pattern(const ThreeGraph& host, const ThreeGraph& pattern,
                            const std::string& name, const FindOptions& opt) {
  if (!pattern.partition() || pattern.partition()->size() != 3)
    throw std::invalid_argument("find_pattern: pattern must carry a 3-partition");
  const auto& pparts = *pattern.partition();
  PatternWitness w;
  w.pattern = name;
  for (int r = 0; r < 3; ++r)
    if (int(pparts[r].size()) > host.n()) {
      w.status = SearchStatus::ABSENT_CERTIFIED;  // one role copy cannot hold the part
      return w;
    }

  TripSearch s(host);
  s.budget = opt.budget;
  std::vector<int> slot_of(pattern.n(), -1);
  int slot = 0;
  for (int r = 0; r < 3; ++r)
    for (int v : pparts[r]) {
      slot_of[v] = slot++;
      s.prole.push_back(r);
      Bitset all(host.n());
      for (int x = 0; x < host.n(); ++x) all.set(x);
      s.cand.push_back(std::move(all));
    }
  size_t total = s.prole.size();
  s.triples_at.assign(total, {});
  for (int x : pparts[0])
    for (int y : pparts[1])
      for (int z : pparts[2]) {
        int t = int(s.triples.size());
        s.triples.push_back({slot_of[x], slot_of[y], slot_of[z]});
        s.tedge.push_back(pattern.has_edge(x, y, z) ? 1 : 0);
        s.triples_at[slot_of[x]].push_back(t);
        s.triples_at[slot_of[y]].push_back(t);
        s.triples_at[slot_of[z]].push_back(t);
      }
  // descending constraint degree (product of the other two part sizes);
  // ties resolve by part then index, so the search is deterministic
  s.order.resize(total);
  for (size_t i = 0; i < total; ++i) s.order[i] = int(i);
  std::array<long long, 3> cdeg = {(long long)pparts[1].size() * pparts[2].size(),
                                   (long long)pparts[0].size() * pparts[2].size(),
                                   (long long)pparts[0].size() * pparts[1].size()};
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](int a, int b) { return cdeg[s.prole[a]] > cdeg[s.prole[b]]; });
  s.assign.assign(total, -1);

  bool found = s.dfs(0);
  w.nodes_explored = s.explored;
  if (found) {
    for (size_t t = 0; t < s.triples.size(); ++t) {
      int u = s.assign[s.triples[t][0]], v = s.assign[s.triples[t][1]],
          x = s.assign[s.triples[t][2]];
      bool e = u != v && u != x && v != x && host.has_edge(u, v, x);
      if (e != bool(s.tedge[t]))
        throw std::logic_error("find_pattern: witness failed re-verification");
    }
    w.embedding.resize(total);
    for (size_t i = 0; i < total; ++i) w.embedding[i] = {s.prole[i], s.assign[i]};
    w.status = SearchStatus::FOUND;
  } else {
    w.status = s.exhausted ? SearchStatus::ABSENT_CERTIFIED : SearchStatus::INCONCLUSIVE;
  }
  return w;
}

PatternWitness find_bipartite_pattern(const BipartiteGraph& host, const BipartiteGraph& pattern,
                                      const std::string& name, const FindOptions& opt) {
  PatternWitness w;
  w.pattern = name;
  long long explored = 0;
  bool exhausted = true;

  auto try_orientation = [&](bool flip) -> bool {
    int pl = flip ? pattern.right_size() : pattern.left_size();
    int pr = flip ? pattern.left_size() : pattern.right_size();
    auto pedge = [&](int a, int b) {
      return flip ? pattern.has_edge(b, a) : pattern.has_edge(a, b);
    };
    if (pl > host.left_size() || pr > host.right_size()) return false;
    std::vector<int> la(pl, -1), ra(pr, -1);
    Bitset all_l(host.left_size()), all_r(host.right_size());
    for (int x = 0; x < host.left_size(); ++x) all_l.set(x);
    for (int x = 0; x < host.right_size(); ++x) all_r.set(x);
    std::vector<Bitset> lcand(pl, all_l), rcand(pr, all_r);

    std::function<bool(int)> dfs = [&](int depth) -> bool {
      if (depth == pl + pr) return true;
      bool left = depth < pl;
      int idx = left ? depth : depth - pl;
      Bitset& mycand = left ? lcand[idx] : rcand[idx];
      for (int v = mycand.first(); v >= 0; v = mycand.next(v)) {
        if (++explored > opt.budget) { exhausted = false; return false; }
        (left ? la[idx] : ra[idx]) = v;
        // forward-check: co-side injectivity and cross-side edge constraints
        std::vector<std::pair<std::pair<bool, int>, Bitset>> trail;
        bool ok = true;
        auto shrink = [&](bool tleft, int tidx, const Bitset& allowed) {
          Bitset& c = tleft ? lcand[tidx] : rcand[tidx];
          Bitset next = c & allowed;
          if (next == c) return true;
          trail.push_back({{tleft, tidx}, c});
          c = std::move(next);
          return c.any();
        };
        if (left) {
          for (int j = idx + 1; j < pl && ok; ++j) {
            Bitset allowed = all_l;
            allowed.reset(v);
            ok = shrink(true, j, allowed);
          }
          for (int b = 0; b < pr && ok; ++b) {
            if (ra[b] >= 0) continue;
            Bitset allowed = pedge(idx, b) ? host.row(v) : host.row(v).complement();
            ok = shrink(false, b, allowed);
          }
        } else {
          for (int j = idx + 1; j < pr && ok; ++j) {
            Bitset allowed = all_r;
            allowed.reset(v);
            ok = shrink(false, j, allowed);
          }
        }
        if (ok && dfs(depth + 1)) return true;
        for (auto it = trail.rbegin(); it != trail.rend(); ++it)
          (it->first.first ? lcand[it->first.second] : rcand[it->first.second]) = it->second;
        (left ? la[idx] : ra[idx]) = -1;
        if (!exhausted) return false;
      }
      return false;
    };
    if (!dfs(0)) return false;
    w.embedding.clear();
    for (int a = 0; a < pl; ++a) w.embedding.push_back({flip ? 1 : 0, la[a]});
    for (int b = 0; b < pr; ++b) w.embedding.push_back({flip ? 0 : 1, ra[b]});
    for (int a = 0; a < pl; ++a)
      for (int b = 0; b < pr; ++b)
        if (host.has_edge(la[a], ra[b]) != pedge(a, b))
          throw std::logic_error("find_bipartite_pattern: witness failed re-verification");
    return true;
  };

  if (try_orientation(false) || try_orientation(true)) {
    w.status = SearchStatus::FOUND;
  } else {
    w.status = exhausted ? SearchStatus::ABSENT_CERTIFIED : SearchStatus::INCONCLUSIVE;
  }
  w.nodes_explored = explored;
  return w;
}

PatternWitness find_pattern(const ThreeGraph& host, const FamilySpec& pattern,
                            const FindOptions& opt) {
  BuiltGraph built = build_canonical(pattern);
  std::string name = family_name(pattern.family);
  if (auto* tg = std::get_if<ThreeGraph>(&built)) return find_pattern(host, *tg, name, opt);
  throw std::invalid_argument("find_pattern: bipartite families need a bipartite host");
}

VcResult vc_dimension(const SetSystem& system, int cap, long long budget) {
  VcResult res;
  int n = system.ground_size;
  cap = std::min(cap, n);
  long long used = 0;
  std::vector<std::vector<int>> shattered = {{}};
  for (int k = 1; k <= cap; ++k) {
    std::set<std::vector<int>> candidates;
    for (const auto& base : shattered) {
      int start = base.empty() ? 0 : base.back() + 1;
      for (int x = start; x < n; ++x) {
        if ((long long)candidates.size() >= budget) break;
        std::vector<int> c = base;
        c.push_back(x);
        candidates.insert(std::move(c));
      }
    }
    std::vector<std::vector<int>> next;
    for (const auto& c : candidates) {
      if (++used > budget) {
        res.certified = false;
        return res;
      }
      std::vector<char> seen(size_t(1) << k, 0);
      int distinct = 0;
      for (const Bitset& s : system.sets) {
        int trace = 0;
        for (int i = 0; i < k; ++i)
          if (s.test(c[i])) trace |= 1 << i;
        if (!seen[trace]) {
          seen[trace] = 1;
          if (++distinct == (1 << k)) break;
        }
      }
      if (distinct == (1 << k)) next.push_back(c);
    }
    if (next.empty()) {
      res.certified = true;
      return res;
    }
    res.dimension = k;
    res.shattered = next.front();
    shattered = std::move(next);
  }
  // cap reached with shattered sets remaining; exact only if the whole
  // ground was shattered
  res.certified = res.dimension >= n;
  return res;
}

SetSystem vc_system_vertex_ground(const ThreeGraph& h) {
  SetSystem s;
  s.ground_size = h.n();
  for (int u = 0; u < h.n(); ++u)
    for (int v = u + 1; v < h.n(); ++v) s.sets.push_back(h.pair_neighborhood(u, v));
  return s;
}

SetSystem vc_system_pair_ground(const ThreeGraph& h) {
  SetSystem s;
  int n = h.n();
  s.ground_size = n * (n - 1) / 2;
  for (int a = 0; a < n; ++a) {
    Bitset nb(s.ground_size);
    for (const Triple& e : h.edges()) {
      if (e[0] == a) nb.set(pair_rank(n, e[1], e[2]));
      else if (e[1] == a) nb.set(pair_rank(n, e[0], e[2]));
      else if (e[2] == a) nb.set(pair_rank(n, e[0], e[1]));
    }
    s.sets.push_back(std::move(nb));
  }
  return s;
}

WvcResult wvc_dimension(const ThreeGraph& h, int cap) {
  WvcResult res;
  for (int a = 0; a < h.n(); ++a) {
    SetSystem sys;
    sys.ground_size = h.n();
    for (int b = 0; b < h.n(); ++b) {
      Bitset nb(h.n());
      if (b != a)
        for (int c = 0; c < h.n(); ++c)
          if (c != a && c != b && h.has_edge(a, b, c)) nb.set(c);
      sys.sets.push_back(std::move(nb));
    }
    VcResult vc = vc_dimension(sys, cap);
    if (vc.dimension > res.dimension) {
      res.dimension = vc.dimension;
      res.witness_vertex = a;
      res.certified = vc.certified;
    } else if (vc.dimension == res.dimension && !vc.certified) {
      res.certified = false;
    }
  }
  return res;
}

bool verify_tree_witness(const BipartiteGraph& g, const TreeWitness& w) {
  int d = w.depth;
  if (int(w.leaves.size()) != (1 << d) || int(w.nodes.size()) != (1 << d) - 1) return false;
  // node sigma at (level l, index i) sits at array position 2^l - 1 + i;
  // leaf eta lies below sigma iff eta >> (d-l) == i, and sigma^1 <= eta iff
  // the next branch bit of eta is 1
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < (1 << l); ++i) {
      int node = w.nodes[(1 << l) - 1 + i];
      if (node < 0) return false;
      for (int eta = 0; eta < (1 << d); ++eta) {
        if (eta >> (d - l) != i) continue;
        bool branch1 = (eta >> (d - l - 1)) & 1;
        int leaf = w.leaves[eta];
        if (leaf < 0) return false;
        if (g.has_edge(node, leaf) != branch1) return false;
      }
    }
  return true;
}

namespace {

struct RankCtx {
  const BipartiteGraph* g;
  int depth_cap;
  size_t memo_cap;
  std::map<std::vector<uint64_t>, int> memo;

  int rank(const Bitset& s) {
    if (s.count() <= 1) return 0;
    auto key = s.words();
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int best = 0;
    for (int u = 0; u < g->left_size() && best < depth_cap; ++u) {
      Bitset on = g->row(u) & s;
      if (!on.any()) continue;
      Bitset off = s.andnot(g->row(u));
      if (!off.any()) continue;
      int r1 = rank(on);
      if (r1 < best) continue;  // min cannot exceed best
      int r2 = rank(off);
      int r = 1 + std::min(r1, r2);
      if (r > best) best = r;
    }
    best = std::min(best, depth_cap);
    if (memo.size() < memo_cap) memo[key] = best;
    return best;
  }
};

}  // namespace

TreeRankResult tree_rank(const BipartiteGraph& g, const std::vector<int>& leaf_subset,
                         int depth_cap, size_t memo_cap) {
  RankCtx ctx{&g, depth_cap, memo_cap, {}};
  Bitset s = bitset_of(g.right_size(), leaf_subset);
  int r = ctx.rank(s);
  TreeRankResult res;
  res.rank = r;
  res.capped = r >= depth_cap && depth_cap > 0;
  if (r > 0) {
    TreeWitness w;
    w.depth = r;
    w.nodes.assign((1 << r) - 1, -1);
    w.leaves.assign(size_t(1) << r, -1);
    std::function<void(const Bitset&, int, int, int)> build = [&](const Bitset& set, int d,
                                                                  int level, int index) {
      if (d == 0) {
        w.leaves[index] = set.first();
        return;
      }
      int chosen = -1;
      for (int cand = 0; cand < g.left_size(); ++cand) {
        Bitset on = g.row(cand) & set;
        if (!on.any()) continue;
        Bitset off = set.andnot(g.row(cand));
        if (!off.any()) continue;
        if (ctx.rank(on) >= d - 1 && ctx.rank(off) >= d - 1) {
          chosen = cand;
          break;
        }
      }
      if (chosen < 0) throw std::logic_error("tree_rank: witness reconstruction failed");
      w.nodes[(1 << level) - 1 + index] = chosen;
      Bitset on = g.row(chosen) & set;
      Bitset off = set.andnot(g.row(chosen));
      build(off, d - 1, level + 1, index * 2);      // sigma^0: non-neighbors
      build(on, d - 1, level + 1, index * 2 + 1);   // sigma^1: neighbors
    };
    build(s, r, 0, 0);
    if (!verify_tree_witness(g, w)) throw std::logic_error("tree_rank: witness re-check failed");
    res.witness = std::move(w);
  }
  return res;
}

namespace {

long long dtree_count_1(const BipartiteGraph& g, const std::vector<int>& nodes,
                        const Bitset& leaves) {
  long long total = 0;
  long long nb = leaves.count();
  for (int u : nodes) {
    long long on = g.row(u).and_count(leaves);
    total += on * (nb - on);
  }
  return total;
}

long long dtree_count_2(const BipartiteGraph& g, const std::vector<int>& nodes,
                        const Bitset& leaves) {
  long long total = 0;
  for (int u : nodes) {
    Bitset on = g.row(u) & leaves;
    Bitset off = leaves.andnot(g.row(u));
    total += dtree_count_1(g, nodes, off) * dtree_count_1(g, nodes, on);
  }
  return total;
}

double dtree_estimate(const BipartiteGraph& g, const std::vector<int>& nodes,
                      const Bitset& leaves, int d, Rng& rng) {
  if (d == 1) return double(dtree_count_1(g, nodes, leaves));
  if (d == 2) return double(dtree_count_2(g, nodes, leaves));
  if (nodes.empty()) return 0;
  int u = nodes[rng.below(nodes.size())];
  Bitset on = g.row(u) & leaves;
  Bitset off = leaves.andnot(g.row(u));
  if (!on.any() || !off.any()) return 0;
  return double(nodes.size()) * dtree_estimate(g, nodes, off, d - 1, rng) *
         dtree_estimate(g, nodes, on, d - 1, rng);
}

}  // namespace

DTreeCount count_d_trees(const BipartiteGraph& g, const std::vector<int>& node_side,
                         const std::vector<int>& leaf_side, int d, uint64_t seed, int samples) {
  if (d < 1) throw std::invalid_argument("count_d_trees: d >= 1 required");
  DTreeCount res;
  Bitset leaves = bitset_of(g.right_size(), leaf_side);
  if (d == 1) {
    res.value = double(dtree_count_1(g, node_side, leaves));
    return res;
  }
  if (d == 2) {
    res.value = double(dtree_count_2(g, node_side, leaves));
    return res;
  }
  res.exact = false;
  Rng rng = Rng::substream(seed, "count_d_trees");
  int reps = std::max(8, samples);
  double sum = 0, sumsq = 0;
  for (int rep = 0; rep < reps; ++rep) {
    double x = dtree_estimate(g, node_side, leaves, d, rng);
    sum += x;
    sumsq += x * x;
  }
  double mean = sum / reps;
  double var = std::max(0.0, sumsq / reps - mean * mean);
  res.value = mean;
  res.std_error = std::sqrt(var / reps);
  return res;
}

namespace {

// Grow k while instantiate(k) stays FOUND; the certainty of the returned
// entry describes the level above the value (ABSENT_CERTIFIED: maximum is
// exact; FOUND: cap reached, value is a witnessed lower bound).
template <typename SearchFn>
DimensionEntry ladder(int cap, SearchFn&& search) {
  DimensionEntry e;
  e.value = 0;
  e.certainty = SearchStatus::FOUND;
  for (int k = 1; k <= cap; ++k) {
    SearchStatus s = search(k);
    if (s == SearchStatus::FOUND) {
      e.value = k;
      e.certainty = SearchStatus::FOUND;
    } else {
      e.certainty = s;
      return e;
    }
  }
  return e;
}

}  // namespace

DimensionReport dimension_report(const ThreeGraph& h, const DimensionCaps& caps) {
  DimensionReport rep;
  FindOptions fo{caps.budget};

  {
    VcResult r1 = vc_dimension(vc_system_vertex_ground(h), caps.vc_cap);
    VcResult r2 = vc_dimension(vc_system_pair_ground(h), caps.vc_cap);
    rep.vc.value = std::max(r1.dimension, r2.dimension);
    bool cert = (r1.dimension < rep.vc.value || r1.certified) &&
                (r2.dimension < rep.vc.value || r2.certified);
    rep.vc.certainty = cert ? SearchStatus::ABSENT_CERTIFIED : SearchStatus::FOUND;
  }
  {
    WvcResult wv = wvc_dimension(h, caps.wvc_cap);
    rep.wvc.value = wv.dimension;
    rep.wvc.certainty = wv.certified ? SearchStatus::ABSENT_CERTIFIED : SearchStatus::FOUND;
  }

  rep.vc2_lower = ladder(caps.vc2_cap, [&](int k) {
    ThreeGraph pat = build_three({.family = Family::V, .k = k});
    return find_pattern(h, pat, "V", fo).status;
  });
  rep.weak_stability = ladder(caps.weak_stability_cap, [&](int k) {
    ThreeGraph pat = build_three({.family = Family::HSTAR, .k = k});
    return find_pattern(h, pat, "HSTAR", fo).status;
  });
  rep.fop2 = ladder(caps.fop_cap, [&](int k) {
    ThreeGraph pat = build_three({.family = Family::F, .ell = k});
    return find_pattern(h, pat, "F", fo).status;
  });
  rep.hop2 = ladder(caps.hop_cap, [&](int k) {
    ThreeGraph pat = build_three({.family = Family::HP, .k = k});
    return find_pattern(h, pat, "HP", fo).status;
  });
  {
    BipartiteGraph bip_graph_h = bip(SimpleGraph::from_bipartite(graph_of(h)));
    rep.order_property = ladder(caps.order_cap, [&](int k) {
      BipartiteGraph pat = build_bipartite({.family = Family::HALF_GRAPH, .k = k});
      return find_bipartite_pattern(bip_graph_h, pat, "H", fo).status;
    });
  }
  return rep;
}

}  // namespace hr3
