#include "hr3/quasi.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <stdexcept>
#include <thread>

#include "hr3/rng.hpp"

namespace hr3 {

namespace {

// Greedy completion: given integer margins m_w (scaled by the density
// denominator), the optimal one-sided sums and the attaining sets.
struct Completion {
  int128 best;  // max(sum of positive margins, -(sum of negative margins))
  bool positive_branch;
};

Completion complete_free(const std::vector<long long>& margin) {
  int128 pos = 0, neg = 0;
  for (long long m : margin) {
    if (m > 0) pos += m;
    else neg += m;
  }
  if (pos >= -neg) return {pos, true};
  return {-neg, false};
}

// Completion under a minimum-size constraint: take the r largest (or
// smallest) margins when the unconstrained optimum is too small.
Completion complete_min_size(std::vector<long long> margin, int r) {
  std::sort(margin.begin(), margin.end());
  int n = int(margin.size());
  int128 pos = 0;
  int npos = 0;
  for (int i = n - 1; i >= 0 && margin[i] > 0; --i) { pos += margin[i]; ++npos; }
  int128 best_pos = pos;
  if (npos < r) {
    best_pos = 0;
    for (int i = n - 1; i >= n - r; --i) best_pos += margin[i];
  }
  int128 neg = 0;
  int nneg = 0;
  for (int i = 0; i < n && margin[i] < 0; ++i) { neg += margin[i]; ++nneg; }
  int128 best_neg = -neg;
  if (nneg < r) {
    best_neg = 0;
    for (int i = 0; i < r; ++i) best_neg -= margin[i];
  }
  if (best_pos >= best_neg) return {best_pos, true};
  return {best_neg, false};
}

}  // namespace

DeviationReport disc2_deviation(const BipartiteGraph& g, std::optional<Rat> d_opt,
                                const Disc2Options& opt) {
  int m = g.left_size(), n = g.right_size();
  DeviationReport rep;
  long long total = (long long)m * n;
  if (total == 0) return rep;
  Rat d = d_opt ? *d_opt : Rat(int128(g.edge_count()), int128(total));
  rep.density_used = d;
  long long p = (long long)d.num(), q = (long long)d.den();

  bool swap_sides = n < m;  // enumerate the smaller side
  int sa = swap_sides ? n : m;
  int sb = swap_sides ? m : n;
  auto deg_row = [&](int a) -> const Bitset& { return swap_sides ? g.col(a) : g.row(a); };

  int min_a = 0, min_b = 0;
  if (opt.eps_regular) {
    // |S| >= eps * side: smallest integer s with q_e*s >= p_e*side
    auto min_size = [&](int side) {
      int128 pe = opt.eps.num(), qe = opt.eps.den();
      int s = 0;
      while (int128(s) * qe < pe * side) ++s;
      return s;
    };
    min_a = min_size(sa);
    min_b = min_size(sb);
  }

  if (sa > opt.exact_cap) {
    // Sampling fallback: per-element coin flips plus greedy completion.
    Rng rng = Rng::substream(opt.seed, "disc2_sample");
    int128 best = -1;
    uint64_t best_mask_lo = 0;
    std::vector<char> best_in(sa, 0);
    std::vector<long long> margin(sb);
    std::vector<char> in(sa, 0);
    for (int it = 0; it < opt.samples; ++it) {
      int size_s = 0;
      for (int a = 0; a < sa; ++a) {
        in[a] = rng.chance(1, 2);
        if (in[a]) ++size_s;
      }
      std::vector<int> deg(sb, 0);
      for (int a = 0; a < sa; ++a)
        if (in[a]) {
          const Bitset& row = deg_row(a);
          for (int b = row.first(); b >= 0; b = row.next(b)) ++deg[b];
        }
      for (int b = 0; b < sb; ++b) margin[b] = q * deg[b] - p * size_s;
      Completion c = opt.eps_regular && min_b > 0 ? complete_min_size(margin, min_b)
                                                  : complete_free(margin);
      if (opt.eps_regular && size_s < min_a) continue;
      if (c.best > best) {
        best = c.best;
        best_in.assign(in.begin(), in.end());
        (void)best_mask_lo;
      }
    }
    if (best < 0) best = 0;
    rep.exact = false;
    rep.deviation = Rat(best, int128(q) * total);
    // Recover the completion side for the stored witness.
    std::vector<int> S;
    for (int a = 0; a < sa; ++a)
      if (best_in[a]) S.push_back(a);
    std::vector<int> deg(sb, 0);
    for (int a : S) {
      const Bitset& row = deg_row(a);
      for (int b = row.first(); b >= 0; b = row.next(b)) ++deg[b];
    }
    Completion c{0, true};
    {
      std::vector<long long> mg(sb);
      for (int b = 0; b < sb; ++b) mg[b] = q * deg[b] - p * (long long)S.size();
      c = complete_free(mg);
      std::vector<int> T;
      for (int b = 0; b < sb; ++b) {
        long long mb = mg[b];
        if ((c.positive_branch && mb > 0) || (!c.positive_branch && mb < 0)) T.push_back(b);
      }
      rep.witness_left = swap_sides ? T : S;
      rep.witness_right = swap_sides ? S : T;
    }
    return rep;
  }

  // Exhaustive: Gray-code over subsets of the smaller side, greedy other side.
  struct Best {
    int128 value = -1;
    uint64_t mask = 0;
    bool positive = true;
  };
  auto run_range = [&](uint64_t lo, uint64_t hi, Best& out) {
    std::vector<int> deg(sb, 0);
    uint64_t cur = lo ^ (lo >> 1);  // gray code of lo
    auto apply = [&](uint64_t mask, int sign) {
      while (mask) {
        int a = std::countr_zero(mask);
        mask &= mask - 1;
        const Bitset& row = deg_row(a);
        for (int b = row.first(); b >= 0; b = row.next(b)) deg[b] += sign;
      }
    };
    apply(cur, +1);
    for (uint64_t i = lo; i < hi; ++i) {
      uint64_t gray = i ^ (i >> 1);
      if (i != lo) {
        uint64_t prev = (i - 1) ^ ((i - 1) >> 1);
        int a = std::countr_zero(gray ^ prev);
        int sign = (gray >> a) & 1 ? +1 : -1;
        const Bitset& row = deg_row(a);
        for (int b = row.first(); b >= 0; b = row.next(b)) deg[b] += sign;
        cur = gray;
      }
      int size_s = std::popcount(cur);
      if (opt.eps_regular && size_s < min_a) continue;
      int128 pos = 0, neg = 0;
      long long ps = p * size_s;
      if (!opt.eps_regular) {
        for (int b = 0; b < sb; ++b) {
          long long mb = q * (long long)deg[b] - ps;
          if (mb > 0) pos += mb;
          else neg += mb;
        }
        int128 value = pos >= -neg ? pos : -neg;
        bool positive = pos >= -neg;
        if (value > out.value || (value == out.value && cur < out.mask)) {
          out.value = value;
          out.mask = cur;
          out.positive = positive;
        }
      } else {
        std::vector<long long> mg(sb);
        for (int b = 0; b < sb; ++b) mg[b] = q * (long long)deg[b] - ps;
        Completion c = complete_min_size(mg, min_b);
        if (c.best > out.value || (c.best == out.value && cur < out.mask)) {
          out.value = c.best;
          out.mask = cur;
          out.positive = c.positive_branch;
        }
      }
    }
  };

  uint64_t space = 1ULL << sa;
  int threads = std::max(1, opt.threads);
  Best best;
  if (threads == 1 || space < 4096) {
    run_range(0, space, best);
  } else {
    std::vector<Best> parts(threads);
    std::vector<std::thread> pool;
    uint64_t chunk = space / threads;
    for (int t = 0; t < threads; ++t) {
      uint64_t lo = t * chunk, hi = t == threads - 1 ? space : lo + chunk;
      pool.emplace_back([&, lo, hi, t] { run_range(lo, hi, parts[t]); });
    }
    for (auto& th : pool) th.join();
    for (const Best& b : parts)
      if (b.value > best.value || (b.value == best.value && b.mask < best.mask)) best = b;
  }

  if (best.value < 0) best.value = 0;
  rep.deviation = Rat(best.value, int128(q) * total);
  rep.exact = true;
  // Reconstruct the witness pair from the winning mask.
  std::vector<int> S;
  for (int a = 0; a < sa; ++a)
    if ((best.mask >> a) & 1) S.push_back(a);
  std::vector<int> deg(sb, 0);
  for (int a : S) {
    const Bitset& row = deg_row(a);
    for (int b = row.first(); b >= 0; b = row.next(b)) ++deg[b];
  }
  std::vector<long long> mg(sb);
  for (int b = 0; b < sb; ++b) mg[b] = q * (long long)deg[b] - p * (long long)S.size();
  std::vector<int> T;
  if (!opt.eps_regular) {
    for (int b = 0; b < sb; ++b)
      if ((best.positive && mg[b] > 0) || (!best.positive && mg[b] < 0)) T.push_back(b);
  } else {
    std::vector<std::pair<long long, int>> order(sb);
    for (int b = 0; b < sb; ++b) order[b] = {mg[b], b};
    std::sort(order.begin(), order.end());
    if (best.positive) {
      int take = 0;
      for (int i = sb - 1; i >= 0 && order[i].first > 0; --i) ++take;
      take = std::max(take, min_b);
      for (int i = sb - 1; i >= sb - take; --i) T.push_back(order[i].second);
    } else {
      int take = 0;
      for (int i = 0; i < sb && order[i].first < 0; ++i) ++take;
      take = std::max(take, min_b);
      for (int i = 0; i < take; ++i) T.push_back(order[i].second);
    }
    std::sort(T.begin(), T.end());
  }
  rep.witness_left = swap_sides ? T : S;
  rep.witness_right = swap_sides ? S : T;
  return rep;
}

long long cycle2_count(const BipartiteGraph& g) {
  long long total = 0;
  int n = g.right_size();
  for (int v0 = 0; v0 < n; ++v0)
    for (int v1 = 0; v1 < n; ++v1) {
      long long c = g.col(v0).and_count(g.col(v1));
      total += c * c;
    }
  return total;
}

Rat dev2_sum(const BipartiteGraph& g, const Rat& d2) {
  int m = g.left_size(), n = g.right_size();
  if (m == 0 || n == 0) return Rat(0);
  long long p = (long long)d2.num(), q = (long long)d2.den();
  // q^2 * S(v0,v1) from codegree and degrees: entries of g are (q-p) or (-p).
  int128 acc = 0;
  std::vector<int> deg(n);
  for (int v = 0; v < n; ++v) deg[v] = g.col(v).count();
  for (int v0 = 0; v0 < n; ++v0)
    for (int v1 = 0; v1 < n; ++v1) {
      long long co = g.col(v0).and_count(g.col(v1));
      int128 s = int128(co) * (q - p) * (q - p);
      s += int128(deg[v0] - co) * (q - p) * (-p);
      s += int128(deg[v1] - co) * (-p) * (q - p);
      s += int128(m - deg[v0] - deg[v1] + co) * p * p;
      acc += s * s;
    }
  int128 den = int128(q) * q * q * q;
  den *= int128(m) * m;
  den *= int128(n) * n;
  return Rat(acc, den);
}

DeviationReport vdisc3_deviation(const ThreeGraph& h, std::optional<Rat> d_opt,
                                 const Vdisc3Options& opt) {
  if (!h.partition() || h.partition()->size() != 3)
    throw std::invalid_argument("vdisc3_deviation requires a 3-partition");
  const auto& parts = *h.partition();
  std::array<std::vector<int>, 3> vs = {parts[0], parts[1], parts[2]};
  // enumerate the two smallest parts; complete the largest greedily
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return vs[a].size() < vs[b].size(); });
  const std::vector<int>& A = vs[order[0]];
  const std::vector<int>& B = vs[order[1]];
  const std::vector<int>& C = vs[order[2]];
  int sa = int(A.size()), sb = int(B.size()), sc = int(C.size());
  long long total = (long long)sa * sb * sc;
  DeviationReport rep;
  if (total == 0) return rep;

  long long ecnt = 0;
  for (const Triple& e : h.edges()) ++ecnt;
  Rat d = d_opt ? *d_opt : Rat(int128(ecnt), int128(total));
  rep.density_used = d;
  long long p = (long long)d.num(), q = (long long)d.den();

  if (sa + sb > opt.exact_cap) {
    // Sampling fallback over subset pairs of (A,B) with greedy third side.
    Rng rng = Rng::substream(opt.seed, "vdisc3_sample");
    int128 best = -1;
    std::vector<char> bestA(sa), bestB(sb), inA(sa), inB(sb);
    for (int it = 0; it < opt.samples; ++it) {
      int na = 0, nb = 0;
      for (int a = 0; a < sa; ++a) { inA[a] = rng.chance(1, 2); na += inA[a]; }
      for (int b = 0; b < sb; ++b) { inB[b] = rng.chance(1, 2); nb += inB[b]; }
      int128 pos = 0, neg = 0;
      for (int c = 0; c < sc; ++c) {
        long long e = 0;
        for (int a = 0; a < sa; ++a)
          if (inA[a])
            for (int b = 0; b < sb; ++b)
              if (inB[b] && h.has_edge(A[a], B[b], C[c])) ++e;
        long long mg = q * e - p * (long long)na * nb;
        if (mg > 0) pos += mg;
        else neg += mg;
      }
      int128 v = pos >= -neg ? pos : -neg;
      if (v > best) { best = v; bestA = inA; bestB = inB; }
    }
    rep.exact = false;
    rep.deviation = Rat(best < 0 ? 0 : best, int128(q) * total);
    for (int a = 0; a < sa; ++a)
      if (bestA[a]) rep.witness_left.push_back(A[a]);
    for (int b = 0; b < sb; ++b)
      if (bestB[b]) rep.witness_right.push_back(B[b]);
    return rep;
  }

  // Pair masks: for (a,c) the b's completing an edge, and symmetrically.
  std::vector<uint64_t> mask_ac((size_t)sa * sc, 0), mask_bc((size_t)sb * sc, 0);
  for (int a = 0; a < sa; ++a)
    for (int b = 0; b < sb; ++b)
      for (int c = 0; c < sc; ++c)
        if (h.has_edge(A[a], B[b], C[c])) {
          mask_ac[(size_t)a * sc + c] |= 1ULL << b;
          mask_bc[(size_t)b * sc + c] |= 1ULL << a;
        }

  struct Best {
    int128 value = -1;
    uint64_t mask = UINT64_MAX;
    bool positive = true;
  };
  int bits = sa + sb;  // low sa bits = A subset, high sb bits = B subset
  auto run_range = [&](uint64_t lo, uint64_t hi, Best& out) {
    std::vector<long long> ec(sc, 0);
    uint64_t cur = lo ^ (lo >> 1);
    auto toggle = [&](int bit, uint64_t gray) {
      if (bit < sa) {
        uint64_t bmask = gray >> sa;
        int sign = (gray >> bit) & 1 ? +1 : -1;
        for (int c = 0; c < sc; ++c)
          ec[c] += sign * std::popcount(mask_ac[(size_t)bit * sc + c] & bmask);
      } else {
        int b = bit - sa;
        uint64_t amask = gray & ((1ULL << sa) - 1);
        int sign = (gray >> bit) & 1 ? +1 : -1;
        for (int c = 0; c < sc; ++c)
          ec[c] += sign * std::popcount(mask_bc[(size_t)b * sc + c] & amask);
      }
    };
    // initialize counts for the starting gray mask
    {
      uint64_t amask = cur & ((1ULL << sa) - 1);
      uint64_t bmask = cur >> sa;
      for (int c = 0; c < sc; ++c) {
        long long e = 0;
        uint64_t bm = bmask;
        while (bm) {
          int b = std::countr_zero(bm);
          bm &= bm - 1;
          e += std::popcount(mask_bc[(size_t)b * sc + c] & amask);
        }
        ec[c] = e;
      }
    }
    for (uint64_t i = lo; i < hi; ++i) {
      uint64_t gray = i ^ (i >> 1);
      if (i != lo) {
        uint64_t prev = (i - 1) ^ ((i - 1) >> 1);
        int bit = std::countr_zero(gray ^ prev);
        cur = gray;
        toggle(bit, gray);
      }
      int na = std::popcount(cur & ((1ULL << sa) - 1));
      int nb = std::popcount(cur >> sa);
      long long pab = p * (long long)na * nb;
      int128 pos = 0, neg = 0;
      for (int c = 0; c < sc; ++c) {
        long long mg = q * ec[c] - pab;
        if (mg > 0) pos += mg;
        else neg += mg;
      }
      int128 v = pos >= -neg ? pos : -neg;
      bool positive = pos >= -neg;
      if (v > out.value || (v == out.value && cur < out.mask)) {
        out.value = v;
        out.mask = cur;
        out.positive = positive;
      }
    }
  };

  uint64_t space = 1ULL << bits;
  int threads = std::max(1, opt.threads);
  Best best;
  if (threads == 1 || space < 4096) {
    run_range(0, space, best);
  } else {
    std::vector<Best> acc(threads);
    std::vector<std::thread> pool;
    uint64_t chunk = space / threads;
    for (int t = 0; t < threads; ++t) {
      uint64_t lo = t * chunk, hi = t == threads - 1 ? space : lo + chunk;
      pool.emplace_back([&, lo, hi, t] { run_range(lo, hi, acc[t]); });
    }
    for (auto& th : pool) th.join();
    for (const Best& b : acc)
      if (b.value > best.value || (b.value == best.value && b.mask < best.mask)) best = b;
  }

  if (best.value < 0) best.value = 0;
  rep.deviation = Rat(best.value, int128(q) * total);
  rep.exact = true;
  std::vector<int> selA, selB, selC;
  for (int a = 0; a < sa; ++a)
    if ((best.mask >> a) & 1) selA.push_back(a);
  for (int b = 0; b < sb; ++b)
    if ((best.mask >> (sa + b)) & 1) selB.push_back(b);
  for (int c = 0; c < sc; ++c) {
    long long e = 0;
    for (int a : selA)
      for (int b : selB)
        if (h.has_edge(A[a], B[b], C[c])) ++e;
    long long mg = q * e - p * (long long)selA.size() * selB.size();
    if ((best.positive && mg > 0) || (!best.positive && mg < 0)) selC.push_back(c);
  }
  // report in the graph's own part order
  std::array<std::vector<int>, 3> sel;
  sel[order[0]] = selA;
  sel[order[1]] = selB;
  sel[order[2]] = selC;
  auto lift = [&](int part, const std::vector<int>& idx) {
    std::vector<int> out;
    for (int i : idx) out.push_back(vs[part][i]);
    return out;
  };
  rep.witness_left = lift(0, sel[0]);
  rep.witness_right = lift(1, sel[1]);
  rep.witness_third = lift(2, sel[2]);
  return rep;
}

bool TriadInstance::validate_underlying() const {
  for (const Triple& e : h_edges) {
    if (!g.pair(0, 1).has_edge(e[0], e[1]) || !g.pair(0, 2).has_edge(e[0], e[2]) ||
        !g.pair(1, 2).has_edge(e[1], e[2]))
      return false;
  }
  return true;
}

long long TriadInstance::covered_edge_count() const { return (long long)h_edges.size(); }

Rat TriadInstance::d3() const {
  long long tri = triangle_count();
  if (tri == 0) return Rat(0);
  return Rat(int128(h_edges.size()), int128(tri));
}

TriadInstance make_triad(const ThreeGraph& h, const TripartiteGraph& g) {
  if (!h.partition() || h.partition()->size() != 3)
    throw std::invalid_argument("make_triad requires a 3-partition");
  const auto& parts = *h.partition();
  for (int i = 0; i < 3; ++i)
    if (int(parts[i].size()) != g.size(i))
      throw std::invalid_argument("make_triad: part sizes disagree with underlying graph");
  std::vector<int> role(h.n(), -1), local(h.n(), -1);
  for (int i = 0; i < 3; ++i)
    for (size_t j = 0; j < parts[i].size(); ++j) {
      role[parts[i][j]] = i;
      local[parts[i][j]] = int(j);
    }
  TriadInstance t;
  t.g = g;
  for (const Triple& e : h.edges()) {
    std::array<int, 3> loc{-1, -1, -1};
    for (int v : e) {
      if (role[v] < 0) throw std::invalid_argument("make_triad: edge uses unpartitioned vertex");
      loc[role[v]] = local[v];
    }
    if (loc[0] < 0 || loc[1] < 0 || loc[2] < 0)
      throw std::invalid_argument("make_triad: edge not transversal to the parts");
    t.h_edges.push_back({loc[0], loc[1], loc[2]});
  }
  if (!t.validate_underlying())
    throw std::invalid_argument("make_triad: h is not underlain by g");
  return t;
}

Rat dev23_sum(const TriadInstance& t, std::optional<Rat> d3_opt) {
  int s1 = t.size(0), s2 = t.size(1), s3 = t.size(2);
  if (s1 == 0 || s2 == 0 || s3 == 0) return Rat(0);
  if (s1 > 16 || s2 > 16 || s3 > 16)
    throw std::invalid_argument("dev23_sum exact mode requires part sizes <= 16");
  Rat d3 = d3_opt ? *d3_opt : t.d3();
  long long p = (long long)d3.num(), q = (long long)d3.den();

  std::vector<char> he((size_t)s1 * s2 * s3, 0);
  for (const Triple& e : t.h_edges) he[((size_t)e[0] * s2 + e[1]) * s3 + e[2]] = 1;
  auto tri = [&](int u, int v, int w) {
    return t.g.pair(0, 1).has_edge(u, v) && t.g.pair(0, 2).has_edge(u, w) &&
           t.g.pair(1, 2).has_edge(v, w);
  };
  // f numerator: q*1_K*1_E - p*1_K
  std::vector<long long> fn((size_t)s1 * s2 * s3, 0);
  for (int u = 0; u < s1; ++u)
    for (int v = 0; v < s2; ++v)
      for (int w = 0; w < s3; ++w)
        if (tri(u, v, w))
          fn[((size_t)u * s2 + v) * s3 + w] = he[((size_t)u * s2 + v) * s3 + w] ? q - p : -p;

  int128 acc = 0;
  std::vector<int128> M((size_t)s1 * s2);
  for (int w0 = 0; w0 < s3; ++w0)
    for (int w1 = 0; w1 < s3; ++w1) {
      for (int u = 0; u < s1; ++u)
        for (int v = 0; v < s2; ++v)
          M[(size_t)u * s2 + v] = int128(fn[((size_t)u * s2 + v) * s3 + w0]) *
                                  fn[((size_t)u * s2 + v) * s3 + w1];
      for (int v0 = 0; v0 < s2; ++v0)
        for (int v1 = 0; v1 < s2; ++v1) {
          int128 gvv = 0;
          for (int u = 0; u < s1; ++u) gvv += M[(size_t)u * s2 + v0] * M[(size_t)u * s2 + v1];
          acc += gvv * gvv;
        }
    }
  // denominator q^8 * (s1 s2 s3)^2
  int128 den = 1;
  for (int i = 0; i < 8; ++i) den *= q;
  int128 sz = int128(s1) * s2 * s3;
  den *= sz * sz;
  return Rat(acc, den);
}

long long oct23_count(const TriadInstance& t) {
  int s1 = t.size(0), s2 = t.size(1), s3 = t.size(2);
  std::vector<uint64_t> nb((size_t)s1 * s2, 0);
  if (s3 > 64) throw std::invalid_argument("oct23_count: part 3 too large");
  for (const Triple& e : t.h_edges) nb[(size_t)e[0] * s2 + e[1]] |= 1ULL << e[2];
  long long total = 0;
  for (int u0 = 0; u0 < s1; ++u0)
    for (int u1 = 0; u1 < s1; ++u1)
      for (int v0 = 0; v0 < s2; ++v0)
        for (int v1 = 0; v1 < s2; ++v1) {
          uint64_t common = nb[(size_t)u0 * s2 + v0] & nb[(size_t)u0 * s2 + v1] &
                            nb[(size_t)u1 * s2 + v0] & nb[(size_t)u1 * s2 + v1];
          long long c = std::popcount(common);
          total += c * c;
        }
  return total;
}

DeviationReport disc23_witness_search(const TriadInstance& t, std::optional<Rat> d3_opt,
                                      const Disc23Options& opt) {
  int s1 = t.size(0), s2 = t.size(1), s3 = t.size(2);
  DeviationReport rep;
  Rat d3 = d3_opt ? *d3_opt : t.d3();
  rep.density_used = d3;
  long long p = (long long)d3.num(), q = (long long)d3.den();

  // d2 = min of the three measured pair densities (all three are reported by
  // the caller; the minimum normalizes, per the declared convention).
  Rat d2 = Rat(1);
  bool any_zero = false;
  for (auto [a, b] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
    const BipartiteGraph& pg = t.g.pair(a, b);
    long long tot = (long long)pg.left_size() * pg.right_size();
    if (tot == 0 || pg.edge_count() == 0) { any_zero = true; continue; }
    Rat dens(int128(pg.edge_count()), int128(tot));
    if (dens < d2) d2 = dens;
  }
  if (any_zero) {
    rep.deviation = Rat(0);
    rep.exact = true;
    return rep;
  }
  Rat norm = d2 * d2 * d2 * Rat(int128((long long)s1 * s2 * s3), 1);

  // Cross-edge list of g.
  struct CEdge { int pair; int a, b; };  // pair: 0=(0,1), 1=(0,2), 2=(1,2)
  std::vector<CEdge> edges;
  int pid = 0;
  for (auto [x, y] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
    const BipartiteGraph& pg = t.g.pair(x, y);
    for (auto [a, b] : pg.edges_sorted()) edges.push_back({pid, a, b});
    ++pid;
  }
  int ne = int(edges.size());

  // h-edge lookup bitsets: for (u,v) the w's with (u,v,w) in E(H).
  std::vector<uint64_t> hw((size_t)s1 * s2, 0);
  if (s3 <= 64)
    for (const Triple& e : t.h_edges) hw[(size_t)e[0] * s2 + e[1]] |= 1ULL << e[2];

  // present[] tracks G'; rows kept as bitsets for triangle deltas.
  std::vector<char> present(ne, 0);
  std::vector<Bitset> r01(s1, Bitset(s2)), r02(s1, Bitset(s3)), r12(s2, Bitset(s3));
  long long tri = 0, cov = 0;

  auto delta = [&](int ei) -> std::pair<long long, long long> {
    const CEdge& e = edges[ei];
    long long dt = 0, dc = 0;
    if (e.pair == 0) {  // (u,v): triangles through w in r02[u] & r12[v]
      Bitset common = r02[e.a] & r12[e.b];
      dt = common.count();
      if (s3 <= 64) {
        uint64_t cm = 0;
        for (int w = common.first(); w >= 0; w = common.next(w)) cm |= 1ULL << w;
        dc = std::popcount(cm & hw[(size_t)e.a * s2 + e.b]);
      } else {
        for (int w = common.first(); w >= 0; w = common.next(w)) {
          for (const Triple& he : t.h_edges)
            if (he[0] == e.a && he[1] == e.b && he[2] == w) { ++dc; break; }
        }
      }
    } else if (e.pair == 1) {  // (u,w): v's in r01[u] & col of r12 at w
      for (int v = 0; v < s2; ++v)
        if (r01[e.a].test(v) && r12[v].test(e.b)) {
          ++dt;
          if (s3 <= 64 && (hw[(size_t)e.a * s2 + v] >> e.b) & 1) ++dc;
        }
    } else {  // (v,w): u's with r01[u].test(v) && r02[u].test(w)
      for (int u = 0; u < s1; ++u)
        if (r01[u].test(e.a) && r02[u].test(e.b)) {
          ++dt;
          if (s3 <= 64 && (hw[(size_t)u * s2 + e.a] >> e.b) & 1) ++dc;
        }
    }
    return {dt, dc};
  };
  auto toggle = [&](int ei) {
    const CEdge& e = edges[ei];
    bool add = !present[ei];
    if (!add) {
      // remove first so delta reflects the smaller graph
      if (e.pair == 0) r01[e.a].reset(e.b);
      else if (e.pair == 1) r02[e.a].reset(e.b);
      else r12[e.a].reset(e.b);
      auto [dt, dc] = delta(ei);
      tri -= dt;
      cov -= dc;
      present[ei] = 0;
    } else {
      auto [dt, dc] = delta(ei);
      tri += dt;
      cov += dc;
      if (e.pair == 0) r01[e.a].set(e.b);
      else if (e.pair == 1) r02[e.a].set(e.b);
      else r12[e.a].set(e.b);
      present[ei] = 1;
    }
  };
  auto score = [&]() -> int128 {
    int128 s = int128(q) * cov - int128(p) * tri;
    return s < 0 ? -s : s;
  };

  int128 best = -1;
  std::vector<char> best_present;
  auto consider = [&]() {
    int128 s = score();
    if (s > best) {
      best = s;
      best_present = present;
    }
  };

  if (ne <= opt.exact_edge_cap) {
    // Full enumeration over subgraphs by edge subsets (Gray order).
    for (int i = 0; i < ne; ++i)
      if (present[i]) toggle(i);
    consider();
    uint64_t space = 1ULL << ne;
    uint64_t cur = 0;
    for (uint64_t i = 1; i < space; ++i) {
      uint64_t gray = i ^ (i >> 1);
      int bit = std::countr_zero(gray ^ cur);
      cur = gray;
      toggle(bit);
      consider();
    }
    rep.exact = true;
  } else {
    Rng rng = Rng::substream(opt.seed, "disc23_search");
    long long used = 0;
    for (int restart = 0; restart < std::max(1, opt.restarts) && used < opt.budget; ++restart) {
      // start from the full graph on even restarts, random half otherwise
      for (int i = 0; i < ne; ++i) {
        bool want = restart % 2 == 0 ? true : rng.chance(1, 2);
        if (bool(present[i]) != want) toggle(i);
      }
      consider();
      bool improved = true;
      while (improved && used < opt.budget) {
        improved = false;
        for (int i = 0; i < ne && used < opt.budget; ++i) {
          ++used;
          int128 before = score();
          toggle(i);
          if (score() > before) {
            improved = true;
            consider();
          } else {
            toggle(i);
          }
        }
        // vertex-restriction move: drop all edges at one random vertex
        if (used < opt.budget) {
          int part = int(rng.below(3));
          int sz = part == 0 ? s1 : part == 1 ? s2 : s3;
          if (sz > 0) {
            int v = int(rng.below(sz));
            std::vector<int> dropped;
            int128 before = score();
            for (int i = 0; i < ne; ++i) {
              const CEdge& e = edges[i];
              bool at = (part == 0 && (e.pair == 0 || e.pair == 1) && e.a == v) ||
                        (part == 1 && ((e.pair == 0 && e.b == v) || (e.pair == 2 && e.a == v))) ||
                        (part == 2 && (e.pair == 1 || e.pair == 2) && e.b == v);
              if (at && present[i]) {
                toggle(i);
                dropped.push_back(i);
              }
            }
            ++used;
            if (score() > before) {
              improved = true;
              consider();
            } else {
              for (int i : dropped) toggle(i);
            }
          }
        }
      }
    }
    rep.exact = false;
  }

  if (best < 0) best = 0;
  rep.deviation = Rat(best, int128(q)) / norm;
  rep.witness_subgraph.assign(3, {});
  if (!best_present.empty())
    for (int i = 0; i < ne; ++i)
      if (best_present[i]) rep.witness_subgraph[edges[i].pair].emplace_back(edges[i].a, edges[i].b);
  return rep;
}

long long induced_pattern_count(const ThreeGraph& h, const std::vector<std::vector<int>>& classes,
                                const ThreeGraph& pattern) {
  if (!pattern.partition() || pattern.partition()->size() != 3)
    throw std::invalid_argument("induced_pattern_count: pattern must be 3-partite");
  const auto& pparts = *pattern.partition();
  size_t tp = pparts[0].size() + pparts[1].size() + pparts[2].size();
  if (classes.size() != tp)
    throw std::invalid_argument("induced_pattern_count: need one class per pattern vertex");
  {
    std::vector<char> seen(h.n(), 0);
    for (const auto& c : classes)
      for (int v : c) {
        if (v < 0 || v >= h.n() || seen[v])
          throw std::invalid_argument("induced_pattern_count: classes not disjoint");
        seen[v] = 1;
      }
  }
  // order pattern vertices part by part; slot s <- classes[s]
  std::vector<int> pv;
  std::vector<int> prole;
  for (int r = 0; r < 3; ++r)
    for (int v : pparts[r]) {
      pv.push_back(v);
      prole.push_back(r);
    }
  int tpn = int(pv.size());
  // constraints among assigned triples: for each slot, list of (slot_a, slot_b, must_edge)
  std::vector<std::vector<std::array<int, 3>>> constraints(tpn);
  for (int x = 0; x < tpn; ++x)
    for (int y = x + 1; y < tpn; ++y)
      for (int z = y + 1; z < tpn; ++z) {
        if (prole[x] == prole[y] || prole[x] == prole[z] || prole[y] == prole[z]) continue;
        bool e = pattern.has_edge(pv[x], pv[y], pv[z]);
        constraints[z].push_back({x, y, e ? 1 : 0});
      }
  long long count = 0;
  std::vector<int> assign(tpn, -1);
  std::function<void(int)> rec = [&](int slot) {
    if (slot == tpn) {
      ++count;
      return;
    }
    for (int v : classes[slot]) {
      bool ok = true;
      for (const auto& c : constraints[slot]) {
        bool e = h.has_edge(assign[c[0]], assign[c[1]], v);
        if (e != bool(c[2])) { ok = false; break; }
      }
      if (!ok) continue;
      assign[slot] = v;
      rec(slot + 1);
      assign[slot] = -1;
    }
  };
  rec(0);
  return count;
}

}  // namespace hr3
