#include "hr3/construct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hr3/quasi.hpp"
#include "hr3/rng.hpp"

namespace hr3 {

Family family_from_name(const std::string& name) {
  static const std::map<std::string, Family> names = {
      {"HALF_GRAPH", Family::HALF_GRAPH}, {"H", Family::HALF_GRAPH},
      {"POWERSET_GRAPH", Family::POWERSET_GRAPH}, {"U", Family::POWERSET_GRAPH},
      {"V", Family::V},
      {"HBAR", Family::HBAR},
      {"UBAR", Family::UBAR},
      {"USTAR", Family::USTAR},
      {"HSTAR", Family::HSTAR},
      {"F", Family::F},
      {"HP", Family::HP},
      {"GS", Family::GS},
      {"W", Family::W},
      {"W1", Family::W1},
      {"W2", Family::W2},
      {"TENSOR", Family::TENSOR},
      {"VCFOP_EXAMPLE", Family::VCFOP_EXAMPLE}, {"VCFOP", Family::VCFOP_EXAMPLE},
  };
  auto it = names.find(name);
  if (it == names.end()) throw std::invalid_argument("unknown family: " + name);
  return it->second;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::HALF_GRAPH: return "HALF_GRAPH";
    case Family::POWERSET_GRAPH: return "POWERSET_GRAPH";
    case Family::V: return "V";
    case Family::HBAR: return "HBAR";
    case Family::UBAR: return "UBAR";
    case Family::USTAR: return "USTAR";
    case Family::HSTAR: return "HSTAR";
    case Family::F: return "F";
    case Family::HP: return "HP";
    case Family::GS: return "GS";
    case Family::W: return "W";
    case Family::W1: return "W1";
    case Family::W2: return "W2";
    case Family::TENSOR: return "TENSOR";
    case Family::VCFOP_EXAMPLE: return "VCFOP_EXAMPLE";
  }
  return "?";
}

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Subset of {1,2,...} encoded by the binary digits of r; used to pick the
// finite slices of the W families deterministically.
std::vector<int> subset_of_rank(int r) {
  std::vector<int> s;
  for (int bit = 0; (1 << bit) <= r; ++bit)
    if (r & (1 << bit)) s.push_back(bit + 1);
  return s;
}

std::vector<std::vector<int>> contiguous_parts(const std::vector<int>& sizes) {
  std::vector<std::vector<int>> parts;
  int at = 0;
  for (int s : sizes) {
    std::vector<int> p(s);
    for (int i = 0; i < s; ++i) p[i] = at + i;
    parts.push_back(std::move(p));
    at += s;
  }
  return parts;
}

}  // namespace

std::vector<int> gs_digits(int p, int n, long long code) {
  std::vector<int> d(n);
  for (int i = n - 1; i >= 0; --i) {
    d[i] = int(code % p);
    code /= p;
  }
  return d;
}

long long gs_code(int p, const std::vector<int>& digits) {
  long long c = 0;
  for (int d : digits) c = c * p + d;
  return c;
}

std::vector<int> gs_special_set(int p, int n) {
  std::vector<int> out;
  long long N = ipow(p, n);
  for (long long code = 0; code < N; ++code) {
    std::vector<int> d = gs_digits(p, n, code);
    for (int i = 0; i < n; ++i) {
      if (d[i] == 0) continue;
      if (d[i] == 1) out.push_back(int(code));
      break;
    }
  }
  return out;
}

std::vector<int> f_table_from_rank(int ell, long long rank) {
  int cells = ell * ell;
  std::vector<int> t(cells);
  for (int i = cells - 1; i >= 0; --i) {
    t[i] = int(rank % ell) + 1;
    rank /= ell;
  }
  return t;
}

long long f_table_rank(int ell, const std::vector<int>& table) {
  long long r = 0;
  for (int v : table) r = r * ell + (v - 1);
  return r;
}

BuiltGraph build_canonical(const FamilySpec& spec) {
  int k = spec.k;
  switch (spec.family) {
    case Family::HALF_GRAPH: {
      // a_i b_j an edge iff i <= j; the 1-based relation survives the 0-based shift.
      require(k >= 1, "HALF_GRAPH requires k >= 1");
      BipartiteGraph g(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) g.add_edge(i, j);
      return g;
    }
    case Family::POWERSET_GRAPH: {
      // Right side enumerates S subseteq [k] by subset bitmask 0..2^k-1.
      require(k >= 1 && k <= 20, "POWERSET_GRAPH requires 1 <= k <= 20");
      BipartiteGraph g(k, 1 << k);
      for (int i = 0; i < k; ++i)
        for (int s = 0; s < (1 << k); ++s)
          if (s & (1 << i)) g.add_edge(i, s);
      return g;
    }
    case Family::V: {
      // Parts (B, C, A) with A indexed by S subseteq [k]^2 (bitmask over
      // row-major cells); a_S b_v c_w an edge iff cell (v,w) in S.
      require(k >= 1 && k <= 5, "V requires 1 <= k <= 5");
      long long na = 1LL << (k * k);
      require(2 * k + na <= spec.vertex_cap, "V(k) exceeds vertex cap");
      ThreeGraph h(int(2 * k + na));
      for (long long s = 0; s < na; ++s)
        for (int v = 0; v < k; ++v)
          for (int w = 0; w < k; ++w)
            if (s & (1LL << (v * k + w))) h.add_edge(v, k + w, int(2 * k + s));
      auto parts = contiguous_parts({k, k, int(na)});
      h.set_partition(parts);
      return h;
    }
    case Family::HBAR: {
      // a_i b_j c_k an edge iff j <= k (all i).
      require(k >= 1, "HBAR requires k >= 1");
      ThreeGraph h(3 * k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          for (int m = j; m < k; ++m) h.add_edge(i, k + j, 2 * k + m);
      h.set_partition(contiguous_parts({k, k, k}));
      return h;
    }
    case Family::UBAR: {
      // a_i b_S c_j an edge iff j in S.
      require(k >= 1 && k <= 20, "UBAR requires 1 <= k <= 20");
      int ns = 1 << k;
      ThreeGraph h(2 * k + ns);
      for (int i = 0; i < k; ++i)
        for (int s = 0; s < ns; ++s)
          for (int j = 0; j < k; ++j)
            if (s & (1 << j)) h.add_edge(i, k + s, k + ns + j);
      h.set_partition(contiguous_parts({k, ns, k}));
      return h;
    }
    case Family::USTAR: {
      // single apex a; a b_S c_j an edge iff j in S.
      require(k >= 1 && k <= 20, "USTAR requires 1 <= k <= 20");
      int ns = 1 << k;
      ThreeGraph h(1 + ns + k);
      for (int s = 0; s < ns; ++s)
        for (int j = 0; j < k; ++j)
          if (s & (1 << j)) h.add_edge(0, 1 + s, 1 + ns + j);
      h.set_partition(contiguous_parts({1, ns, k}));
      return h;
    }
    case Family::HSTAR: {
      // single apex a; a b_i c_j an edge iff i <= j.
      require(k >= 1, "HSTAR requires k >= 1");
      ThreeGraph h(1 + 2 * k);
      for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) h.add_edge(0, 1 + i, 1 + k + j);
      h.set_partition(contiguous_parts({1, k, k}));
      return h;
    }
    case Family::F: {
      // Parts (A, B, C); B enumerates pairs (f, i) with f in lexicographic
      // order of its value table (row-major, values 1..l), b index =
      // rank(f)*l + (i-1). a_i b_j^f c_m an edge iff m <= f(i,j).
      int ell = spec.ell;
      require(ell >= 1, "F requires l >= 1");
      long long nf = ipow(ell, ell * ell);
      long long nb = nf * ell;
      require(2 * ell + nb <= spec.vertex_cap, "F(l) exceeds vertex cap");
      ThreeGraph h(int(2 * ell + nb));
      for (long long r = 0; r < nf; ++r) {
        std::vector<int> table = f_table_from_rank(ell, r);
        for (int j = 1; j <= ell; ++j) {
          int b = int(ell + r * ell + (j - 1));
          for (int i = 1; i <= ell; ++i) {
            int fij = table[(i - 1) * ell + (j - 1)];
            for (int m = 1; m <= fij; ++m)
              h.add_edge(i - 1, b, int(ell + nb + (m - 1)));
          }
        }
      }
      h.set_partition(contiguous_parts({ell, int(nb), ell}));
      return h;
    }
    case Family::HP: {
      // 1-based: a_u b_v c_w an edge iff u+v+w >= k+2; 0-based ids shift all
      // three indices down by one, so the test becomes u+v+w >= k-1.
      require(k >= 1, "HP requires k >= 1");
      ThreeGraph h(3 * k);
      for (int u = 0; u < k; ++u)
        for (int v = 0; v < k; ++v)
          for (int w = 0; w < k; ++w)
            if (u + v + w >= k - 1) h.add_edge(u, k + v, 2 * k + w);
      h.set_partition(contiguous_parts({k, k, k}));
      return h;
    }
    case Family::GS: {
      // Vectors of F_p^n as base-p codes, most significant coordinate first;
      // a_g b_g' c_g'' an edge iff g+g'+g'' lies in A(p,n).
      require(spec.p >= 3 && is_prime(spec.p), "GS requires prime p >= 3");
      require(spec.n >= 1 && spec.n <= 6, "GS requires 1 <= n <= 6");
      int p = spec.p, n = spec.n;
      long long N = ipow(p, n);
      require(3 * N <= spec.vertex_cap, "GS exceeds vertex cap");
      std::vector<int> special = gs_special_set(p, n);
      std::vector<char> in_a(N, 0);
      for (int c : special) in_a[c] = 1;
      // digitwise sum tables keep the triple loop cheap
      std::vector<std::vector<int>> add(N, std::vector<int>(N));
      for (long long x = 0; x < N; ++x) {
        std::vector<int> dx = gs_digits(p, n, x);
        for (long long y = 0; y < N; ++y) {
          std::vector<int> dy = gs_digits(p, n, y);
          std::vector<int> dz(n);
          for (int i = 0; i < n; ++i) dz[i] = (dx[i] + dy[i]) % p;
          add[x][y] = int(gs_code(p, dz));
        }
      }
      ThreeGraph h(int(3 * N));
      for (int g = 0; g < N; ++g)
        for (int g2 = 0; g2 < N; ++g2) {
          int s = add[g][g2];
          for (int g3 = 0; g3 < N; ++g3)
            if (in_a[add[s][g3]]) h.add_edge(g, int(N + g2), int(2 * N + g3));
        }
      h.set_partition(contiguous_parts({int(N), int(N), int(N)}));
      return h;
    }
    case Family::W: {
      // a_i b_j c_S with c-part = first k subsets in binary-counting order;
      // edge iff j in S.
      require(k >= 1, "W requires k >= 1");
      ThreeGraph h(3 * k);
      for (int r = 0; r < k; ++r) {
        std::vector<int> S = subset_of_rank(r);
        for (int i = 0; i < k; ++i)
          for (int j : S)
            if (j <= k) h.add_edge(i, k + (j - 1), 2 * k + r);
      }
      h.set_partition(contiguous_parts({k, k, k}));
      return h;
    }
    case Family::W1: {
      // a_S b_j c_m, edge iff j = m and j in S; a-part = first k subsets.
      require(k >= 1, "W1 requires k >= 1");
      ThreeGraph h(3 * k);
      for (int r = 0; r < k; ++r) {
        std::vector<int> S = subset_of_rank(r);
        for (int j : S)
          if (j <= k) h.add_edge(r, k + (j - 1), 2 * k + (j - 1));
      }
      h.set_partition(contiguous_parts({k, k, k}));
      return h;
    }
    case Family::W2: {
      // a_i b_j c_m, edge iff i <= j and j = m.
      require(k >= 1, "W2 requires k >= 1");
      ThreeGraph h(3 * k);
      for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) h.add_edge(i, k + j, 2 * k + j);
      h.set_partition(contiguous_parts({k, k, k}));
      return h;
    }
    case Family::TENSOR: {
      require(spec.attached.has_value(), "TENSOR requires an attached bipartite graph");
      require(spec.n >= 1, "TENSOR requires n >= 1");
      const BipartiteGraph& g = *spec.attached;
      int m = g.left_size(), w = g.right_size();
      ThreeGraph h(m + w + spec.n);
      for (auto [u, v] : g.edges_sorted())
        for (int c = 0; c < spec.n; ++c) h.add_edge(u, m + v, m + w + c);
      h.set_partition(contiguous_parts({m, w, spec.n}));
      return h;
    }
    case Family::VCFOP_EXAMPLE: {
      // Parts (U, W, Z_1..Z_k merged); K2[U,W] sliced into k random parts,
      // u w z an edge iff z in Z_i and the pair's slice index alpha <= i.
      require(k >= 1 && spec.n >= 1, "VCFOP_EXAMPLE requires k, n >= 1");
      int n = spec.n;
      BipartiteGraph complete(n, n);
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) complete.add_edge(u, v);
      SliceResult slices = slice_bipartite(complete, k, spec.seed, 0);
      ThreeGraph h(2 * n + k * n);
      for (int alpha = 0; alpha < k; ++alpha)
        for (auto [u, v] : slices.parts[alpha].edges)
          for (int i = alpha; i < k; ++i)
            for (int z = 0; z < n; ++z) h.add_edge(u, n + v, 2 * n + i * n + z);
      std::vector<int> zpart;
      for (int z = 0; z < k * n; ++z) zpart.push_back(2 * n + z);
      std::vector<std::vector<int>> parts = contiguous_parts({n, n});
      parts.push_back(zpart);
      h.set_partition(parts);
      return h;
    }
  }
  throw std::logic_error("unreachable family");
}

ThreeGraph build_three(const FamilySpec& spec) {
  BuiltGraph g = build_canonical(spec);
  if (auto* h = std::get_if<ThreeGraph>(&g)) return std::move(*h);
  throw std::invalid_argument(family_name(spec.family) + " builds a bipartite graph");
}

BipartiteGraph build_bipartite(const FamilySpec& spec) {
  BuiltGraph g = build_canonical(spec);
  if (auto* b = std::get_if<BipartiteGraph>(&g)) return std::move(*b);
  throw std::invalid_argument(family_name(spec.family) + " builds a 3-graph");
}

BipartiteGraph random_disc2_bipartite(int m, int n, const Rat& density, uint64_t seed) {
  if (density < Rat(0) || density > Rat(1)) throw std::invalid_argument("density outside [0,1]");
  Rng rng = Rng::substream(seed, "random_disc2_bipartite");
  BipartiteGraph g(m, n);
  uint64_t num = uint64_t(density.num()), den = uint64_t(density.den());
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < n; ++v)
      if (rng.chance(num, den)) g.add_edge(u, v);
  return g;
}

namespace {

void measure_part(SlicePart& part, int m, int n, int disc2_cap) {
  long long total = (long long)m * n;
  part.density = total == 0 ? Rat(0) : Rat(int128(part.edges.size()), int128(total));
  if (disc2_cap <= 0) return;  // caller opted out of measurement
  BipartiteGraph pg(m, n);
  for (auto [u, v] : part.edges) pg.add_edge(u, v);
  DeviationReport rep = disc2_deviation(pg, part.density, Disc2Options{.exact_cap = disc2_cap});
  part.disc2_deviation = rep.deviation;
  part.disc2_exact = rep.exact;
}

}  // namespace

SliceResult slice_bipartite(const BipartiteGraph& g, int ell, uint64_t seed, int disc2_cap) {
  if (ell < 1) throw std::invalid_argument("slice_bipartite: l >= 1 required");
  Rng rng = Rng::substream(seed, "slice_bipartite");
  SliceResult res;
  res.left_size = g.left_size();
  res.right_size = g.right_size();
  res.parts.assign(ell, {});
  for (auto [u, v] : g.edges_sorted()) res.parts[rng.below(ell)].edges.emplace_back(u, v);
  for (int a = 0; a < ell; ++a) {
    res.parts[a].source_parts = {a};
    measure_part(res.parts[a], g.left_size(), g.right_size(), disc2_cap);
  }
  return res;
}

SliceResult even_repartition(const SliceResult& input, int ell_target, uint64_t seed,
                             int disc2_cap) {
  int m = input.left_size, n = input.right_size;
  long long total = (long long)m * n;
  if (ell_target < 1 || ell_target > total)
    throw std::invalid_argument("even_repartition: infeasible target part count");
  {
    long long covered = 0;
    std::vector<char> seen(total, 0);
    for (const SlicePart& p : input.parts)
      for (auto [u, v] : p.edges) {
        long long id = (long long)u * n + v;
        if (seen[id]) throw std::invalid_argument("even_repartition: parts not disjoint");
        seen[id] = 1;
        ++covered;
      }
    if (covered != total)
      throw std::invalid_argument("even_repartition: parts must partition K2[U,V]");
  }

  Rng rng = Rng::substream(seed, "even_repartition");
  std::vector<std::pair<int, int>> residue;
  struct Piece {
    std::vector<std::pair<int, int>> edges;
    int source;
  };
  std::vector<Piece> pieces;

  // Keep parts near target density whole, split oversized ones, pool the rest.
  for (size_t i = 0; i < input.parts.size(); ++i) {
    const auto& part = input.parts[i];
    double rho = double(part.edges.size()) / double(total);
    int u = int(std::llround(rho * ell_target));
    if (u <= 0) {
      residue.insert(residue.end(), part.edges.begin(), part.edges.end());
      continue;
    }
    if (u == 1) {
      pieces.push_back({part.edges, int(i)});
      continue;
    }
    std::vector<std::vector<std::pair<int, int>>> sub(u);
    for (auto e : part.edges) sub[rng.below(u)].push_back(e);
    for (auto& s : sub) pieces.push_back({std::move(s), int(i)});
  }

  // Too many pieces: demote the smallest into the residue.
  while (int(pieces.size()) > ell_target) {
    size_t worst = 0;
    for (size_t i = 1; i < pieces.size(); ++i)
      if (pieces[i].edges.size() < pieces[worst].edges.size()) worst = i;
    residue.insert(residue.end(), pieces[worst].edges.begin(), pieces[worst].edges.end());
    pieces.erase(pieces.begin() + worst);
  }

  SliceResult out;
  out.left_size = m;
  out.right_size = n;
  out.residue_mass = (long long)residue.size();
  int deficit = ell_target - int(pieces.size());
  if (deficit > 0) {
    std::vector<std::vector<std::pair<int, int>>> sub(deficit);
    for (auto e : residue) sub[rng.below(deficit)].push_back(e);
    for (auto& s : sub) pieces.push_back({std::move(s), -1});
  } else {
    // No free slots: spread the residue round-robin over existing pieces.
    size_t at = 0;
    for (auto e : residue) pieces[at++ % pieces.size()].edges.push_back(e);
  }

  for (auto& piece : pieces) {
    SlicePart sp;
    sp.edges = std::move(piece.edges);
    if (piece.source >= 0) sp.source_parts = {piece.source};
    measure_part(sp, m, n, disc2_cap);
    out.parts.push_back(std::move(sp));
  }
  return out;
}

std::vector<IntegerBall> slice_interval(int N, int lo, int hi, int d_small) {
  if (d_small < 1) throw std::invalid_argument("slice_interval: radius_small >= 1 required");
  if (hi - lo < 2) throw std::invalid_argument("slice_interval: interval too small to host a ball");
  auto make_ball = [&](int center, int radius) {
    IntegerBall b{center, radius, {}};
    for (int x = std::max(1, center - radius + 1); x <= std::min(N, center + radius - 1); ++x)
      b.points.push_back(x);
    return b;
  };
  int d1 = std::max(1, (d_small + 2) / 3);
  int span = hi - lo;
  std::vector<IntegerBall> out;
  if (span <= 2 * d_small) {
    // the interval is itself a ball of admissible radius
    out.push_back(make_ball(lo + span / 2, std::max(1, span / 2)));
    return out;
  }
  int s = span / (2 * d1);
  if (s <= 1) {
    // One ball spanning what fits.
    int radius = std::min(d_small, span / 2);
    if (radius < 1) throw std::invalid_argument("slice_interval: interval too small to host a ball");
    out.push_back(make_ball(lo + span / 2, radius));
    return out;
  }
  for (int j = 1; j <= s - 2; ++j) out.push_back(make_ball(lo + (2 * j - 1) * d1, d1));
  // Merge the last two slots into a single ball reaching the right endpoint.
  int left_edge = lo + (2 * (s - 2)) * d1;  // end of ball s-2's slot
  int d1p = (hi - left_edge) / 2;
  d1p = std::min(d1p, d_small);
  if (d1p >= 1) out.push_back(make_ball(left_edge + d1p, d1p));
  return out;
}

const std::vector<int>* Fop2Witness::b_row(const std::vector<int>& table) const {
  for (const auto& [t, bs] : b_for)
    if (t == table) return &bs;
  return nullptr;
}

bool verify_fop2_witness(const ThreeGraph& host, const Fop2Witness& w, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  int ell = w.ell;
  if (ell == 0) return true;  // vacuous
  if (int(w.a.size()) != ell || int(w.c.size()) != ell) return fail("role tuple sizes");
  long long nf = 1;
  for (int i = 0; i < ell * ell; ++i) nf *= ell;
  if ((long long)w.b_for.size() != nf) return fail("missing function rows");
  for (const auto& [table, bs] : w.b_for) {
    if (int(table.size()) != ell * ell || int(bs.size()) != ell) return fail("malformed row");
    for (int i = 1; i <= ell; ++i)
      for (int j = 1; j <= ell; ++j) {
        int fij = table[(i - 1) * ell + (j - 1)];
        if (fij < 1 || fij > ell) return fail("table value out of range");
        for (int m = 1; m <= ell; ++m) {
          bool e = host.has_edge(w.a[i - 1], bs[j - 1], w.c[m - 1]);
          if (w.complemented) e = !e;
          if (e != (m <= fij)) return fail("edge pattern mismatch");
        }
      }
  }
  return true;
}

Fop2Witness fop2_negation_transform(const ThreeGraph& host, const Fop2Witness& w) {
  std::string why;
  if (!verify_fop2_witness(host, w, &why))
    throw std::invalid_argument("fop2_negation_transform: invalid input witness: " + why);
  int ell = w.ell;
  Fop2Witness out;
  out.ell = std::max(0, ell - 1);
  out.complemented = !w.complemented;
  if (out.ell == 0) return out;
  int k = out.ell;
  out.a.assign(w.a.begin(), w.a.begin() + k);
  // c'_m = c_{l+1-m} (1-based): reversing the threshold axis flips the relation.
  for (int m = 1; m <= k; ++m) out.c.push_back(w.c[ell - m]);
  long long nf = 1;
  for (int i = 0; i < k * k; ++i) nf *= k;
  for (long long r = 0; r < nf; ++r) {
    std::vector<int> table = f_table_from_rank(k, r);
    // g_f(i,j) = l - f(i,j) on [k]^2, padded with 1 elsewhere.
    std::vector<int> g(ell * ell, 1);
    for (int i = 1; i <= k; ++i)
      for (int j = 1; j <= k; ++j)
        g[(i - 1) * ell + (j - 1)] = ell - table[(i - 1) * k + (j - 1)];
    const std::vector<int>* bs = w.b_row(g);
    if (!bs) throw std::invalid_argument("fop2_negation_transform: witness lacks row for g_f");
    out.b_for.push_back({table, std::vector<int>(bs->begin(), bs->begin() + k)});
  }
  if (!verify_fop2_witness(host, out, &why))
    throw std::logic_error("fop2_negation_transform: output failed re-verification: " + why);
  return out;
}

}  // namespace hr3
