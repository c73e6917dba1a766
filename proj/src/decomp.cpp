#include "hr3/decomp.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "hr3/rng.hpp"

namespace hr3 {

int Decomposition::label(int u, int v) const {
  int i = cls[u], j = cls[v];
  if (i == j) throw std::invalid_argument("label: vertices share a class");
  if (i > j) {
    std::swap(u, v);
    std::swap(i, j);
  }
  const auto& m = labels.at({i, j});
  return m[size_t(loc[u]) * classes[j].size() + loc[v]];
}

void Decomposition::set_label(int u, int v, int alpha) {
  int i = cls[u], j = cls[v];
  if (i == j) throw std::invalid_argument("set_label: vertices share a class");
  if (i > j) {
    std::swap(u, v);
    std::swap(i, j);
  }
  labels[{i, j}][size_t(loc[u]) * classes[j].size() + loc[v]] = alpha;
}

void Decomposition::rebuild_index() {
  int total = 0;
  for (const auto& c : classes) total += int(c.size());
  cls.assign(total, -1);
  loc.assign(total, -1);
  for (int c = 0; c < int(classes.size()); ++c)
    for (size_t i = 0; i < classes[c].size(); ++i) {
      cls[classes[c][i]] = c;
      loc[classes[c][i]] = int(i);
    }
  t = int(classes.size());
}

void Decomposition::validate() const {
  for (int v = 0; v < n(); ++v)
    if (cls[v] < 0) throw std::invalid_argument("decomposition does not cover all vertices");
  for (int i = 0; i < t; ++i)
    for (int j = i + 1; j < t; ++j) {
      auto it = labels.find({i, j});
      if (it == labels.end()) throw std::invalid_argument("missing edge-part matrix");
      if (it->second.size() != classes[i].size() * classes[j].size())
        throw std::invalid_argument("edge-part matrix has wrong shape");
      for (int a : it->second)
        if (a < 0 || a >= ell) throw std::invalid_argument("edge label out of range");
    }
}

bool Decomposition::is_equipartition() const {
  size_t mn = SIZE_MAX, mx = 0;
  for (const auto& c : classes) {
    mn = std::min(mn, c.size());
    mx = std::max(mx, c.size());
  }
  return mx - mn <= 1;
}

std::vector<std::pair<int, int>> Decomposition::part_edges(int i, int j, int alpha) const {
  if (i > j) std::swap(i, j);
  std::vector<std::pair<int, int>> out;
  const auto& m = labels.at({i, j});
  for (size_t a = 0; a < classes[i].size(); ++a)
    for (size_t b = 0; b < classes[j].size(); ++b)
      if (m[a * classes[j].size() + b] == alpha)
        out.emplace_back(classes[i][a], classes[j][b]);
  return out;
}

std::string write_decomposition_json(const Decomposition& d) {
  nlohmann::json j;
  j["t"] = d.t;
  j["l"] = d.ell;
  j["classes"] = d.classes;
  nlohmann::json parts = nlohmann::json::object();
  for (int i = 0; i < d.t; ++i)
    for (int k = i + 1; k < d.t; ++k) {
      nlohmann::json per_alpha = nlohmann::json::array();
      for (int a = 0; a < d.ell; ++a) {
        nlohmann::json lst = nlohmann::json::array();
        for (auto [u, v] : d.part_edges(i, k, a)) lst.push_back({u, v});
        per_alpha.push_back(lst);
      }
      parts[std::to_string(i) + "," + std::to_string(k)] = per_alpha;
    }
  j["edge_parts"] = parts;
  return j.dump();
}

Decomposition parse_decomposition_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Decomposition d;
  d.t = j.at("t").get<int>();
  d.ell = j.at("l").get<int>();
  d.classes = j.at("classes").get<std::vector<std::vector<int>>>();
  for (auto& c : d.classes) std::sort(c.begin(), c.end());
  d.rebuild_index();
  for (int i = 0; i < d.t; ++i)
    for (int k = i + 1; k < d.t; ++k)
      d.labels[{i, k}].assign(d.classes[i].size() * d.classes[k].size(), -1);
  for (auto& [key, per_alpha] : j.at("edge_parts").items()) {
    std::istringstream is(key);
    int i, k;
    char comma;
    is >> i >> comma >> k;
    (void)i;
    (void)k;
    for (int a = 0; a < int(per_alpha.size()); ++a)
      for (auto& uv : per_alpha[a]) d.set_label(uv[0].get<int>(), uv[1].get<int>(), a);
  }
  d.validate();
  return d;
}

Decomposition build_decomposition(const ThreeGraph& h, int t, int ell, BuildStrategy strategy,
                                  uint64_t seed) {
  if (t < 1 || ell < 1) throw std::invalid_argument("build_decomposition: t, l >= 1 required");
  if (t > h.n()) throw std::invalid_argument("build_decomposition: more classes than vertices");
  Decomposition d;
  d.ell = ell;
  Rng rng = Rng::substream(seed, "build_decomposition");

  if (strategy == BuildStrategy::RANDOM) {
    std::vector<int> perm(h.n());
    for (int i = 0; i < h.n(); ++i) perm[i] = i;
    rng.shuffle(perm);
    d.classes.assign(t, {});
    for (int i = 0; i < h.n(); ++i) d.classes[i % t].push_back(perm[i]);
  } else if (strategy == BuildStrategy::NATURAL) {
    if (!h.partition() || h.partition()->size() != 3)
      throw std::invalid_argument("natural strategy requires a 3-partite host");
    const auto& parts = *h.partition();
    if (t == 3) {
      d.classes = {parts[0], parts[1], parts[2]};
    } else if (t % 3 == 0) {
      int per = t / 3;
      d.classes.assign(t, {});
      for (int p = 0; p < 3; ++p)
        for (size_t i = 0; i < parts[p].size(); ++i)
          d.classes[p * per + int(i) % per].push_back(parts[p][i]);
    } else {
      throw std::invalid_argument("natural strategy requires t = 3 or a multiple of 3");
    }
    size_t covered = 0;
    for (const auto& c : d.classes) covered += c.size();
    if (int(covered) != h.n())
      throw std::invalid_argument("natural strategy requires the parts to cover V");
  } else {
    throw std::invalid_argument("GIVEN decompositions are loaded from JSON");
  }
  for (auto& c : d.classes) std::sort(c.begin(), c.end());
  d.rebuild_index();
  for (int i = 0; i < d.t; ++i)
    for (int j = i + 1; j < d.t; ++j) {
      auto& m = d.labels[{i, j}];
      m.resize(d.classes[i].size() * d.classes[j].size());
      for (auto& a : m) a = int(rng.below(ell));
    }
  d.validate();
  return d;
}

std::string triad_class_name(TriadClass c) {
  switch (c) {
    case TriadClass::DISC2_IRREGULAR: return "DISC2_IRREGULAR";
    case TriadClass::DISC3_IRREGULAR: return "DISC3_IRREGULAR";
    case TriadClass::REGULAR: return "REGULAR";
  }
  return "?";
}

namespace {

struct PairPartMeasure {
  Rat dev{0};
  Rat density{0};
  bool exact = true;
};

// disc2 of every edge part, measured once per (pair, label)
std::map<std::tuple<int, int, int>, PairPartMeasure> measure_parts(const Decomposition& d,
                                                                   int disc2_cap, uint64_t seed) {
  std::map<std::tuple<int, int, int>, PairPartMeasure> out;
  for (int i = 0; i < d.t; ++i)
    for (int j = i + 1; j < d.t; ++j) {
      int si = int(d.classes[i].size()), sj = int(d.classes[j].size());
      for (int a = 0; a < d.ell; ++a) {
        BipartiteGraph pg(si, sj);
        const auto& m = d.labels.at({i, j});
        for (int x = 0; x < si; ++x)
          for (int y = 0; y < sj; ++y)
            if (m[size_t(x) * sj + y] == a) pg.add_edge(x, y);
        PairPartMeasure pm;
        pm.density = Rat(int128(pg.edge_count()), int128((long long)si * sj));
        Disc2Options opt;
        opt.exact_cap = disc2_cap;
        opt.seed = seed + uint64_t(a);
        DeviationReport rep = disc2_deviation(pg, {}, opt);
        pm.dev = rep.deviation;
        pm.exact = rep.exact;
        out[{i, j, a}] = pm;
      }
    }
  return out;
}

// per class triple: triangle and covered-edge counts indexed by (a,b,c)
struct TriadCounts {
  std::vector<long long> tri, cov;
};

TriadCounts count_triads(const ThreeGraph& h, const Decomposition& d, int i, int j, int k) {
  int ell = d.ell;
  TriadCounts tc;
  tc.tri.assign(size_t(ell) * ell * ell, 0);
  tc.cov.assign(size_t(ell) * ell * ell, 0);
  for (int x : d.classes[i])
    for (int y : d.classes[j]) {
      int a = d.label(x, y);
      for (int z : d.classes[k]) {
        int b = d.label(x, z), c = d.label(y, z);
        size_t idx = (size_t(a) * ell + b) * ell + c;
        ++tc.tri[idx];
        if (h.has_edge(x, y, z)) ++tc.cov[idx];
      }
    }
  return tc;
}

TriadInstance triad_instance(const ThreeGraph& h, const Decomposition& d, int i, int j, int k,
                             int alpha, int beta, int gamma) {
  int si = int(d.classes[i].size()), sj = int(d.classes[j].size()),
      sk = int(d.classes[k].size());
  TriadInstance t;
  t.g = TripartiteGraph(si, sj, sk);
  for (int x = 0; x < si; ++x)
    for (int y = 0; y < sj; ++y)
      if (d.label(d.classes[i][x], d.classes[j][y]) == alpha) t.g.pair(0, 1).add_edge(x, y);
  for (int x = 0; x < si; ++x)
    for (int z = 0; z < sk; ++z)
      if (d.label(d.classes[i][x], d.classes[k][z]) == beta) t.g.pair(0, 2).add_edge(x, z);
  for (int y = 0; y < sj; ++y)
    for (int z = 0; z < sk; ++z)
      if (d.label(d.classes[j][y], d.classes[k][z]) == gamma) t.g.pair(1, 2).add_edge(y, z);
  for (int x = 0; x < si; ++x)
    for (int y = 0; y < sj; ++y) {
      if (!t.g.pair(0, 1).has_edge(x, y)) continue;
      for (int z = 0; z < sk; ++z)
        if (t.g.pair(0, 2).has_edge(x, z) && t.g.pair(1, 2).has_edge(y, z) &&
            h.has_edge(d.classes[i][x], d.classes[j][y], d.classes[k][z]))
          t.h_edges.push_back({x, y, z});
    }
  return t;
}

bool in_hom_range(const Rat& d3, const Rat& mu) {
  return d3 < mu || (Rat(1) - d3) < mu || d3 == Rat(1);
}

}  // namespace

std::vector<TriadReport> classify_triads(const ThreeGraph& h, const Decomposition& d,
                                         const ClassifyOptions& opt) {
  if (int(d.cls.size()) != h.n())
    throw std::invalid_argument("classify_triads: decomposition is not over V(h)");
  auto pm = measure_parts(d, opt.disc2_cap, opt.seed);
  std::vector<TriadReport> out;
  Rat target = Rat::of(1, d.ell);
  for (int i = 0; i < d.t; ++i)
    for (int j = i + 1; j < d.t; ++j)
      for (int k = j + 1; k < d.t; ++k) {
        TriadCounts tc = count_triads(h, d, i, j, k);
        for (int a = 0; a < d.ell; ++a)
          for (int b = 0; b < d.ell; ++b)
            for (int c = 0; c < d.ell; ++c) {
              TriadReport r;
              r.i = i;
              r.j = j;
              r.k = k;
              r.alpha = a;
              r.beta = b;
              r.gamma = c;
              PairPartMeasure ms[3] = {pm.at({i, j, a}), pm.at({i, k, b}), pm.at({j, k, c})};
              bool disc2_ok = true;
              for (int s = 0; s < 3; ++s) {
                r.pair_dev[s] = ms[s].dev;
                r.pair_density[s] = ms[s].density;
                r.pair_dev_exact[s] = ms[s].exact;
                if (ms[s].dev > opt.eps2 || (ms[s].density - target).abs() > opt.eps2)
                  disc2_ok = false;
              }
              size_t idx = (size_t(a) * d.ell + b) * d.ell + c;
              r.triangles = tc.tri[idx];
              r.covered_edges = tc.cov[idx];
              r.d3 = r.triangles ? Rat(int128(r.covered_edges), int128(r.triangles)) : Rat(0);
              r.homogeneous = in_hom_range(r.d3, opt.mu);
              if (!disc2_ok) {
                r.classification = TriadClass::DISC2_IRREGULAR;
              } else {
                TriadInstance inst = triad_instance(h, d, i, j, k, a, b, c);
                int mx = std::max({inst.size(0), inst.size(1), inst.size(2)});
                if (mx <= opt.dev23_cap) {
                  r.dev23 = dev23_sum(inst, r.d3);
                  r.dev23_available = true;
                }
                Disc23Options dopt;
                dopt.budget = opt.disc23_budget;
                dopt.seed = opt.seed ^ (uint64_t(i) << 40) ^ (uint64_t(j) << 24) ^
                            (uint64_t(k) << 8) ^ (uint64_t(a) << 4) ^ (uint64_t(b) << 2) ^
                            uint64_t(c);
                DeviationReport dr = disc23_witness_search(inst, r.d3, dopt);
                r.disc23_lower = dr.deviation;
                r.disc23_exact = dr.exact;
                r.classification = dr.deviation > opt.eps1 ? TriadClass::DISC3_IRREGULAR
                                                           : TriadClass::REGULAR;
              }
              out.push_back(std::move(r));
            }
      }
  return out;
}

HomogeneityReport homogeneity_report(const ThreeGraph& h, const Decomposition& d, const Rat& mu) {
  HomogeneityReport rep;
  long long n = h.n();
  rep.total_triples = n * (n - 1) * (n - 2) / 6;
  for (int i = 0; i < d.t; ++i)
    for (int j = i + 1; j < d.t; ++j)
      for (int k = j + 1; k < d.t; ++k) {
        TriadCounts tc = count_triads(h, d, i, j, k);
        for (size_t idx = 0; idx < tc.tri.size(); ++idx) {
          rep.covered_triples += tc.tri[idx];
          if (tc.tri[idx] == 0) continue;
          Rat d3(int128(tc.cov[idx]), int128(tc.tri[idx]));
          if (in_hom_range(d3, mu)) rep.homogeneous_triples += tc.tri[idx];
        }
      }
  rep.fraction = rep.total_triples
                     ? Rat(int128(rep.homogeneous_triples), int128(rep.total_triples))
                     : Rat(0);
  return rep;
}

std::string error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::ZERO: return "ZERO";
    case ErrorKind::BINARY: return "BINARY";
    case ErrorKind::LINEAR: return "LINEAR";
    case ErrorKind::NONE_OF_THESE: return "NONE_OF_THESE";
  }
  return "?";
}

namespace {

// exact minimum pair cover of a triple set by branch and bound
void min_cover_rec(const std::vector<std::array<int, 3>>& triples,
                   std::set<std::pair<int, int>>& current, std::vector<std::pair<int, int>>& best,
                   bool& have_best) {
  if (have_best && current.size() >= best.size()) return;
  const std::array<int, 3>* uncovered = nullptr;
  for (const auto& tr : triples) {
    bool cov = current.count({tr[0], tr[1]}) || current.count({tr[0], tr[2]}) ||
               current.count({tr[1], tr[2]});
    if (!cov) {
      uncovered = &tr;
      break;
    }
  }
  if (!uncovered) {
    best.assign(current.begin(), current.end());
    have_best = true;
    return;
  }
  const std::array<int, 3>& u = *uncovered;
  for (auto [a, b] : {std::pair{u[0], u[1]}, {u[0], u[2]}, {u[1], u[2]}}) {
    bool inserted = current.insert({a, b}).second;
    min_cover_rec(triples, current, best, have_best);
    if (inserted) current.erase({a, b});
  }
}

}  // namespace

ErrorShape error_shape(const std::vector<TriadReport>& reports, int t,
                       const ErrorBudgets& budgets) {
  ErrorShape shape;
  std::set<std::array<int, 3>> irregular;
  for (const TriadReport& r : reports)
    if (r.classification != TriadClass::REGULAR) irregular.insert({r.i, r.j, r.k});
  std::vector<std::array<int, 3>> trs(irregular.begin(), irregular.end());

  Rat t2 = budgets.eps1 * Rat((long long)t * t);
  Rat t3 = budgets.eps1 * Rat((long long)t * t * t);
  shape.binary_budget = (long long)t2.to_double();
  shape.linear_budget = (long long)t3.to_double();

  if (trs.empty()) {
    shape.kind = ErrorKind::ZERO;
    return shape;
  }

  std::vector<std::pair<int, int>> cover;
  if (t <= 8) {
    std::set<std::pair<int, int>> cur;
    bool have = false;
    min_cover_rec(trs, cur, cover, have);
    shape.cover_optimal = true;
  } else {
    std::vector<std::array<int, 3>> left = trs;
    while (!left.empty()) {
      std::map<std::pair<int, int>, int> gain;
      for (const auto& tr : left) {
        ++gain[{tr[0], tr[1]}];
        ++gain[{tr[0], tr[2]}];
        ++gain[{tr[1], tr[2]}];
      }
      std::pair<int, int> bestp = gain.begin()->first;
      int bestg = 0;
      for (auto& [pairp, g] : gain)
        if (g > bestg) {
          bestg = g;
          bestp = pairp;
        }
      cover.push_back(bestp);
      std::vector<std::array<int, 3>> next;
      for (const auto& tr : left) {
        bool cov = (std::pair{tr[0], tr[1]} == bestp) || (std::pair{tr[0], tr[2]} == bestp) ||
                   (std::pair{tr[1], tr[2]} == bestp);
        if (!cov) next.push_back(tr);
      }
      left = std::move(next);
    }
    shape.cover_optimal = false;
  }

  if (Rat((long long)cover.size()) <= t2) {
    shape.kind = ErrorKind::BINARY;
    shape.cover_pairs = cover;
    return shape;
  }
  shape.cover_pairs = cover;
  if (Rat((long long)trs.size()) <= t3) {
    shape.kind = ErrorKind::LINEAR;
    shape.cover_triples = trs;
    return shape;
  }
  shape.kind = ErrorKind::NONE_OF_THESE;
  shape.cover_triples = trs;
  return shape;
}

long long ReducedEncoding::count(ReducedState s) const {
  long long c = 0;
  for (const auto& [k, v] : entries)
    if (v.first == s) ++c;
  return c;
}

ReducedEncoding reduced_encoding(const ThreeGraph& h, const Decomposition& d, const Rat& eps,
                                 const ClassifyOptions& opt) {
  if (!(eps > Rat(0)) || !(eps < Rat::of(1, 2)))
    throw std::invalid_argument("reduced_encoding: eps in (0,1/2) required");
  ReducedEncoding enc;
  enc.eps = eps;
  enc.ell = d.ell;
  enc.t = d.t;
  auto pm = measure_parts(d, opt.disc2_cap, opt.seed);
  Rat target = Rat::of(1, d.ell);
  auto regular = [&](int i, int j, int a) {
    const PairPartMeasure& m = pm.at({std::min(i, j), std::max(i, j), a});
    return m.dev <= opt.eps2 && (m.density - target).abs() <= opt.eps2;
  };
  for (int i = 0; i < d.t; ++i)
    for (int j = 0; j < d.t; ++j)
      for (int k = j + 1; k < d.t; ++k) {
        if (j == i || k == i) continue;
        for (int a = 0; a < d.ell; ++a)
          for (int b = 0; b < d.ell; ++b)
            if (regular(i, j, a) && regular(i, k, b)) enc.corners.push_back({i, j, a, k, b});
      }
  std::map<std::array<int, 3>, TriadCounts> counts;
  for (size_t ci = 0; ci < enc.corners.size(); ++ci) {
    const Corner& c = enc.corners[ci];
    std::array<int, 3> ijk = {c.apex, c.j, c.k};
    std::sort(ijk.begin(), ijk.end());
    auto it = counts.find(ijk);
    if (it == counts.end())
      it = counts.emplace(ijk, count_triads(h, d, ijk[0], ijk[1], ijk[2])).first;
    for (int g = 0; g < d.ell; ++g) {
      auto label_for = [&](int x, int y) -> int {
        if ((x == c.apex && y == c.j) || (x == c.j && y == c.apex)) return c.alpha;
        if ((x == c.apex && y == c.k) || (x == c.k && y == c.apex)) return c.beta;
        return g;  // the (j,k) pair
      };
      int a = label_for(ijk[0], ijk[1]);
      int b = label_for(ijk[0], ijk[2]);
      int cc = label_for(ijk[1], ijk[2]);
      size_t idx = (size_t(a) * d.ell + b) * d.ell + cc;
      long long tri = it->second.tri[idx];
      long long cov = it->second.cov[idx];
      if (tri == 0) continue;  // no triangle support, no reduced relation
      Rat dens{int128(cov), int128(tri)};
      ReducedState st = ReducedState::UNDECIDED;
      if (dens >= Rat(1) - eps) st = ReducedState::E1;
      else if (dens <= eps) st = ReducedState::E0;
      enc.entries[{int(ci), g}] = {st, dens};
    }
  }
  return enc;
}

EncodingWitness find_encoding(const ReducedEncoding& enc, const std::string& pattern, int k,
                              long long budget) {
  EncodingWitness w;
  w.pattern = pattern;
  w.k = k;
  bool is_h = pattern == "H";
  if (!is_h && pattern != "U") throw std::invalid_argument("find_encoding: pattern H or U");
  int nb = is_h ? k : (1 << k);
  long long explored = 0;
  bool exhausted = true;

  auto state_of = [&](int corner, int gamma) -> std::optional<ReducedState> {
    auto it = enc.entries.find({corner, gamma});
    if (it == enc.entries.end()) return {};
    return it->second.first;
  };
  // pattern relation: does (a_u, b_v) carry an E1 requirement
  auto want_e1 = [&](int u, int v) { return is_h ? u <= v : bool((v >> u) & 1); };

  for (int j0 = 0; j0 < enc.t && w.status != SearchStatus::FOUND && exhausted; ++j0)
    for (int k0 = j0 + 1; k0 < enc.t && w.status != SearchStatus::FOUND && exhausted; ++k0) {
      std::vector<int> corner_pool;
      for (size_t ci = 0; ci < enc.corners.size(); ++ci)
        if (enc.corners[ci].j == j0 && enc.corners[ci].k == k0) corner_pool.push_back(int(ci));
      if (corner_pool.empty()) continue;
      std::vector<int> gamma(nb, -1), corner(k, -1);
      std::function<bool(int)> assign_a = [&](int u) -> bool {
        if (u == k) return true;
        for (int ci : corner_pool) {
          if (++explored > budget) {
            exhausted = false;
            return false;
          }
          bool ok = true;
          for (int v = 0; v < nb && ok; ++v) {
            auto st = state_of(ci, gamma[v]);
            if (!st || *st == ReducedState::UNDECIDED ||
                (*st == ReducedState::E1) != want_e1(u, v))
              ok = false;
          }
          if (!ok) continue;
          corner[u] = ci;
          if (assign_a(u + 1)) return true;
          corner[u] = -1;
          if (!exhausted) return false;
        }
        return false;
      };
      std::function<bool(int)> assign_b = [&](int v) -> bool {
        if (v == nb) return assign_a(0);
        for (int g = 0; g < enc.ell; ++g) {
          if (++explored > budget) {
            exhausted = false;
            return false;
          }
          gamma[v] = g;
          if (assign_b(v + 1)) return true;
          gamma[v] = -1;
          if (!exhausted) return false;
        }
        return false;
      };
      if (assign_b(0)) {
        for (int u = 0; u < k; ++u)
          for (int v = 0; v < nb; ++v) {
            auto st = state_of(corner[u], gamma[v]);
            if (!st || *st == ReducedState::UNDECIDED ||
                (*st == ReducedState::E1) != want_e1(u, v))
              throw std::logic_error("find_encoding: witness failed re-verification");
          }
        w.status = SearchStatus::FOUND;
        w.j0 = j0;
        w.k0 = k0;
        for (int u = 0; u < k; ++u) w.corner_for_a.push_back(enc.corners[corner[u]]);
        w.gamma_for_b = gamma;
      }
    }
  w.nodes_explored = explored;
  if (w.status != SearchStatus::FOUND)
    w.status = exhausted ? SearchStatus::ABSENT_CERTIFIED : SearchStatus::INCONCLUSIVE;
  return w;
}

bool verify_fop_extraction(const ThreeGraph& h, const FopExtraction& fe, int k,
                           std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (int(fe.threshold_vertices.size()) != k || int(fe.a_vertices.size()) != k)
    return fail("tuple sizes");
  long long nf = 1;
  for (int i = 0; i < k * k; ++i) nf *= k;
  if ((long long)fe.b_for.size() != nf) return fail("missing tables");
  std::set<int> bs_seen;
  for (const auto& [table, bs] : fe.b_for) {
    if (int(bs.size()) != k) return fail("row size");
    for (int b : bs)
      if (!bs_seen.insert(b).second) return fail("b images not distinct");
    for (int i = 1; i <= k; ++i)
      for (int j = 1; j <= k; ++j) {
        int fij = table[(i - 1) * k + (j - 1)];
        for (int m = 1; m <= k; ++m) {
          int a = fe.a_vertices[i - 1], b = bs[j - 1], z = fe.threshold_vertices[m - 1];
          bool e = a != b && a != z && b != z && h.has_edge(a, b, z);
          if (e != (m <= fij)) return fail("edge pattern mismatch");
        }
      }
  }
  std::set<int> da(fe.a_vertices.begin(), fe.a_vertices.end());
  std::set<int> dz(fe.threshold_vertices.begin(), fe.threshold_vertices.end());
  if (int(da.size()) != k || int(dz.size()) != k) return fail("role images not distinct");
  return true;
}

FopExtraction extract_fop2_witness(const ThreeGraph& h, const Decomposition& d,
                                   const EncodingWitness& ew, int k, long long budget) {
  FopExtraction fe;
  if (ew.status != SearchStatus::FOUND || ew.pattern != "H" || ew.k < k)
    throw std::invalid_argument("extract_fop2_witness: need a FOUND H(k) encoding witness");
  if (budget <= 0) return fe;  // INCONCLUSIVE

  long long nf = 1;
  for (int i = 0; i < k * k; ++i) nf *= k;
  long long sig_count = 1;
  for (int i = 0; i < k; ++i) sig_count *= k;
  long long need_per_sig = nf * k / sig_count;  // b slots per signature

  long long explored = 0;
  bool exhausted = true;

  std::vector<int> apex(k);
  for (int u = 0; u < k; ++u) apex[u] = ew.corner_for_a[u].apex;

  for (auto [a_class, b_class] : {std::pair{ew.j0, ew.k0}, {ew.k0, ew.j0}}) {
    const std::vector<int>& apool = d.classes[a_class];
    const std::vector<int>& bpool = d.classes[b_class];
    if (int(apool.size()) < k || (long long)bpool.size() < nf * k) continue;
    std::vector<size_t> zi(k, 0);
    bool zdone = false;
    while (!zdone && exhausted) {
      std::vector<int> zs(k);
      for (int u = 0; u < k; ++u) zs[u] = d.classes[apex[u]][zi[u]];
      if (std::set<int>(zs.begin(), zs.end()).size() == size_t(k)) {
        std::vector<size_t> ai(k);
        for (int u = 0; u < k; ++u) ai[u] = size_t(u);
        bool adone = false;
        while (!adone && exhausted) {
          if (++explored > budget) {
            exhausted = false;
            break;
          }
          std::set<size_t> dai(ai.begin(), ai.end());
          if (int(dai.size()) == k) {
            std::vector<int> as(k);
            for (int u = 0; u < k; ++u) as[u] = apool[ai[u]];
            // bucket b-candidates by row-threshold signature (tau_1..tau_k)
            std::map<std::vector<int>, std::vector<int>> buckets;
            for (int y : bpool) {
              std::vector<int> sig(k, 0);
              bool valid = true;
              for (int i = 0; i < k && valid; ++i) {
                int tau = 0;
                for (int m = 0; m < k; ++m) {
                  bool e = as[i] != y && as[i] != zs[m] && y != zs[m] &&
                           h.has_edge(as[i], y, zs[m]);
                  if (e) {
                    if (m != tau) {
                      valid = false;
                      break;
                    }
                    ++tau;
                  }
                }
                if (tau < 1) valid = false;
                sig[i] = tau;
              }
              if (valid) buckets[sig].push_back(y);
            }
            bool enough = (long long)buckets.size() == sig_count;
            if (enough)
              for (const auto& [sig, ys] : buckets)
                if ((long long)ys.size() < need_per_sig) enough = false;
            if (enough) {
              std::map<std::vector<int>, size_t> next;
              FopExtraction out;
              out.threshold_vertices = zs;
              out.a_vertices = as;
              bool ok = true;
              for (long long r = 0; r < nf && ok; ++r) {
                std::vector<int> table = f_table_from_rank(k, r);
                std::vector<int> row;
                for (int j = 1; j <= k && ok; ++j) {
                  std::vector<int> sig(k);
                  for (int i = 1; i <= k; ++i) sig[i - 1] = table[(i - 1) * k + (j - 1)];
                  auto& pos = next[sig];
                  if (pos >= buckets[sig].size()) {
                    ok = false;
                    break;
                  }
                  row.push_back(buckets[sig][pos++]);
                }
                if (ok) out.b_for.push_back({table, row});
              }
              std::string why;
              if (ok && verify_fop_extraction(h, out, k, &why)) {
                out.status = SearchStatus::FOUND;
                out.nodes_explored = explored;
                return out;
              }
            }
          }
          bool more = false;
          for (int pos = k - 1; pos >= 0 && !more; --pos) {
            if (++ai[pos] < apool.size()) more = true;
            else ai[pos] = 0;
          }
          if (!more) adone = true;
        }
      }
      bool more = false;
      for (int pos = k - 1; pos >= 0 && !more; --pos) {
        if (++zi[pos] < d.classes[apex[pos]].size()) more = true;
        else zi[pos] = 0;
      }
      if (!more) zdone = true;
    }
    if (!exhausted) break;
  }
  fe.nodes_explored = explored;
  fe.status = exhausted ? SearchStatus::ABSENT_CERTIFIED : SearchStatus::INCONCLUSIVE;
  return fe;
}

Decomposition fix_disc2_irregular(const ThreeGraph& h, const Decomposition& d,
                                  const Rat& eps2_target, uint64_t seed, FixReport* report,
                                  int disc2_cap) {
  (void)h;
  Decomposition out = d;
  Rng rng = Rng::substream(seed, "fix_disc2");
  Rat target_density = Rat::of(1, d.ell);
  FixReport rep;
  for (int i = 0; i < d.t; ++i)
    for (int j = i + 1; j < d.t; ++j) {
      int si = int(d.classes[i].size()), sj = int(d.classes[j].size());
      auto measure_one = [&](const Decomposition& dd, int a) {
        BipartiteGraph pg(si, sj);
        const auto& m = dd.labels.at({i, j});
        for (int x = 0; x < si; ++x)
          for (int y = 0; y < sj; ++y)
            if (m[size_t(x) * sj + y] == a) pg.add_edge(x, y);
        Disc2Options opt;
        opt.exact_cap = disc2_cap;
        DeviationReport r = disc2_deviation(pg, {}, opt);
        Rat dens(int128(pg.edge_count()), int128((long long)si * sj));
        return std::pair<Rat, Rat>(r.deviation, dens);
      };
      std::vector<int> failing;
      for (int a = 0; a < d.ell; ++a) {
        auto [dev, dens] = measure_one(d, a);
        if (dev > eps2_target || (dens - target_density).abs() > eps2_target)
          failing.push_back(a);
      }
      rep.failing_before += int(failing.size());
      if (failing.empty()) continue;
      std::vector<char> is_failing(d.ell, 0);
      for (int a : failing) is_failing[a] = 1;
      auto& m = out.labels[{i, j}];
      for (size_t idx = 0; idx < m.size(); ++idx)
        if (is_failing[m[idx]]) m[idx] = failing[rng.below(failing.size())];
      for (int a : failing) {
        auto [dev, dens] = measure_one(out, a);
        if (dev > eps2_target || (dens - target_density).abs() > eps2_target) {
          ++rep.failing_after;
          rep.residual_failures.push_back({{i, j}, a});
        }
      }
    }
  if (report) *report = rep;
  return out;
}

namespace {

Rat disc2_of_pairs(const std::vector<std::pair<int, int>>& pairs,
                   const std::vector<int>& left_class, const std::vector<int>& right_class,
                   int disc2_cap) {
  std::map<int, int> lidx, ridx;
  for (size_t i = 0; i < left_class.size(); ++i) lidx[left_class[i]] = int(i);
  for (size_t i = 0; i < right_class.size(); ++i) ridx[right_class[i]] = int(i);
  BipartiteGraph g(int(left_class.size()), int(right_class.size()));
  for (auto [u, v] : pairs) g.add_edge(lidx.at(u), ridx.at(v));
  Disc2Options opt;
  opt.exact_cap = disc2_cap;
  return disc2_deviation(g, {}, opt).deviation;
}

}  // namespace

Decomposition common_refinement(const Decomposition& p, const Decomposition& q,
                                RefinementReport* report, int disc2_cap) {
  if (p.n() != q.n()) throw std::invalid_argument("common_refinement: different vertex sets");
  int n = p.n();
  std::map<std::pair<int, int>, std::vector<int>> atoms;
  for (int v = 0; v < n; ++v) atoms[{p.cls[v], q.cls[v]}].push_back(v);
  int tprime = int(atoms.size());
  Decomposition r;
  r.ell = p.ell * q.ell;
  r.classes.reserve(tprime);
  for (auto& [key, vs] : atoms) r.classes.push_back(vs);

  // rebalance to an equipartition: lowest-index surplus vertices move first
  int base = n / tprime, extra = n % tprime;
  auto target = [&](int c) { return base + (c < extra ? 1 : 0); };
  std::vector<int> moved;
  for (int c = 0; c < tprime; ++c)
    while (int(r.classes[c].size()) > target(c)) {
      moved.push_back(r.classes[c].front());
      r.classes[c].erase(r.classes[c].begin());
    }
  std::sort(moved.begin(), moved.end());
  size_t mi = 0;
  for (int c = 0; c < tprime && mi < moved.size(); ++c)
    while (int(r.classes[c].size()) < target(c) && mi < moved.size())
      r.classes[c].push_back(moved[mi++]);
  for (auto& c : r.classes) std::sort(c.begin(), c.end());
  r.rebuild_index();

  RefinementReport rep;
  for (int c = 0; c < r.t; ++c) {
    for (const Decomposition* host : {&p, &q}) {
      std::map<int, int> inside;
      for (int v : r.classes[c]) ++inside[host->cls[v]];
      int best = 0;
      for (auto& [hc, cnt] : inside) best = std::max(best, cnt);
      Rat defect(int128(int(r.classes[c].size()) - best), int128(r.classes[c].size()));
      if (defect > rep.max_class_defect) rep.max_class_defect = defect;
    }
  }

  // combined (p,q) labels where both are defined, deterministic filler
  // otherwise; filler-dominated class pairs enter Sigma
  for (int i = 0; i < r.t; ++i)
    for (int j = i + 1; j < r.t; ++j) {
      auto& m = r.labels[{i, j}];
      size_t sj = r.classes[j].size();
      m.assign(r.classes[i].size() * sj, 0);
      long long fill = 0, total = 0;
      for (size_t a = 0; a < r.classes[i].size(); ++a)
        for (size_t b = 0; b < sj; ++b) {
          int u = r.classes[i][a], v = r.classes[j][b];
          ++total;
          if (p.cls[u] != p.cls[v] && q.cls[u] != q.cls[v]) {
            m[a * sj + b] = p.label(u, v) * q.ell + q.label(u, v);
          } else {
            m[a * sj + b] = int((a * sj + b) % size_t(r.ell));
            ++fill;
          }
        }
      if (fill * 2 > total) rep.sigma.push_back({i, j});
    }
  r.validate();

  std::set<std::pair<int, int>> sigma_set(rep.sigma.begin(), rep.sigma.end());
  for (int i = 0; i < r.t; ++i)
    for (int j = i + 1; j < r.t; ++j) {
      if (sigma_set.count({i, j})) continue;
      for (int a = 0; a < r.ell; ++a) {
        auto edges = r.part_edges(i, j, a);
        if (edges.empty()) continue;
        long long defect = 0;
        std::vector<std::pair<int, int>> diff;
        for (auto [u, v] : edges) {
          bool proper = p.cls[u] != p.cls[v] && q.cls[u] != q.cls[v] &&
                        p.label(u, v) * q.ell + q.label(u, v) == a;
          if (!proper) {
            ++defect;
            diff.emplace_back(u, v);
          }
        }
        Rat frac(int128(defect), int128(edges.size()));
        if (frac > rep.max_part_defect) rep.max_part_defect = frac;
        if (!diff.empty()) {
          Rat dv = disc2_of_pairs(diff, r.classes[i], r.classes[j], disc2_cap);
          if (dv > rep.max_diff_disc2) rep.max_diff_disc2 = dv;
        }
      }
    }
  if (report) *report = rep;
  return r;
}

VerifyRefinementResult verify_approx_refinement(const Decomposition& r, const Decomposition& q,
                                                const Rat& eps1, const Rat& eps2, int disc2_cap) {
  VerifyRefinementResult res;
  if (r.n() != q.n()) throw std::invalid_argument("verify_approx_refinement: vertex sets differ");
  res.pass = true;
  for (int c = 0; c < r.t; ++c) {
    std::map<int, int> inside;
    for (int v : r.classes[c]) ++inside[q.cls[v]];
    int best = 0;
    for (auto& [hc, cnt] : inside) best = std::max(best, cnt);
    Rat defect(int128(int(r.classes[c].size()) - best), int128(r.classes[c].size()));
    if (defect > res.report.max_class_defect) res.report.max_class_defect = defect;
    if (!(defect < eps1) && defect != Rat(0)) {
      res.pass = false;
      res.report.defects.push_back({c, -1, -1, -1, "class containment defect at or above eps1"});
    }
  }
  std::set<std::pair<int, int>> sigma;
  for (int i = 0; i < r.t; ++i)
    for (int j = i + 1; j < r.t; ++j) {
      bool pair_ok = true;
      for (int a = 0; a < r.ell && pair_ok; ++a) {
        auto edges = r.part_edges(i, j, a);
        if (edges.empty()) continue;
        std::map<std::pair<std::pair<int, int>, int>, long long> overlap;
        for (auto [u, v] : edges) {
          if (q.cls[u] == q.cls[v]) continue;
          int qi = q.cls[u], qj = q.cls[v];
          int uu = u, vv = v;
          if (qi > qj) {
            std::swap(qi, qj);
            std::swap(uu, vv);
          }
          ++overlap[{{qi, qj}, q.label(uu, vv)}];
        }
        long long best = 0;
        std::pair<std::pair<int, int>, int> best_key{{-1, -1}, -1};
        for (auto& [key, cnt] : overlap)
          if (cnt > best) {
            best = cnt;
            best_key = key;
          }
        long long defect_count = (long long)edges.size() - best;
        Rat defect(int128(defect_count), int128(edges.size()));
        if (defect > res.report.max_part_defect) res.report.max_part_defect = defect;
        if (defect > eps1) {
          pair_ok = false;
          break;
        }
        if (defect_count > 0) {
          std::vector<std::pair<int, int>> diff;
          for (auto [u, v] : edges) {
            bool in_best = false;
            if (q.cls[u] != q.cls[v]) {
              int qi = q.cls[u], qj = q.cls[v];
              int uu = u, vv = v;
              if (qi > qj) {
                std::swap(qi, qj);
                std::swap(uu, vv);
              }
              in_best = std::pair{std::pair{qi, qj}, q.label(uu, vv)} == best_key;
            }
            if (!in_best) diff.emplace_back(u, v);
          }
          Rat dv = disc2_of_pairs(diff, r.classes[i], r.classes[j], disc2_cap);
          if (dv > res.report.max_diff_disc2) res.report.max_diff_disc2 = dv;
          if (dv > eps2) {
            pair_ok = false;
            break;
          }
        }
      }
      if (!pair_ok) sigma.insert({i, j});
    }
  res.report.sigma.assign(sigma.begin(), sigma.end());
  Rat budget = eps1 * Rat((long long)r.t * (r.t - 1) / 2);
  if (Rat((long long)sigma.size()) > budget) {
    res.pass = false;
    res.report.defects.push_back({-1, -1, -1, -1, "Sigma exceeds the eps1 budget"});
  }
  return res;
}

}  // namespace hr3
