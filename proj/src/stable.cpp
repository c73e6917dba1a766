#include "hr3/stable.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "hr3/rng.hpp"

namespace hr3 {

Schedule geometric_schedule(const Rat& ratio) {
  if (!(ratio > Rat(0)) || ratio > Rat(1))
    throw std::invalid_argument("geometric_schedule: ratio in (0,1] required");
  return [ratio](int i) {
    Rat f(1);
    for (int s = 0; s < i && s < 90; ++s) f = f * ratio;
    return f;
  };
}

GoodnessLevel epsilon_good_level(const BipartiteGraph& g, const std::vector<int>& x) {
  std::vector<int> nodes(g.left_size());
  for (int u = 0; u < g.left_size(); ++u) nodes[u] = u;
  return epsilon_good_level(g, x, nodes);
}

GoodnessLevel epsilon_good_level(const BipartiteGraph& g, const std::vector<int>& x,
                                 const std::vector<int>& nodes) {
  if (x.empty()) throw std::invalid_argument("epsilon_good_level: X nonempty required");
  Bitset xs = bitset_of(g.right_size(), x);
  int total = int(x.size());
  GoodnessLevel best;
  best.level = Rat(0);
  for (int u : nodes) {
    int on = g.row(u).and_count(xs);
    int side = std::min(on, total - on);
    Rat lvl{int128(side), int128(total)};
    if (lvl > best.level || best.worst_vertex < 0) {
      best.level = lvl;
      best.worst_vertex = u;
    }
  }
  return best;
}

GoodPartition goodsets1_partition(const BipartiteGraph& g, const std::vector<int>& w, int d_cap,
                                  const Schedule& f, const Goodsets1Options& opt) {
  GoodPartition gp;
  Bitset z = bitset_of(g.right_size(), w);

  auto is_zero_good = [&](const Bitset& s) {
    int total = s.count();
    if (total <= 1) return true;
    for (int u = 0; u < g.left_size(); ++u) {
      int on = g.row(u).and_count(s);
      if (on != 0 && on != total) return false;
    }
    return true;
  };

  for (int alpha = 1;; ++alpha) {
    if (!z.any() || is_zero_good(z)) {
      gp.stages = alpha - 1;
      break;
    }
    if (alpha > opt.max_stages) {
      gp.stage_cap_hit = true;
      gp.stages = alpha - 1;
      break;
    }
    Rat fa = f(alpha);
    if (!(fa > Rat(0)) || fa > Rat(1)) {
      gp.ok = false;
      gp.error = "schedule value outside (0,1]";
      gp.error_stage = alpha;
      break;
    }
    int j = 0;
    while (true) {
      int total = z.count();
      if (total == 0) break;
      // lowest live node: min side at least f(alpha)|Z|
      int live = -1;
      for (int u = 0; u < g.left_size(); ++u) {
        int on = g.row(u).and_count(z);
        int side = std::min(on, total - on);
        if (Rat(side) >= fa * Rat(total)) {
          live = u;
          break;
        }
      }
      if (live < 0) break;  // stage done; Z is f(alpha)-good by construction
      Rat size_rat = fa * Rat(total);
      long long carve = (long long)(size_rat.num() / size_rat.den());
      if (carve < 1) {
        gp.ok = false;
        gp.error = "carve size floors to zero at a live stage";
        gp.error_stage = alpha;
        gp.residue = z.to_vector();
        if (!gp.residue.empty()) gp.residue_goodness = epsilon_good_level(g, gp.residue).level;
        return gp;
      }
      Bitset on_side = g.row(live) & z;
      Bitset off_side = z.andnot(g.row(live));
      TreeRankResult r_on = tree_rank(g, on_side.to_vector(), d_cap);
      TreeRankResult r_off = tree_rank(g, off_side.to_vector(), d_cap);
      // side of smaller capped rank; ties go to the neighbor side
      bool take_on = r_on.rank <= r_off.rank;
      const Bitset& side = take_on ? on_side : off_side;
      const TreeRankResult& side_rank = take_on ? r_on : r_off;
      CarvedSet cs;
      cs.stage = alpha;
      cs.index = ++j;
      cs.f_param = fa;
      for (int v = side.first(); v >= 0 && (long long)cs.vertices.size() < carve;
           v = side.next(v))
        cs.vertices.push_back(v);  // lowest indices within the chosen side
      for (int v : cs.vertices) z.reset(v);
      cs.goodness = epsilon_good_level(g, cs.vertices).level;
      cs.rank = side_rank.rank;
      cs.rank_capped = side_rank.capped;
      gp.sets.push_back(std::move(cs));
    }
  }
  gp.residue = z.to_vector();
  if (!gp.residue.empty()) gp.residue_goodness = epsilon_good_level(g, gp.residue).level;
  return gp;
}

StrongPartition goodstrong_partition(const BipartiteGraph& g,
                                     const std::vector<std::vector<int>>& parts, int d,
                                     const Rat& eps, const Schedule& f,
                                     const GoodstrongOptions& opt) {
  StrongPartition sp;
  sp.overflow.assign(parts.size(), {});
  long long total_w = 0;
  for (const auto& p : parts) total_w += (long long)p.size();

  for (size_t u = 0; u < parts.size(); ++u) {
    if (parts[u].empty()) continue;
    TreeRankResult r = tree_rank(g, parts[u], std::min(d + 1, opt.rank_cap + 1));
    if (r.rank > d) {
      sp.ok = false;
      sp.error = "part " + std::to_string(u) + " has tree rank above d";
      return sp;
    }
  }

  Goodsets1Options g1;
  g1.max_stages = opt.max_stages;
  g1.rank_cap = opt.rank_cap;

  std::function<void(int, const std::vector<int>&, int)> process =
      [&](int part_idx, const std::vector<int>& vs, int d_rem) {
        if (vs.empty()) return;
        if (d_rem <= 0) {
          StrongSet ss;
          ss.part = part_idx;
          ss.vertices = vs;
          ss.goodness = epsilon_good_level(g, vs).level;
          sp.sets.push_back(std::move(ss));
          return;
        }
        GoodPartition gp = goodsets1_partition(g, vs, d_rem, f, g1);
        if (!gp.ok) {
          // keep the carved progress; the uncertified residue overflows
          auto& of = sp.overflow[part_idx];
          of.insert(of.end(), gp.residue.begin(), gp.residue.end());
          for (const CarvedSet& cs : gp.sets) process(part_idx, cs.vertices, d_rem - 1);
          return;
        }
        if (!gp.residue.empty()) {
          StrongSet ss;
          ss.part = part_idx;
          ss.vertices = gp.residue;
          ss.goodness = gp.residue_goodness;
          ss.from_residue = true;
          sp.sets.push_back(std::move(ss));
        }
        for (const CarvedSet& cs : gp.sets) process(part_idx, cs.vertices, d_rem - 1);
      };
  for (size_t u = 0; u < parts.size(); ++u) process(int(u), parts[u], d);

  if (opt.equitable) {
    int nprime = opt.equitable_size;
    if (nprime <= 0) {
      size_t mn = SIZE_MAX;
      for (const StrongSet& s : sp.sets) mn = std::min(mn, s.vertices.size());
      nprime = mn == SIZE_MAX ? 1 : int(mn);
    }
    std::vector<StrongSet> chopped;
    for (StrongSet& s : sp.sets) {
      std::vector<int> vs = s.vertices;
      std::sort(vs.begin(), vs.end());
      size_t at = 0;
      while (at + size_t(nprime) <= vs.size()) {
        StrongSet c;
        c.part = s.part;
        c.from_residue = s.from_residue;
        c.vertices.assign(vs.begin() + at, vs.begin() + at + nprime);
        c.goodness = epsilon_good_level(g, c.vertices).level;
        chopped.push_back(std::move(c));
        at += size_t(nprime);
      }
      sp.overflow[s.part].insert(sp.overflow[s.part].end(), vs.begin() + at, vs.end());
    }
    sp.sets = std::move(chopped);
  }

  std::map<int, int> per_part;
  for (const StrongSet& s : sp.sets) {
    ++per_part[s.part];
    if (s.goodness > sp.worst_goodness) sp.worst_goodness = s.goodness;
  }
  for (auto& [u, c] : per_part) sp.m_prime = std::max(sp.m_prime, c);
  sp.f_target = sp.m_prime > 0 ? f(sp.m_prime) : Rat(1);

  long long omega_mass = 0;
  for (size_t u = 0; u < parts.size(); ++u) {
    if (parts[u].empty()) continue;
    if (Rat((long long)sp.overflow[u].size()) > eps * Rat((long long)parts[u].size())) {
      sp.omega.push_back(int(u));
      omega_mass += (long long)parts[u].size();
    }
  }
  sp.omega_mass = total_w ? Rat(int128(omega_mass), int128(total_w)) : Rat(0);
  return sp;
}

namespace {

BipartiteGraph link_bipartite(const ThreeGraph& h, int a) {
  BipartiteGraph g(h.n(), h.n());
  for (const Triple& e : h.edges()) {
    if (e[0] == a) {
      g.add_edge(e[1], e[2]);
      g.add_edge(e[2], e[1]);
    } else if (e[1] == a) {
      g.add_edge(e[0], e[2]);
      g.add_edge(e[2], e[0]);
    } else if (e[2] == a) {
      g.add_edge(e[0], e[1]);
      g.add_edge(e[1], e[0]);
    }
  }
  return g;
}

}  // namespace

FiberwisePartition fiberwise_good_partition(const ThreeGraph& h,
                                            const std::vector<std::pair<int, int>>& alpha, int d,
                                            const Rat& eps, const Schedule& f,
                                            const FiberwiseOptions& opt) {
  (void)eps;
  FiberwisePartition fp;
  std::map<int, BipartiteGraph> links;
  auto link_of = [&](int a) -> const BipartiteGraph& {
    auto it = links.find(a);
    if (it == links.end()) it = links.emplace(a, link_bipartite(h, a)).first;
    return it->second;
  };

  Goodsets1Options g1;
  g1.max_stages = opt.max_stages;
  g1.rank_cap = opt.rank_cap;

  std::function<void(const std::vector<std::pair<int, int>>&, int, std::vector<int>)> rec =
      [&](const std::vector<std::pair<int, int>>& pairs, int d_rem, std::vector<int> path) {
        if (pairs.empty()) return;
        if (int(fp.pieces.size()) >= opt.max_pieces) {
          fp.overflow.insert(fp.overflow.end(), pairs.begin(), pairs.end());
          return;
        }
        if (d_rem <= 0) {
          FiberPiece piece;
          piece.path = std::move(path);
          piece.pairs = pairs;
          fp.pieces.push_back(std::move(piece));
          return;
        }
        std::map<int, std::vector<int>> fibers;
        for (auto [a, b] : pairs) fibers[a].push_back(b);
        std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> stage_groups;
        std::vector<std::pair<int, int>> residue_pairs;
        for (auto& [a, bs] : fibers) {
          GoodPartition gp = goodsets1_partition(link_of(a), bs, d_rem, f, g1);
          for (const CarvedSet& cs : gp.sets)
            for (int b : cs.vertices) stage_groups[{cs.stage, cs.index}].emplace_back(a, b);
          if (!gp.ok) {
            // carved progress is kept; the uncertified residue overflows
            for (int b : gp.residue) fp.overflow.emplace_back(a, b);
            continue;
          }
          for (int b : gp.residue) residue_pairs.emplace_back(a, b);
        }
        if (!residue_pairs.empty()) {
          FiberPiece piece;
          piece.path = path;
          piece.path.push_back(0);  // marks the per-fiber residue
          piece.pairs = std::move(residue_pairs);
          fp.pieces.push_back(std::move(piece));
        }
        for (auto& [key, grp] : stage_groups) {
          std::vector<int> next_path = path;
          next_path.push_back(key.first * 1000 + key.second);
          rec(grp, d_rem - 1, std::move(next_path));
        }
      };
  rec(alpha, d, {});

  // post-hoc: exact goodness of each piece's fibers, sampled above the cap
  Rng rng = Rng::substream(opt.seed, "fiberwise_verify");
  for (FiberPiece& piece : fp.pieces) {
    std::map<int, std::vector<int>> fibers;
    for (auto [a, b] : piece.pairs) fibers[a].push_back(b);
    std::vector<int> as;
    for (auto& [a, bs] : fibers) as.push_back(a);
    if (opt.verify_fibers > 0 && int(as.size()) > opt.verify_fibers) {
      rng.shuffle(as);
      as.resize(opt.verify_fibers);
    }
    for (int a : as) {
      GoodnessLevel lvl = epsilon_good_level(link_of(a), fibers[a]);
      ++fp.fibers_verified;
      if (lvl.level > piece.worst_goodness) {
        piece.worst_goodness = lvl.level;
        piece.worst_fiber = a;
      }
    }
  }
  long long total = (long long)alpha.size();
  fp.overflow_fraction =
      total ? Rat(int128((long long)fp.overflow.size()), int128(total)) : Rat(0);
  return fp;
}

SymmetryResult symmetry_classify(const BipartiteGraph& g, const std::vector<int>& u_prime,
                                 const std::vector<int>& w_prime, const Rat& eps) {
  if (!(eps < Rat::of(1, 4)))
    throw std::invalid_argument("symmetry_classify: eps < 1/4 required");
  SymmetryResult res;
  long long m = g.left_size(), n = g.right_size();
  if (m == 0 || n == 0) {
    res.detail = "empty side";
    return res;
  }
  Rat one_minus = Rat(1) - eps;
  if (Rat((long long)u_prime.size()) < one_minus * Rat(m)) {
    res.detail = "|U'| below (1-eps)|U|";
    return res;
  }
  if (Rat((long long)w_prime.size()) < one_minus * Rat(n)) {
    res.detail = "|W'| below (1-eps)|W|";
    return res;
  }
  for (int u : u_prime) {
    long long on = g.row(u).count();
    long long mx = std::max(on, n - on);
    if (Rat(mx) < one_minus * Rat(n)) {
      res.detail = "node in U' is not eps-homogeneous";
      res.witness_vertex = u;
      return res;
    }
  }
  for (int w : w_prime) {
    long long on = g.col(w).count();
    long long mx = std::max(on, m - on);
    if (Rat(mx) < one_minus * Rat(m)) {
      res.detail = "node in W' is not eps-homogeneous";
      res.witness_vertex = w;
      return res;
    }
  }
  res.density = Rat(int128(g.edge_count()), int128(m * n));
  // density < 2 sqrt(eps)  <=>  density^2 < 4 eps (both sides nonnegative)
  if (res.density * res.density < Rat(4) * eps) {
    res.cls = SymmetryClass::DENSITY_LOW;
  } else if ((Rat(1) - res.density) * (Rat(1) - res.density) < Rat(4) * eps) {
    res.cls = SymmetryClass::DENSITY_HIGH;
  } else {
    res.cls = SymmetryClass::HYPOTHESES_FAIL;
    res.detail =
        "hypotheses hold but the density misses both intervals (instance below the lemma scale)";
  }
  return res;
}

RemovalPartition tree_removal_partition(const BipartiteGraph& g, const std::vector<int>& u,
                                        const std::vector<int>& w, int d, const Rat& mu,
                                        const Rat& eps, const RemovalOptions& opt) {
  if (d < 1) throw std::invalid_argument("tree_removal_partition: d >= 1 required");
  RemovalPartition rp;
  std::set<int> removed;
  long long wsize = (long long)w.size(), usize = (long long)u.size();
  int stages_left = opt.max_stages;

  std::function<void(std::vector<int>, int)> rec = [&](std::vector<int> leaves, int dd) {
    if (leaves.empty()) return;
    if (dd == 1) {
      // mu-splitting nodes at the base level are removed
      Bitset ls = bitset_of(g.right_size(), leaves);
      int total = int(leaves.size());
      for (int un : u) {
        int on = g.row(un).and_count(ls);
        if (Rat(std::min(on, total - on)) >= mu * Rat(total)) removed.insert(un);
      }
      rp.parts.push_back({std::move(leaves), Rat(0)});
      return;
    }
    Bitset z = bitset_of(g.right_size(), leaves);
    while (stages_left-- > 0) {
      int total = z.count();
      if (total == 0) break;
      if (Rat(total) <= (eps * eps) * Rat(wsize)) break;
      std::vector<int> live;
      for (int un : u) {
        int on = g.row(un).and_count(z);
        if (Rat(std::min(on, total - on)) >= mu * Rat(total)) live.push_back(un);
      }
      if (Rat((long long)live.size()) <= mu * Rat(usize)) break;
      int pick = live.front();
      Bitset on_side = g.row(pick) & z;
      Bitset off_side = z.andnot(g.row(pick));
      DTreeCount c_on =
          count_d_trees(g, u, on_side.to_vector(), d - 1, opt.seed, opt.dtree_samples);
      DTreeCount c_off =
          count_d_trees(g, u, off_side.to_vector(), d - 1, opt.seed, opt.dtree_samples);
      const Bitset& side = c_on.value <= c_off.value ? on_side : off_side;
      std::vector<int> side_vs = side.to_vector();
      for (int v : side_vs) z.reset(v);
      rec(std::move(side_vs), dd - 1);
    }
    for (int v = z.first(); v >= 0; v = z.next(v)) rp.w0.push_back(v);
  };
  rec(w, d);

  rp.removed_nodes.assign(removed.begin(), removed.end());
  for (int un : u)
    if (!removed.count(un)) rp.kept_nodes.push_back(un);
  rp.u_removed_fraction =
      usize ? Rat(int128((long long)rp.removed_nodes.size()), int128(usize)) : Rat(0);
  rp.w0_fraction = wsize ? Rat(int128((long long)rp.w0.size()), int128(wsize)) : Rat(0);
  for (RemovalPart& part : rp.parts) {
    if (rp.kept_nodes.empty() || part.vertices.empty()) continue;
    part.goodness = epsilon_good_level(g, part.vertices, rp.kept_nodes).level;
    if (part.goodness > rp.achieved_mu) rp.achieved_mu = part.goodness;
  }
  rp.mu_target_met = rp.u_removed_fraction <= mu && rp.achieved_mu <= mu;
  rp.eps_target_met = rp.w0_fraction <= eps;
  return rp;
}

SignatureCleanup stable_removal_cleanup(const BipartiteGraph& g, const RemovalPartition& rp,
                                        int d, const Rat& delta, const Rat& min_class_fraction) {
  SignatureCleanup sc;
  sc.rebuilt = BipartiteGraph(g.left_size(), g.right_size());
  sc.w0 = rp.w0;
  int m = int(rp.parts.size());

  // majority-side signatures; a (node, part) with both sides large fails the
  // delta-goodness precondition for that part
  std::vector<Bitset> part_sets;
  for (const RemovalPart& p : rp.parts)
    part_sets.push_back(bitset_of(g.right_size(), p.vertices));
  std::map<std::vector<char>, std::vector<int>> classes;
  std::set<int> failing;
  for (int un : rp.kept_nodes) {
    std::vector<char> sig(m, 0);
    for (int pi = 0; pi < m; ++pi) {
      int total = int(rp.parts[pi].vertices.size());
      if (total == 0) continue;
      int on = g.row(un).and_count(part_sets[pi]);
      if (Rat(on) >= (Rat(1) - delta) * Rat(total)) sig[pi] = 1;
      else if (Rat(total - on) >= (Rat(1) - delta) * Rat(total)) sig[pi] = 0;
      else failing.insert(pi);
    }
    classes[sig].push_back(un);
  }
  sc.failing_parts.assign(failing.begin(), failing.end());
  if (!sc.failing_parts.empty()) {
    sc.ok = false;
    sc.error = "some parts are not delta-good for every kept node";
    return sc;
  }

  long long kept_total = (long long)rp.kept_nodes.size();
  for (auto& [sig, nodes] : classes) {
    if (Rat((long long)nodes.size()) < min_class_fraction * Rat(kept_total)) {
      sc.u0.insert(sc.u0.end(), nodes.begin(), nodes.end());
    } else {
      sc.signature_classes.push_back(nodes);
      sc.signatures.push_back(sig);
    }
  }
  std::sort(sc.u0.begin(), sc.u0.end());

  for (size_t ci = 0; ci < sc.signature_classes.size(); ++ci)
    for (int un : sc.signature_classes[ci])
      for (int pi = 0; pi < m; ++pi)
        if (sc.signatures[ci][pi])
          for (int v : rp.parts[pi].vertices) sc.rebuilt.add_edge(un, v);

  std::vector<int> wstar;
  for (const RemovalPart& p : rp.parts)
    wstar.insert(wstar.end(), p.vertices.begin(), p.vertices.end());
  Bitset wstar_set = bitset_of(g.right_size(), wstar);
  long long wstar_size = (long long)wstar.size();
  for (size_t ci = 0; ci < sc.signature_classes.size(); ++ci)
    for (int un : sc.signature_classes[ci]) {
      long long diff = 0;
      for (int v = wstar_set.first(); v >= 0; v = wstar_set.next(v))
        if (g.has_edge(un, v) != sc.rebuilt.has_edge(un, v)) ++diff;
      Rat defect = wstar_size ? Rat(int128(diff), int128(wstar_size)) : Rat(0);
      if (defect > sc.max_vertex_defect) sc.max_vertex_defect = defect;
    }

  std::vector<int> ukept;
  for (const auto& cls : sc.signature_classes) ukept.insert(ukept.end(), cls.begin(), cls.end());
  if (!wstar.empty() && !ukept.empty()) {
    DTreeCount dt = count_d_trees(sc.rebuilt, ukept, wstar, d);
    sc.residual_d_trees = dt.value;
    sc.residual_exact = dt.exact;
  }
  return sc;
}

}  // namespace hr3
