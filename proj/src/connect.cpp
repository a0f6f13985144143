#include "tdg/connect.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "tdg/omega.hpp"
#include "tdg/walk.hpp"

namespace tdg {

std::string connect_kind_str(ConnectKind k) {
  switch (k) {
    case ConnectKind::Strong:
      return "strong";
    case ConnectKind::Unilateral:
      return "unilateral";
    case ConnectKind::Weak:
      return "weak";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Periodic reachability

namespace {

struct PatternGraph {
  std::vector<std::string> nodes;
  struct E {
    int tn, toff, hn, hoff;
  };
  std::vector<E> edges;

  static PatternGraph from(const CellTemplate& t) {
    PatternGraph g;
    g.nodes = t.nodes;
    std::sort(g.nodes.begin(), g.nodes.end());
    for (const auto& a : t.arcs)
      g.edges.push_back({g.index(a.tail_node), a.tail_off,
                         g.index(a.head_node), a.head_off});
    return g;
  }
  int index(const std::string& n) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), n);
    if (it == nodes.end() || *it != n)
      throw DomainError("UnknownVertex", "template node " + n);
    return static_cast<int>(it - nodes.begin());
  }
  PatternGraph symmetrized() const {
    PatternGraph g = *this;
    auto base = g.edges;
    for (const auto& e : base) g.edges.push_back({e.hn, e.hoff, e.tn, e.toff});
    return g;
  }
};

// Finite window over cells [0, cells): BFS adjacency.
AdjList window_graph(const PatternGraph& g, int cells) {
  int n = static_cast<int>(g.nodes.size());
  AdjList adj(n * cells);
  for (int k = 0;; ++k) {
    bool any = false;
    for (const auto& e : g.edges) {
      int tc = k + e.toff, hc = k + e.hoff;
      if (tc < 0 || hc < 0) continue;
      if (tc >= cells || hc >= cells) {
        if (tc < cells + 2 && hc < cells + 2) any = true;
        continue;
      }
      any = true;
      adj.add_edge(tc * n + e.tn, hc * n + e.hn);
    }
    if (!any && k > cells) break;
    if (k > cells + 2) break;
  }
  return adj;
}

std::vector<bool> bfs_from(const AdjList& g, int src) {
  std::vector<bool> seen(g.n, false);
  std::vector<int> stack{src};
  seen[src] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : g.succ[u])
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
  }
  return seen;
}

// Exact reach set from one source, restricted to cells <= low_bound, over
// the infinite instantiation. Window growth; the (reach-low, frontier, T)
// profile evolves deterministically once past the floor, so a repeat pins
// the limit.
std::vector<bool> periodic_reach_row(const PatternGraph& g, int fn, int fc,
                                     int low_bound) {
  int n = static_cast<int>(g.nodes.size());
  std::vector<bool> low(static_cast<std::size_t>(n) * (low_bound + 1), false);
  if (n == 0) return low;
  int w0 = std::max(fc, low_bound) + 4;
  std::set<std::string> seen_profiles;
  for (int w = w0; w < w0 + 4096; ++w) {
    int cells = w + 1;
    AdjList adj = window_graph(g, cells);
    auto fwd = bfs_from(adj, fc * n + fn);
    std::ostringstream prof;
    for (int c = 0; c <= low_bound; ++c)
      for (int i = 0; i < n; ++i) prof << (fwd[c * n + i] ? '1' : '0');
    prof << '/';
    std::vector<int> iface;
    for (int c = w - 1; c <= w; ++c)
      for (int i = 0; i < n; ++i) iface.push_back(c * n + i);
    for (int x : iface) prof << (fwd[x] ? '1' : '0');
    prof << '/';
    for (int x : iface) {
      auto rx = bfs_from(adj, x);
      for (int y : iface) prof << (rx[y] ? '1' : '0');
      prof << ',';
      for (int c = 0; c <= low_bound; ++c)
        for (int i = 0; i < n; ++i) prof << (rx[c * n + i] ? '1' : '0');
    }
    if (!seen_profiles.insert(prof.str()).second) {
      for (int c = 0; c <= low_bound; ++c)
        for (int i = 0; i < n; ++i)
          low[static_cast<std::size_t>(c) * n + i] = fwd[c * n + i];
      return low;
    }
  }
  throw std::logic_error("periodic_reach: profile iteration did not stabilize");
}

bool periodic_reach_impl(const PatternGraph& g, int fn, int fc, int tn, int tc) {
  if (fn == tn && fc == tc) return true;  // trivial walk
  int n = static_cast<int>(g.nodes.size());
  if (n == 0) return false;
  auto low = periodic_reach_row(g, fn, fc, tc);
  return low[static_cast<std::size_t>(tc) * n + tn];
}

}  // namespace

bool periodic_reach(const CellTemplate& t, const std::string& from_node,
                    int from_cell, const std::string& to_node, int to_cell) {
  if (from_cell < 0 || to_cell < 0)
    throw DomainError("UnknownVertex", "negative cell");
  auto g = PatternGraph::from(t);
  return periodic_reach_impl(g, g.index(from_node), from_cell,
                             g.index(to_node), to_cell);
}

std::vector<std::pair<std::string, int>> periodic_reach_set(
    const CellTemplate& t, const std::string& from_node, int from_cell,
    int low_bound) {
  auto g = PatternGraph::from(t);
  int n = static_cast<int>(g.nodes.size());
  auto low = periodic_reach_row(g, g.index(from_node), from_cell, low_bound);
  std::vector<std::pair<std::string, int>> out;
  for (int c = 0; c <= low_bound; ++c)
    for (int i = 0; i < n; ++i)
      if (low[static_cast<std::size_t>(c) * n + i])
        out.push_back({g.nodes[static_cast<std::size_t>(i)], c});
  // The trivial walk always reaches the source itself.
  std::pair<std::string, int> self{from_node, from_cell};
  if (from_cell <= low_bound &&
      std::find(out.begin(), out.end(), self) == out.end())
    out.push_back(self);
  std::sort(out.begin(), out.end());
  return out;
}

bool periodic_reach_window(const CellTemplate& t, const std::string& from_node,
                           int from_cell, const std::string& to_node,
                           int to_cell, int depth) {
  auto g = PatternGraph::from(t);
  int n = static_cast<int>(g.nodes.size());
  int fn = g.index(from_node), tn = g.index(to_node);
  if (from_cell >= depth || to_cell >= depth) return false;
  if (fn == tn && from_cell == to_cell) return true;
  AdjList adj = window_graph(g, depth);
  return bfs_from(adj, from_cell * n + fn)[to_cell * n + tn];
}

TemplateFacts analyze_template(const CellTemplate& t) {
  TemplateFacts f;
  auto g = PatternGraph::from(t);
  int n = static_cast<int>(g.nodes.size());
  if (n == 0) return f;

  // Mutual pair: a zero-net closed walk through two distinct vertices fits
  // within a window of 8*n*n cells once shifted above the floor.
  int cells = 8 * n * n + 16;
  AdjList adj = window_graph(g, cells);
  auto sccs = strongly_connected_components(adj);
  for (const auto& c : sccs)
    if (c.size() >= 2) f.has_mutual_pair = true;

  // Undirected connectivity: all vertices in cells [0,3] pairwise connected
  // and each node's cell 3 connected to its cell 4; shifts cover the rest.
  auto s = g.symmetrized();
  const int B = 3;
  std::vector<std::pair<int, int>> low;
  for (int c = 0; c <= B; ++c)
    for (int i = 0; i < n; ++i) low.push_back({i, c});
  for (std::size_t a = 0; a + 1 < low.size() && f.undirected_connected; ++a)
    if (!periodic_reach_impl(s, low[a].first, low[a].second, low[a + 1].first,
                             low[a + 1].second))
      f.undirected_connected = false;
  for (int i = 0; i < n && f.undirected_connected; ++i)
    if (!periodic_reach_impl(s, i, B, i, B + 1)) f.undirected_connected = false;
  return f;
}

// ---------------------------------------------------------------------------
// Incidence structure

int IncidenceDigraph::find(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

int MaterializedGraph::index_of(const std::string& id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return -1;
  return static_cast<int>(it - ids.begin());
}

namespace {

// The owning vertex blocks of a tip, with the index offset per owner:
// owner[r] contains tip[r + off].
struct TipOwner {
  std::string vertex;  // concrete vertex or family id
  bool family = false;
  std::optional<int> off;      // family owner: tip index = r + off
  std::optional<int> literal;  // concrete owner of one family-tip instance
};

std::vector<TipOwner> tip_owners(const Bundle& d, const std::vector<Ditip>& tips,
                                 const std::string& tip_id, TipDir dir) {
  (void)d;
  std::vector<TipOwner> owners;
  auto scan = [&](const std::string& vid, bool fam,
                  const std::vector<Ref>& members) {
    for (const auto& m : members) {
      auto rt = resolve_tip_ref(tips, m);
      if (!rt.valid || rt.tip_id != tip_id) continue;
      TipOwner o;
      o.vertex = vid;
      o.family = fam;
      if (rt.index) {
        if (rt.index->base == Index::Base::Family)
          o.off = rt.index->offset;
        else if (rt.index->base == Index::Base::Lit)
          o.literal = rt.index->offset;
      }
      owners.push_back(o);
    }
  };
  for (const auto& [id, v] : d.vertices)
    scan(id, false, dir == TipDir::In ? v.in_members : v.out_members);
  for (const auto& [id, f] : d.vertex_families)
    scan(id, true, dir == TipDir::In ? f.in_members : f.out_members);
  return owners;
}

std::vector<int> finite_vertex_ranks(const Bundle&, Rank rank) {
  std::vector<int> ranks;
  int top = rank.is_finite() ? rank.value() : 0;
  for (int r = 1; r <= top; ++r) ranks.push_back(r);
  return ranks;
}

}  // namespace

IncidenceDigraph build_incidence(const Bundle& d, Rank rank) {
  IncidenceDigraph g;
  auto add_node = [&](const std::string& id, IncidenceDigraph::Node::Kind k) {
    if (g.find(id) < 0) g.nodes.push_back({id, k});
  };
  for (const auto& [id, v] : d.vertices)
    if (v.rank <= rank) add_node(id, IncidenceDigraph::Node::ConcreteV);
  for (const auto& [id, f] : d.vertex_families)
    if (f.rank <= rank) add_node(id, IncidenceDigraph::Node::FamilyV);
  for (const auto& [id, inst] : d.instances)
    add_node(id, IncidenceDigraph::Node::InstanceBlock);

  auto endpoint_block = [&](const Ref& r) -> std::pair<int, std::optional<int>> {
    if (!r.instance.empty()) {
      int b = g.find(r.instance);
      std::optional<int> idx;
      if (r.fam && r.fam->base == Index::Base::Lit) idx = r.fam->offset;
      return {b, idx};
    }
    return {g.find(r.name), std::nullopt};
  };

  for (const auto& [id, a] : d.arcs) {
    auto [tb, ti] = endpoint_block(a.tail);
    auto [hb, hi] = endpoint_block(a.head);
    if (tb < 0 || hb < 0) continue;
    // Arcs inside one instance copy are internal to the block; the
    // template analysis covers them.
    if (tb == hb && !a.tail.instance.empty() && a.tail.fam == a.head.fam)
      continue;
    std::optional<int> delta;
    bool tail_conc = a.tail.instance.empty();
    bool head_conc = a.head.instance.empty();
    if (ti && hi) delta = *hi - *ti;
    if (tail_conc && head_conc) delta = 0;
    g.edges.push_back({tb, hb, delta, id});
  }

  // Rank >= 1: one edge per witnessed diwalk direction.
  for (int rho : finite_vertex_ranks(d, rank)) {
    auto tips = compute_ditips(d, Rank::finite(rho - 1));
    for (const auto& [wid, w] : d.walks) {
      if (!(w.rank == Rank::finite(rho - 1)) || w.mode == WalkMode::Finite)
        continue;
      // Tail instance blocks.
      std::set<std::string> tail_insts;
      for (const auto& side : {w.in_rep, w.out_rep, w.mid})
        for (const auto& r : side)
          if (!r.instance.empty()) tail_insts.insert(r.instance);
      // Owner index algebra: owner[r] holds tip[r + off]; walk member j
      // belongs to tip[j - fam_delta], so owner index r = j - fam_delta -
      // off, and the walk's instance family member is rays[j].
      struct OwnerShift {
        TipOwner owner;
        std::optional<int> shift;  // walk index = owner index + shift
      };
      auto owners_of = [&](TipDir dir) {
        std::vector<OwnerShift> res;
        for (const auto& t : tips)
          for (const auto& m : t.members)
            if (m.walk == wid) {
              for (const auto& o : tip_owners(d, tips, t.id, dir)) {
                OwnerShift os{o, std::nullopt};
                if (o.off) *&os.shift = *o.off + m.fam_delta;
                res.push_back(os);
              }
            }
        return res;
      };
      auto in_owners = (w.mode != WalkMode::ExtendedOut) ? owners_of(TipDir::In)
                                                        : std::vector<OwnerShift>{};
      auto out_owners = (w.mode != WalkMode::ExtendedIn)
                            ? owners_of(TipDir::Out)
                            : std::vector<OwnerShift>{};
      for (const auto& o : in_owners) {
        int vb = g.find(o.owner.vertex);
        for (const auto& inst : tail_insts) {
          int ib = g.find(inst);
          if (vb >= 0 && ib >= 0) g.edges.push_back({vb, ib, o.shift, wid});
        }
      }
      for (const auto& o : out_owners) {
        int vb = g.find(o.owner.vertex);
        for (const auto& inst : tail_insts) {
          int ib = g.find(inst);
          if (vb >= 0 && ib >= 0)
            g.edges.push_back(
                {ib, vb, o.shift ? std::optional<int>(-*o.shift) : std::nullopt,
                 wid});
        }
      }
      // Endless walks witness a direct vertex-to-vertex step.
      if (w.mode == WalkMode::Endless) {
        for (const auto& oi : in_owners)
          for (const auto& oo : out_owners) {
            int a = g.find(oi.owner.vertex), b = g.find(oo.owner.vertex);
            if (a < 0 || b < 0) continue;
            std::optional<int> delta;
            if (oi.shift && oo.shift) delta = *oi.shift - *oo.shift;
            g.edges.push_back({a, b, delta, wid});
          }
      }
    }
  }
  return g;
}

MaterializedGraph materialize_incidence(const Bundle& d, Rank rank, int depth) {
  MaterializedGraph m;
  std::set<std::string> ids;
  auto base = unfold_base(d, depth);
  for (const auto& v : base.vertices) ids.insert(v);
  for (const auto& [id, v] : d.vertices)
    if (v.rank <= rank && v.rank.is_finite() && v.rank.value() >= 1)
      ids.insert(id);
  for (const auto& [id, f] : d.vertex_families)
    if (f.rank <= rank)
      for (int r = 0; r < depth; ++r)
        ids.insert(id + "[" + std::to_string(r) + "]");
  if (rank.is_omega())
    for (const auto& [id, v] : d.vertices)
      if (v.rank.is_omega()) ids.insert(id);

  m.ids.assign(ids.begin(), ids.end());
  m.adj = AdjList(static_cast<int>(m.ids.size()));
  std::set<std::pair<int, int>> seen;
  auto add = [&](const std::string& u, const std::string& v) {
    int a = m.index_of(u), b = m.index_of(v);
    if (a < 0 || b < 0 || a == b) return;
    if (seen.insert({a, b}).second) m.adj.add_edge(a, b);
  };

  for (const auto& a : base.arcs) add(a.tail, a.head);

  // Tip membership edges per vertex rank.
  for (int rho : finite_vertex_ranks(d, rank)) {
    auto tips = compute_ditips(d, Rank::finite(rho - 1));
    for (const auto& t : tips) {
      for (TipDir dir : {TipDir::In, TipDir::Out}) {
        auto owners = tip_owners(d, tips, t.id, dir);
        if (owners.empty()) continue;
        for (const auto& mem : t.members) {
          const auto& w = d.walks.at(mem.walk);
          if (dir == TipDir::In && w.mode == WalkMode::ExtendedOut) continue;
          if (dir == TipDir::Out && w.mode == WalkMode::ExtendedIn) continue;
          // Tip instances within the window.
          int idx_lo = 0, idx_hi = t.is_family ? depth : 1;
          for (int j = idx_lo; j < idx_hi; ++j) {
            std::optional<int> fam;
            if (w.is_family) {
              fam = j + mem.fam_delta;
              if (*fam < 0) continue;
            }
            std::vector<std::string> tail;
            try {
              tail = unfold_tail(d, w, dir, depth, fam);
            } catch (const DomainError&) {
              continue;
            }
            for (const auto& o : owners) {
              std::string vid = o.vertex;
              if (o.family) {
                if (!o.off) continue;
                int r = (t.is_family ? j : 0) - *o.off;
                if (r < 0) continue;
                vid += "[" + std::to_string(r) + "]";
              } else if (o.literal && t.is_family && *o.literal != j) {
                continue;
              }
              if (!ids.count(vid)) continue;
              for (std::size_t e = 0; e < tail.size(); e += 2) {
                if (!ids.count(tail[e])) continue;
                if (dir == TipDir::In)
                  add(vid, tail[e]);
                else
                  add(tail[e], vid);
              }
            }
          }
        }
      }
    }
  }

  // Omega level: endless arrow walks step between omega vertices, matched
  // through the tip classes their members resolve to.
  if (rank.is_omega()) {
    auto atips = arrow_ditips(d);
    auto owner_of = [&](const std::string& tip_id, TipDir dir) {
      for (const auto& [vid, v] : d.vertices) {
        if (!v.rank.is_omega()) continue;
        const auto& members = dir == TipDir::In ? v.in_members : v.out_members;
        for (const auto& mref : members) {
          auto rt = resolve_tip_ref(atips, mref);
          if (rt.valid && rt.tip_id == tip_id) return vid;
        }
      }
      return std::string();
    };
    for (const auto& [wid, aw] : d.arrow_walks) {
      if (aw.mode != WalkMode::Endless) continue;
      std::string in_class, out_class;
      for (const auto& t : atips)
        for (const auto& mem : t.members)
          if (mem.walk == wid)
            (t.dir == TipDir::In ? in_class : out_class) = t.id;
      if (in_class.empty() || out_class.empty()) continue;
      std::string hin = owner_of(in_class, TipDir::In);
      std::string hout = owner_of(out_class, TipDir::Out);
      if (!hin.empty() && !hout.empty()) add(hin, hout);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Unilateral components of a finite digraph

std::vector<std::vector<int>> unilateral_components_finite(const AdjList& g,
                                                           int max_components,
                                                           bool& truncated) {
  truncated = false;
  auto sccs = strongly_connected_components(g);
  int ns = static_cast<int>(sccs.size());
  std::vector<int> comp_of(g.n);
  for (int c = 0; c < ns; ++c)
    for (int v : sccs[c]) comp_of[v] = c;

  AdjList cond(ns);
  std::set<std::pair<int, int>> ce;
  for (int u = 0; u < g.n; ++u)
    for (int v : g.succ[u]) {
      int a = comp_of[u], b = comp_of[v];
      if (a != b && ce.insert({a, b}).second) cond.add_edge(a, b);
    }
  auto reach = reach_closure_parallel(cond);

  // Hasse covers of the condensation's reachability order.
  std::vector<std::vector<int>> covers(ns);
  for (int a = 0; a < ns; ++a)
    for (int b = 0; b < ns; ++b) {
      if (a == b || !reach.get(a, b)) continue;
      bool cover = true;
      for (int w = 0; w < ns && cover; ++w)
        if (w != a && w != b && reach.get(a, w) && reach.get(w, b))
          cover = false;
      if (cover) covers[a].push_back(b);
    }
  std::vector<bool> has_pred(ns, false);
  for (int a = 0; a < ns; ++a)
    for (int b : covers[a]) has_pred[b] = true;

  std::vector<std::vector<int>> out;
  std::vector<int> chain;
  auto emit = [&]() {
    std::vector<int> verts;
    for (int c : chain)
      verts.insert(verts.end(), sccs[c].begin(), sccs[c].end());
    if (verts.size() <= 1) return;  // a single vertex is not a component
    std::sort(verts.begin(), verts.end());
    out.push_back(std::move(verts));
  };
  // DFS over maximal chains.
  struct Frame {
    int node;
    std::size_t next = 0;
  };
  for (int root = 0; root < ns; ++root) {
    if (has_pred[root]) continue;
    std::vector<Frame> stack{{root, 0}};
    chain = {root};
    while (!stack.empty()) {
      if (static_cast<int>(out.size()) >= max_components) {
        truncated = true;
        std::sort(out.begin(), out.end());
        return out;
      }
      Frame& f = stack.back();
      if (covers[f.node].empty() && f.next == 0) {
        emit();
        f.next = 1;
        continue;
      }
      if (f.next >= covers[f.node].size()) {
        stack.pop_back();
        chain.pop_back();
        continue;
      }
      int nxt = covers[f.node][f.next++];
      stack.push_back({nxt, 0});
      chain.push_back(nxt);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Components

namespace {

bool bundle_parametric(const Bundle& d, Rank rank) {
  if (!d.instances.empty()) return true;
  for (const auto& [id, f] : d.vertex_families)
    if (f.rank <= rank) return true;
  return false;
}

std::vector<std::vector<std::string>> finite_kind_components(
    const MaterializedGraph& m, ConnectKind kind, const ConnectOptions& opt,
    bool& truncated) {
  std::vector<std::vector<int>> comps;
  truncated = false;
  switch (kind) {
    case ConnectKind::Strong:
      comps = strongly_connected_components(m.adj);
      break;
    case ConnectKind::Weak:
      comps = weakly_connected_components(m.adj);
      break;
    case ConnectKind::Unilateral:
      comps = unilateral_components_finite(m.adj, opt.max_components, truncated);
      break;
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& c : comps) {
    std::vector<std::string> ids;
    for (int v : c) ids.push_back(m.ids[v]);
    std::sort(ids.begin(), ids.end());
    out.push_back(std::move(ids));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Strips literal indices out of a materialized id, returning the block
// pattern and the smallest index encountered.
std::string block_pattern(const std::string& id) {
  std::string out;
  bool in_idx = false;
  for (char c : id) {
    if (c == '[') in_idx = true;
    if (!in_idx && c != '@') out += c;
    if (c == '@') break;
    if (c == ']') in_idx = false;
  }
  return out;
}

struct PeriodicCertificates {
  bool strong_all_singletons = false;
  bool weak_single_per_block_component = false;
  std::vector<std::vector<std::string>> weak_block_components;
};

PeriodicCertificates certify(const Bundle& d, Rank rank) {
  PeriodicCertificates cert;
  auto inc = build_incidence(d, rank);
  int n = static_cast<int>(inc.nodes.size());

  std::map<std::string, TemplateFacts> facts;
  for (const auto& [id, t] : d.templates) facts[id] = analyze_template(t);
  bool no_mutual = true, all_connected = true;
  for (const auto& [id, inst] : d.instances) {
    auto it = facts.find(inst.template_id);
    if (it == facts.end()) continue;
    if (it->second.has_mutual_pair) no_mutual = false;
    if (!it->second.undirected_connected) all_connected = false;
  }

  // Strong: certified all-singletons when no instance admits a mutual pair
  // and every directed block cycle has strictly one-signed index offsets.
  {
    AdjList bg(n);
    for (const auto& e : inc.edges) bg.add_edge(e.from, e.to);
    auto sccs = strongly_connected_components(bg);
    std::vector<int> comp_of(n);
    for (std::size_t c = 0; c < sccs.size(); ++c)
      for (int v : sccs[c]) comp_of[v] = static_cast<int>(c);
    bool ok = no_mutual;
    for (std::size_t c = 0; c < sccs.size() && ok; ++c) {
      std::vector<IncidenceDigraph::Edge> internal;
      for (const auto& e : inc.edges)
        if (comp_of[e.from] == static_cast<int>(c) &&
            comp_of[e.to] == static_cast<int>(c))
          internal.push_back(e);
      if (internal.empty()) continue;  // no cycle through this SCC
      bool unlabeled = false;
      for (const auto& e : internal)
        if (!e.delta) unlabeled = true;
      if (unlabeled) {
        ok = false;
        break;
      }
      // Bellman-Ford cycle sign detection within the SCC.
      auto has_cycle_with = [&](int sign) {
        std::map<int, long> dist;
        for (int v : sccs[c]) dist[v] = 0;
        std::size_t iters = sccs[c].size() + 1;
        bool changed = false;
        for (std::size_t i = 0; i < iters; ++i) {
          changed = false;
          for (const auto& e : internal) {
            long w = sign * static_cast<long>(*e.delta);
            if (dist[e.from] + w < dist[e.to]) {
              dist[e.to] = dist[e.from] + w;
              changed = true;
            }
          }
          if (!changed) break;
        }
        return changed;  // relaxation still live: negative cycle for `sign`
      };
      bool neg = has_cycle_with(+1);  // cycle with negative offset sum
      bool pos = has_cycle_with(-1);  // cycle with positive offset sum
      if (pos && neg) ok = false;     // mixed signs combine to zero
      if (!pos && !neg) ok = false;   // all cycles sum to zero
    }
    cert.strong_all_singletons = ok;
  }

  // Weak: one component per undirected block component when instances are
  // internally connected and the cycle-offset gcd is 1.
  {
    bool ok = all_connected;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int>* pp = &parent;
    auto find = [pp](int x) {
      while ((*pp)[x] != x) {
        (*pp)[x] = (*pp)[(*pp)[x]];
        x = (*pp)[x];
      }
      return x;
    };
    for (const auto& e : inc.edges) {
      int a = find(e.from), b = find(e.to);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    // Potentials per component; gcd of cycle defects.
    std::map<int, long> pot;
    std::map<int, long> gcd_of;
    std::vector<std::vector<std::pair<int, int>>> und(n);  // (to, edge idx)
    for (std::size_t i = 0; i < inc.edges.size(); ++i) {
      und[inc.edges[i].from].push_back({inc.edges[i].to, static_cast<int>(i)});
      und[inc.edges[i].to].push_back({inc.edges[i].from, static_cast<int>(i)});
    }
    std::vector<char> vis(n, 0);
    for (int root = 0; root < n; ++root) {
      if (vis[root]) continue;
      std::vector<int> stack{root};
      vis[root] = 1;
      pot[root] = 0;
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (auto [v, ei] : und[u]) {
          const auto& e = inc.edges[ei];
          long delta = e.delta ? *e.delta : 0;
          long step = (e.from == u) ? delta : -delta;
          if (!e.delta &&
              inc.nodes[e.from].kind != IncidenceDigraph::Node::ConcreteV &&
              inc.nodes[e.to].kind != IncidenceDigraph::Node::ConcreteV)
            ok = false;  // unknown offset between two indexed blocks
          if (!vis[v]) {
            vis[v] = 1;
            pot[v] = pot[u] + step;
            stack.push_back(v);
          } else {
            long defect = pot[u] + step - pot[v];
            int r = find(root);
            gcd_of[r] = std::gcd(gcd_of[r], std::labs(defect));
          }
        }
      }
    }
    if (ok) {
      std::map<int, std::vector<std::string>> groups;
      // Components holding an index dimension (a vertex family or an
      // instance family) need a gcd-1 cycle to connect all indices; single
      // instances hang off tree edges, their cells covered by the template
      // connectivity fact.
      std::map<int, bool> needs_cycle;
      for (int v = 0; v < n; ++v) {
        int r = find(v);
        groups[r].push_back(inc.nodes[v].id);
        bool indexed = inc.nodes[v].kind == IncidenceDigraph::Node::FamilyV;
        if (inc.nodes[v].kind == IncidenceDigraph::Node::InstanceBlock) {
          auto it = d.instances.find(inc.nodes[v].id);
          indexed = it != d.instances.end() && it->second.is_family;
        }
        if (indexed) needs_cycle[r] = true;
      }
      for (auto& [r, ids] : groups) {
        if (needs_cycle[r] && gcd_of[r] != 1) {
          ok = false;
          break;
        }
        std::sort(ids.begin(), ids.end());
        cert.weak_block_components.push_back(ids);
      }
      std::sort(cert.weak_block_components.begin(),
                cert.weak_block_components.end());
    }
    cert.weak_single_per_block_component = ok;
    if (!ok) cert.weak_block_components.clear();
  }
  return cert;
}

}  // namespace

ComponentSet components(const Bundle& d, Rank rank, ConnectKind kind,
                        const ConnectOptions& opt) {
  ComponentSet out;
  out.kind = kind;
  out.rank = rank;

  if (!bundle_parametric(d, rank) || rank.is_omega()) {
    auto m = materialize_incidence(d, rank, std::max(2, opt.unfold_depth));
    bool trunc = false;
    auto comps = finite_kind_components(m, kind, opt, trunc);
    for (auto& c : comps) out.blocks.push_back({std::move(c), false});
    out.method = "finite";
    out.truncated = trunc;
    return out;
  }

  int depth = std::max(4, std::min(10, opt.unfold_depth));
  out.window_depth = depth;

  if (kind != ConnectKind::Unilateral) {
    auto cert = certify(d, rank);
    if (kind == ConnectKind::Weak && cert.weak_single_per_block_component) {
      for (auto& ids : cert.weak_block_components)
        out.blocks.push_back({ids, false});
      std::sort(out.blocks.begin(), out.blocks.end(),
                [](const ComponentBlock& a, const ComponentBlock& b) {
                  return a.members < b.members;
                });
      out.method = "periodic";
      return out;
    }
    if (kind == ConnectKind::Strong && cert.strong_all_singletons) {
      // Every vertex instance forms its own singleton component.
      std::set<std::string> blocks;
      for (const auto& [id, v] : d.vertices)
        if (v.rank <= rank) out.blocks.push_back({{id}, false});
      for (const auto& [id, f] : d.vertex_families)
        if (f.rank <= rank) out.blocks.push_back({{id + "[k]"}, true});
      for (const auto& [id, inst] : d.instances) {
        const auto& t = d.templates.at(inst.template_id);
        for (const auto& nd : t.nodes) {
          std::string pat =
              inst.is_family ? id + "[k]." + nd + "@c" : id + "." + nd + "@c";
          out.blocks.push_back({{pat}, true});
        }
      }
      std::sort(out.blocks.begin(), out.blocks.end(),
                [](const ComponentBlock& a, const ComponentBlock& b) {
                  return a.members < b.members;
                });
      out.method = "periodic";
      return out;
    }
  }

  // Window fallback: materialized structure, truncation reported.
  auto m = materialize_incidence(d, rank, depth);
  bool trunc = false;
  auto comps = finite_kind_components(m, kind, opt, trunc);
  for (auto& c : comps) out.blocks.push_back({std::move(c), false});
  out.method = "window";
  out.truncated = true;
  (void)block_pattern;
  return out;
}

ReachAnswer reach_query(const Bundle& d, const std::string& u,
                        const std::string& v, Rank rank,
                        const ConnectOptions& opt) {
  ReachAnswer ans;
  Ref ur, vr;
  if (!parse_ref(u, ur) || !parse_ref(v, vr))
    throw DomainError("UnknownVertex", u + " / " + v);
  auto ue = eval_ref(d, ur, std::nullopt, std::nullopt);
  auto ve = eval_ref(d, vr, std::nullopt, std::nullopt);
  if (!ue.valid || ue.kind != ElemKind::VertexElem)
    throw DomainError("UnknownVertex", u);
  if (!ve.valid || ve.kind != ElemKind::VertexElem)
    throw DomainError("UnknownVertex", v);

  if (rank == Rank::finite(0) && !ur.instance.empty() &&
      ur.instance == vr.instance && ur.fam == vr.fam && d.arcs.empty() &&
      ur.cell && vr.cell) {
    const auto& t = d.templates.at(d.instances.at(ur.instance).template_id);
    ans.method = "periodic";
    ans.connected = periodic_reach(t, ur.name, ur.cell->offset, vr.name,
                                   vr.cell->offset);
    return ans;
  }
  bool parametric = bundle_parametric(d, rank);
  int depth = parametric ? std::max(4, std::min(12, opt.unfold_depth))
                         : std::max(2, opt.unfold_depth);
  auto m = materialize_incidence(d, rank, depth);
  int a = m.index_of(ue.id), b = m.index_of(ve.id);
  if (a < 0 || b < 0) throw DomainError("UnknownVertex", u + " / " + v);
  ans.method = parametric ? "window" : "finite";
  ans.window_depth = parametric ? depth : 0;
  ans.connected = bfs_from(m.adj, a)[b];
  return ans;
}

ReachAnswer connected(const Bundle& d, const std::string& u,
                      const std::string& v, Rank rank, ConnectKind kind,
                      const ConnectOptions& opt) {
  ReachAnswer ans;
  Ref ur, vr;
  if (!parse_ref(u, ur) || !parse_ref(v, vr))
    throw DomainError("UnknownVertex", u + " / " + v);
  auto ue = eval_ref(d, ur, std::nullopt, std::nullopt);
  auto ve = eval_ref(d, vr, std::nullopt, std::nullopt);
  if (!ue.valid || ue.kind != ElemKind::VertexElem)
    throw DomainError("UnknownVertex", u);
  if (!ve.valid || ve.kind != ElemKind::VertexElem)
    throw DomainError("UnknownVertex", v);

  // Same single instance at rank 0: decide by the exact periodic engine.
  if (rank == Rank::finite(0) && !ur.instance.empty() &&
      ur.instance == vr.instance && ur.fam == vr.fam && d.arcs.empty() &&
      ur.cell && vr.cell) {
    const auto& t = d.templates.at(d.instances.at(ur.instance).template_id);
    auto dir1 = [&] {
      return periodic_reach(t, ur.name, ur.cell->offset, vr.name,
                            vr.cell->offset);
    };
    auto dir2 = [&] {
      return periodic_reach(t, vr.name, vr.cell->offset, ur.name,
                            ur.cell->offset);
    };
    ans.method = "periodic";
    switch (kind) {
      case ConnectKind::Strong:
        ans.connected = dir1() && dir2();
        return ans;
      case ConnectKind::Unilateral:
        ans.connected = dir1() || dir2();
        return ans;
      case ConnectKind::Weak: {
        CellTemplate s = t;
        for (const auto& a : t.arcs) {
          TemplateArc rev{a.id + "~", a.head_node, a.head_off, a.tail_node,
                          a.tail_off};
          s.arcs.push_back(rev);
        }
        ans.connected = periodic_reach(s, ur.name, ur.cell->offset, vr.name,
                                       vr.cell->offset);
        return ans;
      }
    }
  }

  bool parametric = bundle_parametric(d, rank);
  int depth = parametric ? std::max(4, std::min(12, opt.unfold_depth))
                         : std::max(2, opt.unfold_depth);
  auto m = materialize_incidence(d, rank, depth);
  int a = m.index_of(ue.id), b = m.index_of(ve.id);
  if (a < 0 || b < 0) throw DomainError("UnknownVertex", u + " / " + v);
  ans.method = parametric ? "window" : "finite";
  ans.window_depth = parametric ? depth : 0;
  if (kind == ConnectKind::Weak) {
    AdjList s(m.adj.n);
    for (int x = 0; x < m.adj.n; ++x)
      for (int y : m.adj.succ[x]) {
        s.add_edge(x, y);
        s.add_edge(y, x);
      }
    ans.connected = bfs_from(s, a)[b];
    return ans;
  }
  bool ab = bfs_from(m.adj, a)[b];
  bool ba = bfs_from(m.adj, b)[a];
  ans.connected = kind == ConnectKind::Strong ? (ab && ba) : (ab || ba);
  return ans;
}

}  // namespace tdg
