#ifndef TDG_TESTS_GENERATORS_HPP
#define TDG_TESTS_GENERATORS_HPP

#include <random>
#include <string>
#include <vector>

#include "tdg/closure.hpp"
#include "tdg/model.hpp"

namespace tdg::testgen {

// Random finite 0-digraph with self-loops and parallel arcs.
inline Bundle random_digraph(int max_vertices, int max_arcs, std::mt19937& rng,
                             AdjList* adj_out = nullptr) {
  std::uniform_int_distribution<int> nv(1, max_vertices);
  int n = nv(rng);
  std::uniform_int_distribution<int> na(0, max_arcs);
  std::uniform_int_distribution<int> pick(0, n - 1);
  Bundle b;
  b.name = "rnd";
  b.rank = Rank::finite(0);
  for (int i = 0; i < n; ++i) {
    Vertex v;
    v.id = "v" + std::to_string(i);
    v.rank = Rank::finite(0);
    b.vertices[v.id] = v;
  }
  int m = na(rng);
  AdjList adj(n);
  for (int e = 0; e < m; ++e) {
    int s = pick(rng), t = pick(rng);
    Arc a;
    a.id = "a" + std::to_string(e);
    a.tail = Ref::concrete("v" + std::to_string(s));
    a.head = Ref::concrete("v" + std::to_string(t));
    b.arcs[a.id] = a;
    adj.add_edge(s, t);
  }
  if (adj_out) *adj_out = adj;
  return b;
}

// Random cell template over <= max_nodes nodes with offsets in {-1,0,+1}.
inline CellTemplate random_template(int max_nodes, int max_arcs,
                                    std::mt19937& rng) {
  std::uniform_int_distribution<int> nn(1, max_nodes);
  int n = nn(rng);
  CellTemplate t;
  t.id = "t";
  for (int i = 0; i < n; ++i) t.nodes.push_back("n" + std::to_string(i));
  std::uniform_int_distribution<int> na(0, max_arcs);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_int_distribution<int> off(-1, 1);
  int m = na(rng);
  for (int e = 0; e < m; ++e) {
    TemplateArc a;
    a.id = "e" + std::to_string(e);
    a.tail_node = t.nodes[static_cast<std::size_t>(pick(rng))];
    a.head_node = t.nodes[static_cast<std::size_t>(pick(rng))];
    a.tail_off = off(rng);
    a.head_off = off(rng);
    t.arcs.push_back(a);
  }
  return t;
}

// A bundle holding disjoint ascending and descending rays; presentations
// over them make valid extended walks.
inline Bundle ray_bundle(int rays) {
  Bundle b;
  b.name = "rays";
  b.rank = Rank::finite(0);
  CellTemplate up;
  up.id = "up";
  up.nodes = {"n"};
  up.arcs.push_back({"step", "n", 0, "n", 1});
  CellTemplate down;
  down.id = "down";
  down.nodes = {"m"};
  down.arcs.push_back({"fall", "m", 1, "m", 0});
  b.templates["up"] = up;
  b.templates["down"] = down;
  for (int i = 0; i < rays; ++i) {
    std::string uid = "u" + std::to_string(i);
    std::string did = "d" + std::to_string(i);
    b.instances[uid] = Instance{uid, "up", false, ""};
    b.instances[did] = Instance{did, "down", false, ""};
  }
  return b;
}

// Extended-out presentation ascending ray `inst` from the given anchor,
// with `prefix_periods` explicit periods in the prefix.
inline WalkPresentation out_presentation(const std::string& id,
                                         const std::string& inst, int anchor,
                                         int prefix_periods = 0) {
  WalkPresentation p;
  p.id = id;
  p.rank = Rank::finite(0);
  p.mode = WalkMode::ExtendedOut;
  auto vref = [&](int c) {
    Ref r;
    r.instance = inst;
    r.name = "n";
    r.cell = Index{Index::Base::Lit, c};
    return r;
  };
  auto sref = [&](int c) {
    Ref r;
    r.instance = inst;
    r.name = "step";
    r.cell = Index{Index::Base::Lit, c};
    return r;
  };
  for (int i = 0; i < prefix_periods; ++i) {
    p.mid.push_back(vref(anchor - prefix_periods + i));
    p.mid.push_back(sref(anchor - prefix_periods + i));
  }
  Ref v, s;
  v.instance = inst;
  v.name = "n";
  v.cell = Index{Index::Base::Period, 0};
  s.instance = inst;
  s.name = "step";
  s.cell = Index{Index::Base::Period, 0};
  p.out_rep = {v, s};
  p.out_anchor = anchor;
  return p;
}

// Extended-in presentation descending ray `inst` toward its cell-0 end.
inline WalkPresentation in_presentation(const std::string& id,
                                        const std::string& inst, int anchor) {
  WalkPresentation p;
  p.id = id;
  p.rank = Rank::finite(0);
  p.mode = WalkMode::ExtendedIn;
  Ref v, s;
  v.instance = inst;
  v.name = "m";
  v.cell = Index{Index::Base::Period, 0};
  s.instance = inst;
  s.name = "fall";
  s.cell = Index{Index::Base::Period, 0};
  p.in_rep = {s, v};
  p.in_anchor = anchor;
  return p;
}

}  // namespace tdg::testgen

#endif
