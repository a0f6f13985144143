#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "tdg/connect.hpp"
#include "tdg/spec_doc.hpp"

using namespace tdg;

namespace {

Bundle parse_ok(const std::string& text) {
  auto r = parse_spec(text);
  REQUIRE_MESSAGE(r.ok(), (r.errors.empty() ? std::string()
                                            : r.errors.front().message));
  return r.bundle;
}

const char* kFig1 =
    "digraph fig1 rank 1\n"
    "template vee { node d; node u; arc fall from d@k+1 to d@k;\n"
    "  arc cross from d@k to u@k; arc climb from u@k to u@k+1; }\n"
    "instance-family rays template vee index r\n"
    "walk-family V rank 0 index r mode endless\n"
    "  in-repetend [ rays[r].fall@k rays[r].d@k ] in-anchor 0\n"
    "  middle [ rays[r].cross@0 ]\n"
    "  out-repetend [ rays[r].u@k rays[r].climb@k ] out-anchor 0\n"
    "vertex-family v1 rank 1 index r { intip V.in[r]; outtip V.out[r-1]; }\n"
    "walk-presentation W1 rank 1 mode out prefix [ ] repetend [ v1[k] V[k] ] "
    "anchor 0\n";

CellTemplate ray_template() {
  CellTemplate t;
  t.id = "chain";
  t.nodes = {"n"};
  t.arcs.push_back({"step", "n", 0, "n", 1});
  return t;
}

std::vector<std::string> ids_of(const ComponentBlock& b) { return b.members; }

}  // namespace

TEST_CASE("periodic reach on a monotone ray") {
  auto t = ray_template();
  CHECK(periodic_reach(t, "n", 0, "n", 5));
  CHECK_FALSE(periodic_reach(t, "n", 5, "n", 0));
  CHECK(periodic_reach(t, "n", 3, "n", 3));  // trivial walk
}

TEST_CASE("a within-cell 2-cycle never crosses cells") {
  CellTemplate t;
  t.id = "t";
  t.nodes = {"a", "b"};
  t.arcs.push_back({"ab", "a", 0, "b", 0});
  t.arcs.push_back({"ba", "b", 0, "a", 0});
  CHECK_FALSE(periodic_reach(t, "a", 0, "a", 1));
  CHECK(periodic_reach(t, "a", 0, "b", 0));
  CHECK(periodic_reach(t, "b", 4, "a", 4));
}

TEST_CASE("descending chains reach downward only") {
  CellTemplate t;
  t.id = "t";
  t.nodes = {"m"};
  t.arcs.push_back({"fall", "m", 1, "m", 0});
  CHECK(periodic_reach(t, "m", 7, "m", 2));
  CHECK_FALSE(periodic_reach(t, "m", 2, "m", 7));
}

TEST_CASE("periodic reach agrees with deep window search on random templates") {
  std::mt19937 rng(21);
  int checked = 0;
  for (int it = 0; it < 60; ++it) {
    auto t = testgen::random_template(4, 8, rng);
    std::uniform_int_distribution<int> node(0, static_cast<int>(t.nodes.size()) - 1);
    std::uniform_int_distribution<int> cell(0, 8);
    for (int q = 0; q < 6; ++q) {
      std::string a = t.nodes[static_cast<std::size_t>(node(rng))];
      std::string b = t.nodes[static_cast<std::size_t>(node(rng))];
      int ca = cell(rng), cb = cell(rng);
      bool exact = periodic_reach(t, a, ca, b, cb);
      bool window = periodic_reach_window(t, a, ca, b, cb, 50);
      CHECK_MESSAGE(exact == window, t.id << " " << a << "@" << ca << " -> "
                                          << b << "@" << cb);
      ++checked;
    }
  }
  CHECK(checked == 360);
}

TEST_CASE("template facts: ray vs cycle") {
  auto ray = ray_template();
  auto f = analyze_template(ray);
  CHECK_FALSE(f.has_mutual_pair);
  CHECK(f.undirected_connected);

  CellTemplate osc;
  osc.id = "osc";
  osc.nodes = {"a"};
  osc.arcs.push_back({"up", "a", 0, "a", 1});
  osc.arcs.push_back({"down", "a", 1, "a", 0});
  auto f2 = analyze_template(osc);
  CHECK(f2.has_mutual_pair);

  CellTemplate split;
  split.id = "split";
  split.nodes = {"a", "b"};
  split.arcs.push_back({"up", "a", 0, "a", 1});
  split.arcs.push_back({"bp", "b", 0, "b", 1});
  auto f3 = analyze_template(split);
  CHECK_FALSE(f3.undirected_connected);
}

TEST_CASE("components on a chain") {
  auto b = parse_ok(
      "digraph chain rank 0\nvertex u rank 0\nvertex v rank 0\nvertex w rank "
      "0\narc a from u to v\narc b from v to w\n");
  auto strong = components(b, Rank::finite(0), ConnectKind::Strong);
  CHECK(strong.blocks.size() == 3);
  auto uni = components(b, Rank::finite(0), ConnectKind::Unilateral);
  REQUIRE(uni.blocks.size() == 1);
  CHECK(ids_of(uni.blocks[0]) == std::vector<std::string>{"u", "v", "w"});
  auto weak = components(b, Rank::finite(0), ConnectKind::Weak);
  REQUIRE(weak.blocks.size() == 1);
  CHECK(ids_of(weak.blocks[0]) == std::vector<std::string>{"u", "v", "w"});
}

TEST_CASE("components on a fork: u lies in two unilateral components") {
  auto b = parse_ok(
      "digraph fork rank 0\nvertex u rank 0\nvertex v rank 0\nvertex w rank "
      "0\narc a from u to v\narc b from u to w\n");
  auto uni = components(b, Rank::finite(0), ConnectKind::Unilateral);
  REQUIRE(uni.blocks.size() == 2);
  CHECK(ids_of(uni.blocks[0]) == std::vector<std::string>{"u", "v"});
  CHECK(ids_of(uni.blocks[1]) == std::vector<std::string>{"u", "w"});
  auto conn = connected(b, "v", "w", Rank::finite(0), ConnectKind::Weak);
  CHECK(conn.connected);
  auto uni_vw = connected(b, "v", "w", Rank::finite(0), ConnectKind::Unilateral);
  CHECK_FALSE(uni_vw.connected);
}

TEST_CASE("a 2-cycle is strongly connected") {
  auto b = parse_ok(
      "digraph c2 rank 0\nvertex u rank 0\nvertex v rank 0\n"
      "arc a from u to v\narc b from v to u\n");
  CHECK(connected(b, "u", "v", Rank::finite(0), ConnectKind::Strong).connected);
  auto strong = components(b, Rank::finite(0), ConnectKind::Strong);
  REQUIRE(strong.blocks.size() == 1);
}

TEST_CASE("isolated vertices: singleton strong and weak, zero unilateral") {
  auto b = parse_ok("digraph iso rank 0\nvertex u rank 0\nvertex v rank 0\n");
  CHECK(components(b, Rank::finite(0), ConnectKind::Strong).blocks.size() == 2);
  CHECK(components(b, Rank::finite(0), ConnectKind::Weak).blocks.size() == 2);
  CHECK(components(b, Rank::finite(0), ConnectKind::Unilateral).blocks.empty());
}

TEST_CASE("chain reach example") {
  auto b = parse_ok(
      "digraph chain rank 0\nvertex u rank 0\nvertex v rank 0\nvertex w rank "
      "0\narc a from u to v\narc b from v to w\n");
  CHECK(reach_query(b, "u", "w", Rank::finite(0)).connected);
  CHECK_FALSE(reach_query(b, "w", "u", Rank::finite(0)).connected);
  CHECK_THROWS_WITH_AS(reach_query(b, "u", "nope", Rank::finite(0)),
                       doctest::Contains("UnknownVertex"), DomainError);
}

TEST_CASE("build_incidence on fig1 carries the +1 family edge") {
  auto b = parse_ok(kFig1);
  auto inc = build_incidence(b, Rank::finite(1));
  int v1 = inc.find("v1");
  REQUIRE(v1 >= 0);
  bool found = false;
  for (const auto& e : inc.edges)
    if (e.from == v1 && e.to == v1 && e.delta && *e.delta == 1 &&
        e.witness == "V")
      found = true;
  CHECK(found);
}

TEST_CASE("fig1 rank-1 components: weak single, strong all singletons") {
  auto b = parse_ok(kFig1);
  auto weak = components(b, Rank::finite(1), ConnectKind::Weak);
  CHECK(weak.method == "periodic");
  REQUIRE(weak.blocks.size() == 1);
  auto strong = components(b, Rank::finite(1), ConnectKind::Strong);
  CHECK(strong.method == "periodic");
  for (const auto& blk : strong.blocks) CHECK(blk.members.size() == 1);

  // Truncation oracle at 6 rungs: materialize and compare behavior.
  auto m = materialize_incidence(b, Rank::finite(1), 6);
  auto sccs = strongly_connected_components(m.adj);
  for (const auto& c : sccs) CHECK(c.size() == 1);
  auto wcc = weakly_connected_components(m.adj);
  CHECK(wcc.size() == 1);
}

TEST_CASE("rank monotonicity on fig1 windows") {
  auto b = parse_ok(kFig1);
  auto m0 = materialize_incidence(b, Rank::finite(0), 6);
  auto m1 = materialize_incidence(b, Rank::finite(1), 6);
  auto r0 = reach_closure_serial(m0.adj);
  auto r1 = reach_closure_serial(m1.adj);
  for (int u = 0; u < m0.adj.n; ++u) {
    int u1 = m1.index_of(m0.ids[static_cast<std::size_t>(u)]);
    REQUIRE(u1 >= 0);
    for (int v = 0; v < m0.adj.n; ++v) {
      if (!r0.get(u, v)) continue;
      int v1 = m1.index_of(m0.ids[static_cast<std::size_t>(v)]);
      REQUIRE(v1 >= 0);
      CHECK(r1.get(u1, v1));
    }
  }
}

TEST_CASE("fig1 cross-rank reach through tips") {
  auto b = parse_ok(kFig1);
  // The 1-vertex v1[0] reaches down its ray and onward to v1[1].
  CHECK(reach_query(b, "v1[0]", "rays[0].d@2", Rank::finite(1)).connected);
  CHECK(reach_query(b, "rays[0].u@1", "v1[1]", Rank::finite(1)).connected);
  CHECK(reach_query(b, "v1[0]", "v1[2]", Rank::finite(1)).connected);
  CHECK_FALSE(reach_query(b, "v1[2]", "v1[0]", Rank::finite(1)).connected);
  // At rank 0 the rays are disjoint.
  CHECK_FALSE(
      reach_query(b, "rays[0].u@0", "rays[1].u@0", Rank::finite(0)).connected);
}

TEST_CASE("unilateral maximality by subset brute force on small graphs") {
  std::mt19937 rng(31);
  for (int it = 0; it < 40; ++it) {
    AdjList g;
    testgen::random_digraph(7, 14, rng, &g);
    auto reach = reach_closure_serial(g);
    auto pairwise = [&](const std::vector<int>& set) {
      for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = i + 1; j < set.size(); ++j)
          if (!reach.get(set[i], set[j]) && !reach.get(set[j], set[i]))
            return false;
      return true;
    };
    bool trunc = false;
    auto comps = unilateral_components_finite(g, 10000, trunc);
    REQUIRE_FALSE(trunc);
    for (const auto& c : comps) {
      CHECK(pairwise(c));
      // Maximal: no strict superset passes the pairwise test.
      for (int v = 0; v < g.n; ++v) {
        if (std::count(c.begin(), c.end(), v)) continue;
        auto ext = c;
        ext.push_back(v);
        CHECK_FALSE(pairwise(ext));
      }
    }
    // Every vertex unilaterally connected to another lies in >= 1 component.
    for (int v = 0; v < g.n; ++v) {
      bool linked = false;
      for (int u = 0; u < g.n; ++u)
        if (u != v && (reach.get(u, v) || reach.get(v, u))) linked = true;
      if (!linked) continue;
      bool in_some = false;
      for (const auto& c : comps)
        if (std::count(c.begin(), c.end(), v)) in_some = true;
      CHECK(in_some);
    }
  }
}

TEST_CASE("truncated unilateral enumeration is flagged") {
  // A long antichain stack: many parallel chains create many maximal chains.
  AdjList g(12);
  for (int i = 0; i < 6; ++i) g.add_edge(i, 6 + (i % 6));
  for (int i = 0; i < 6; ++i)
    for (int j = 6; j < 12; ++j) g.add_edge(i, j);
  bool trunc = false;
  auto comps = unilateral_components_finite(g, 3, trunc);
  CHECK(trunc);
  CHECK(comps.size() == 3);
}

TEST_CASE("incidence of a finite 0-digraph is the digraph itself") {
  auto b = parse_ok(
      "digraph chain rank 0\nvertex u rank 0\nvertex v rank 0\nvertex w rank "
      "0\narc a from u to v\narc b from v to w\n");
  auto inc = build_incidence(b, Rank::finite(0));
  CHECK(inc.nodes.size() == 3);
  REQUIRE(inc.edges.size() == 2);
  CHECK(inc.nodes[static_cast<std::size_t>(inc.edges[0].from)].id == "u");
  CHECK(inc.nodes[static_cast<std::size_t>(inc.edges[0].to)].id == "v");
  // No declared inter-vertex walks at rank 1: no extra edges.
  auto inc1 = build_incidence(b, Rank::finite(1));
  CHECK(inc1.edges.size() == 2);
}

TEST_CASE("chain endpoints are unilaterally but not strongly connected") {
  auto b = parse_ok(
      "digraph chain rank 0\nvertex u rank 0\nvertex v rank 0\nvertex w rank "
      "0\narc a from u to v\narc b from v to w\n");
  CHECK(connected(b, "u", "w", Rank::finite(0), ConnectKind::Unilateral)
            .connected);
  CHECK_FALSE(
      connected(b, "u", "w", Rank::finite(0), ConnectKind::Strong).connected);
}

TEST_CASE("strong blocks refine weak blocks and sit inside unilateral ones") {
  std::mt19937 rng(51);
  for (int it = 0; it < 50; ++it) {
    AdjList g;
    testgen::random_digraph(8, 18, rng, &g);
    auto sccs = strongly_connected_components(g);
    auto wccs = weakly_connected_components(g);
    bool trunc = false;
    auto uni = unilateral_components_finite(g, 10000, trunc);
    std::vector<int> wof(g.n);
    for (std::size_t c = 0; c < wccs.size(); ++c)
      for (int v : wccs[c]) wof[v] = static_cast<int>(c);
    for (const auto& s : sccs) {
      for (std::size_t i = 1; i < s.size(); ++i)
        CHECK(wof[s[i]] == wof[s[0]]);
      if (s.size() < 2) continue;  // singletons may fall outside unilateral
      bool inside = false;
      for (const auto& u : uni) {
        bool sub = true;
        for (int v : s)
          if (!std::count(u.begin(), u.end(), v)) sub = false;
        if (sub) inside = true;
      }
      CHECK(inside);
    }
  }
}

TEST_CASE("span-2 arcs cross two cells per step") {
  // tail offset -1, head offset +1: each instantiation jumps two cells.
  CellTemplate t;
  t.id = "jump";
  t.nodes = {"a"};
  t.arcs.push_back({"hop", "a", -1, "a", 1});
  CHECK(periodic_reach(t, "a", 0, "a", 2));
  CHECK(periodic_reach(t, "a", 0, "a", 8));
  CHECK_FALSE(periodic_reach(t, "a", 0, "a", 1));  // parity preserved
  CHECK_FALSE(periodic_reach(t, "a", 2, "a", 0));
  CHECK(periodic_reach_window(t, "a", 0, "a", 6, 50));
  CHECK_FALSE(periodic_reach_window(t, "a", 0, "a", 5, 50));
}

TEST_CASE("reach that needs a detour through higher cells") {
  // b@0 is reachable from a@0 only by climbing the a-chain, crossing, and
  // falling back down the b-chain.
  CellTemplate t;
  t.id = "detour";
  t.nodes = {"a", "b"};
  t.arcs.push_back({"up", "a", 0, "a", 1});
  t.arcs.push_back({"cross", "a", 1, "b", 1});
  t.arcs.push_back({"down", "b", 1, "b", 0});
  CHECK(periodic_reach(t, "a", 0, "b", 0));
  CHECK(periodic_reach(t, "a", 5, "b", 0));
  CHECK_FALSE(periodic_reach(t, "b", 0, "a", 0));
  auto set = periodic_reach_set(t, "a", 3, 6);
  // Everything on both chains up to the bound is reachable except a-cells
  // below the start.
  for (int c = 0; c <= 6; ++c) {
    bool a_in = std::count(set.begin(), set.end(),
                           std::pair<std::string, int>{"a", c}) > 0;
    bool b_in = std::count(set.begin(), set.end(),
                           std::pair<std::string, int>{"b", c}) > 0;
    CHECK(a_in == (c >= 3));
    CHECK(b_in);
  }
}

TEST_CASE("a lone instance certifies as one weak component") {
  auto b = parse_ok(
      "digraph ray rank 0\n"
      "template chain { node n; arc step from n@k to n@k+1; }\n"
      "instance line template chain\n");
  auto weak = components(b, Rank::finite(0), ConnectKind::Weak);
  CHECK(weak.method == "periodic");
  REQUIRE(weak.blocks.size() == 1);
  CHECK(weak.blocks[0].members == std::vector<std::string>{"line"});
  auto strong = components(b, Rank::finite(0), ConnectKind::Strong);
  CHECK(strong.method == "periodic");
}

TEST_CASE("a pinned instance joins the concrete part") {
  auto b = parse_ok(
      "digraph pinned rank 0\n"
      "template chain { node n; arc step from n@k to n@k+1; }\n"
      "instance line template chain\n"
      "vertex c rank 0\n"
      "arc pin from c to line.n@3\n");
  auto weak = components(b, Rank::finite(0), ConnectKind::Weak);
  CHECK(weak.method == "periodic");
  REQUIRE(weak.blocks.size() == 1);
  CHECK(weak.blocks[0].members == std::vector<std::string>{"c", "line"});
  // Reach from the pin into the chain and beyond.
  CHECK(reach_query(b, "c", "line.n@7", Rank::finite(0)).connected);
  CHECK_FALSE(reach_query(b, "line.n@7", "c", Rank::finite(0)).connected);
}

TEST_CASE("disjoint instance families fall back to the honest window") {
  auto b = parse_ok(
      "digraph base rank 0\n"
      "template chain { node n; arc step from n@k to n@k+1; }\n"
      "instance-family lines template chain index r\n");
  auto weak = components(b, Rank::finite(0), ConnectKind::Weak);
  CHECK(weak.method == "window");
  CHECK(weak.truncated);
}
