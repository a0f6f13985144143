#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "tdg/closure.hpp"

using namespace tdg;

namespace {

// Quadratic reference for reachability.
std::vector<std::vector<bool>> slow_reach(const AdjList& g) {
  std::vector<std::vector<bool>> r(g.n, std::vector<bool>(g.n, false));
  for (int s = 0; s < g.n; ++s) {
    std::vector<int> stack{s};
    r[s][s] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : g.succ[u])
        if (!r[s][v]) {
          r[s][v] = true;
          stack.push_back(v);
        }
    }
  }
  return r;
}

}  // namespace

TEST_CASE("serial and parallel closures are bit-identical") {
  std::mt19937 rng(11);
  for (int it = 0; it < 50; ++it) {
    AdjList g;
    testgen::random_digraph(20, 60, rng, &g);
    auto a = reach_closure_serial(g);
    auto b = reach_closure_parallel(g);
    CHECK(a.bits == b.bits);
  }
}

TEST_CASE("closure matches the quadratic reference") {
  std::mt19937 rng(12);
  for (int it = 0; it < 30; ++it) {
    AdjList g;
    testgen::random_digraph(12, 30, rng, &g);
    auto m = reach_closure_parallel(g);
    auto slow = slow_reach(g);
    for (int u = 0; u < g.n; ++u)
      for (int v = 0; v < g.n; ++v) CHECK(m.get(u, v) == slow[u][v]);
  }
}

TEST_CASE("strong components match mutual reachability classes") {
  std::mt19937 rng(13);
  for (int it = 0; it < 40; ++it) {
    AdjList g;
    testgen::random_digraph(10, 25, rng, &g);
    auto sccs = strongly_connected_components(g);
    auto reach = slow_reach(g);
    // Same component iff mutually reachable.
    std::vector<int> comp(g.n, -1);
    for (std::size_t c = 0; c < sccs.size(); ++c)
      for (int v : sccs[c]) comp[v] = static_cast<int>(c);
    for (int u = 0; u < g.n; ++u)
      for (int v = 0; v < g.n; ++v)
        CHECK((comp[u] == comp[v]) == (reach[u][v] && reach[v][u]));
    // Partition: every vertex in exactly one component.
    std::vector<int> count(g.n, 0);
    for (const auto& c : sccs)
      for (int v : c) count[v]++;
    for (int v = 0; v < g.n; ++v) CHECK(count[v] == 1);
  }
}

TEST_CASE("weak components match undirected connectivity") {
  std::mt19937 rng(14);
  for (int it = 0; it < 40; ++it) {
    AdjList g;
    testgen::random_digraph(10, 20, rng, &g);
    AdjList s(g.n);
    for (int u = 0; u < g.n; ++u)
      for (int v : g.succ[u]) {
        s.add_edge(u, v);
        s.add_edge(v, u);
      }
    auto weak = weakly_connected_components(g);
    auto reach = slow_reach(s);
    std::vector<int> comp(g.n, -1);
    for (std::size_t c = 0; c < weak.size(); ++c)
      for (int v : weak[c]) comp[v] = static_cast<int>(c);
    for (int u = 0; u < g.n; ++u)
      for (int v = 0; v < g.n; ++v)
        CHECK((comp[u] == comp[v]) == reach[u][v]);
  }
}
