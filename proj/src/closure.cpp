#include "tdg/closure.hpp"

#include <algorithm>

namespace tdg {

namespace {

void bfs_row(const AdjList& g, int src, std::uint64_t* row, int words,
             std::vector<int>& stack) {
  stack.clear();
  stack.push_back(src);
  row[src >> 6] |= 1ull << (src & 63);
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : g.succ[u]) {
      std::uint64_t& w = row[v >> 6];
      std::uint64_t bit = 1ull << (v & 63);
      if (!(w & bit)) {
        w |= bit;
        stack.push_back(v);
      }
    }
  }
  (void)words;
}

}  // namespace

ReachMatrix reach_closure_serial(const AdjList& g) {
  ReachMatrix m;
  m.n = g.n;
  m.words = (g.n + 63) / 64;
  m.bits.assign(static_cast<std::size_t>(m.n) * m.words, 0);
  std::vector<int> stack;
  for (int s = 0; s < g.n; ++s)
    bfs_row(g, s, m.bits.data() + static_cast<std::size_t>(s) * m.words,
            m.words, stack);
  return m;
}

ReachMatrix reach_closure_parallel(const AdjList& g) {
  ReachMatrix m;
  m.n = g.n;
  m.words = (g.n + 63) / 64;
  m.bits.assign(static_cast<std::size_t>(m.n) * m.words, 0);
#pragma omp parallel
  {
    std::vector<int> stack;
#pragma omp for schedule(dynamic, 16)
    for (int s = 0; s < g.n; ++s)
      bfs_row(g, s, m.bits.data() + static_cast<std::size_t>(s) * m.words,
              m.words, stack);
  }
  return m;
}

namespace {

struct TarjanState {
  const AdjList& g;
  std::vector<int> index, low, comp;
  std::vector<int> stack;
  std::vector<bool> on_stack;
  int counter = 0, ncomp = 0;

  explicit TarjanState(const AdjList& g_)
      : g(g_), index(g_.n, -1), low(g_.n, 0), comp(g_.n, -1),
        on_stack(g_.n, false) {}

  // Iterative Tarjan to stay safe on deep graphs.
  void run(int root) {
    struct Frame {
      int v;
      std::size_t i;
    };
    std::vector<Frame> call;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.i < g.succ[f.v].size()) {
        int w = g.succ[f.v][f.i++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        int v = f.v;
        call.pop_back();
        if (!call.empty())
          low[call.back().v] = std::min(low[call.back().v], low[v]);
        if (low[v] == index[v]) {
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = ncomp;
            if (w == v) break;
          }
          ++ncomp;
        }
      }
    }
  }
};

std::vector<std::vector<int>> group_sorted(const std::vector<int>& comp,
                                           int ncomp) {
  std::vector<std::vector<int>> out(ncomp);
  for (int v = 0; v < static_cast<int>(comp.size()); ++v)
    out[comp[v]].push_back(v);
  for (auto& c : out) std::sort(c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::vector<int>> strongly_connected_components(const AdjList& g) {
  TarjanState st(g);
  for (int v = 0; v < g.n; ++v)
    if (st.index[v] == -1) st.run(v);
  return group_sorted(st.comp, st.ncomp);
}

std::vector<std::vector<int>> weakly_connected_components(const AdjList& g) {
  std::vector<int> parent(g.n);
  for (int i = 0; i < g.n; ++i) parent[i] = i;
  std::vector<int>* p = &parent;
  auto find = [p](int x) {
    while ((*p)[x] != x) {
      (*p)[x] = (*p)[(*p)[x]];
      x = (*p)[x];
    }
    return x;
  };
  for (int u = 0; u < g.n; ++u)
    for (int v : g.succ[u]) {
      int a = find(u), b = find(v);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<int> comp(g.n, -1);
  int ncomp = 0;
  for (int v = 0; v < g.n; ++v) {
    int r = find(v);
    if (comp[r] == -1) comp[r] = ncomp++;
    comp[v] = comp[r];
  }
  return group_sorted(comp, ncomp);
}

}  // namespace tdg
