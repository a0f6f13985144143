#ifndef TDG_CLOSURE_HPP
#define TDG_CLOSURE_HPP

#include <cstdint>
#include <vector>

namespace tdg {

// Adjacency of a finite digraph over vertices 0..n-1.
struct AdjList {
  int n = 0;
  std::vector<std::vector<int>> succ;

  explicit AdjList(int nodes = 0) : n(nodes), succ(nodes) {}
  void add_edge(int u, int v) { succ[u].push_back(v); }
};

// Reflexive-transitive reachability as row bitsets (row u holds everything
// reachable from u).
struct ReachMatrix {
  int n = 0;
  int words = 0;
  std::vector<std::uint64_t> bits;

  bool get(int u, int v) const {
    return (bits[static_cast<std::size_t>(u) * words + (v >> 6)] >>
            (v & 63)) &
           1u;
  }
};

// Serial reference: per-source BFS. Kept as the oracle the parallel kernel
// is tested against.
ReachMatrix reach_closure_serial(const AdjList& g);

// OpenMP kernel, parallel over sources; bit-identical to the serial one.
ReachMatrix reach_closure_parallel(const AdjList& g);

// Tarjan strongly connected components; components sorted internally and by
// smallest member.
std::vector<std::vector<int>> strongly_connected_components(const AdjList& g);

// Connected components of the underlying undirected graph.
std::vector<std::vector<int>> weakly_connected_components(const AdjList& g);

}  // namespace tdg

#endif
