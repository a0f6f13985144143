#ifndef TDG_CONNECT_HPP
#define TDG_CONNECT_HPP

#include <optional>
#include <string>
#include <vector>

#include "tdg/closure.hpp"
#include "tdg/model.hpp"
#include "tdg/present.hpp"

namespace tdg {

enum class ConnectKind { Strong, Unilateral, Weak };

std::string connect_kind_str(ConnectKind k);

struct ConnectOptions {
  int unfold_depth = 50;      // window and oracle bound
  int max_components = 10000; // unilateral enumeration cap
};

// ---------------------------------------------------------------------------
// Periodic reachability over a cell template's infinite instantiation.

// Exact decision: does a directed walk exist from (from_node, from_cell) to
// (to_node, to_cell) in the infinite instantiation? Window growth with
// repetition detection over interface profiles.
bool periodic_reach(const CellTemplate& t, const std::string& from_node,
                    int from_cell, const std::string& to_node, int to_cell);

// Bounded-unfolding BFS over cells [0, depth); the test oracle and the
// fallback behind the depth flag.
bool periodic_reach_window(const CellTemplate& t, const std::string& from_node,
                           int from_cell, const std::string& to_node,
                           int to_cell, int depth);

// Every (node, cell) with cell <= low_bound reachable from the source in
// the infinite instantiation; one window-growth run answers all of them.
std::vector<std::pair<std::string, int>> periodic_reach_set(
    const CellTemplate& t, const std::string& from_node, int from_cell,
    int low_bound);

struct TemplateFacts {
  bool has_mutual_pair = false;    // two distinct vertices mutually reachable
  bool undirected_connected = true;  // every vertex weakly connected to every other
};
TemplateFacts analyze_template(const CellTemplate& t);

// ---------------------------------------------------------------------------
// Incidence structure

// Block-level incidence digraph: one node per concrete vertex, per vertex
// family and per instance; one edge per witnessed diwalk direction, with
// the family-index offset where both ends carry the index.
struct IncidenceDigraph {
  struct Node {
    std::string id;
    enum Kind { ConcreteV, FamilyV, InstanceBlock } kind = ConcreteV;
  };
  struct Edge {
    int from = 0, to = 0;
    std::optional<int> delta;  // family-index offset
    std::string witness;       // arc or walk id
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  int find(const std::string& id) const;
};

IncidenceDigraph build_incidence(const Bundle& d, Rank rank);

// Finite materialization of the rank-incidence structure: all vertices of
// rank <= rank within the window (instance cells and family indices below
// depth) and every reach edge witnessed by arcs, declared walks and tip
// memberships.
struct MaterializedGraph {
  std::vector<std::string> ids;  // sorted
  AdjList adj;
  int index_of(const std::string& id) const;
};

MaterializedGraph materialize_incidence(const Bundle& d, Rank rank, int depth);

// ---------------------------------------------------------------------------
// Components

struct ComponentBlock {
  std::vector<std::string> members;  // vertex ids, or patterns for families
  bool per_index = false;  // pattern denotes one component per family index
};

struct ComponentSet {
  ConnectKind kind = ConnectKind::Strong;
  Rank rank = Rank::finite(0);
  std::vector<ComponentBlock> blocks;
  std::string method;  // "finite", "periodic" or "window"
  int window_depth = 0;
  bool truncated = false;
};

ComponentSet components(const Bundle& d, Rank rank, ConnectKind kind,
                        const ConnectOptions& opt = {});

// Pairwise connectivity between two vertex ids at a rank. Throws
// DomainError("UnknownVertex") for unresolvable endpoints.
struct ReachAnswer {
  bool connected = false;
  std::string method;
  int window_depth = 0;
};
ReachAnswer connected(const Bundle& d, const std::string& u,
                      const std::string& v, Rank rank, ConnectKind kind,
                      const ConnectOptions& opt = {});

// Directed reachability: does a diwalk of the rank run from u to v?
ReachAnswer reach_query(const Bundle& d, const std::string& u,
                        const std::string& v, Rank rank,
                        const ConnectOptions& opt = {});

// Unilateral components of a finite digraph given directly (exposed for the
// subset brute-force acceptance checks): maximal chains in the condensation
// order. Sets `truncated` when the cap is hit.
std::vector<std::vector<int>> unilateral_components_finite(
    const AdjList& g, int max_components, bool& truncated);

}  // namespace tdg

#endif
