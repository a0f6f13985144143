#ifndef TDG_ELEVATE_HPP
#define TDG_ELEVATE_HPP

#include <map>
#include <string>
#include <vector>

#include "tdg/model.hpp"
#include "tdg/present.hpp"

namespace tdg {

// Direction-forgotten copy of a bundle: arcs become branches, vertices
// become nodes, ditips become undirected tips. Level ids stay in bijection
// with the bundle's.
struct UnderlyingGraph {
  struct Branch {
    std::string id, end1, end2;
  };
  std::vector<Branch> branches;
  std::map<int, std::vector<std::string>> node_levels;  // rank -> ids
  std::map<int, std::vector<std::string>> tip_levels;   // rank -> tip ids
};

struct PartitionResult {
  std::vector<Vertex> vertices;
  std::vector<VertexFamily> families;
};

// One next-rank vertex per partition cell, members = cell contents. Throws
// EmptyTipSet when the bundle has no tips at the partition rank and
// NotAPartition when cells miss or doubly assign a tip.
PartitionResult partition_tips(const Bundle& d, const PartitionSpec& spec);

// The bundle extended by one level built from the partition; the input is
// unchanged. Requires spec.rank == d.rank.
Bundle elevate(const Bundle& d, const PartitionSpec& spec);

UnderlyingGraph underlying_graph(const Bundle& d);

// Convenience generators; the partition choice is semantic, so these are
// only helpers the caller must ask for explicitly.
PartitionSpec discrete_partition(const Bundle& d, Rank rho);
PartitionSpec indiscrete_partition(const Bundle& d, Rank rho);

}  // namespace tdg

#endif
