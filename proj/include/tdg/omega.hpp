#ifndef TDG_OMEGA_HPP
#define TDG_OMEGA_HPP

#include <string>
#include <vector>

#include "tdg/elevate.hpp"
#include "tdg/model.hpp"
#include "tdg/walk.hpp"

namespace tdg {

// Structural validation of the arrow-rank template and the declared arrow
// walks: rank maps, terminal and tip linkage, checked by materializing the
// level patterns at k = 0..3 plus uniformity of the declarations.
ValidationReport validate_arrow(const Bundle& d);

// Validation of the omega level: V^omega cells partition the arrow ditips.
ValidationReport validate_omega_level(const Bundle& d);

struct ArrowLevelStub {
  int level = 0;
  Rank rank = Rank::finite(0);
  std::vector<Vertex> vertices;
  std::vector<std::string> walks;
};

// Materializes levels 0..upto of the arrow template. Throws
// DomainError("TemplateInstantiationError") naming the failing level on id
// collisions or unresolvable members.
std::vector<ArrowLevelStub> materialize_arrow_levels(const Bundle& d, int upto);

// Marks the bundle as arrow-ranked after validating the template; throws
// TemplateInstantiationError when the spot checks fail.
Bundle assemble_arrow(const Bundle& base);

// True when the declared arrow walk denotes a sequence with all terms
// distinct beyond finitely many; rank shifts make this equivalent to the
// walk validating. Throws DomainError("InvalidArrowWalk") otherwise.
bool is_extended_arrow(const Bundle& d, const ArrowWalk& w);

// Joins an in-diwalk and an out-diwalk sharing the base vertex. Throws
// DomainError("BaseMismatch").
ArrowWalk join_endless(const Bundle& d, const ArrowWalk& win,
                       const ArrowWalk& wout);

// Eventual-identity classes of the declared, valid arrow walks.
std::vector<Ditip> arrow_ditips(const Bundle& d);

// Adds V^omega per the partition of the arrow ditips. Throws EmptyTipSet
// and NotAPartition.
Bundle elevate_to_omega(const Bundle& d, const PartitionSpec& spec);

// Validates an explicit alternating sequence of omega vertices and endless
// arrow walks (plus lower-rank terminal vertices).
Diwalk validate_omega_diwalk(const Bundle& d,
                             const std::vector<std::string>& elements);

}  // namespace tdg

#endif
