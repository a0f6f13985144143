#ifndef TDG_PRESENT_HPP
#define TDG_PRESENT_HPP

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tdg/model.hpp"

namespace tdg {

// ---------------------------------------------------------------------------
// Reference evaluation and materialization

// Evaluates an index at the given period / family values. Empty when the
// index needs a variable that was not supplied.
std::optional<int> eval_index(const Index& ix, std::optional<int> period,
                              std::optional<int> family);

enum class ElemKind { VertexElem, StepElem, Unknown };

struct ResolvedElem {
  std::string id;       // concrete id, e.g. "u", "v1[3]", "rays[2].d@5"
  ElemKind kind = ElemKind::Unknown;
  bool valid = false;
  std::string error;
};

// Resolves a reference to a concrete element id within the bundle,
// substituting the period/family variables. Negative evaluated indices and
// unknown names yield an invalid result with a message.
ResolvedElem eval_ref(const Bundle& d, const Ref& r, std::optional<int> period,
                      std::optional<int> family);

// A finite materialized 0-digraph window.
struct ConcreteDigraph {
  std::vector<std::string> vertices;  // sorted ids
  struct CArc {
    std::string id, tail, head;
  };
  std::vector<CArc> arcs;  // sorted by id
};

// Materializes the rank-0 part of the bundle: all concrete vertices and
// arcs plus cells 0..depth-1 of every instance (and family members
// 0..depth-1 of instance families). Template arcs whose endpoints fall
// outside the window are dropped.
ConcreteDigraph unfold_base(const Bundle& d, int depth);

// Materializes a template on its own (single anonymous instance).
ConcreteDigraph unfold_template(const CellTemplate& t, int depth);

// ---------------------------------------------------------------------------
// Walk presentations

// Structural validation of a presentation: alternation shape, reference
// resolution, cell bounds, rank-0 direction conformity along the denoted
// sequence (sampled over mid plus three periods each side).
ValidationReport validate_presentation(const Bundle& d, const WalkPresentation& p);

// The denoted sequence of element ids, left to right, materializing
// `periods` periods of each infinite side. Family walks need the family
// index of the member to unfold.
std::vector<std::string> unfold_walk(const Bundle& d, const WalkPresentation& p,
                                     int periods, std::optional<int> family = {});

// The infinite tail on one side, enumerated going away from the finite
// part (for the In side this is the reverse of sequence order).
std::vector<std::string> unfold_tail(const Bundle& d, const WalkPresentation& p,
                                     TipDir side, int periods,
                                     std::optional<int> family = {});

// Canonical form: repetends rotated to the lexicographically minimal
// rotation and the prefix trimmed to the shortest prefix not absorbed by
// the repetend. Equal denoted walks yield identical canonical forms.
// Throws DomainError("MalformedPresentation") when an infinite mode has an
// empty repetend.
WalkPresentation normalize(const Bundle& d, const WalkPresentation& p);

// True when the side's repetend instantiates injectively across periods,
// so the denoted sequence has pairwise distinct entries beyond the finite
// part.
bool is_extended(const Bundle& d, const WalkPresentation& p, TipDir side);

// Eventual identity of the denoted tails on the given side: true iff the
// two sequences share a common infinite tail. Throws
// DomainError("ModeMismatch") when ranks differ or a side is missing.
bool eventually_identical(const Bundle& d, const WalkPresentation& p,
                          const WalkPresentation& q, TipDir side);

// Bounded-unfolding oracle for the same relation: unfolds both tails to
// 2*bound elements and looks for an alignment shift under which they agree
// beyond the bound. bound <= 0 picks |mid_p| + |mid_q| + 2*lcm(|rep_p|,
// |rep_q|).
bool eventually_identical_oracle(const Bundle& d, const WalkPresentation& p,
                                 const WalkPresentation& q, TipDir side,
                                 int bound = 0);

// Canonical tail key (exposed for tests): presentations are eventually
// identical iff their keys are equal. Second element is the family-index
// rebase applied (family tips align members by its difference).
std::pair<std::string, int> canonical_tail_key(const Bundle& d,
                                               const WalkPresentation& p,
                                               TipDir side);

// ---------------------------------------------------------------------------
// Ditips

// Partitions the declared extended presentations of the given rank into
// eventual-identity classes, split by direction. Class ids are
// deterministic: "<lexicographically first member>.<in|out>".
std::vector<Ditip> compute_ditips(const Bundle& d, Rank rank);

// Resolves a tip reference like "V.in" / "V.out[r+1]" against computed
// tips: yields the class id and the index adjusted by the member's
// alignment delta. Invalid refs yield an error message.
struct ResolvedTip {
  std::string tip_id;
  std::optional<Index> index;  // adjusted; empty for non-family tips
  bool valid = false;
  std::string error;
};
ResolvedTip resolve_tip_ref(const std::vector<Ditip>& tips, const Ref& r);

// Splits "V.in" into walk id and direction; false when the name has no
// ".in"/".out" suffix.
bool split_tip_name(const std::string& name, std::string& walk, TipDir& dir);

std::string tip_dir_str(TipDir d);

}  // namespace tdg

#endif
