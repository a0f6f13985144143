#ifndef TDG_WALK_HPP
#define TDG_WALK_HPP

#include <optional>
#include <string>
#include <vector>

#include "tdg/model.hpp"
#include "tdg/present.hpp"

namespace tdg {

enum class Termination { TwoEnded, OneEndedLeft, OneEndedRight, Endless };
enum class IncidenceKind { Inward, Outward, None };

std::string termination_str(Termination t);

// An explicit, validated walk: alternating vertex and step element ids.
struct Diwalk {
  Rank rank = Rank::finite(0);
  std::vector<std::string> elements;
  Termination termination = Termination::TwoEnded;
};

struct Semiwalk {
  Rank rank = Rank::finite(0);
  std::vector<std::string> elements;
  Termination termination = Termination::TwoEnded;
};

// Validates an explicit alternating element sequence as a diwalk of the
// given rank. Accepts the trivial walk (one vertex), lower-rank walks as
// special cases, and mixed-rank terminations under the rank bound
// gamma >= max(alpha-1, beta-1). Throws DomainError with codes
// NonConformingDirection, BadIncidence, RankBoundViolated,
// DanglingTermination, BadAlternation, UnknownElement.
Diwalk validate_diwalk(const Bundle& d, const std::vector<std::string>& elements,
                       Rank rank);

// Orientation-free variant: arc and step directions need not conform, only
// incidence is checked. Throws BadIncidence (and shape errors) only.
Semiwalk validate_semiwalk(const Bundle& d,
                           const std::vector<std::string>& elements, Rank rank);

// Termination of a presented walk.
Termination classify_termination(const WalkPresentation& p);

// Incidence of a presented walk at a vertex: Inward when the walk starts
// at the vertex or traverses an intip contained in it; Outward when it
// ends there or traverses a contained outtip.
IncidenceKind incidence(const Bundle& d, const WalkPresentation& w,
                        const std::string& vertex_id,
                        std::optional<int> family = {});

// True iff the walk's tail on t's side is eventually identical to a
// representative of t.
bool traverses(const Bundle& d, const WalkPresentation& w, const Ditip& t);

// True when the vertex instance denoted by `vertex` (literal indices)
// contains the tip of walk `walk_id` (at `walk_index` for family walks) on
// the given side, judged against the computed tip table.
bool vertex_contains_tip(const Bundle& d, const std::vector<Ditip>& tips,
                         const Ref& vertex, const std::string& walk_id,
                         std::optional<int> walk_index, TipDir dir);

}  // namespace tdg

#endif
