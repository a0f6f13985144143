#ifndef TDG_SPEC_DOC_HPP
#define TDG_SPEC_DOC_HPP

#include <string>
#include <vector>

#include "tdg/model.hpp"

namespace tdg {

struct ParseError {
  int line = 0, col = 0;
  std::string code;  // SyntaxError, DuplicateId, ForwardReference
  std::string message;
};

struct ParseResult {
  Bundle bundle;
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty(); }
};

// Parses the line-oriented .tdg format. `#` starts a comment. Statements:
//   digraph NAME rank R
//   template ID { node ID; arc ID from NODE@k+D to NODE@k+D; }
//   instance ID template TID
//   instance-family ID template TID index VAR
//   vertex ID rank R [{ intip REF; outtip REF; ... }]
//   vertex-family ID rank R index VAR { intip REF; ... }
//   arc ID from REF to REF
//   walk ID rank R [ ELEM ... ]
//   walk-presentation ID rank R mode out prefix [...] repetend [...] anchor N
//   walk-presentation ID rank R mode in repetend [...] anchor N prefix [...]
//   walk-presentation ID rank R mode endless in-repetend [...] in-anchor N
//       middle [...] out-repetend [...] out-anchor N
//   walk-family ID rank R index VAR mode ... (bodies as above)
//   partition ID rank R { CELL: REF, ...; CELL[VAR]: REF, ...; }
//   arrow-template base N { vertex-pattern ID from N members [ REF ... ];
//       walk-pattern ID from N mode out|in terminal REF tips in|out|both; }
//   arrow-walk ID mode out|in base REF spine VP WP
//   arrow-walk ID mode endless base REF out-spine VP WP in-spine VP WP
// The repetend/cell variable is always `k`; family index variables are
// declared per statement. List brackets need surrounding whitespace; index
// brackets must not have any.
ParseResult parse_spec(const std::string& text);

// Canonical form; parse(print_spec(parse(text))) equals parse(text).
std::string print_spec(const Bundle& d);

// Convenience: parse or throw DomainError("ParseFailed") with the first
// error message.
Bundle parse_spec_or_throw(const std::string& text);

}  // namespace tdg

#endif
