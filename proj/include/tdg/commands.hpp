#ifndef TDG_COMMANDS_HPP
#define TDG_COMMANDS_HPP

#include <string>
#include <vector>

#include "tdg/model.hpp"

namespace tdg {

struct GlobalOpts {
  int unfold_depth = 50;
  std::string format = "text";  // text | json
  int max_components = 10000;
};

struct CommandResult {
  int exit_code = 0;  // 0 ok, 1 violations/domain errors, 2 usage
  std::string output;
};

// Dispatches one command against a parsed document. Commands and args:
//   validate
//   tips RANK
//   elevate PARTITION_TEXT [PARTITION_NAME]
//   components KIND RANK
//   reach FROM TO RANK
//   underlying
//   export-dot
CommandResult run_command(const Bundle& d, const std::string& command,
                          const std::vector<std::string>& args,
                          const GlobalOpts& opt);

// Deterministic DOT text of the bundle materialized to the given depth.
std::string export_dot(const Bundle& d, int unfold_depth);

}  // namespace tdg

#endif
