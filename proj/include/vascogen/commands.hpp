#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vascogen {

// Stable CLI exit codes:
//   0 success, 1 input/config error, 2 growth stalled,
//   3 validation failure, 4 I/O error.
enum ExitStatus : int {
  exit_ok = 0,
  exit_input_error = 1,
  exit_growth_stalled = 2,
  exit_validation_failure = 3,
  exit_io_error = 4,
};

struct GenerateArgs {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides; // --set key=value
  bool svg = false;
  std::string log_path; // --log PATH (overrides config eval_log)
  std::string out_path; // --out PATH (overrides config output.tree)
  int threads = 1;
};

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);
int cmd_validate(const std::string& tree_path, const std::string& config_path, std::ostream& out,
                 std::ostream& err);
int cmd_stats(const std::string& tree_path, std::ostream& out, std::ostream& err);

} // namespace vascogen
