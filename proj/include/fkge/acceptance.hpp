#ifndef FKGE_ACCEPTANCE_HPP
#define FKGE_ACCEPTANCE_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fkge {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::filesystem::path work_dir = "acceptance_out";
  int threads = 0;
  std::vector<int> only;  // empty -> run every criterion
};

/// Runs the built-in verification suite; prints one pass/fail line per
/// criterion to `log` as it goes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace fkge

#endif
