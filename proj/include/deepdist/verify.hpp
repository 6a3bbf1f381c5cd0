#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deepdist {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Acceptance checks 1..11. `ids` selects a subset (empty = all). Each result
// line is written to `out` as soon as the check finishes; `log` (optional)
// receives per-cell progress of the longer Monte Carlo runs.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, std::ostream& out,
                                            std::ostream* log = nullptr);

void print_criterion(std::ostream& out, const CriterionResult& r);

}  // namespace deepdist
