#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lindscat {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs one acceptance criterion (1..9).
CriterionResult run_criterion(int index);

// subset: all | qds | dissipative | lindblad | capture.
// Prints one pass/fail line per criterion to `os`; returns the number of
// failed criteria.
int verify(const std::string& subset, std::ostream& os);

std::vector<int> criteria_for_subset(const std::string& subset);

}  // namespace lindscat
