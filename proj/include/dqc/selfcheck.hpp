#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dqc::selfcheck {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Always-on invariant and oracle suite: affine invariance of spacing ratios,
// unit-disc confinement, neighbor-search equality against the quadratic
// scan, superoperator trace rows, norm monotonicity, bisection postcondition
// replay, and end-to-end determinism on a fixed seed.
std::vector<CheckResult> run_all(int workers);

// Prints one line per check; returns true when everything passed.
bool run_and_report(std::ostream& out, int workers);

}  // namespace dqc::selfcheck
