#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace attrspace {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// The built-in verification suites, in run order: "knn" (accelerated index
// vs brute force on random cases), "grad" (analytic vs finite-difference
// gradients), "gap" (batch gap loss round-sum vs the exact pairwise sum),
// "degeneration" (full-K search vs the interpolation baseline), and
// "translation" (search equivariance under input translation).
//
// `fault` names a suite to sabotage — a deliberate wrong answer is injected
// so the suite must fail; proves the checks can detect what they claim to.
std::vector<CheckResult> run_checks(std::uint64_t seed, const std::string& fault = "");

}  // namespace attrspace
