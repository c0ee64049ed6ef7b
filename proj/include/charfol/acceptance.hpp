#pragma once

// The acceptance suite, shared by the `acceptance` test binary and the CLI
// `selftest` command. Each criterion reports pass/fail with the measured
// numbers; failures are reported, never thrown.

#include "charfol/curvature.hpp"

#include <string>
#include <vector>

namespace charfol {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  double tol_ode = 1e-10;  // leaf integration tolerance used by the length criteria
  std::vector<int> only;   // empty: all criteria
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// "[PASS] 3 title: detail (0.012 s)".
std::string format_result(const CriterionResult& r);

/// Gaussian curvature of the metric induced by g^eps on a parametrized
/// surface, from the first fundamental form alone (Brioschi's formula).
double intrinsic_curvature(const Surface& s, const ContactStructure& cs, const Vec2& uv, double eps);

}  // namespace charfol
