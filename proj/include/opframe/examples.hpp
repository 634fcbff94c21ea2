#ifndef OPFRAME_EXAMPLES_HPP
#define OPFRAME_EXAMPLES_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "opframe/scenario.hpp"

namespace opframe {

// T_w : diag(a, b) -> diag(w a, (sqrt(3)/2) w b) on the diagonal 2 x 2 algebra
// over [0, 1] with Lebesgue measure.
OperatorFamilyD example_frame_family(const QuadratureRuleD &rule);

// Lambda_w : diag(a, b) -> diag(3 w a, 2 sqrt(3) w b), the canonical dual of
// example_frame_family.
OperatorFamilyD example_dual_family(const QuadratureRuleD &rule);

Scenario example_frame_scenario(int nodes = 32);

struct VerificationCheck {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string diagnostic;
};

struct VerificationResult {
  std::vector<VerificationCheck> checks;
  bool passed() const;
  // Name of the first failed check, empty when everything passed.
  std::string first_failure() const;
  nlohmann::json to_json() const;
};

// Re-derives the two worked examples (frame bounds, frame operator, canonical
// dual family and its bounds, resolution of the identity) at the given
// tolerance using an N-node Gauss-Legendre rule on [0, 1].
VerificationResult verify_examples(double tol = 1e-10, int nodes = 32);

} // namespace opframe

#endif // OPFRAME_EXAMPLES_HPP
