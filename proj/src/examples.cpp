#include "opframe/examples.hpp"

#include <cmath>
#include <limits>

namespace opframe {

namespace {

const AlgebraDescriptor kDiag2 = AlgebraDescriptor::diagonal(2);

MatrixD diag2(double a, double b) {
  MatrixD m = MatrixD::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Linear family w -> diag(a w, b w).
OperatorFamilyD linear_diagonal_family(const QuadratureRuleD &rule, double a, double b) {
  return OperatorFamilyD::parametric(rule, kDiag2, 1, {MatrixD::Zero(2, 2), diag2(a, b)});
}

std::string format(double v) { return nlohmann::json(v).dump(); }

} // namespace

OperatorFamilyD example_frame_family(const QuadratureRuleD &rule) {
  return linear_diagonal_family(rule, 1.0, std::sqrt(3.0) / 2);
}

OperatorFamilyD example_dual_family(const QuadratureRuleD &rule) {
  return linear_diagonal_family(rule, 3.0, 2 * std::sqrt(3.0));
}

Scenario example_frame_scenario(int nodes) {
  Scenario s;
  s.name = "diagonal-2x2-linear-frame";
  s.algebra = kDiag2;
  s.module_rank = 1;
  s.measure = {MeasureKind::lebesgue_interval, 0.0, 1.0, RuleKind::gauss_legendre, nodes};
  s.family.form = FamilySpec::Form::parametric;
  const PolynomialD zero;
  s.family.entries = {{PolynomialD{{0.0, 1.0}}, zero},
                      {zero, PolynomialD{{0.0, std::sqrt(3.0) / 2}}}};
  return s;
}

bool VerificationResult::passed() const { return first_failure().empty(); }

std::string VerificationResult::first_failure() const {
  for (const auto &c : checks) {
    if (!c.passed) {
      return c.name;
    }
  }
  return {};
}

nlohmann::json VerificationResult::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto &c : checks) {
    nlohmann::json row = {{"name", c.name},
                          {"error", c.error},
                          {"tolerance", c.tolerance},
                          {"passed", c.passed}};
    if (!c.diagnostic.empty()) {
      row["diagnostic"] = c.diagnostic;
    }
    out.push_back(std::move(row));
  }
  return out;
}

VerificationResult verify_examples(double tol, int nodes) {
  VerificationResult result;
  const auto rule = gauss_legendre(0.0, 1.0, nodes);
  const double eps = std::numeric_limits<double>::epsilon();

  auto check = [&](std::string name, double error, double scale) {
    VerificationCheck c{std::move(name), error, tol, error <= tol, {}};
    if (!c.passed) {
      if (nodes < 2) {
        c.diagnostic = "a " + std::to_string(nodes) +
                       "-point Gauss-Legendre rule is exact only up to degree " +
                       std::to_string(2 * nodes - 1) +
                       "; the integrands are quadratic in w and need N >= 2";
      } else if (error <= 64 * eps * (1 + scale)) {
        c.diagnostic = "error " + format(error) +
                       " is at double-precision quadrature roundoff; the tolerance " +
                       format(tol) + " is below attainable precision";
      }
    }
    result.checks.push_back(std::move(c));
  };

  const auto family = example_frame_family(rule);
  const auto data = frame_operator(family);
  const auto bounds = optimal_bounds(data);
  check("frame.frame_operator",
        detail::spectral_norm(data.s.flat() - diag2(1.0 / 3, 0.25)), 1.0 / 3);
  check("frame.lower_bound", std::abs(bounds.lower - 0.25), 0.25);
  check("frame.upper_bound", std::abs(bounds.upper - 1.0 / 3), 1.0 / 3);
  {
    const auto report = classify(data, tol);
    VerificationCheck c{"frame.classification", report.is_frame() ? 0.0 : 1.0, tol,
                        report.classification == FrameClass::frame, {}};
    if (!c.passed) {
      c.diagnostic = "classified as " + to_string(report.classification);
    }
    result.checks.push_back(std::move(c));
  }

  // Canonical dual against the closed-form dual family.
  const auto closed_form = example_dual_family(rule);
  double coeff_error = std::numeric_limits<double>::infinity();
  try {
    const auto dual = canonical_dual(family);
    coeff_error = 0.0;
    const auto &got = dual.coefficients();
    const auto &want = closed_form.coefficients();
    for (std::size_t p = 0; p < std::max(got.size(), want.size()); ++p) {
      const MatrixD g = p < got.size() ? got[p] : MatrixD::Zero(2, 2);
      const MatrixD w = p < want.size() ? want[p] : MatrixD::Zero(2, 2);
      coeff_error = std::max(coeff_error, (g - w).cwiseAbs().maxCoeff());
    }
    check("dual.family_coefficients", coeff_error, 2 * std::sqrt(3.0));
    const auto dual_b = optimal_bounds(frame_operator(dual));
    check("dual.lower_bound", std::abs(dual_b.lower - 3.0), 3.0);
    check("dual.upper_bound", std::abs(dual_b.upper - 4.0), 4.0);
    check("dual.canonical_resolution", is_dual_pair(family, dual, tol).resolution_residual,
          1.0);
  } catch (const Error &e) {
    VerificationCheck c{"dual.family_coefficients", coeff_error, tol, false, e.what()};
    result.checks.push_back(std::move(c));
  }

  const auto closed_form_data = frame_operator(closed_form);
  check("dual.closed_form_frame_operator",
        detail::spectral_norm(closed_form_data.s.flat() - diag2(3.0, 4.0)), 4.0);
  check("dual.closed_form_resolution",
        is_dual_pair(family, closed_form, tol).resolution_residual, 1.0);
  return result;
}

} // namespace opframe
