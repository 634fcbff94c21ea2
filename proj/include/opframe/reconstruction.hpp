#ifndef OPFRAME_RECONSTRUCTION_HPP
#define OPFRAME_RECONSTRUCTION_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "opframe/frames.hpp"

namespace opframe {

enum class ReconstructionMethod { direct, neumann };

inline std::string to_string(ReconstructionMethod m) {
  return m == ReconstructionMethod::direct ? "direct" : "neumann";
}

// Step size of the Neumann/Richardson iteration.
struct Relaxation {
  enum class Kind { reciprocal_upper, optimal, fixed };
  Kind kind = Kind::reciprocal_upper;
  double value = 0.0;

  // lambda = 1 / B
  static Relaxation reciprocal_upper() { return {Kind::reciprocal_upper, 0.0}; }
  // lambda = 2 / (A + B)
  static Relaxation optimal() { return {Kind::optimal, 0.0}; }
  static Relaxation fixed(double lambda) { return {Kind::fixed, lambda}; }
};

template <typename Scalar> struct ReconstructionResult {
  ModuleVector<Scalar> x_hat;
  int iterations = 0;
  // Relative residuals ||y - x_m s|| / (||y|| + 1). For the iterative method
  // entry 0 belongs to the zero starting point, entry m to iterate m.
  std::vector<Scalar> residual_history;
  ReconstructionMethod method = ReconstructionMethod::direct;
  Scalar relaxation = 0;
  // Certified per-step contraction max(|1 - lambda A|, |1 - lambda B|).
  Scalar contraction = 0;

  Scalar final_residual() const { return residual_history.back(); }
};

template <typename Scalar>
Scalar relative_residual(const ModuleOperator<Scalar> &s, const ModuleVector<Scalar> &x,
                         const ModuleVector<Scalar> &y) {
  return scalar_norm(y - apply(s, x)) / (scalar_norm(y) + 1);
}

namespace detail {

template <typename Scalar> bool singular_spectrum(const FrameOperatorData<Scalar> &data) {
  const auto [lower, upper] = optimal_bounds(data);
  return !(upper > 0) || lower <= kSingularityRatio * upper;
}

} // namespace detail

// x = y s^{-1}: inverts y = S_T x.
template <typename Scalar>
ReconstructionResult<Scalar> reconstruct_direct(const FrameOperatorData<Scalar> &data,
                                                const ModuleVector<Scalar> &y) {
  if (detail::singular_spectrum(data)) {
    throw SingularFrameOperator(
        "reconstruct_direct: frame operator is singular (family is not a frame)");
  }
  auto x = apply(inverse(data.s), y);
  ReconstructionResult<Scalar> result{std::move(x), 0, {}, ReconstructionMethod::direct,
                                      Scalar(0), Scalar(0)};
  result.residual_history.push_back(relative_residual(data.s, result.x_hat, y));
  return result;
}

template <typename Scalar>
Scalar relaxation_parameter(const FrameBounds<Scalar> &bounds, const Relaxation &r) {
  switch (r.kind) {
  case Relaxation::Kind::reciprocal_upper:
    return 1 / bounds.upper;
  case Relaxation::Kind::optimal:
    return 2 / (bounds.lower + bounds.upper);
  case Relaxation::Kind::fixed:
    break;
  }
  const Scalar lambda = static_cast<Scalar>(r.value);
  if (!(lambda > 0) || !(lambda < 2 / bounds.upper)) {
    throw InvalidArgument("relaxation parameter must lie in (0, 2/B)");
  }
  return lambda;
}

template <typename Scalar>
Scalar contraction_factor(const FrameBounds<Scalar> &bounds, Scalar lambda) {
  return std::max(std::abs(1 - lambda * bounds.lower), std::abs(1 - lambda * bounds.upper));
}

// Richardson iteration x_{m+1} = x_m + lambda (y - x_m s) from x_0 = 0; the
// first iterate is lambda y. Converges to y s^{-1} because
// ||I - lambda s|| = q < 1 for a frame and lambda in (0, 2/B).
template <typename Scalar>
ReconstructionResult<Scalar>
reconstruct_neumann(const FrameOperatorData<Scalar> &data, const ModuleVector<Scalar> &y,
                    Relaxation relaxation = Relaxation::reciprocal_upper(), Scalar tol = Scalar(1e-12),
                    int max_iter = 1000) {
  if (detail::singular_spectrum(data)) {
    throw NotAFrame("reconstruct_neumann: frame operator is singular");
  }
  const auto bounds = optimal_bounds(data);
  const Scalar lambda = relaxation_parameter(bounds, relaxation);

  ReconstructionResult<Scalar> result{ModuleVector<Scalar>::zero(y.descriptor(), y.rank()),
                                      0,
                                      {},
                                      ReconstructionMethod::neumann,
                                      lambda,
                                      contraction_factor(bounds, lambda)};
  result.residual_history.push_back(relative_residual(data.s, result.x_hat, y));
  while (result.residual_history.back() > tol) {
    if (result.iterations >= max_iter) {
      throw NoConvergence("reconstruct_neumann: no convergence after " +
                              std::to_string(max_iter) + " iterations",
                          static_cast<double>(result.residual_history.back()));
    }
    result.x_hat += lambda * (y - apply(data.s, result.x_hat));
    ++result.iterations;
    result.residual_history.push_back(relative_residual(data.s, result.x_hat, y));
  }
  return result;
}

} // namespace opframe

#endif // OPFRAME_RECONSTRUCTION_HPP
