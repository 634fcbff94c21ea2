#ifndef OPFRAME_DUALS_HPP
#define OPFRAME_DUALS_HPP

#include <vector>

#include "opframe/frames.hpp"

namespace opframe {

template <typename Scalar> struct DualPairReport {
  bool is_dual = false;
  // || int T_w^* Lambda_w dmu - I ||
  Scalar resolution_residual = 0;
  FrameBounds<Scalar> dual_bounds{0, 0};
  Scalar tolerance = 0;
};

namespace detail {

template <typename Scalar>
void require_frame(const FrameOperatorData<Scalar> &data, const char *where) {
  const auto [lower, upper] = optimal_bounds(data);
  if (!(upper > 0) || lower <= kSingularityRatio * upper) {
    throw NotAFrame(std::string(where) + ": family is not a frame");
  }
}

} // namespace detail

// Canonical dual {T_w S_T^{-1}}: S^{-1} acts first, so each node operator (and
// each polynomial coefficient) is left-multiplied by s^{-1}.
template <typename Scalar>
OperatorFamily<Scalar> canonical_dual(const OperatorFamily<Scalar> &family) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  const auto data = frame_operator(family);
  detail::require_frame(data, "canonical_dual");
  const auto s_inv = inverse(data.s);
  if (family.is_parametric()) {
    std::vector<Matrix> coefficients;
    coefficients.reserve(family.coefficients().size());
    for (const auto &c : family.coefficients()) {
      coefficients.push_back(s_inv.flat() * c);
    }
    return OperatorFamily<Scalar>::parametric(family.rule(), family.descriptor(),
                                              family.rank(), std::move(coefficients));
  }
  return map_nodes(family, [&](Eigen::Index, const ModuleOperator<Scalar> &m) {
    return s_inv * m;
  });
}

// The operator x -> int T_w^*(Lambda_w x) dmu as an n x n matrix over A:
// sum_i w_i Lambda_i T_i^*.
template <typename Scalar>
ModuleOperator<Scalar> resolution_operator(const OperatorFamily<Scalar> &primal,
                                           const OperatorFamily<Scalar> &dual) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  primal.require_same_shape(dual);
  std::vector<Matrix> terms;
  terms.reserve(primal.operators().size());
  for (Eigen::Index i = 0; i < primal.size(); ++i) {
    terms.push_back(dual.at(i).flat() * primal.at(i).flat().adjoint());
  }
  return ModuleOperator<Scalar>(primal.descriptor(), primal.rank(),
                                integrate(primal.rule(), terms));
}

template <typename Scalar>
DualPairReport<Scalar> is_dual_pair(const OperatorFamily<Scalar> &primal,
                                    const OperatorFamily<Scalar> &dual,
                                    Scalar tol = kDefaultTolerance) {
  const auto r = resolution_operator(primal, dual);
  DualPairReport<Scalar> report;
  report.resolution_residual = operator_norm(
      r - ModuleOperator<Scalar>::identity(primal.descriptor(), primal.rank()));
  report.is_dual = report.resolution_residual <= tol;
  report.dual_bounds = optimal_bounds(frame_operator(dual));
  report.tolerance = tol;
  return report;
}

// Optimal bounds of the canonical dual; equal to (1/B, 1/A) of the primal.
template <typename Scalar>
FrameBounds<Scalar> dual_bounds(const OperatorFamily<Scalar> &family) {
  return optimal_bounds(frame_operator(canonical_dual(family)));
}

} // namespace opframe

#endif // OPFRAME_DUALS_HPP
