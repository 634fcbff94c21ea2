#ifndef OPFRAME_PERTURBATION_HPP
#define OPFRAME_PERTURBATION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "opframe/duals.hpp"
#include "opframe/frames.hpp"

namespace opframe {

// The family {T_w + c_w K}.
template <typename Scalar> struct AdditivePerturbation {
  ModuleOperator<Scalar> K;
  ScalarFunction<Scalar> c;
};

template <typename Scalar>
OperatorFamily<Scalar> perturb_additive(const OperatorFamily<Scalar> &family,
                                        const AdditivePerturbation<Scalar> &p) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  if (!(p.K.descriptor() == family.descriptor()) || p.K.rank() != family.rank()) {
    throw ShapeMismatch("perturb_additive: K does not act on the family's module");
  }
  if (p.K.flat().isZero(Scalar(0))) {
    throw InvalidArgument("perturb_additive: K must be nonzero");
  }
  if (family.is_parametric() && p.c.is_polynomial()) {
    const auto &cp = p.c.poly().coefficients;
    std::vector<Matrix> coefficients = family.coefficients();
    const std::size_t degree = std::max(coefficients.size(), cp.size());
    coefficients.resize(degree, Matrix::Zero(family.flat_dim(), family.flat_dim()));
    for (std::size_t j = 0; j < cp.size(); ++j) {
      coefficients[j] += cp[j] * p.K.flat();
    }
    return OperatorFamily<Scalar>::parametric(family.rule(), family.descriptor(),
                                              family.rank(), std::move(coefficients));
  }
  const auto c = p.c.at_nodes(family.rule());
  return map_nodes(family, [&](Eigen::Index i, const ModuleOperator<Scalar> &m) {
    return m + c(i) * p.K;
  });
}

template <typename Scalar> struct AdditiveAdmissibility {
  bool admissible = false;
  // R = int |c_w|^2 ||K||^2 dmu
  Scalar R = 0;
  // Optimal lower bound A of the unperturbed family.
  Scalar A = 0;
  // The alternative threshold int |c_w|^2 dmu < A / ||K|| evaluated as well;
  // it disagrees with R < A whenever ||K|| != 1.
  bool alternative_threshold_holds = false;
};

// Admissibility of {T_w + c_w K}: R < A (within tol).
template <typename Scalar>
AdditiveAdmissibility<Scalar> additive_admissible(const OperatorFamily<Scalar> &family,
                                                  const AdditivePerturbation<Scalar> &p,
                                                  Scalar tol = kDefaultTolerance) {
  const auto data = frame_operator(family);
  detail::require_frame(data, "additive_admissible");
  const auto c = p.c.at_nodes(family.rule());
  std::vector<Scalar> c2(static_cast<std::size_t>(c.size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c2[static_cast<std::size_t>(i)] = std::norm(c(i));
  }
  const Scalar c_mass = integrate(family.rule(), c2);
  const Scalar k_norm = operator_norm(p.K);

  AdditiveAdmissibility<Scalar> out;
  out.A = optimal_bounds(data).lower;
  out.R = c_mass * k_norm * k_norm;
  out.admissible = out.R < out.A - tol;
  out.alternative_threshold_holds = k_norm > 0 && c_mass < out.A / k_norm;
  return out;
}

// ((sqrt A - sqrt R)^2, (sqrt B + sqrt R)^2)
template <typename Scalar>
FrameBounds<Scalar> predicted_envelope_additive(Scalar lower, Scalar upper, Scalar R) {
  if (!(R >= 0)) {
    throw InvalidArgument("predicted_envelope_additive: R must be >= 0");
  }
  if (!(R < lower)) {
    throw InvalidArgument("predicted_envelope_additive: requires R < A");
  }
  const Scalar lo = std::sqrt(lower) - std::sqrt(R);
  const Scalar hi = std::sqrt(upper) + std::sqrt(R);
  return {lo * lo, hi * hi};
}

// Weights a_w, b_w and constants alpha, beta of a relative perturbation.
template <typename Scalar> struct RelativePerturbation {
  ScalarFunction<Scalar> a;
  ScalarFunction<Scalar> b;
  Scalar alpha = 0;
  Scalar beta = 0;
};

template <typename Scalar> struct Confinement {
  Scalar inf_a, sup_a, inf_b, sup_b;
};

namespace detail {

// Points where inf/sup of a weight are taken: the nodes, plus a 1000-point
// grid over the interval when the weight is a polynomial.
template <typename Scalar>
std::vector<std::complex<Scalar>> weight_values(const ScalarFunction<Scalar> &f,
                                                const QuadratureRule<Scalar> &rule) {
  const auto at_nodes = f.at_nodes(rule);
  std::vector<std::complex<Scalar>> values(at_nodes.data(), at_nodes.data() + at_nodes.size());
  if (f.is_polynomial() && rule.space.kind == MeasureKind::lebesgue_interval) {
    constexpr int grid = 1000;
    const Scalar a = rule.space.a;
    const Scalar h = (Scalar(rule.space.b) - a) / (grid - 1);
    for (int i = 0; i < grid; ++i) {
      values.push_back(f.poly()(a + i * h));
    }
  }
  return values;
}

template <typename Scalar>
std::pair<Scalar, Scalar> confined_range(const ScalarFunction<Scalar> &f,
                                         const QuadratureRule<Scalar> &rule,
                                         const char *name) {
  Scalar lo = std::numeric_limits<Scalar>::infinity();
  Scalar hi = -std::numeric_limits<Scalar>::infinity();
  for (const auto &v : weight_values(f, rule)) {
    if (std::abs(v.imag()) > 1e-14 * (1 + std::abs(v.real()))) {
      throw InvalidArgument(std::string("relative perturbation: ") + name +
                            " must be real-valued");
    }
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  if (!(lo > 0) || !std::isfinite(hi)) {
    throw InvalidArgument(std::string("relative perturbation: ") + name +
                          " is not positively confined");
  }
  return {lo, hi};
}

} // namespace detail

template <typename Scalar>
Confinement<Scalar> confinement(const RelativePerturbation<Scalar> &p,
                                const QuadratureRule<Scalar> &rule) {
  if (!(p.alpha >= 0 && p.alpha < Scalar(0.5)) || !(p.beta >= 0 && p.beta < Scalar(0.5))) {
    throw InvalidArgument("relative perturbation: alpha and beta must lie in [0, 1/2)");
  }
  const auto [inf_a, sup_a] = detail::confined_range(p.a, rule, "a");
  const auto [inf_b, sup_b] = detail::confined_range(p.b, rule, "b");
  return {inf_a, sup_a, inf_b, sup_b};
}

// Quadratic form of the relative criterion,
//   F = sum_i w_i [ (a_i M_i - b_i L_i)(a_i M_i - b_i L_i)^*
//                   - alpha a_i^2 M_i M_i^* - beta b_i^2 L_i L_i^* ],
// so that lhs - rhs of the criterion at x equals x F x^*.
template <typename Scalar>
ModuleOperator<Scalar> relative_criterion_form(const OperatorFamily<Scalar> &family,
                                               const OperatorFamily<Scalar> &other,
                                               const RelativePerturbation<Scalar> &p) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  family.require_same_shape(other);
  const auto a = p.a.at_nodes(family.rule());
  const auto b = p.b.at_nodes(family.rule());
  std::vector<Matrix> terms;
  terms.reserve(family.operators().size());
  for (Eigen::Index i = 0; i < family.size(); ++i) {
    const Matrix at = a(i) * family.at(i).flat();
    const Matrix bl = b(i) * other.at(i).flat();
    const Matrix diff = at - bl;
    terms.push_back(diff * diff.adjoint() - p.alpha * (at * at.adjoint()) -
                    p.beta * (bl * bl.adjoint()));
  }
  return ModuleOperator<Scalar>(family.descriptor(), family.rank(),
                                integrate(family.rule(), terms));
}

// int <a T x - b L x, a T x - b L x> <= alpha int <a T x, a T x>
//                                      + beta int <b L x, b L x>
// checked in the Loewner order on each x of the sample.
template <typename Scalar>
bool relative_criterion_check(const OperatorFamily<Scalar> &family,
                              const OperatorFamily<Scalar> &other,
                              const RelativePerturbation<Scalar> &p,
                              const std::vector<ModuleVector<Scalar>> &xs,
                              Scalar tol = kDefaultTolerance) {
  family.require_same_shape(other);
  const auto a = p.a.at_nodes(family.rule());
  const auto b = p.b.at_nodes(family.rule());
  for (const auto &x : xs) {
    family.require_compatible(x);
    std::vector<Element<Scalar>> lhs, tt, ll;
    for (Eigen::Index i = 0; i < family.size(); ++i) {
      const auto u = a(i) * apply(family.at(i), x);
      const auto v = b(i) * apply(other.at(i), x);
      const auto diff = u - v;
      lhs.push_back(inner_product(diff, diff));
      tt.push_back(inner_product(u, u));
      ll.push_back(inner_product(v, v));
    }
    const auto left = integrate(family.rule(), lhs);
    const auto right = p.alpha * integrate(family.rule(), tt) +
                       p.beta * integrate(family.rule(), ll);
    if (!loewner_leq(left, right, tol)) {
      return false;
    }
  }
  return true;
}

// Sample set for the criterion: seeded random vectors, the extremal
// eigenvectors of both frame operators, and the most violating direction of
// the criterion form.
template <typename Scalar>
std::vector<ModuleVector<Scalar>>
criterion_sample_set(const OperatorFamily<Scalar> &family,
                     const OperatorFamily<Scalar> &other,
                     const RelativePerturbation<Scalar> &p, int random_count,
                     std::uint64_t seed) {
  std::vector<ModuleVector<Scalar>> xs;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < random_count; ++i) {
    xs.push_back(random_vector<Scalar>(family.descriptor(), family.rank(), rng));
  }
  const auto d = family.descriptor();
  const auto n = family.rank();
  auto add_extremal = [&](const FrameOperatorData<Scalar> &data) {
    const Eigen::Index last = data.eigenvectors.cols() - 1;
    xs.push_back(vector_from_row<Scalar>(d, n, data.eigenvectors.col(0)));
    xs.push_back(vector_from_row<Scalar>(d, n, data.eigenvectors.col(last)));
  };
  add_extremal(frame_operator(family));
  add_extremal(frame_operator(other));
  add_extremal(spectral_data(relative_criterion_form(family, other, p)));
  return xs;
}

// Frame-bound envelope for {Lambda_w} under the relative criterion:
//   lower = A (1 - 2 alpha) (inf a)^2 / (2 (1 + beta) (sup b)^2)
//   upper = B 2 (1 + alpha) (sup a)^2 / ((1 - 2 beta) (inf b)^2)
template <typename Scalar>
FrameBounds<Scalar> predicted_envelope_relative(const FrameBounds<Scalar> &bounds,
                                                const RelativePerturbation<Scalar> &p,
                                                const Confinement<Scalar> &range) {
  if (!(p.alpha >= 0 && p.alpha < Scalar(0.5)) || !(p.beta >= 0 && p.beta < Scalar(0.5))) {
    throw InvalidArgument("relative perturbation: alpha and beta must lie in [0, 1/2)");
  }
  const Scalar lower = bounds.lower * (1 - 2 * p.alpha) * range.inf_a * range.inf_a /
                       (2 * (1 + p.beta) * range.sup_b * range.sup_b);
  const Scalar upper = bounds.upper * 2 * (1 + p.alpha) * range.sup_a * range.sup_a /
                       ((1 - 2 * p.beta) * range.inf_b * range.inf_b);
  return {lower, upper};
}

template <typename Scalar>
FrameBounds<Scalar> predicted_envelope_relative(const FrameBounds<Scalar> &bounds,
                                                const RelativePerturbation<Scalar> &p,
                                                const QuadratureRule<Scalar> &rule) {
  return predicted_envelope_relative(bounds, p, confinement(p, rule));
}

} // namespace opframe

#endif // OPFRAME_PERTURBATION_HPP
