#ifndef OPFRAME_QUADRATURE_HPP
#define OPFRAME_QUADRATURE_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opframe/errors.hpp"

namespace opframe {

enum class MeasureKind { lebesgue_interval, counting };

// The measure space (Omega, mu): a Lebesgue interval [a, b] or counting
// measure on {1, ..., N}.
struct MeasureSpace {
  MeasureKind kind = MeasureKind::lebesgue_interval;
  double a = 0.0;
  double b = 1.0;
  int count = 0;

  friend bool operator==(const MeasureSpace &, const MeasureSpace &) = default;
};

enum class RuleKind { gauss_legendre, midpoint, counting };

inline std::string to_string(RuleKind kind) {
  switch (kind) {
  case RuleKind::gauss_legendre:
    return "gauss_legendre";
  case RuleKind::midpoint:
    return "midpoint";
  case RuleKind::counting:
    return "counting";
  }
  return "unknown";
}

template <typename Scalar> struct QuadratureRule {
  using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  MeasureSpace space;
  RuleKind kind = RuleKind::gauss_legendre;
  RealVector nodes;
  RealVector weights;

  Eigen::Index size() const { return nodes.size(); }

  friend bool operator==(const QuadratureRule &x, const QuadratureRule &y) {
    return x.space == y.space && x.kind == y.kind &&
           x.nodes.size() == y.nodes.size() && x.nodes == y.nodes &&
           x.weights == y.weights;
  }
};

using QuadratureRuleD = QuadratureRule<double>;

namespace detail {

inline void check_interval(double a, double b, int n) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("quadrature interval requires finite a < b");
  }
  if (n < 1) {
    throw InvalidArgument("quadrature node count must be >= 1, got " +
                          std::to_string(n));
  }
}

} // namespace detail

// N-point Gauss-Legendre rule on [a, b]. Nodes are the roots of P_N found by
// Newton iteration from the Chebyshev-like initial guesses; exact for
// polynomials of degree <= 2N - 1.
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_legendre(double a, double b, int n) {
  detail::check_interval(a, b, n);
  QuadratureRule<Scalar> rule;
  rule.space = {MeasureKind::lebesgue_interval, a, b, 0};
  rule.kind = RuleKind::gauss_legendre;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  const Scalar mid = (Scalar(b) + Scalar(a)) / 2;
  const Scalar half = (Scalar(b) - Scalar(a)) / 2;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    Scalar z = std::cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) /
                        (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p1 = 1, p2 = 0;
      for (int j = 1; j <= n; ++j) {
        const Scalar p3 = p2;
        p2 = p1;
        p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1);
      const Scalar step = p1 / dp;
      z -= step;
      if (std::abs(step) <= 4 * eps) {
        break;
      }
    }
    // Recompute the derivative at the converged root.
    {
      Scalar p1 = 1, p2 = 0;
      for (int j = 1; j <= n; ++j) {
        const Scalar p3 = p2;
        p2 = p1;
        p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1);
    }
    const Scalar w = 2 / ((1 - z * z) * dp * dp);
    // z runs from near +1 downwards; store nodes ascending.
    rule.nodes(i) = mid - half * z;
    rule.nodes(n - 1 - i) = mid + half * z;
    rule.weights(i) = half * w;
    rule.weights(n - 1 - i) = half * w;
  }
  if (n % 2 == 1) {
    rule.nodes(m - 1) = mid;
  }
  return rule;
}

// Composite midpoint rule with N equal cells.
template <typename Scalar = double>
QuadratureRule<Scalar> midpoint(double a, double b, int n) {
  detail::check_interval(a, b, n);
  QuadratureRule<Scalar> rule;
  rule.space = {MeasureKind::lebesgue_interval, a, b, 0};
  rule.kind = RuleKind::midpoint;
  rule.nodes.resize(n);
  const Scalar h = (Scalar(b) - Scalar(a)) / n;
  for (int i = 0; i < n; ++i) {
    rule.nodes(i) = Scalar(a) + (Scalar(i) + Scalar(0.5)) * h;
  }
  rule.weights = QuadratureRule<Scalar>::RealVector::Constant(n, h);
  return rule;
}

// Counting measure on {1, ..., N}; integrals become plain sums.
template <typename Scalar = double> QuadratureRule<Scalar> counting(int n) {
  if (n < 1) {
    throw InvalidArgument("counting measure requires N >= 1, got " +
                          std::to_string(n));
  }
  QuadratureRule<Scalar> rule;
  rule.space = {MeasureKind::counting, 0.0, 0.0, n};
  rule.kind = RuleKind::counting;
  rule.nodes = QuadratureRule<Scalar>::RealVector::LinSpaced(n, 1, n);
  rule.weights = QuadratureRule<Scalar>::RealVector::Ones(n);
  return rule;
}

// Rebuild a rule of the same kind on the same measure space with a new node
// count. Counting measures fix their node count, so they are rejected.
template <typename Scalar>
QuadratureRule<Scalar> with_nodes(const QuadratureRule<Scalar> &rule, int n) {
  switch (rule.kind) {
  case RuleKind::gauss_legendre:
    return gauss_legendre<Scalar>(rule.space.a, rule.space.b, n);
  case RuleKind::midpoint:
    return midpoint<Scalar>(rule.space.a, rule.space.b, n);
  case RuleKind::counting:
    break;
  }
  throw InvalidArgument("counting measure node count cannot be overridden");
}

// sum_i w_i f_i, folded left to right.
template <typename Scalar, typename T>
T integrate(const QuadratureRule<Scalar> &rule, std::span<const T> samples) {
  if (static_cast<Eigen::Index>(samples.size()) != rule.size()) {
    throw ShapeMismatch("integrate: " + std::to_string(samples.size()) +
                        " samples for " + std::to_string(rule.size()) + " nodes");
  }
  if (samples.empty()) {
    throw InvalidArgument("integrate: empty rule");
  }
  T acc = rule.weights(0) * samples[0];
  for (std::size_t i = 1; i < samples.size(); ++i) {
    acc += rule.weights(static_cast<Eigen::Index>(i)) * samples[i];
  }
  return acc;
}

template <typename Scalar, typename T>
T integrate(const QuadratureRule<Scalar> &rule, const std::vector<T> &samples) {
  return integrate(rule, std::span<const T>(samples));
}

} // namespace opframe

#endif // OPFRAME_QUADRATURE_HPP
