#ifndef OPFRAME_FAMILY_HPP
#define OPFRAME_FAMILY_HPP

#include <optional>
#include <vector>

#include "opframe/hilbert_module.hpp"
#include "opframe/quadrature.hpp"

namespace opframe {

// Complex polynomial in the real parameter w, coefficients lowest degree first.
template <typename Scalar> struct Polynomial {
  using Complex = std::complex<Scalar>;

  std::vector<Complex> coefficients;

  static Polynomial constant(Complex c) { return Polynomial{{c}}; }

  Complex operator()(Scalar w) const {
    Complex acc(0);
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
      acc = acc * w + *it;
    }
    return acc;
  }

  friend bool operator==(const Polynomial &, const Polynomial &) = default;
};

// A scalar function of w given either as a polynomial or by its values at
// the quadrature nodes.
template <typename Scalar> class ScalarFunction {
public:
  using Complex = std::complex<Scalar>;
  using ComplexVector = typename MatrixTypes<Scalar>::ComplexVector;

  static ScalarFunction polynomial(Polynomial<Scalar> p) {
    ScalarFunction f;
    f.poly_ = std::move(p);
    return f;
  }
  static ScalarFunction constant(Complex c) {
    return polynomial(Polynomial<Scalar>::constant(c));
  }
  static ScalarFunction sampled(ComplexVector values) {
    ScalarFunction f;
    f.samples_ = std::move(values);
    return f;
  }

  bool is_polynomial() const { return poly_.has_value(); }
  const Polynomial<Scalar> &poly() const { return *poly_; }
  const ComplexVector &samples() const { return samples_; }

  // Values at the nodes of rule.
  ComplexVector at_nodes(const QuadratureRule<Scalar> &rule) const {
    if (poly_) {
      ComplexVector out(rule.size());
      for (Eigen::Index i = 0; i < rule.size(); ++i) {
        out(i) = (*poly_)(rule.nodes(i));
      }
      return out;
    }
    if (samples_.size() != rule.size()) {
      throw ShapeMismatch("sampled function has " + std::to_string(samples_.size()) +
                          " values for " + std::to_string(rule.size()) + " nodes");
    }
    return samples_;
  }

private:
  std::optional<Polynomial<Scalar>> poly_;
  ComplexVector samples_;
};

// The family {T_w} evaluated at the nodes of a quadrature rule.
//
// A parametric family is the matrix polynomial T(w) = sum_p C_p w^p with each
// C_p an (n k) x (n k) flattened operator; a sampled family only knows its
// node operators. Either way the node operators are materialised once.
template <typename Scalar> class OperatorFamily {
public:
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  using Operator = ModuleOperator<Scalar>;

  static OperatorFamily parametric(QuadratureRule<Scalar> rule, AlgebraDescriptor d,
                                   Eigen::Index rank, std::vector<Matrix> coefficients) {
    if (coefficients.empty()) {
      throw InvalidArgument("parametric family needs at least one coefficient");
    }
    OperatorFamily f(std::move(rule), d, rank);
    // Validates the shape and block pattern of every coefficient.
    for (const auto &c : coefficients) {
      Operator(d, rank, c);
    }
    f.coefficients_ = std::move(coefficients);
    for (Eigen::Index i = 0; i < f.rule_.size(); ++i) {
      f.operators_.push_back(f.evaluate(f.rule_.nodes(i)));
    }
    return f;
  }

  static OperatorFamily sampled(QuadratureRule<Scalar> rule,
                                std::vector<Operator> operators) {
    if (operators.empty()) {
      throw InvalidArgument("sampled family needs at least one operator");
    }
    if (static_cast<Eigen::Index>(operators.size()) != rule.size()) {
      throw ShapeMismatch("sampled family has " + std::to_string(operators.size()) +
                          " operators for " + std::to_string(rule.size()) + " nodes");
    }
    for (const auto &m : operators) {
      operators.front().require_same_shape(m);
    }
    OperatorFamily f(std::move(rule), operators.front().descriptor(),
                     operators.front().rank());
    f.operators_ = std::move(operators);
    return f;
  }

  const QuadratureRule<Scalar> &rule() const { return rule_; }
  const AlgebraDescriptor &descriptor() const { return descriptor_; }
  Eigen::Index rank() const { return rank_; }
  Eigen::Index flat_dim() const { return rank_ * descriptor_.dim; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(operators_.size()); }

  const Operator &at(Eigen::Index i) const {
    return operators_[static_cast<std::size_t>(i)];
  }
  const std::vector<Operator> &operators() const { return operators_; }

  bool is_parametric() const { return !coefficients_.empty(); }
  const std::vector<Matrix> &coefficients() const { return coefficients_; }

  Operator evaluate(Scalar w) const {
    if (!is_parametric()) {
      throw InvalidArgument("sampled family cannot be evaluated off its nodes");
    }
    Matrix acc = coefficients_.back();
    for (auto it = coefficients_.rbegin() + 1; it != coefficients_.rend(); ++it) {
      acc = acc * w + *it;
    }
    return Operator(descriptor_, rank_, std::move(acc));
  }

  // Same family on another rule. Only parametric families can be resampled.
  OperatorFamily with_rule(QuadratureRule<Scalar> rule) const {
    if (!is_parametric()) {
      throw InvalidArgument("sampled family cannot be moved to another rule");
    }
    return parametric(std::move(rule), descriptor_, rank_, coefficients_);
  }

  bool same_shape(const OperatorFamily &other) const {
    return descriptor_ == other.descriptor_ && rank_ == other.rank_ &&
           rule_ == other.rule_;
  }
  void require_same_shape(const OperatorFamily &other) const {
    if (!same_shape(other)) {
      throw ShapeMismatch("operator families differ in shape or quadrature rule");
    }
  }

  void require_compatible(const ModuleVector<Scalar> &x) const {
    if (!(descriptor_ == x.descriptor()) || rank_ != x.rank()) {
      throw ShapeMismatch("vector shape does not match the operator family");
    }
  }

private:
  OperatorFamily(QuadratureRule<Scalar> rule, AlgebraDescriptor d, Eigen::Index rank)
      : rule_(std::move(rule)), descriptor_(AlgebraDescriptor::checked(d)),
        rank_(rank) {
    if (rank_ < 1) {
      throw InvalidArgument("module rank must be >= 1");
    }
  }

  QuadratureRule<Scalar> rule_;
  AlgebraDescriptor descriptor_;
  Eigen::Index rank_;
  std::vector<Matrix> coefficients_;
  std::vector<Operator> operators_;
};

using OperatorFamilyD = OperatorFamily<double>;
using PolynomialD = Polynomial<double>;
using ScalarFunctionD = ScalarFunction<double>;

// Apply fn to every node operator. The result is sampled unless the caller
// also provides a coefficient map, in which case it stays parametric.
template <typename Scalar, typename NodeFn>
OperatorFamily<Scalar> map_nodes(const OperatorFamily<Scalar> &family, NodeFn &&fn) {
  std::vector<ModuleOperator<Scalar>> out;
  out.reserve(family.operators().size());
  for (Eigen::Index i = 0; i < family.size(); ++i) {
    out.push_back(fn(i, family.at(i)));
  }
  return OperatorFamily<Scalar>::sampled(family.rule(), std::move(out));
}

} // namespace opframe

#endif // OPFRAME_FAMILY_HPP
