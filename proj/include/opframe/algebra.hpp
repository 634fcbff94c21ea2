#ifndef OPFRAME_ALGEBRA_HPP
#define OPFRAME_ALGEBRA_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "opframe/errors.hpp"

namespace opframe {

// Default relative tolerance for positivity and Loewner comparisons. The
// absolute floor used by a check is tol * (1 + ||a||).
inline constexpr double kDefaultTolerance = 1e-10;

// sigma_min <= kSingularityRatio * sigma_max is treated as singular.
inline constexpr double kSingularityRatio = 1e-13;

enum class AlgebraKind { full, diagonal };

inline std::string to_string(AlgebraKind kind) {
  return kind == AlgebraKind::full ? "full" : "diagonal";
}

// The C*-algebra M_k(C), or its diagonal subalgebra.
struct AlgebraDescriptor {
  AlgebraKind kind = AlgebraKind::full;
  Eigen::Index dim = 1;

  static AlgebraDescriptor full(Eigen::Index k) {
    return checked({AlgebraKind::full, k});
  }
  static AlgebraDescriptor diagonal(Eigen::Index k) {
    return checked({AlgebraKind::diagonal, k});
  }
  static AlgebraDescriptor checked(AlgebraDescriptor d) {
    if (d.dim < 1) {
      throw InvalidArgument("algebra dimension must be >= 1, got " +
                            std::to_string(d.dim));
    }
    return d;
  }

  bool is_diagonal() const { return kind == AlgebraKind::diagonal; }

  friend bool operator==(const AlgebraDescriptor &,
                         const AlgebraDescriptor &) = default;
};

template <typename Scalar> struct MatrixTypes {
  using Real = Scalar;
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
};

namespace detail {

// True when every entry off the "slot diagonal" (row % k != col % k) is
// exactly zero. For a k x k matrix this is plain diagonality; for flattened
// module vectors and operators over a diagonal algebra it says that every
// k x k block is diagonal.
template <typename Derived>
bool slot_diagonal(const Eigen::MatrixBase<Derived> &m, Eigen::Index k) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i % k != j % k && m(i, j) != typename Derived::Scalar(0)) {
        return false;
      }
    }
  }
  return true;
}

template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real
spectral_norm(const Eigen::MatrixBase<Derived> &m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (m.size() == 0) {
    return Real(0);
  }
  Eigen::JacobiSVD<typename Derived::PlainObject> svd(m);
  return svd.singularValues()(0);
}

template <typename Derived>
typename Derived::PlainObject hermitian_part(const Eigen::MatrixBase<Derived> &m) {
  return (m + m.adjoint()) / 2;
}

// Hermitian PSD test on a square matrix with the scaled floor
// tol * (1 + ||m||).
template <typename Derived>
bool is_psd(const Eigen::MatrixBase<Derived> &m,
            typename Eigen::NumTraits<typename Derived::Scalar>::Real tol) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const Real floor = tol * (Real(1) + spectral_norm(m));
  if (spectral_norm(m - m.adjoint()) > floor) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<typename Derived::PlainObject> eig(
      hermitian_part(m), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -floor;
}

// Square root of the Hermitian part with negative eigenvalues clamped.
template <typename Derived>
typename Derived::PlainObject psd_sqrt(const Eigen::MatrixBase<Derived> &m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  Eigen::SelfAdjointEigenSolver<typename Derived::PlainObject> eig(
      hermitian_part(m));
  auto roots = eig.eigenvalues()
                   .unaryExpr([](Real v) { return std::sqrt(std::max(v, Real(0))); })
                   .eval();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().adjoint();
}

// Inverse with the sigma_min / sigma_max singularity cutoff.
template <typename Derived>
typename Derived::PlainObject checked_inverse(const Eigen::MatrixBase<Derived> &m) {
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto &sigma = svd.singularValues();
  const auto smax = sigma(0);
  const auto smin = sigma(sigma.size() - 1);
  if (!(smax > 0) || smin <= kSingularityRatio * smax) {
    throw SingularElement("matrix is singular to tolerance (sigma_min = " +
                          std::to_string(static_cast<double>(smin)) +
                          ", sigma_max = " +
                          std::to_string(static_cast<double>(smax)) + ")");
  }
  return svd.matrixV() * sigma.cwiseInverse().asDiagonal() *
         svd.matrixU().adjoint();
}

} // namespace detail

// An element of the algebra: a k x k complex matrix tagged with its
// descriptor. Diagonal-algebra elements carry exact zeros off the diagonal.
template <typename Scalar> class Element {
public:
  using Real = Scalar;
  using Complex = std::complex<Scalar>;
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  using ComplexVector = typename MatrixTypes<Scalar>::ComplexVector;

  Element() : Element(AlgebraDescriptor{}, Matrix::Zero(1, 1)) {}

  Element(AlgebraDescriptor descriptor, Matrix entries)
      : descriptor_(AlgebraDescriptor::checked(descriptor)),
        entries_(std::move(entries)) {
    if (entries_.rows() != descriptor_.dim || entries_.cols() != descriptor_.dim) {
      throw ShapeMismatch("algebra element must be " +
                          std::to_string(descriptor_.dim) + "x" +
                          std::to_string(descriptor_.dim));
    }
    if (descriptor_.is_diagonal() && !entries_.isDiagonal(Real(0))) {
      throw InvalidArgument(
          "diagonal algebra element has nonzero off-diagonal entries");
    }
  }

  static Element zero(AlgebraDescriptor d) {
    return Element(d, Matrix::Zero(d.dim, d.dim));
  }
  static Element identity(AlgebraDescriptor d) {
    return Element(d, Matrix::Identity(d.dim, d.dim));
  }
  static Element diagonal(AlgebraDescriptor d, const ComplexVector &values) {
    return Element(d, Matrix(values.asDiagonal()));
  }

  const AlgebraDescriptor &descriptor() const { return descriptor_; }
  const Matrix &entries() const { return entries_; }
  Eigen::Index dim() const { return descriptor_.dim; }

  Element &operator+=(const Element &other) {
    require_same(other);
    entries_ += other.entries_;
    return *this;
  }
  Element &operator-=(const Element &other) {
    require_same(other);
    entries_ -= other.entries_;
    return *this;
  }
  Element &operator*=(Complex c) {
    entries_ *= c;
    return *this;
  }

  friend Element operator+(Element a, const Element &b) { return a += b; }
  friend Element operator-(Element a, const Element &b) { return a -= b; }
  friend Element operator-(Element a) { return a *= Complex(-1); }
  friend Element operator*(Complex c, Element a) { return a *= c; }
  friend Element operator*(Element a, Complex c) { return a *= c; }
  friend Element operator*(Real c, Element a) { return a *= Complex(c); }

  friend Element operator*(const Element &a, const Element &b) {
    a.require_same(b);
    return Element(a.descriptor_, a.entries_ * b.entries_);
  }

  friend bool operator==(const Element &a, const Element &b) {
    return a.descriptor_ == b.descriptor_ && a.entries_ == b.entries_;
  }

  void require_same(const Element &other) const {
    if (!(descriptor_ == other.descriptor_)) {
      throw ShapeMismatch("algebra descriptor mismatch");
    }
  }

private:
  AlgebraDescriptor descriptor_;
  Matrix entries_;
};

using ElementD = Element<double>;

template <typename Scalar> Element<Scalar> adjoint(const Element<Scalar> &a) {
  return Element<Scalar>(a.descriptor(), a.entries().adjoint());
}

template <typename Scalar>
Element<Scalar> multiply(const Element<Scalar> &a, const Element<Scalar> &b) {
  return a * b;
}

// Largest singular value.
template <typename Scalar> Scalar operator_norm(const Element<Scalar> &a) {
  if (a.descriptor().is_diagonal()) {
    return a.entries().diagonal().cwiseAbs().maxCoeff();
  }
  return detail::spectral_norm(a.entries());
}

// a >= 0: Hermitian and lambda_min >= -tol * (1 + ||a||).
template <typename Scalar>
bool is_positive(const Element<Scalar> &a, Scalar tol = kDefaultTolerance) {
  if (a.descriptor().is_diagonal()) {
    const auto d = a.entries().diagonal();
    const Scalar floor = tol * (Scalar(1) + d.cwiseAbs().maxCoeff());
    return 2 * d.imag().cwiseAbs().maxCoeff() <= floor &&
           d.real().minCoeff() >= -floor;
  }
  return detail::is_psd(a.entries(), tol);
}

template <typename Scalar>
bool loewner_leq(const Element<Scalar> &a, const Element<Scalar> &b,
                 Scalar tol = kDefaultTolerance) {
  return is_positive(b - a, tol);
}

template <typename Scalar>
Element<Scalar> hermitian_sqrt(const Element<Scalar> &a,
                               Scalar tol = kDefaultTolerance) {
  if (!is_positive(a, tol)) {
    throw NotPositive("hermitian_sqrt: element is not positive within tolerance");
  }
  using Complex = std::complex<Scalar>;
  if (a.descriptor().is_diagonal()) {
    auto roots = a.entries().diagonal().unaryExpr([](const Complex &z) {
      return Complex(std::sqrt(std::max(z.real(), Scalar(0))), Scalar(0));
    });
    return Element<Scalar>::diagonal(a.descriptor(), roots);
  }
  return Element<Scalar>(a.descriptor(), detail::psd_sqrt(a.entries()));
}

template <typename Scalar> Element<Scalar> inverse(const Element<Scalar> &a) {
  if (a.descriptor().is_diagonal()) {
    const auto d = a.entries().diagonal();
    const Scalar smax = d.cwiseAbs().maxCoeff();
    const Scalar smin = d.cwiseAbs().minCoeff();
    if (!(smax > 0) || smin <= kSingularityRatio * smax) {
      throw SingularElement("diagonal element is singular to tolerance");
    }
    return Element<Scalar>::diagonal(a.descriptor(), d.cwiseInverse());
  }
  return Element<Scalar>(a.descriptor(), detail::checked_inverse(a.entries()));
}

// |a| = (a* a)^(1/2)
template <typename Scalar> Element<Scalar> abs_element(const Element<Scalar> &a) {
  using Complex = std::complex<Scalar>;
  if (a.descriptor().is_diagonal()) {
    auto mags = a.entries().diagonal().unaryExpr(
        [](const Complex &z) { return Complex(std::abs(z), Scalar(0)); });
    return Element<Scalar>::diagonal(a.descriptor(), mags);
  }
  return Element<Scalar>(a.descriptor(),
                         detail::psd_sqrt(a.entries().adjoint() * a.entries()));
}

} // namespace opframe

#endif // OPFRAME_ALGEBRA_HPP
