#ifndef OPFRAME_HILBERT_MODULE_HPP
#define OPFRAME_HILBERT_MODULE_HPP

#include <random>
#include <vector>

#include "opframe/algebra.hpp"
#include "opframe/quadrature.hpp"

namespace opframe {

// H = A^n as a left A-module.
//
// A vector x = (x_1, ..., x_n) is stored flattened as the k x (n k) matrix
// X = [x_1 x_2 ... x_n]. With this layout
//
//   a . x         = a X
//   <x, y>_A      = X Y^*            (sum_i x_i y_i^*)
//   x M           = X M_flat         (adjointable operators act on the right)
//
// and an operator M (n x n matrix over A) is stored as the (n k) x (n k)
// block matrix M_flat. The adjoint operator is M_flat^*.
template <typename Scalar> class ModuleVector {
public:
  using Real = Scalar;
  using Complex = std::complex<Scalar>;
  using Matrix = typename MatrixTypes<Scalar>::Matrix;

  ModuleVector(AlgebraDescriptor descriptor, Eigen::Index rank, Matrix flat)
      : descriptor_(AlgebraDescriptor::checked(descriptor)), rank_(rank),
        flat_(std::move(flat)) {
    if (rank_ < 1) {
      throw InvalidArgument("module rank must be >= 1");
    }
    const Eigen::Index k = descriptor_.dim;
    if (flat_.rows() != k || flat_.cols() != rank_ * k) {
      throw ShapeMismatch("module vector must be stored as a " +
                          std::to_string(k) + "x" + std::to_string(rank_ * k) +
                          " matrix");
    }
    if (descriptor_.is_diagonal() && !detail::slot_diagonal(flat_, k)) {
      throw InvalidArgument("module vector over a diagonal algebra has "
                            "non-diagonal components");
    }
  }

  explicit ModuleVector(const std::vector<Element<Scalar>> &components)
      : ModuleVector(checked_components(components).front().descriptor(),
                     static_cast<Eigen::Index>(components.size()),
                     stack(components)) {}

  static ModuleVector zero(AlgebraDescriptor d, Eigen::Index rank) {
    return ModuleVector(d, rank, Matrix::Zero(d.dim, rank * d.dim));
  }

  // (1, 1, ..., 1) with 1 the unit of A.
  static ModuleVector unit(AlgebraDescriptor d, Eigen::Index rank) {
    Matrix flat(d.dim, rank * d.dim);
    for (Eigen::Index i = 0; i < rank; ++i) {
      flat.middleCols(i * d.dim, d.dim).setIdentity();
    }
    return ModuleVector(d, rank, std::move(flat));
  }

  const AlgebraDescriptor &descriptor() const { return descriptor_; }
  Eigen::Index rank() const { return rank_; }
  const Matrix &flat() const { return flat_; }

  Element<Scalar> component(Eigen::Index i) const {
    const Eigen::Index k = descriptor_.dim;
    return Element<Scalar>(descriptor_, flat_.middleCols(i * k, k));
  }

  bool same_shape(const ModuleVector &other) const {
    return descriptor_ == other.descriptor_ && rank_ == other.rank_;
  }
  void require_same_shape(const ModuleVector &other) const {
    if (!same_shape(other)) {
      throw ShapeMismatch("module vectors differ in descriptor or rank");
    }
  }

  ModuleVector &operator+=(const ModuleVector &other) {
    require_same_shape(other);
    flat_ += other.flat_;
    return *this;
  }
  ModuleVector &operator-=(const ModuleVector &other) {
    require_same_shape(other);
    flat_ -= other.flat_;
    return *this;
  }
  ModuleVector &operator*=(Complex c) {
    flat_ *= c;
    return *this;
  }

  friend ModuleVector operator+(ModuleVector x, const ModuleVector &y) {
    return x += y;
  }
  friend ModuleVector operator-(ModuleVector x, const ModuleVector &y) {
    return x -= y;
  }
  friend ModuleVector operator*(Complex c, ModuleVector x) { return x *= c; }
  friend ModuleVector operator*(Real c, ModuleVector x) {
    return x *= Complex(c);
  }

  // Left module action a . x.
  friend ModuleVector operator*(const Element<Scalar> &a, const ModuleVector &x) {
    if (!(a.descriptor() == x.descriptor_)) {
      throw ShapeMismatch("module action: algebra descriptor mismatch");
    }
    return ModuleVector(x.descriptor_, x.rank_, a.entries() * x.flat_);
  }

private:
  static const std::vector<Element<Scalar>> &
  checked_components(const std::vector<Element<Scalar>> &components) {
    if (components.empty()) {
      throw InvalidArgument("module vector needs at least one component");
    }
    for (const auto &c : components) {
      components.front().require_same(c);
    }
    return components;
  }

  static Matrix stack(const std::vector<Element<Scalar>> &components) {
    const Eigen::Index k = components.front().dim();
    Matrix flat(k, k * static_cast<Eigen::Index>(components.size()));
    for (std::size_t i = 0; i < components.size(); ++i) {
      flat.middleCols(static_cast<Eigen::Index>(i) * k, k) = components[i].entries();
    }
    return flat;
  }

  AlgebraDescriptor descriptor_;
  Eigen::Index rank_;
  Matrix flat_;
};

// An adjointable A-linear operator on A^n: right multiplication x -> x M by an
// n x n matrix over A.
template <typename Scalar> class ModuleOperator {
public:
  using Real = Scalar;
  using Complex = std::complex<Scalar>;
  using Matrix = typename MatrixTypes<Scalar>::Matrix;

  ModuleOperator(AlgebraDescriptor descriptor, Eigen::Index rank, Matrix flat)
      : descriptor_(AlgebraDescriptor::checked(descriptor)), rank_(rank),
        flat_(std::move(flat)) {
    if (rank_ < 1) {
      throw InvalidArgument("module rank must be >= 1");
    }
    const Eigen::Index d = rank_ * descriptor_.dim;
    if (flat_.rows() != d || flat_.cols() != d) {
      throw ShapeMismatch("module operator must be stored as a " +
                          std::to_string(d) + "x" + std::to_string(d) +
                          " block matrix");
    }
    if (descriptor_.is_diagonal() && !detail::slot_diagonal(flat_, descriptor_.dim)) {
      throw InvalidArgument(
          "operator over a diagonal algebra has non-diagonal blocks");
    }
  }

  // blocks[i][j] is M_ij.
  explicit ModuleOperator(const std::vector<std::vector<Element<Scalar>>> &blocks)
      : ModuleOperator(first(blocks).descriptor(),
                       static_cast<Eigen::Index>(blocks.size()), assemble(blocks)) {}

  static ModuleOperator zero(AlgebraDescriptor d, Eigen::Index rank) {
    return ModuleOperator(d, rank, Matrix::Zero(rank * d.dim, rank * d.dim));
  }
  static ModuleOperator identity(AlgebraDescriptor d, Eigen::Index rank) {
    return ModuleOperator(d, rank, Matrix::Identity(rank * d.dim, rank * d.dim));
  }
  // Right multiplication by the same element a on every component.
  static ModuleOperator scalar_block(const Element<Scalar> &a, Eigen::Index rank) {
    const Eigen::Index k = a.dim();
    Matrix flat = Matrix::Zero(rank * k, rank * k);
    for (Eigen::Index i = 0; i < rank; ++i) {
      flat.block(i * k, i * k, k, k) = a.entries();
    }
    return ModuleOperator(a.descriptor(), rank, std::move(flat));
  }

  const AlgebraDescriptor &descriptor() const { return descriptor_; }
  Eigen::Index rank() const { return rank_; }
  // Flattened dimension n k.
  Eigen::Index flat_dim() const { return rank_ * descriptor_.dim; }
  const Matrix &flat() const { return flat_; }

  Element<Scalar> block(Eigen::Index i, Eigen::Index j) const {
    const Eigen::Index k = descriptor_.dim;
    return Element<Scalar>(descriptor_, flat_.block(i * k, j * k, k, k));
  }

  bool same_shape(const ModuleOperator &other) const {
    return descriptor_ == other.descriptor_ && rank_ == other.rank_;
  }
  void require_same_shape(const ModuleOperator &other) const {
    if (!same_shape(other)) {
      throw ShapeMismatch("module operators differ in descriptor or rank");
    }
  }

  ModuleOperator &operator+=(const ModuleOperator &other) {
    require_same_shape(other);
    flat_ += other.flat_;
    return *this;
  }
  ModuleOperator &operator-=(const ModuleOperator &other) {
    require_same_shape(other);
    flat_ -= other.flat_;
    return *this;
  }
  ModuleOperator &operator*=(Complex c) {
    flat_ *= c;
    return *this;
  }

  friend ModuleOperator operator+(ModuleOperator a, const ModuleOperator &b) {
    return a += b;
  }
  friend ModuleOperator operator-(ModuleOperator a, const ModuleOperator &b) {
    return a -= b;
  }
  friend ModuleOperator operator*(Complex c, ModuleOperator a) { return a *= c; }
  friend ModuleOperator operator*(Real c, ModuleOperator a) {
    return a *= Complex(c);
  }

  // Block-matrix product. Since operators act on the right, apply(a * b, x)
  // applies a first and then b.
  friend ModuleOperator operator*(const ModuleOperator &a, const ModuleOperator &b) {
    a.require_same_shape(b);
    return ModuleOperator(a.descriptor_, a.rank_, a.flat_ * b.flat_);
  }

private:
  static const Element<Scalar> &
  first(const std::vector<std::vector<Element<Scalar>>> &blocks) {
    if (blocks.empty() || blocks.front().empty()) {
      throw InvalidArgument("module operator needs at least one block");
    }
    return blocks.front().front();
  }

  static Matrix assemble(const std::vector<std::vector<Element<Scalar>>> &blocks) {
    const auto n = static_cast<Eigen::Index>(blocks.size());
    const auto &ref = first(blocks);
    const Eigen::Index k = ref.dim();
    Matrix flat(n * k, n * k);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(blocks[i].size()) != n) {
        throw ShapeMismatch("module operator block table must be square");
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        ref.require_same(blocks[i][j]);
        flat.block(i * k, j * k, k, k) = blocks[i][j].entries();
      }
    }
    return flat;
  }

  AlgebraDescriptor descriptor_;
  Eigen::Index rank_;
  Matrix flat_;
};

using ModuleVectorD = ModuleVector<double>;
using ModuleOperatorD = ModuleOperator<double>;

// Samples {x_w} of an element of l^2(Omega, H) at the nodes of a rule.
template <typename Scalar> struct L2Family {
  QuadratureRule<Scalar> rule;
  std::vector<ModuleVector<Scalar>> samples;

  L2Family(QuadratureRule<Scalar> r, std::vector<ModuleVector<Scalar>> s)
      : rule(std::move(r)), samples(std::move(s)) {
    if (static_cast<Eigen::Index>(samples.size()) != rule.size()) {
      throw ShapeMismatch("l2 family: sample count differs from node count");
    }
    for (const auto &x : samples) {
      samples.front().require_same_shape(x);
    }
  }

  static L2Family zero(QuadratureRule<Scalar> r, AlgebraDescriptor d,
                       Eigen::Index rank) {
    std::vector<ModuleVector<Scalar>> s(static_cast<std::size_t>(r.size()),
                                        ModuleVector<Scalar>::zero(d, rank));
    return L2Family(std::move(r), std::move(s));
  }
};

// <x, y>_A = sum_i x_i y_i^*
template <typename Scalar>
Element<Scalar> inner_product(const ModuleVector<Scalar> &x,
                              const ModuleVector<Scalar> &y) {
  x.require_same_shape(y);
  return Element<Scalar>(x.descriptor(), x.flat() * y.flat().adjoint());
}

// ||x|| = ||<x, x>||^(1/2)
template <typename Scalar> Scalar scalar_norm(const ModuleVector<Scalar> &x) {
  return std::sqrt(operator_norm(inner_product(x, x)));
}

template <typename Scalar>
ModuleVector<Scalar> apply(const ModuleOperator<Scalar> &m,
                           const ModuleVector<Scalar> &x) {
  if (!(m.descriptor() == x.descriptor()) || m.rank() != x.rank()) {
    throw ShapeMismatch("apply: operator and vector shapes differ");
  }
  return ModuleVector<Scalar>(x.descriptor(), x.rank(), x.flat() * m.flat());
}

template <typename Scalar>
ModuleOperator<Scalar> op_adjoint(const ModuleOperator<Scalar> &m) {
  return ModuleOperator<Scalar>(m.descriptor(), m.rank(), m.flat().adjoint());
}

// Norm of the operator on H: the largest singular value of M_flat.
template <typename Scalar> Scalar operator_norm(const ModuleOperator<Scalar> &m) {
  return detail::spectral_norm(m.flat());
}

namespace detail {

// Apply fn to each n x n "slot" of an operator over a diagonal algebra. Slot r
// collects entry (r, r) of every block; the operator is the direct sum of its
// slots, so inverses and functional calculus act slot by slot and preserve
// the exact zeros of the block pattern.
template <typename Scalar, typename Fn>
typename MatrixTypes<Scalar>::Matrix
map_slots(const typename MatrixTypes<Scalar>::Matrix &flat, Eigen::Index k,
          Eigen::Index rank, Fn &&fn) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  Matrix out = Matrix::Zero(flat.rows(), flat.cols());
  Matrix slot(rank, rank);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index i = 0; i < rank; ++i) {
      for (Eigen::Index j = 0; j < rank; ++j) {
        slot(i, j) = flat(i * k + r, j * k + r);
      }
    }
    const Matrix mapped = fn(slot);
    for (Eigen::Index i = 0; i < rank; ++i) {
      for (Eigen::Index j = 0; j < rank; ++j) {
        out(i * k + r, j * k + r) = mapped(i, j);
      }
    }
  }
  return out;
}

} // namespace detail

template <typename Scalar>
ModuleOperator<Scalar> inverse(const ModuleOperator<Scalar> &m) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  if (m.descriptor().is_diagonal()) {
    // The cutoff is applied to the whole operator, not slot by slot.
    Eigen::JacobiSVD<Matrix> svd(m.flat());
    const auto &sigma = svd.singularValues();
    if (!(sigma(0) > 0) || sigma(sigma.size() - 1) <= kSingularityRatio * sigma(0)) {
      throw SingularElement("module operator is singular to tolerance");
    }
    return ModuleOperator<Scalar>(
        m.descriptor(), m.rank(),
        detail::map_slots<Scalar>(m.flat(), m.descriptor().dim, m.rank(),
                                  [](const Matrix &s) -> Matrix {
                                    return s.inverse();
                                  }));
  }
  return ModuleOperator<Scalar>(m.descriptor(), m.rank(),
                                detail::checked_inverse(m.flat()));
}

template <typename Scalar>
bool is_positive(const ModuleOperator<Scalar> &m, Scalar tol = kDefaultTolerance) {
  return detail::is_psd(m.flat(), tol);
}

template <typename Scalar>
ModuleOperator<Scalar> hermitian_sqrt(const ModuleOperator<Scalar> &m,
                                      Scalar tol = kDefaultTolerance) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  if (!is_positive(m, tol)) {
    throw NotPositive("hermitian_sqrt: operator is not positive within tolerance");
  }
  if (m.descriptor().is_diagonal()) {
    return ModuleOperator<Scalar>(
        m.descriptor(), m.rank(),
        detail::map_slots<Scalar>(m.flat(), m.descriptor().dim, m.rank(),
                                  [](const Matrix &s) -> Matrix {
                                    return detail::psd_sqrt(s);
                                  }));
  }
  return ModuleOperator<Scalar>(m.descriptor(), m.rank(), detail::psd_sqrt(m.flat()));
}

// <x, y> on l^2(Omega, H) at quadrature resolution: sum_i w_i <x_i, y_i>.
template <typename Scalar>
Element<Scalar> l2_inner_product(const L2Family<Scalar> &x, const L2Family<Scalar> &y) {
  if (!(x.rule == y.rule)) {
    throw ShapeMismatch("l2_inner_product: quadrature rules differ");
  }
  std::vector<Element<Scalar>> terms;
  terms.reserve(x.samples.size());
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    terms.push_back(inner_product(x.samples[i], y.samples[i]));
  }
  return integrate(x.rule, terms);
}

// <M x, M x> <= ||M||^2 <x, x> in the Loewner order.
template <typename Scalar>
bool lemma_1_5_check(const ModuleOperator<Scalar> &m, const ModuleVector<Scalar> &x,
                     Scalar tol = kDefaultTolerance) {
  const auto mx = apply(m, x);
  const Scalar norm = operator_norm(m);
  return loewner_leq(inner_product(mx, mx), (norm * norm) * inner_product(x, x), tol);
}

// A random vector with independent standard complex Gaussian entries, drawn
// only on the positions allowed by the descriptor.
template <typename Scalar, typename Rng>
ModuleVector<Scalar> random_vector(AlgebraDescriptor d, Eigen::Index rank, Rng &rng) {
  using Complex = std::complex<Scalar>;
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  std::normal_distribution<Scalar> normal;
  const Eigen::Index k = d.dim;
  Matrix flat = Matrix::Zero(k, rank * k);
  for (Eigen::Index j = 0; j < flat.cols(); ++j) {
    for (Eigen::Index i = 0; i < k; ++i) {
      if (d.is_diagonal() && i != j % k) {
        continue;
      }
      const Scalar re = normal(rng);
      const Scalar im = normal(rng);
      flat(i, j) = Complex(re, im);
    }
  }
  return ModuleVector<Scalar>(d, rank, std::move(flat));
}

// The module vector whose first row is v^H and whose other rows vanish, so a
// column eigenvector of a flat operator M becomes a left eigenvector under
// x -> x M. For a diagonal algebra the row moves to the slot holding most of
// v's mass and entries off that slot are dropped.
template <typename Scalar>
ModuleVector<Scalar>
vector_from_row(AlgebraDescriptor d, Eigen::Index rank,
                const typename MatrixTypes<Scalar>::ComplexVector &v) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  const Eigen::Index k = d.dim;
  Matrix flat = Matrix::Zero(k, rank * k);
  if (!d.is_diagonal()) {
    flat.row(0) = v.adjoint();
    return ModuleVector<Scalar>(d, rank, std::move(flat));
  }
  // Place v in the row matching the slot where most of its mass lies.
  Eigen::Index best = 0;
  Scalar best_mass = -1;
  for (Eigen::Index r = 0; r < k; ++r) {
    Scalar mass = 0;
    for (Eigen::Index i = 0; i < rank; ++i) {
      mass += std::norm(v(i * k + r));
    }
    if (mass > best_mass) {
      best_mass = mass;
      best = r;
    }
  }
  for (Eigen::Index i = 0; i < rank; ++i) {
    flat(best, i * k + best) = std::conj(v(i * k + best));
  }
  return ModuleVector<Scalar>(d, rank, std::move(flat));
}

} // namespace opframe

#endif // OPFRAME_HILBERT_MODULE_HPP
