#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace opframe;
using namespace testing_support;

namespace {

const auto D2 = AlgebraDescriptor::diagonal(2);
const auto F2 = AlgebraDescriptor::full(2);
const Complex I(0, 1);

ElementD d2(Complex a, Complex b) { return ElementD(D2, diag({a, b})); }

Matrix nilpotent() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

Matrix random_psd(Eigen::Index k, std::mt19937_64 &rng) {
  const Matrix g = random_matrix(k, k, rng);
  return g * g.adjoint();
}

} // namespace

TEST(Descriptor, RejectsNonPositiveDimension) {
  EXPECT_THROW(AlgebraDescriptor::checked({AlgebraKind::full, 0}), InvalidArgument);
}

TEST(Element, RejectsOffDiagonalEntriesForDiagonalAlgebra) {
  EXPECT_THROW(ElementD(D2, nilpotent()), InvalidArgument);
  EXPECT_THROW(ElementD(D2, Matrix::Zero(3, 3)), ShapeMismatch);
}

TEST(Element, MixingDescriptorsIsAnError) {
  EXPECT_THROW(ElementD::identity(D2) + ElementD::identity(F2), ShapeMismatch);
}

TEST(Adjoint, Examples) {
  EXPECT_EQ(adjoint(d2(I, 2)), d2(-I, 2));
  EXPECT_EQ(adjoint(ElementD::identity(F2)), ElementD::identity(F2));
  EXPECT_EQ(adjoint(ElementD(F2, nilpotent())).entries(), Matrix(nilpotent().transpose()));
}

TEST(Multiply, Examples) {
  EXPECT_EQ(multiply(d2(2, 3), d2(4, 5)), d2(8, 15));
  std::mt19937_64 rng(1);
  const auto a = random_element(AlgebraDescriptor::full(3), rng);
  EXPECT_EQ(multiply(a, ElementD::identity(a.descriptor())), a);
  EXPECT_EQ(multiply(ElementD(F2, nilpotent()), ElementD(F2, nilpotent())),
            ElementD::zero(F2));
}

TEST(IsPositive, Examples) {
  EXPECT_TRUE(is_positive(d2(1.0 / 3, 0.25), 1e-12));
  EXPECT_TRUE(is_positive(ElementD::zero(F2), 1e-12));
  EXPECT_FALSE(is_positive(d2(1, -1e-6), 1e-12));
  EXPECT_FALSE(is_positive(ElementD(F2, diag({1, -1e-6})), 1e-12));
}

TEST(IsPositive, NonHermitianIsNotPositive) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = 0.5;
  EXPECT_FALSE(is_positive(ElementD(F2, m), 1e-12));
  EXPECT_FALSE(is_positive(d2(Complex(1, 0.1), 1), 1e-12));
}

TEST(LoewnerLeq, Examples) {
  EXPECT_TRUE(loewner_leq(d2(1, 2), d2(2, 3)));
  const auto a = d2(0.3, 0.7);
  EXPECT_TRUE(loewner_leq(a, a));
  EXPECT_FALSE(loewner_leq(d2(1, 0), d2(0, 1)));
  EXPECT_FALSE(loewner_leq(d2(0, 1), d2(1, 0)));
}

TEST(OperatorNorm, Examples) {
  EXPECT_DOUBLE_EQ(operator_norm(d2(1.0, std::sqrt(3.0) / 2)), 1.0);
  EXPECT_EQ(operator_norm(ElementD::zero(F2)), 0.0);
}

TEST(OperatorNorm, HermitianMatchesGeneralEigensolver) {
  std::mt19937_64 rng(7);
  const auto k3 = AlgebraDescriptor::full(3);
  for (int t = 0; t < 20; ++t) {
    const Matrix g = random_matrix(3, 3, rng);
    const Matrix h = (g + g.adjoint()) / 2.0;
    const auto ev = eigenvalues_general(h);
    const double want = std::max(std::abs(ev.front()), std::abs(ev.back()));
    EXPECT_NEAR(operator_norm(ElementD(k3, h)), want, 1e-12 * (1 + want));
  }
}

TEST(HermitianSqrt, Examples) {
  EXPECT_EQ(hermitian_sqrt(d2(4, 9)), d2(2, 3));
  EXPECT_TRUE((hermitian_sqrt(ElementD::identity(F2)).entries() - Matrix::Identity(2, 2))
                  .norm() < 1e-14);
  EXPECT_THROW(hermitian_sqrt(d2(1, -1)), NotPositive);
}

TEST(HermitianSqrt, MultiplyBack) {
  std::mt19937_64 rng(11);
  const auto k4 = AlgebraDescriptor::full(4);
  for (int t = 0; t < 20; ++t) {
    const ElementD a(k4, random_psd(4, rng));
    const auto r = hermitian_sqrt(a);
    EXPECT_LE(spectral(r.entries() * r.entries() - a.entries()), 1e-10 * (1 + operator_norm(a)));
    EXPECT_TRUE(is_positive(r));
  }
}

TEST(Inverse, Examples) {
  const auto inv = inverse(d2(1.0 / 3, 0.25));
  EXPECT_NEAR(std::abs(inv.entries()(0, 0) - 3.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(inv.entries()(1, 1) - 4.0), 0, 1e-15);
  EXPECT_EQ(inverse(ElementD::identity(D2)), ElementD::identity(D2));
  EXPECT_THROW(inverse(d2(1, 0)), SingularElement);
  EXPECT_THROW(inverse(ElementD(F2, nilpotent())), SingularElement);
}

TEST(Inverse, ResidualOnWellConditioned) {
  std::mt19937_64 rng(13);
  const auto k3 = AlgebraDescriptor::full(3);
  for (int t = 0; t < 20; ++t) {
    const Matrix m = random_matrix(3, 3, rng) + 4.0 * Matrix::Identity(3, 3);
    const ElementD a(k3, m);
    EXPECT_LE(spectral(a.entries() * inverse(a).entries() - Matrix::Identity(3, 3)), 1e-12);
  }
}

TEST(AbsElement, Examples) {
  EXPECT_EQ(abs_element(d2(-2, 3.0 * I)), d2(2, 3));
  std::mt19937_64 rng(17);
  const ElementD p(AlgebraDescriptor::full(3), random_psd(3, rng));
  EXPECT_LE(spectral(abs_element(p).entries() - p.entries()), 1e-10 * operator_norm(p));
}

TEST(AbsElement, PositiveWithEqualNorm) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 30; ++t) {
    const auto a = random_element(random_descriptor(rng), rng);
    const auto r = abs_element(a);
    EXPECT_TRUE(is_positive(r));
    EXPECT_NEAR(operator_norm(r), spectral(a.entries()), 1e-10 * (1 + operator_norm(r)));
  }
}
