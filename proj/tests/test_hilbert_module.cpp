#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace opframe;
using namespace testing_support;

namespace {

const auto D2 = AlgebraDescriptor::diagonal(2);
const double kHalfRoot3 = std::sqrt(3.0) / 2;

ModuleVectorD d2_vector(Complex a, Complex b) { return ModuleVectorD(D2, 1, diag({a, b})); }

ModuleOperatorD example_operator(double w) {
  return ModuleOperatorD(D2, 1, diag({w, kHalfRoot3 * w}));
}

double distance(const ElementD &a, const ElementD &b) {
  return spectral(a.entries() - b.entries());
}

} // namespace

TEST(ModuleVector, ShapeAndPatternAreValidated) {
  EXPECT_THROW(ModuleVectorD(D2, 2, Matrix::Zero(2, 2)), ShapeMismatch);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = 1;
  EXPECT_THROW(ModuleVectorD(D2, 1, bad), InvalidArgument);
  EXPECT_THROW(ModuleVectorD::zero(D2, 0), InvalidArgument);
}

TEST(ModuleVector, ComponentsRoundTrip) {
  std::mt19937_64 rng(3);
  const auto d = AlgebraDescriptor::full(3);
  const auto a = random_element(d, rng), b = random_element(d, rng);
  const ModuleVectorD x({a, b});
  EXPECT_EQ(x.rank(), 2);
  EXPECT_EQ(x.component(0), a);
  EXPECT_EQ(x.component(1), b);
}

TEST(InnerProduct, DiagonalExample) {
  const Complex a(1, 2), b(-0.5, 0.25), a1(3, -1), b1(0.75, 2);
  const auto ip = inner_product(d2_vector(a, b), d2_vector(a1, b1));
  EXPECT_EQ(ip.entries()(0, 0), a * std::conj(a1));
  EXPECT_EQ(ip.entries()(1, 1), b * std::conj(b1));
  EXPECT_EQ(ip.entries()(0, 1), Complex(0));
}

TEST(InnerProduct, IdentityVector) {
  const auto x = ModuleVectorD::unit(D2, 1);
  EXPECT_EQ(inner_product(x, x), ElementD::identity(D2));
}

TEST(InnerProduct, ConjugateSymmetry) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_descriptor(rng);
    const Eigen::Index n = 1 + rng() % 3;
    const auto x = random_vector<double>(d, n, rng), y = random_vector<double>(d, n, rng);
    EXPECT_LE(distance(inner_product(x, y), adjoint(inner_product(y, x))), 1e-12);
  }
}

TEST(InnerProduct, Sesquilinearity) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_descriptor(rng);
    const Eigen::Index n = 1 + rng() % 3;
    const auto x = random_vector<double>(d, n, rng), y = random_vector<double>(d, n, rng),
               z = random_vector<double>(d, n, rng);
    const auto a = random_element(d, rng);
    const auto lhs = inner_product(a * x + y, z);
    const auto rhs = a * inner_product(x, z) + inner_product(y, z);
    EXPECT_LE(distance(lhs, rhs), 1e-10);
  }
}

TEST(InnerProduct, Definiteness) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_descriptor(rng);
    const auto x = random_vector<double>(d, 2, rng);
    EXPECT_TRUE(is_positive(inner_product(x, x)));
    EXPECT_GT(operator_norm(inner_product(x, x)), 0);
  }
  const auto zero = ModuleVectorD::zero(D2, 3);
  EXPECT_EQ(operator_norm(inner_product(zero, zero)), 0);
}

TEST(ScalarNorm, Examples) {
  EXPECT_DOUBLE_EQ(scalar_norm(d2_vector(3, 4)), 4.0);
  EXPECT_EQ(scalar_norm(ModuleVectorD::zero(AlgebraDescriptor::full(3), 2)), 0.0);
}

TEST(ScalarNorm, EqualsLargestSingularValueOfFlattening) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_descriptor(rng);
    const auto x = random_vector<double>(d, 1 + rng() % 3, rng);
    EXPECT_NEAR(scalar_norm(x), spectral(x.flat()), 1e-10 * (1 + spectral(x.flat())));
  }
}

TEST(Apply, ExampleOperator) {
  const Complex a(0.3, -1), b(2, 0.5);
  const double w = 0.7;
  const auto y = apply(example_operator(w), d2_vector(a, b));
  EXPECT_NEAR(std::abs(y.flat()(0, 0) - w * a), 0, 1e-15);
  EXPECT_NEAR(std::abs(y.flat()(1, 1) - kHalfRoot3 * w * b), 0, 1e-15);
}

TEST(Apply, IdentityAndBlockOracle) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_descriptor(rng);
    const Eigen::Index n = 1 + rng() % 3;
    const auto x = random_vector<double>(d, n, rng);
    EXPECT_EQ(apply(ModuleOperatorD::identity(d, n), x).flat(), x.flat());
    const auto m = random_operator(d, n, rng);
    EXPECT_LE(spectral(apply(m, x).flat() - apply_by_blocks(x.flat(), m.flat(), d.dim)),
              1e-12 * (1 + spectral(m.flat())) * (1 + spectral(x.flat())));
  }
}

TEST(Apply, CompositionMatchesBlockProduct) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_descriptor(rng);
    const Eigen::Index n = 1 + rng() % 3;
    const auto x = random_vector<double>(d, n, rng);
    const auto m1 = random_operator(d, n, rng), m2 = random_operator(d, n, rng);
    const Matrix lhs = apply(m2, apply(m1, x)).flat();
    const Matrix rhs = apply(m1 * m2, x).flat();
    EXPECT_LE(spectral(lhs - rhs), 1e-10 * (1 + spectral(lhs)));
  }
}

TEST(Apply, ShapeMismatchThrows) {
  EXPECT_THROW(apply(ModuleOperatorD::identity(D2, 2), d2_vector(1, 1)), ShapeMismatch);
}

TEST(OpAdjoint, ExampleOperatorIsSelfAdjoint) {
  const auto m = example_operator(0.4);
  EXPECT_EQ(op_adjoint(m).flat(), m.flat());
}

TEST(OpAdjoint, Involution) {
  std::mt19937_64 rng(19);
  const auto m = random_operator(AlgebraDescriptor::full(3), 2, rng);
  EXPECT_EQ(op_adjoint(op_adjoint(m)).flat(), m.flat());
}

TEST(OpAdjoint, AdjointIdentity) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) {
    const auto d = random_descriptor(rng);
    const Eigen::Index n = 1 + rng() % 3;
    const auto m = random_operator(d, n, rng);
    const auto x = random_vector<double>(d, n, rng), y = random_vector<double>(d, n, rng);
    const auto lhs = inner_product(apply(m, x), y);
    const auto rhs = inner_product(x, apply(op_adjoint(m), y));
    EXPECT_LE(distance(lhs, rhs), 1e-10 * (1 + operator_norm(lhs)));
  }
}

TEST(L2InnerProduct, ExampleFamilyAtUnit) {
  const auto rule = gauss_legendre(0.0, 1.0, 4);
  std::vector<ModuleVectorD> samples;
  for (Eigen::Index i = 0; i < rule.size(); ++i) {
    samples.push_back(apply(example_operator(rule.nodes(i)), ModuleVectorD::unit(D2, 1)));
  }
  const L2Family<double> x(rule, samples);
  const auto ip = l2_inner_product(x, x);
  EXPECT_NEAR(ip.entries()(0, 0).real(), 1.0 / 3, 1e-15);
  EXPECT_NEAR(ip.entries()(1, 1).real(), 0.25, 1e-15);
  EXPECT_EQ(l2_inner_product(x, L2Family<double>::zero(rule, D2, 1)), ElementD::zero(D2));
}

TEST(L2InnerProduct, CountingMeasureIsPlainSum) {
  std::mt19937_64 rng(29);
  const auto d = AlgebraDescriptor::full(2);
  const auto rule = counting(3);
  std::vector<ModuleVectorD> xs, ys;
  Matrix want = Matrix::Zero(2, 2);
  for (int i = 0; i < 3; ++i) {
    xs.push_back(random_vector<double>(d, 2, rng));
    ys.push_back(random_vector<double>(d, 2, rng));
    want += inner_product(xs.back(), ys.back()).entries();
  }
  EXPECT_LE(spectral(l2_inner_product(L2Family<double>(rule, xs), L2Family<double>(rule, ys))
                         .entries() -
                     want),
            1e-13);
}

TEST(L2InnerProduct, RuleMismatchThrows) {
  const auto a = L2Family<double>::zero(counting(2), D2, 1);
  const auto b = L2Family<double>::zero(gauss_legendre(0.0, 1.0, 2), D2, 1);
  EXPECT_THROW(l2_inner_product(a, b), ShapeMismatch);
  EXPECT_THROW(L2Family<double>(counting(2), {d2_vector(1, 1)}), ShapeMismatch);
}

TEST(OperatorNormBound, Examples) {
  EXPECT_DOUBLE_EQ(operator_norm(example_operator(1.0)), 1.0);
  EXPECT_TRUE(lemma_1_5_check(example_operator(1.0), ModuleVectorD::unit(D2, 1)));
  EXPECT_TRUE(lemma_1_5_check(ModuleOperatorD::zero(D2, 1), d2_vector(2, 3)));
}

TEST(OperatorNormBound, RandomSweep) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    const auto d = random_descriptor(rng);
    const Eigen::Index n = 1 + rng() % 3;
    EXPECT_TRUE(lemma_1_5_check(random_operator(d, n, rng), random_vector<double>(d, n, rng)));
  }
}

TEST(InjectiveOperator, TwoSidedBoundForInjectiveOperators) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_descriptor(rng);
    const Eigen::Index n = 1 + rng() % 3;
    const auto m = random_operator(d, n, rng);
    const auto mm = op_adjoint(m) * m;
    const double lo = 1.0 / operator_norm(inverse(mm));
    const double hi = std::pow(operator_norm(m), 2);
    const auto id = ModuleOperatorD::identity(d, n);
    EXPECT_TRUE(is_positive(mm - lo * id, 1e-9));
    EXPECT_TRUE(is_positive(hi * id - mm, 1e-9));
  }
}

TEST(Integration, OperatorCommutesWithIntegration) {
  std::mt19937_64 rng(41);
  const auto d = AlgebraDescriptor::full(2);
  const auto rule = gauss_legendre(0.0, 1.0, 5);
  const auto m = random_operator(d, 2, rng);
  std::vector<ModuleVectorD> xs, mxs;
  for (int i = 0; i < 5; ++i) {
    xs.push_back(random_vector<double>(d, 2, rng));
    mxs.push_back(apply(m, xs.back()));
  }
  const Matrix lhs = apply(m, integrate(rule, xs)).flat();
  const Matrix rhs = integrate(rule, mxs).flat();
  EXPECT_LE(spectral(lhs - rhs), 1e-12 * (1 + spectral(lhs)));
}

TEST(ModuleOperator, InverseAndSqrtKeepDiagonalPattern) {
  std::mt19937_64 rng(43);
  const auto d = AlgebraDescriptor::diagonal(3);
  const auto m = random_operator(d, 2, rng);
  const auto p = op_adjoint(m) * m;
  const auto inv = inverse(p);
  EXPECT_LE(spectral((inv * p).flat() - Matrix::Identity(6, 6)), 1e-10);
  const auto r = hermitian_sqrt(p);
  EXPECT_LE(spectral((r * r).flat() - p.flat()), 1e-10 * (1 + operator_norm(p)));
  EXPECT_THROW(inverse(ModuleOperatorD::zero(d, 2)), SingularElement);
}
