#ifndef OPFRAME_FRAMES_HPP
#define OPFRAME_FRAMES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "opframe/family.hpp"

namespace opframe {

// Analysis operator: x -> {T_w x} at the nodes.
template <typename Scalar>
L2Family<Scalar> analysis(const OperatorFamily<Scalar> &family,
                          const ModuleVector<Scalar> &x) {
  family.require_compatible(x);
  std::vector<ModuleVector<Scalar>> samples;
  samples.reserve(family.operators().size());
  for (const auto &m : family.operators()) {
    samples.push_back(apply(m, x));
  }
  return L2Family<Scalar>(family.rule(), std::move(samples));
}

// Synthesis operator: {y_w} -> sum_i w_i T_i^* y_i.
template <typename Scalar>
ModuleVector<Scalar> synthesis(const OperatorFamily<Scalar> &family,
                               const L2Family<Scalar> &y) {
  if (!(family.rule() == y.rule)) {
    throw ShapeMismatch("synthesis: quadrature rules differ");
  }
  family.require_compatible(y.samples.front());
  std::vector<ModuleVector<Scalar>> terms;
  terms.reserve(y.samples.size());
  for (Eigen::Index i = 0; i < family.size(); ++i) {
    terms.push_back(apply(op_adjoint(family.at(i)), y.samples[static_cast<std::size_t>(i)]));
  }
  return integrate(family.rule(), terms);
}

// The frame operator S_T x = x s with s = sum_i w_i M_i M_i^*, together with
// the spectrum of its flattening. Eigenvalues ascend; eigenvector j is column
// j. Over a diagonal algebra each eigenvector is supported on a single slot.
template <typename Scalar> struct FrameOperatorData {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  using RealVector = typename MatrixTypes<Scalar>::RealVector;

  ModuleOperator<Scalar> s;
  RealVector eigenvalues;
  Matrix eigenvectors;

  const Matrix &s_flat() const { return s.flat(); }
  Scalar hermitian_defect() const {
    return detail::spectral_norm(s.flat() - s.flat().adjoint());
  }
};

namespace detail {

template <typename Scalar>
void hermitian_eigen(const typename MatrixTypes<Scalar>::Matrix &m,
                     typename MatrixTypes<Scalar>::RealVector &values,
                     typename MatrixTypes<Scalar>::Matrix &vectors) {
  Eigen::SelfAdjointEigenSolver<typename MatrixTypes<Scalar>::Matrix> eig(
      hermitian_part(m));
  values = eig.eigenvalues();
  vectors = eig.eigenvectors();
}

// Slot-wise eigendecomposition of an operator over a diagonal algebra.
template <typename Scalar>
void slot_eigen(const ModuleOperator<Scalar> &op,
                typename MatrixTypes<Scalar>::RealVector &values,
                typename MatrixTypes<Scalar>::Matrix &vectors) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  using RealVector = typename MatrixTypes<Scalar>::RealVector;
  const Eigen::Index k = op.descriptor().dim;
  const Eigen::Index n = op.rank();
  const Eigen::Index d = n * k;
  RealVector all_values(d);
  Matrix all_vectors = Matrix::Zero(d, d);
  Matrix slot(n, n);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        slot(i, j) = op.flat()(i * k + r, j * k + r);
      }
    }
    RealVector v;
    Matrix u;
    hermitian_eigen<Scalar>(slot, v, u);
    for (Eigen::Index j = 0; j < n; ++j) {
      all_values(r * n + j) = v(j);
      for (Eigen::Index i = 0; i < n; ++i) {
        all_vectors(i * k + r, r * n + j) = u(i, j);
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return all_values(a) < all_values(b);
  });
  values.resize(d);
  vectors.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    values(j) = all_values(order[static_cast<std::size_t>(j)]);
    vectors.col(j) = all_vectors.col(order[static_cast<std::size_t>(j)]);
  }
}

} // namespace detail

// Spectral data of a self-adjoint module operator (slot-aware).
template <typename Scalar>
FrameOperatorData<Scalar> spectral_data(ModuleOperator<Scalar> s) {
  FrameOperatorData<Scalar> data{std::move(s), {}, {}};
  if (data.s.descriptor().is_diagonal()) {
    detail::slot_eigen(data.s, data.eigenvalues, data.eigenvectors);
  } else {
    detail::hermitian_eigen<Scalar>(data.s.flat(), data.eigenvalues, data.eigenvectors);
  }
  return data;
}

template <typename Scalar>
FrameOperatorData<Scalar> frame_operator(const OperatorFamily<Scalar> &family) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  std::vector<Matrix> terms;
  terms.reserve(family.operators().size());
  for (const auto &m : family.operators()) {
    terms.push_back(m.flat() * m.flat().adjoint());
  }
  return spectral_data(ModuleOperator<Scalar>(family.descriptor(), family.rank(),
                                              integrate(family.rule(), terms)));
}

template <typename Scalar> struct FrameBounds {
  Scalar lower;
  Scalar upper;
};

// Optimal constants of the frame inequality: the extreme eigenvalues of the
// flattened frame operator. x s x^* = X s_flat X^* and <x, x> = X X^*, and a
// single-row X along an extremal eigenvector attains equality.
template <typename Scalar>
FrameBounds<Scalar> optimal_bounds(const FrameOperatorData<Scalar> &data) {
  return {data.eigenvalues(0), data.eigenvalues(data.eigenvalues.size() - 1)};
}

enum class FrameClass { frame, bessel_only, tight, parseval, not_bessel };

inline std::string to_string(FrameClass c) {
  switch (c) {
  case FrameClass::frame:
    return "frame";
  case FrameClass::bessel_only:
    return "bessel_only";
  case FrameClass::tight:
    return "tight";
  case FrameClass::parseval:
    return "parseval";
  case FrameClass::not_bessel:
    return "not_bessel";
  }
  return "unknown";
}

template <typename Scalar> struct FrameReport {
  Scalar lower_bound = 0;
  Scalar upper_bound = 0;
  FrameClass classification = FrameClass::not_bessel;
  // (A + B) / 2 when tight or parseval.
  Scalar tight_constant = 0;
  std::vector<Scalar> spectrum;
  // B / A, infinite when A <= 0.
  Scalar condition = 0;
  Scalar tolerance = 0;
  std::string diagnostics;

  bool is_frame() const {
    return classification == FrameClass::frame ||
           classification == FrameClass::tight ||
           classification == FrameClass::parseval;
  }
};

template <typename Scalar>
FrameReport<Scalar> classify(const FrameOperatorData<Scalar> &data, Scalar tol) {
  if (!(tol > 0)) {
    throw InvalidArgument("classify: tolerance must be positive");
  }
  FrameReport<Scalar> report;
  const auto [lower, upper] = optimal_bounds(data);
  report.lower_bound = lower;
  report.upper_bound = upper;
  report.tolerance = tol;
  report.spectrum.assign(data.eigenvalues.data(),
                         data.eigenvalues.data() + data.eigenvalues.size());
  report.condition = lower > 0 ? upper / lower : std::numeric_limits<Scalar>::infinity();

  std::ostringstream diag;
  diag.precision(17);
  diag << "hermitian_defect=" << data.hermitian_defect();
  if (!data.eigenvalues.allFinite()) {
    report.classification = FrameClass::not_bessel;
    diag << "; non-finite spectrum";
  } else if (lower <= tol) {
    report.classification = FrameClass::bessel_only;
    diag << "; lower bound " << lower << " <= tol";
  } else if (upper - lower <= tol * upper) {
    report.tight_constant = (lower + upper) / 2;
    report.classification = std::abs(report.tight_constant - 1) <= tol
                                ? FrameClass::parseval
                                : FrameClass::tight;
  } else {
    report.classification = FrameClass::frame;
  }
  report.diagnostics = diag.str();
  return report;
}

// Direct check of A <x,x> <= int <T_w x, T_w x> dmu <= B <x,x> on each x.
template <typename Scalar>
bool check_frame_inequality(const OperatorFamily<Scalar> &family, Scalar lower,
                            Scalar upper, const std::vector<ModuleVector<Scalar>> &xs,
                            Scalar tol = kDefaultTolerance) {
  if (lower > upper) {
    throw InvalidArgument("check_frame_inequality: requires A <= B");
  }
  for (const auto &x : xs) {
    const auto rx = analysis(family, x);
    const auto middle = l2_inner_product(rx, rx);
    const auto gram = inner_product(x, x);
    if (!loewner_leq(lower * gram, middle, tol) ||
        !loewner_leq(middle, upper * gram, tol)) {
      return false;
    }
  }
  return true;
}

// Range of ||<S_T x, x>|| over seeded random x with ||x|| = 1.
template <typename Scalar>
FrameBounds<Scalar> norm_bounds_estimate(const OperatorFamily<Scalar> &family,
                                         int sample_count, std::uint64_t seed) {
  if (sample_count < 1) {
    throw InvalidArgument("norm_bounds_estimate: sample_count must be >= 1");
  }
  const auto data = frame_operator(family);
  std::mt19937_64 rng(seed);
  Scalar lo = std::numeric_limits<Scalar>::infinity();
  Scalar hi = -std::numeric_limits<Scalar>::infinity();
  for (int s = 0; s < sample_count; ++s) {
    auto x = random_vector<Scalar>(family.descriptor(), family.rank(), rng);
    const Scalar norm = scalar_norm(x);
    if (!(norm > 0)) {
      continue;
    }
    x *= std::complex<Scalar>(1 / norm);
    const Scalar v = operator_norm(inner_product(apply(data.s, x), x));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

// Weighted analysis operator as a tall matrix: block i is sqrt(w_i) M_i^*, so
// that R^* R = s_flat.
template <typename Scalar>
typename MatrixTypes<Scalar>::Matrix
weighted_analysis_matrix(const OperatorFamily<Scalar> &family) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  const Eigen::Index d = family.flat_dim();
  Matrix tall(family.size() * d, d);
  for (Eigen::Index i = 0; i < family.size(); ++i) {
    tall.middleRows(i * d, d) =
        std::sqrt(family.rule().weights(i)) * family.at(i).flat().adjoint();
  }
  return tall;
}

template <typename Scalar> struct BelowBoundedResult {
  bool bounded_below;
  Scalar sigma_min;
};

template <typename Scalar>
BelowBoundedResult<Scalar> below_bounded_check(const OperatorFamily<Scalar> &family,
                                               Scalar tol = kDefaultTolerance) {
  const auto tall = weighted_analysis_matrix(family);
  Eigen::JacobiSVD<typename MatrixTypes<Scalar>::Matrix> svd(tall);
  const auto &sigma = svd.singularValues();
  const Scalar sigma_min = sigma(sigma.size() - 1);
  return {sigma_min > tol, sigma_min};
}

namespace detail {

// Coordinates of H that a vector may occupy: every entry of the k x (n k)
// flat matrix, or only the slot-diagonal ones for a diagonal algebra.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>>
module_coordinates(AlgebraDescriptor d, Eigen::Index rank) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> coords;
  const Eigen::Index k = d.dim;
  for (Eigen::Index c = 0; c < rank * k; ++c) {
    for (Eigen::Index r = 0; r < k; ++r) {
      if (!d.is_diagonal() || r == c % k) {
        coords.emplace_back(r, c);
      }
    }
  }
  return coords;
}

} // namespace detail

// Flattened synthesis map from the discretized l^2 space (N copies of H) to
// H, written in the coordinates of detail::module_coordinates. Block i is
// scaled by sqrt(w_i) so the map is the adjoint of weighted_analysis_matrix.
template <typename Scalar>
typename MatrixTypes<Scalar>::Matrix
synthesis_matrix(const OperatorFamily<Scalar> &family) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  const auto coords = detail::module_coordinates(family.descriptor(), family.rank());
  const auto dim = static_cast<Eigen::Index>(coords.size());
  const Eigen::Index k = family.descriptor().dim;
  Matrix g(dim, family.size() * dim);
  Matrix unit = Matrix::Zero(k, family.flat_dim());
  for (Eigen::Index i = 0; i < family.size(); ++i) {
    const Matrix adj = std::sqrt(family.rule().weights(i)) * family.at(i).flat().adjoint();
    for (Eigen::Index p = 0; p < dim; ++p) {
      const auto [r, c] = coords[static_cast<std::size_t>(p)];
      unit(r, c) = 1;
      const Matrix image = unit * adj;
      unit(r, c) = 0;
      for (Eigen::Index q = 0; q < dim; ++q) {
        const auto [rq, cq] = coords[static_cast<std::size_t>(q)];
        g(q, i * dim + p) = image(rq, cq);
      }
    }
  }
  return g;
}

struct IndependenceResult {
  bool independent;
  Eigen::Index kernel_dim;
};

// Independence at quadrature resolution: the synthesis map has a trivial
// numerical kernel (singular values <= tol * sigma_max count as zero).
template <typename Scalar>
IndependenceResult independence_check(const OperatorFamily<Scalar> &family,
                                      Scalar tol = kDefaultTolerance) {
  using Matrix = typename MatrixTypes<Scalar>::Matrix;
  const Matrix g = synthesis_matrix(family);
  Eigen::BDCSVD<Matrix> svd(g);
  const auto &sigma = svd.singularValues();
  const Scalar smax = sigma.size() > 0 ? sigma(0) : Scalar(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (smax > 0 && sigma(i) > tol * smax) {
      ++rank;
    }
  }
  const Eigen::Index kernel = g.cols() - rank;
  return {kernel == 0, kernel};
}

} // namespace opframe

#endif // OPFRAME_FRAMES_HPP
