// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, next to the measurements they bound.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "opframe/examples.hpp"
#include "support/oracles.hpp"

using namespace opframe;
using namespace testing_support;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

class Detail {
public:
  template <typename... Args> void add(const char *fmt, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    if (!text_.empty()) {
      text_ += "; ";
    }
    text_ += buf;
  }
  const std::string &str() const { return text_; }

private:
  std::string text_;
};

using Fn = ScalarFunction<double>;
const auto D2 = AlgebraDescriptor::diagonal(2);

OperatorFamilyD example_family(int nodes) {
  return example_frame_family(gauss_legendre(0.0, 1.0, nodes));
}

// 1. Example frame: bounds within 1e-10 for N >= 2, s within 1e-12, < 0.1 s.
Outcome criterion_1() {
  Outcome o;
  Detail d;
  double bound_err = 0, s_err = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int n : {2, 3, 8, 32, 64}) {
    const auto data = frame_operator(example_family(n));
    const auto b = optimal_bounds(data);
    bound_err = std::max({bound_err, std::abs(b.lower - 0.25), std::abs(b.upper - 1.0 / 3)});
    s_err = std::max(s_err, spectral(data.s_flat() - diag({1.0 / 3, 0.25})));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.passed = bound_err <= 1e-10 && s_err <= 1e-12 && secs < 0.1;
  d.add("N in {2,3,8,32,64}: max bound error %.3g (tol 1e-10)", bound_err);
  d.add("max frame operator error %.3g (tol 1e-12)", s_err);
  d.add("runtime %.4f s (limit 0.1)", secs);
  o.detail = d.str();
  return o;
}

// 2. Canonical dual equals diag(3w, 2 sqrt(3) w); bounds (3, 4); resolution.
Outcome criterion_2() {
  Outcome o;
  Detail d;
  const auto t = example_family(32);
  const auto dual = canonical_dual(t);
  const auto want = example_dual_family(t.rule());
  double coeff_err = dual.is_parametric() ? 0 : 1;
  for (std::size_t p = 0; p < dual.coefficients().size(); ++p) {
    coeff_err = std::max(coeff_err,
                         (dual.coefficients()[p] - want.coefficients()[p]).cwiseAbs().maxCoeff());
  }
  const auto b = optimal_bounds(frame_operator(dual));
  const double bound_err = std::max(std::abs(b.lower - 3), std::abs(b.upper - 4));
  const double residual = is_dual_pair(t, dual).resolution_residual;
  o.passed = coeff_err <= 1e-10 && bound_err <= 1e-9 && residual <= 1e-10;
  d.add("coefficient error %.3g (tol 1e-10)", coeff_err);
  d.add("bounds (%.15g, %.15g) error %.3g (tol 1e-9)", b.lower, b.upper, bound_err);
  d.add("resolution residual %.3g (tol 1e-10)", residual);
  o.detail = d.str();
  return o;
}

// 3. Frame operator properties on 50 random scenarios, < 5 s total.
Outcome criterion_3() {
  Outcome o;
  Detail d;
  std::mt19937_64 rng(20261018);
  double herm = 0, neg = 0, sandwich = 0, contraction_slack = -1;
  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < 50; ++t) {
    const auto sc = random_frame(rng, 32, 4, 3);
    const auto data = frame_operator(sc.family);
    const auto b = optimal_bounds(data);
    const Matrix &s = data.s_flat();
    const Matrix id = Matrix::Identity(s.rows(), s.cols());
    herm = std::max(herm, spectral(s - s.adjoint()));
    neg = std::max(neg, -min_eigen(s));
    sandwich = std::max({sandwich, -min_eigen(s - b.lower * id), -min_eigen(b.upper * id - s)});
    contraction_slack =
        std::max(contraction_slack, spectral(id - s / b.upper) - (b.upper - b.lower) / b.upper);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.passed = herm <= 1e-12 && neg <= 1e-10 && sandwich <= 1e-10 && contraction_slack <= 1e-10 &&
             secs < 5;
  d.add("Hermitian defect %.3g (tol 1e-12)", herm);
  d.add("max(-lambda_min) %.3g (tol 1e-10)", neg);
  d.add("sandwich violation %.3g (tol 1e-10)", sandwich);
  d.add("||I - s/B|| - (B-A)/B = %.3g (tol 1e-10)", contraction_slack);
  d.add("runtime %.3f s (limit 5)", secs);
  o.detail = d.str();
  return o;
}

// 4. Direct and iterative reconstruction agree; measured contraction on the
// example frame with lambda = 1/B.
Outcome criterion_4() {
  Outcome o;
  Detail d;
  std::mt19937_64 rng(20261018);
  double disagreement = 0;
  int max_iter = 0;
  for (int t = 0; t < 50; ++t) {
    const auto sc = random_frame(rng, 32, 4, 3);
    const auto data = frame_operator(sc.family);
    auto x = random_vector<double>(sc.descriptor, sc.rank, rng);
    x *= Complex(1 / scalar_norm(x));
    const auto y = apply(data.s, x);
    const auto direct = reconstruct_direct(data, y);
    const auto iter = reconstruct_neumann(data, y, Relaxation::reciprocal_upper(), 1e-14, 10000000);
    disagreement = std::max(disagreement, scalar_norm(direct.x_hat - iter.x_hat));
    max_iter = std::max(max_iter, iter.iterations);
  }

  const auto data = frame_operator(example_family(32));
  const auto y = apply(data.s, ModuleVectorD::unit(D2, 1));
  const auto r = reconstruct_neumann(data, y, Relaxation::reciprocal_upper(), 1e-12);
  double worst_ratio = 0;
  for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
    worst_ratio = std::max(worst_ratio, r.residual_history[i] / r.residual_history[i - 1]);
  }
  o.passed = disagreement <= 1e-9 && worst_ratio <= 0.25 + 1e-8 && r.iterations <= 25 &&
             r.final_residual() <= 1e-12;
  d.add("50 random frames: max ||x_direct - x_neumann|| %.3g (tol 1e-9), up to %d iterations",
        disagreement, max_iter);
  d.add("example, lambda = 1/B = %.15g: worst residual ratio %.12g (limit 0.25 + 1e-8)",
        r.relaxation, worst_ratio);
  d.add("%d iterations to %.3g (limit 25 to 1e-12)", r.iterations, r.final_residual());
  o.detail = d.str();
  return o;
}

// 5. Additive envelope on 50 random admissible perturbations plus the
// example case K = I, c = 0.4.
Outcome criterion_5() {
  Outcome o;
  Detail d;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> frac(0.0, 0.95);
  double slack = std::numeric_limits<double>::infinity();
  int admissible = 0;
  for (int t = 0; t < 50; ++t) {
    const auto sc = random_frame(rng, 32, 4, 3);
    const auto base = optimal_bounds(frame_operator(sc.family));
    const auto k = random_operator(sc.descriptor, sc.rank, rng);
    // c(w) = lambda (1 + u w) with lambda chosen so that R = frac * A.
    std::uniform_real_distribution<double> uu(-1.0, 1.0);
    const PolynomialD shape{{Complex(1, uu(rng)), Complex(uu(rng), uu(rng))}};
    const AdditivePerturbation<double> unit{k, Fn::polynomial(shape)};
    const double r1 = additive_admissible(sc.family, unit).R;
    const double lambda = std::sqrt(frac(rng) * base.lower / r1);
    const AdditivePerturbation<double> p{
        k, Fn::polynomial(PolynomialD{{lambda * shape.coefficients[0],
                                       lambda * shape.coefficients[1]}})};
    const auto adm = additive_admissible(sc.family, p);
    if (!adm.admissible) {
      continue;
    }
    ++admissible;
    const auto e = predicted_envelope_additive(adm.A, base.upper, adm.R);
    const auto b = optimal_bounds(frame_operator(perturb_additive(sc.family, p)));
    slack = std::min({slack, b.lower - e.lower, e.upper - b.upper});
  }

  const auto t = example_family(32);
  const AdditivePerturbation<double> p{ModuleOperatorD::identity(D2, 1), Fn::constant(0.4)};
  const auto adm = additive_admissible(t, p);
  const auto e = predicted_envelope_additive(adm.A, 1.0 / 3, adm.R);
  const auto b = optimal_bounds(frame_operator(perturb_additive(t, p)));
  const double upper = std::pow(std::sqrt(1.0 / 3) + 0.4, 2);
  const bool example_ok = std::abs(adm.R - 0.16) <= 1e-12 && adm.admissible &&
                          std::abs(e.lower - 0.01) <= 1e-12 &&
                          std::abs(e.upper - upper) <= 1e-12 && b.lower > 0.01 &&
                          b.upper < upper;
  o.passed = admissible == 50 && slack >= -1e-9 && example_ok;
  d.add("%d/50 admissible, min slack %.3g (limit -1e-9)", admissible, slack);
  d.add("example: R = %.15g, admissible %s, bounds (%.6g, %.6g) inside (0.01, %.6g)", adm.R,
        adm.admissible ? "yes" : "no", b.lower, b.upper, upper);
  o.detail = d.str();
  return o;
}

// 6. Relative envelope on 20 constructed instances that pass the sampled
// criterion: Lambda = gamma T + eps E, a positive, b = a / gamma.
Outcome criterion_6() {
  Outcome o;
  Detail d;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> gamma_d(0.6, 1.6), ab(0.2, 0.45), eps_d(0.0, 0.05),
      a0(0.5, 2.0);
  double slack = std::numeric_limits<double>::infinity();
  int passing = 0, attempts = 0;
  while (passing < 20 && attempts < 200) {
    ++attempts;
    const auto sc = random_frame(rng, 32, 4, 3);
    const double gamma = gamma_d(rng), eps = eps_d(rng);
    const auto noise = OperatorFamilyD::parametric(
        sc.family.rule(), sc.descriptor, sc.rank,
        {mask(sc.descriptor, random_matrix(sc.family.flat_dim(), sc.family.flat_dim(), rng))});
    std::vector<ModuleOperatorD> ops;
    for (Eigen::Index i = 0; i < sc.family.size(); ++i) {
      ops.push_back(gamma * sc.family.at(i) + eps * noise.at(i));
    }
    const auto lambda = OperatorFamilyD::sampled(sc.family.rule(), ops);
    const double c0 = a0(rng), c1 = 0.5 * a0(rng);
    const PolynomialD a{{c0, c1}};
    const PolynomialD b{{c0 / gamma, c1 / gamma}};
    const RelativePerturbation<double> p{Fn::polynomial(a), Fn::polynomial(b), ab(rng), ab(rng)};
    const auto xs = criterion_sample_set(sc.family, lambda, p, 200, 1000 + attempts);
    if (!relative_criterion_check(sc.family, lambda, p, xs)) {
      continue;
    }
    ++passing;
    const auto env = predicted_envelope_relative(optimal_bounds(frame_operator(sc.family)), p,
                                                 sc.family.rule());
    const auto bl = optimal_bounds(frame_operator(lambda));
    slack = std::min({slack, bl.lower - env.lower, env.upper - bl.upper});
  }
  o.passed = passing == 20 && slack >= -1e-9;
  d.add("%d instances passed the sampled criterion in %d attempts", passing, attempts);
  d.add("min slack %.3g (limit -1e-9)", slack);
  o.detail = d.str();
  return o;
}

// 7. Oracle equivalences.
Outcome criterion_7() {
  Outcome o;
  Detail d;
  std::mt19937_64 rng(7);
  double sa = 0, sigma = 0, quad = 0;
  for (int t = 0; t < 200; ++t) {
    const auto sc = random_frame(rng, 16, 4, 3);
    const auto data = frame_operator(sc.family);
    const auto x = random_vector<double>(sc.descriptor, sc.rank, rng);
    const Matrix lhs = apply(data.s, x).flat();
    const Matrix rhs = synthesis(sc.family, analysis(sc.family, x)).flat();
    sa = std::max(sa, spectral(lhs - rhs) / (1 + spectral(lhs)));
  }
  for (int t = 0; t < 50; ++t) {
    const auto sc = random_frame(rng, 32, 4, 3);
    const double lmin = optimal_bounds(frame_operator(sc.family)).lower;
    const double smin = below_bounded_check(sc.family).sigma_min;
    sigma = std::max(sigma, std::abs(lmin - smin * smin));
  }
  for (int t = 0; t < 10; ++t) {
    const auto sc = random_frame(rng, 32, 3, 2);
    const auto mid = sc.family.with_rule(midpoint(0.0, 1.0, 10000));
    quad = std::max(quad, spectral(frame_operator(sc.family).s_flat() -
                                   frame_operator(mid).s_flat()));
  }
  o.passed = sa <= 1e-10 && sigma <= 1e-9 && quad <= 1e-6;
  d.add("frame operator vs synthesis(analysis): %.3g relative (tol 1e-10, 200 vectors)", sa);
  d.add("|lambda_min - sigma_min^2| %.3g (tol 1e-9)", sigma);
  d.add("Gauss-Legendre vs 1e4-point midpoint %.3g (tol 1e-6)", quad);
  o.detail = d.str();
  return o;
}

// 8. Module-level inequalities.
Outcome criterion_8() {
  Outcome o;
  Detail d;
  std::mt19937_64 rng(8);
  int norm_bound_ok = 0, two_sided_ok = 0;
  double adjoint_err = 0;
  for (int t = 0; t < 200; ++t) {
    const auto desc = random_descriptor(rng);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 3);
    const auto m = random_operator(desc, n, rng);
    const auto x = random_vector<double>(desc, n, rng);
    const Matrix mx = inner_product(apply(m, x), apply(m, x)).entries();
    const Matrix xx = inner_product(x, x).entries();
    const double norm = spectral(m.flat());
    norm_bound_ok += min_eigen(norm * norm * xx - mx) >= -1e-10 * (1 + norm * norm * spectral(xx));
  }
  for (int t = 0; t < 50; ++t) {
    const auto desc = random_descriptor(rng);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 3);
    const auto m = random_operator(desc, n, rng);
    const auto mm = op_adjoint(m) * m;
    const auto id = ModuleOperatorD::identity(desc, n);
    const double lo = 1 / operator_norm(inverse(mm));
    const double hi = std::pow(operator_norm(m), 2);
    two_sided_ok += is_positive(mm - lo * id, 1e-9) && is_positive(hi * id - mm, 1e-9);
  }
  for (int t = 0; t < 1000; ++t) {
    const auto desc = random_descriptor(rng);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 3);
    const auto m = random_operator(desc, n, rng);
    const auto x = random_vector<double>(desc, n, rng), y = random_vector<double>(desc, n, rng);
    const Matrix lhs = inner_product(apply(m, x), y).entries();
    const Matrix rhs = inner_product(x, apply(op_adjoint(m), y)).entries();
    adjoint_err = std::max(adjoint_err, spectral(lhs - rhs));
  }
  o.passed = norm_bound_ok == 200 && two_sided_ok == 50 && adjoint_err <= 1e-10;
  d.add("<Mx,Mx> <= ||M||^2 <x,x>: %d/200", norm_bound_ok);
  d.add("two-sided bound on M*M: %d/50", two_sided_ok);
  d.add("adjoint identity max error %.3g over 1000 draws (tol 1e-10)", adjoint_err);
  o.detail = d.str();
  return o;
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"example frame reproduction", criterion_1},
      {"canonical dual reproduction", criterion_2},
      {"frame operator suite", criterion_3},
      {"reconstruction", criterion_4},
      {"additive perturbation envelope", criterion_5},
      {"relative perturbation envelope", criterion_6},
      {"oracle equivalence", criterion_7},
      {"module property suites", criterion_8},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.passed;
    std::printf("%s criterion %zu (%s): %s [%.3f s]\n", o.passed ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
