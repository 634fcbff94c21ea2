#include "opframe/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace opframe {

using nlohmann::json;

namespace {

// Slack allowed when comparing empirical bounds with a predicted envelope.
constexpr double kEnvelopeSlack = 1e-9;
constexpr int kNormEstimateSamples = 1000;

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string short_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json vector_json(const ModuleVectorD &x) { return matrix_to_json(x.flat()); }

ModuleVectorD reconstruction_target(const Scenario &s) {
  if (s.reconstruction && s.reconstruction->x) {
    return ModuleVectorD(s.algebra, s.module_rank, *s.reconstruction->x);
  }
  return ModuleVectorD::unit(s.algebra, s.module_rank);
}

json reconstruction_json(const Scenario &s, const FrameOperatorData<double> &data) {
  const ReconstructionSpec spec = s.reconstruction.value_or(ReconstructionSpec{});
  const auto x = reconstruction_target(s);
  const auto y = apply(data.s, x);
  const auto result =
      spec.method == ReconstructionMethod::direct
          ? reconstruct_direct(data, y)
          : reconstruct_neumann(data, y, spec.relaxation, s.tolerances.reconstruction,
                                spec.max_iter);
  json out = {{"method", to_string(result.method)},
              {"iterations", result.iterations},
              {"final_residual", result.final_residual()},
              {"residual_history", result.residual_history},
              {"error", scalar_norm(result.x_hat - x)},
              {"x", vector_json(x)},
              {"x_hat", vector_json(result.x_hat)},
              {"tolerance", s.tolerances.reconstruction}};
  if (result.method == ReconstructionMethod::neumann) {
    out["relaxation"] = result.relaxation;
    out["contraction"] = result.contraction;
  }
  return out;
}

json dual_json(const Scenario &s, const OperatorFamilyD &family,
               const FrameOperatorData<double> &data, bool include_family) {
  const auto dual = canonical_dual(family);
  const auto pair = is_dual_pair(family, dual, s.tolerances.dual);
  const auto primal = optimal_bounds(data);
  json out = {{"lower_bound", pair.dual_bounds.lower},
              {"upper_bound", pair.dual_bounds.upper},
              {"reciprocal_primal_bounds", {1 / primal.upper, 1 / primal.lower}},
              {"resolution_residual", pair.resolution_residual},
              {"is_dual", pair.is_dual},
              {"tolerance", pair.tolerance}};
  if (include_family) {
    out["family"] = family_to_json(dual);
  }
  return out;
}

struct PerturbationOutcome {
  json summary = json::object();
  bool accepted = true;
};

PerturbationOutcome perturbation_json(const Scenario &s, const OperatorFamilyD &family,
                                      const FrameOperatorData<double> &data,
                                      std::uint64_t seed) {
  PerturbationOutcome out;
  const double tol = s.tolerances.positivity;
  const auto base = optimal_bounds(data);
  if (s.additive) {
    const AdditivePerturbation<double> p{
        ModuleOperatorD(s.algebra, s.module_rank, s.additive->K), s.additive->c};
    const auto adm = additive_admissible(family, p, tol);
    const auto perturbed = optimal_bounds(frame_operator(perturb_additive(family, p)));
    json add = {{"R", adm.R},
                {"A", adm.A},
                {"admissible", adm.admissible},
                {"verdict", adm.admissible ? "admissible, R = " + short_number(adm.R) +
                                                 " < A = " + short_number(adm.A)
                                           : "not admissible, R = " + short_number(adm.R) +
                                                 " ≥ A = " + short_number(adm.A)},
                {"alternative_threshold_holds", adm.alternative_threshold_holds},
                {"perturbed_bounds", {perturbed.lower, perturbed.upper}},
                {"tolerance", tol}};
    if (adm.admissible) {
      const auto env = predicted_envelope_additive(adm.A, base.upper, adm.R);
      add["envelope"] = {env.lower, env.upper};
      add["inside_envelope"] = perturbed.lower >= env.lower - kEnvelopeSlack &&
                               perturbed.upper <= env.upper + kEnvelopeSlack;
      add["envelope_slack"] = kEnvelopeSlack;
    } else {
      add["envelope"] = nullptr;
      out.accepted = false;
    }
    out.summary["additive"] = std::move(add);
  }
  if (s.relative) {
    const auto &spec = *s.relative;
    const auto other = build_family(s, spec.family, family.rule());
    const RelativePerturbation<double> p{spec.a, spec.b, spec.alpha, spec.beta};
    const auto range = confinement(p, family.rule());
    const auto xs = criterion_sample_set(family, other, p, spec.random_samples, seed);
    const bool criterion = relative_criterion_check(family, other, p, xs, tol);
    const auto env = predicted_envelope_relative(base, p, range);
    const auto other_bounds = optimal_bounds(frame_operator(other));
    out.summary["relative"] = {
        {"criterion", criterion ? "sampled pass" : "sampled fail"},
        {"sample_count", xs.size()},
        {"seed", seed},
        {"alpha", spec.alpha},
        {"beta", spec.beta},
        {"confinement",
         {{"inf_a", range.inf_a}, {"sup_a", range.sup_a}, {"inf_b", range.inf_b},
          {"sup_b", range.sup_b}}},
        {"envelope", {env.lower, env.upper}},
        {"perturbed_bounds", {other_bounds.lower, other_bounds.upper}},
        {"inside_envelope", other_bounds.lower >= env.lower - kEnvelopeSlack &&
                                other_bounds.upper <= env.upper + kEnvelopeSlack},
        {"envelope_slack", kEnvelopeSlack},
        {"tolerance", tol}};
    out.accepted = out.accepted && criterion;
  }
  return out;
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json header(const std::string &command, const Scenario &s) {
  return {{"schema_version", 1}, {"command", command}, {"scenario", to_json(s)}};
}

void finish(RunResult &r, const RunOptions &options, const Stopwatch &watch) {
  if (options.timings) {
    r.report["timings"] = {{"total_seconds", watch.seconds()}};
  }
}

} // namespace

json frame_report_to_json(const FrameReport<double> &r) {
  json out = {{"lower_bound", r.lower_bound},
              {"upper_bound", r.upper_bound},
              {"classification", to_string(r.classification)},
              {"spectrum", r.spectrum},
              {"condition", real_or_null(r.condition)},
              {"tolerance", r.tolerance},
              {"diagnostics", r.diagnostics}};
  if (r.classification == FrameClass::tight || r.classification == FrameClass::parseval) {
    out["tight_constant"] = r.tight_constant;
  }
  return out;
}

Scenario with_overrides(Scenario s, const std::string &command, const RunOptions &o) {
  if (o.nodes) {
    if (*o.nodes < 1) {
      throw ScenarioError("--nodes", "expected a positive node count");
    }
    s.measure.nodes = *o.nodes;
  }
  if (o.tol) {
    if (!(*o.tol > 0)) {
      throw ScenarioError("--tol", "expected a positive tolerance");
    }
    if (command == "analyze") {
      s.tolerances.classification = *o.tol;
    } else if (command == "reconstruct") {
      s.tolerances.reconstruction = *o.tol;
    } else if (command == "dual") {
      s.tolerances.dual = *o.tol;
    } else if (command == "perturb") {
      s.tolerances.positivity = *o.tol;
    } else if (command == "independence") {
      s.tolerances.independence = *o.tol;
    }
  }
  if (command == "reconstruct") {
    if (!s.reconstruction) {
      s.reconstruction = ReconstructionSpec{};
    }
    if (o.method) {
      if (*o.method == "direct") {
        s.reconstruction->method = ReconstructionMethod::direct;
      } else if (*o.method == "neumann") {
        s.reconstruction->method = ReconstructionMethod::neumann;
      } else {
        throw ScenarioError("--method", "expected direct or neumann");
      }
    }
    if (o.relaxation) {
      if (*o.relaxation == "reciprocal_upper") {
        s.reconstruction->relaxation = Relaxation::reciprocal_upper();
      } else if (*o.relaxation == "optimal") {
        s.reconstruction->relaxation = Relaxation::optimal();
      } else {
        try {
          std::size_t used = 0;
          const double v = std::stod(*o.relaxation, &used);
          if (used != o.relaxation->size()) {
            throw std::invalid_argument("trailing characters");
          }
          s.reconstruction->relaxation = Relaxation::fixed(v);
        } catch (const std::exception &) {
          throw ScenarioError("--relaxation", "expected reciprocal_upper, optimal or a number");
        }
      }
    }
    if (o.max_iter) {
      s.reconstruction->max_iter = *o.max_iter;
    }
  }
  if (command == "perturb" && (o.c || o.k_identity)) {
    if (!s.additive) {
      s.additive = AdditiveSpec{};
      s.additive->K = MatrixD::Identity(s.algebra.dim * s.module_rank,
                                        s.algebra.dim * s.module_rank);
    }
    if (o.k_identity) {
      s.additive->K = MatrixD::Identity(s.algebra.dim * s.module_rank,
                                        s.algebra.dim * s.module_rank);
    }
    if (o.c) {
      s.additive->c = ScalarFunctionD::constant(*o.c);
    }
  }
  return s;
}

RunResult run_analyze(const Scenario &s, const RunOptions &options) {
  Stopwatch watch;
  const auto family = build_family(s);
  const auto data = frame_operator(family);
  const auto report = classify(data, s.tolerances.classification);

  RunResult r;
  r.report = header("analyze", s);
  json frame = frame_report_to_json(report);
  frame["frame_operator"] = matrix_to_json(data.s.flat());
  frame["hermitian_defect"] = data.hermitian_defect();
  const auto estimate = norm_bounds_estimate(family, kNormEstimateSamples, options.seed);
  frame["norm_estimate"] = {{"lower", estimate.lower},
                            {"upper", estimate.upper},
                            {"samples", kNormEstimateSamples},
                            {"seed", options.seed}};
  // Matched to the classification tolerance: sigma_min^2 = lambda_min.
  const double sigma_tol = std::sqrt(s.tolerances.classification);
  const auto below = below_bounded_check(family, sigma_tol);
  frame["below_bounded"] = {{"bounded_below", below.bounded_below},
                            {"sigma_min", below.sigma_min},
                            {"tolerance", sigma_tol}};
  r.report["frame"] = std::move(frame);

  if (report.is_frame()) {
    r.report["dual"] = dual_json(s, family, data, false);
    if (s.reconstruction) {
      r.report["reconstruction"] = reconstruction_json(s, data);
    }
    if (s.additive || s.relative) {
      r.report["perturbation"] = perturbation_json(s, family, data, options.seed).summary;
    }
    r.exit_code = kExitOk;
  } else {
    r.exit_code = kExitNotFrame;
    r.message = "family is " + to_string(report.classification) +
                " (lower bound " + short_number(report.lower_bound) + ")";
  }
  finish(r, options, watch);
  return r;
}

RunResult run_reconstruct(const Scenario &s, const RunOptions &options) {
  Stopwatch watch;
  const auto family = build_family(s);
  const auto data = frame_operator(family);
  RunResult r;
  r.report = header("reconstruct", s);
  try {
    r.report["reconstruction"] = reconstruction_json(s, data);
  } catch (const NotAFrame &e) {
    r.report["reconstruction"] = {{"error", e.what()}};
    r.exit_code = kExitNotFrame;
    r.message = e.what();
  } catch (const SingularFrameOperator &e) {
    r.report["reconstruction"] = {{"error", e.what()}};
    r.exit_code = kExitNotFrame;
    r.message = e.what();
  }
  finish(r, options, watch);
  return r;
}

RunResult run_dual(const Scenario &s, const RunOptions &options) {
  Stopwatch watch;
  const auto family = build_family(s);
  const auto data = frame_operator(family);
  RunResult r;
  r.report = header("dual", s);
  try {
    r.report["dual"] = dual_json(s, family, data, true);
  } catch (const NotAFrame &e) {
    r.report["dual"] = {{"error", e.what()}};
    r.exit_code = kExitNotFrame;
    r.message = e.what();
  }
  finish(r, options, watch);
  return r;
}

RunResult run_perturb(const Scenario &s, const RunOptions &options) {
  Stopwatch watch;
  if (!s.additive && !s.relative) {
    throw ScenarioError("perturbation",
                        "missing; provide a perturbation block or --c/--K on the command line");
  }
  const auto family = build_family(s);
  const auto data = frame_operator(family);
  RunResult r;
  r.report = header("perturb", s);
  try {
    auto outcome = perturbation_json(s, family, data, options.seed);
    r.report["perturbation"] = std::move(outcome.summary);
    if (!outcome.accepted) {
      r.exit_code = kExitNotFrame;
      r.message = r.report["perturbation"].contains("additive") &&
                          !r.report["perturbation"]["additive"]["admissible"].get<bool>()
                      ? r.report["perturbation"]["additive"]["verdict"].get<std::string>()
                      : "relative criterion failed on the sample set";
    }
  } catch (const NotAFrame &e) {
    r.report["perturbation"] = {{"error", e.what()}};
    r.exit_code = kExitNotFrame;
    r.message = e.what();
  }
  finish(r, options, watch);
  return r;
}

RunResult run_independence(const Scenario &s, const RunOptions &options) {
  Stopwatch watch;
  const auto family = build_family(s);
  const double tol = s.tolerances.independence;
  const auto ind = independence_check(family, tol);
  const auto below = below_bounded_check(family, tol);
  const auto h_dim = static_cast<long>(
      detail::module_coordinates(family.descriptor(), family.rank()).size());
  RunResult r;
  r.report = header("independence", s);
  r.report["independence"] = {{"independent", ind.independent},
                              {"kernel_dim", ind.kernel_dim},
                              {"domain_dim", h_dim * family.size()},
                              {"codomain_dim", h_dim},
                              {"bounded_below", below.bounded_below},
                              {"sigma_min", below.sigma_min},
                              {"resolution", "quadrature nodes"},
                              {"tolerance", tol}};
  finish(r, options, watch);
  return r;
}

namespace {

std::string csv_escape(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

void flatten(const json &value, const std::string &key, std::ostringstream &out) {
  if (value.is_object()) {
    for (auto it = value.begin(); it != value.end(); ++it) {
      flatten(it.value(), key.empty() ? it.key() : key + "." + it.key(), out);
    }
  } else if (value.is_array()) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      flatten(value[i], key + "[" + std::to_string(i) + "]", out);
    }
  } else {
    out << csv_escape(key) << ','
        << csv_escape(value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
}

} // namespace

std::string to_csv(const json &report) {
  std::ostringstream out;
  out << "key,value\n";
  for (auto it = report.begin(); it != report.end(); ++it) {
    if (it.key() == "scenario") {
      continue;
    }
    flatten(it.value(), it.key(), out);
  }
  return out.str();
}

} // namespace opframe
