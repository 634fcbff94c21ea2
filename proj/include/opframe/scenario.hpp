#ifndef OPFRAME_SCENARIO_HPP
#define OPFRAME_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opframe/opframe.hpp"

namespace opframe {

// Schema violation, reported with the JSON path of the offending field.
class ScenarioError : public Error {
public:
  ScenarioError(const std::string &path, const std::string &message)
      : Error(path + ": " + message), path_(path) {}
  const std::string &path() const { return path_; }

private:
  std::string path_;
};

using MatrixD = MatrixTypes<double>::Matrix;

struct MeasureSpec {
  MeasureKind kind = MeasureKind::lebesgue_interval;
  double a = 0.0;
  double b = 1.0;
  RuleKind rule = RuleKind::gauss_legendre;
  int nodes = 32;
};

struct FamilySpec {
  enum class Form { parametric, sampled };
  Form form = Form::parametric;
  // Parametric: (n k) x (n k) table of polynomials in w.
  std::vector<std::vector<PolynomialD>> entries;
  // Sampled: one flattened operator per node.
  std::vector<MatrixD> operators;
};

struct AdditiveSpec {
  MatrixD K;
  ScalarFunctionD c = ScalarFunctionD::constant(0.0);
};

struct RelativeSpec {
  FamilySpec family;
  ScalarFunctionD a = ScalarFunctionD::constant(1.0);
  ScalarFunctionD b = ScalarFunctionD::constant(1.0);
  double alpha = 0.0;
  double beta = 0.0;
  int random_samples = 200;
};

struct ReconstructionSpec {
  ReconstructionMethod method = ReconstructionMethod::direct;
  Relaxation relaxation = Relaxation::reciprocal_upper();
  // k x (n k) flattened vector to recover; the unit vector when absent.
  std::optional<MatrixD> x;
  int max_iter = 1000;
};

struct Tolerances {
  double classification = 1e-8;
  double positivity = 1e-10;
  double reconstruction = 1e-12;
  double dual = 1e-10;
  double independence = 1e-10;
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  AlgebraDescriptor algebra;
  int module_rank = 1;
  MeasureSpec measure;
  FamilySpec family;
  std::optional<AdditiveSpec> additive;
  std::optional<RelativeSpec> relative;
  std::optional<ReconstructionSpec> reconstruction;
  Tolerances tolerances;
};

Scenario parse_scenario(const nlohmann::json &doc);
Scenario load_scenario(const std::string &path);
nlohmann::json to_json(const Scenario &scenario);

QuadratureRuleD build_rule(const MeasureSpec &measure);
OperatorFamilyD build_family(const Scenario &scenario, const FamilySpec &spec,
                             const QuadratureRuleD &rule);
OperatorFamilyD build_family(const Scenario &scenario);

// Serialization helpers shared with the report writer.
nlohmann::json complex_to_json(std::complex<double> z);
nlohmann::json matrix_to_json(const MatrixD &m);
nlohmann::json polynomial_to_json(const PolynomialD &p);
nlohmann::json family_to_json(const OperatorFamilyD &family);

} // namespace opframe

#endif // OPFRAME_SCENARIO_HPP
