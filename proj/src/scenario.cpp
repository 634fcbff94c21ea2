#include "opframe/scenario.hpp"

#include <cmath>
#include <fstream>

namespace opframe {

using nlohmann::json;

namespace {

// A JSON value together with its path inside the scenario document.
class Field {
public:
  Field(const json &value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string &path() const { return path_; }
  const json &raw() const { return value_; }

  [[noreturn]] void fail(const std::string &message) const {
    throw ScenarioError(path_, message);
  }

  const Field &require_object() const {
    if (!value_.is_object()) {
      fail("expected an object");
    }
    return *this;
  }

  Field operator[](const char *key) const {
    require_object();
    auto it = value_.find(key);
    if (it == value_.end()) {
      throw ScenarioError(child(key), "missing required field");
    }
    return Field(*it, child(key));
  }

  std::optional<Field> find(const char *key) const {
    require_object();
    auto it = value_.find(key);
    if (it == value_.end() || it->is_null()) {
      return std::nullopt;
    }
    return Field(*it, child(key));
  }

  std::size_t size() const {
    if (!value_.is_array()) {
      fail("expected an array");
    }
    return value_.size();
  }

  Field operator[](std::size_t i) const {
    return Field(value_.at(i), path_ + "[" + std::to_string(i) + "]");
  }

  double number() const {
    if (!value_.is_number()) {
      fail("expected a number");
    }
    const double v = value_.get<double>();
    if (!std::isfinite(v)) {
      fail("expected a finite number");
    }
    return v;
  }

  int integer() const {
    if (!value_.is_number_integer()) {
      fail("expected an integer");
    }
    return value_.get<int>();
  }

  std::string string() const {
    if (!value_.is_string()) {
      fail("expected a string");
    }
    return value_.get<std::string>();
  }

  std::complex<double> complex() const {
    if (!value_.is_array() || value_.size() != 2) {
      fail("expected a complex number as a [re, im] pair");
    }
    return {(*this)[std::size_t{0}].number(), (*this)[1].number()};
  }

private:
  std::string child(const char *key) const {
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

  const json &value_;
  std::string path_;
};

PolynomialD parse_polynomial(const Field &f) {
  PolynomialD p;
  for (std::size_t i = 0; i < f.size(); ++i) {
    p.coefficients.push_back(f[i].complex());
  }
  return p;
}

bool is_zero(const PolynomialD &p) {
  for (const auto &c : p.coefficients) {
    if (c != std::complex<double>(0)) {
      return false;
    }
  }
  return true;
}

bool is_zero(std::complex<double> z) { return z == std::complex<double>(0); }

// A diagonal algebra only allows entries (i, j) with i = j mod k.
template <typename T>
void check_pattern(const Field &f, Eigen::Index i, Eigen::Index j, const T &value,
                   const AlgebraDescriptor &algebra) {
  if (algebra.is_diagonal() && i % algebra.dim != j % algebra.dim && !is_zero(value)) {
    f.fail("must be zero: entry (" + std::to_string(i) + ", " + std::to_string(j) +
           ") lies off the diagonal pattern of the diagonal algebra");
  }
}

MatrixD parse_matrix(const Field &f, Eigen::Index rows, Eigen::Index cols,
                     const AlgebraDescriptor *pattern = nullptr) {
  if (f.size() != static_cast<std::size_t>(rows)) {
    f.fail("expected " + std::to_string(rows) + " rows, got " + std::to_string(f.size()));
  }
  MatrixD m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Field row = f[static_cast<std::size_t>(i)];
    if (row.size() != static_cast<std::size_t>(cols)) {
      row.fail("expected " + std::to_string(cols) + " columns, got " +
               std::to_string(row.size()));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = row[static_cast<std::size_t>(j)].complex();
      if (pattern) {
        check_pattern(row[static_cast<std::size_t>(j)], i, j, m(i, j), *pattern);
      }
    }
  }
  return m;
}

ScalarFunctionD parse_function(const Field &f) {
  f.require_object();
  if (auto poly = f.find("polynomial")) {
    return ScalarFunctionD::polynomial(parse_polynomial(*poly));
  }
  if (auto samples = f.find("samples")) {
    MatrixTypes<double>::ComplexVector v(static_cast<Eigen::Index>(samples->size()));
    for (std::size_t i = 0; i < samples->size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = (*samples)[i].complex();
    }
    return ScalarFunctionD::sampled(std::move(v));
  }
  f.fail("expected either \"polynomial\" or \"samples\"");
}

FamilySpec parse_family(const Field &f, const AlgebraDescriptor &algebra, Eigen::Index d) {
  FamilySpec spec;
  const std::string form = f["form"].string();
  if (form == "parametric") {
    spec.form = FamilySpec::Form::parametric;
    const Field entries = f["entries"];
    if (entries.size() != static_cast<std::size_t>(d)) {
      entries.fail("expected " + std::to_string(d) + " rows, got " +
                   std::to_string(entries.size()));
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Field row = entries[i];
      if (row.size() != static_cast<std::size_t>(d)) {
        row.fail("expected " + std::to_string(d) + " columns, got " +
                 std::to_string(row.size()));
      }
      std::vector<PolynomialD> polys;
      for (std::size_t j = 0; j < row.size(); ++j) {
        polys.push_back(parse_polynomial(row[j]));
        check_pattern(row[j], static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j),
                      polys.back(), algebra);
      }
      spec.entries.push_back(std::move(polys));
    }
  } else if (form == "sampled") {
    spec.form = FamilySpec::Form::sampled;
    const Field ops = f["operators"];
    for (std::size_t i = 0; i < ops.size(); ++i) {
      spec.operators.push_back(parse_matrix(ops[i], d, d, &algebra));
    }
  } else {
    f["form"].fail("expected \"parametric\" or \"sampled\", got \"" + form + "\"");
  }
  return spec;
}

MeasureSpec parse_measure(const Field &f) {
  MeasureSpec m;
  const std::string kind = f["kind"].string();
  if (kind == "lebesgue_interval") {
    m.kind = MeasureKind::lebesgue_interval;
    const Field interval = f["interval"];
    if (interval.size() != 2) {
      interval.fail("expected [a, b]");
    }
    m.a = interval[std::size_t{0}].number();
    m.b = interval[1].number();
    if (!(m.a < m.b)) {
      interval.fail("expected a < b");
    }
    const std::string rule = f.find("rule") ? f["rule"].string() : "gauss_legendre";
    if (rule == "gauss_legendre") {
      m.rule = RuleKind::gauss_legendre;
    } else if (rule == "midpoint") {
      m.rule = RuleKind::midpoint;
    } else {
      f["rule"].fail("expected \"gauss_legendre\" or \"midpoint\"");
    }
  } else if (kind == "counting") {
    m.kind = MeasureKind::counting;
    m.rule = RuleKind::counting;
    m.a = 0.0;
    m.b = 0.0;
  } else {
    f["kind"].fail("expected \"lebesgue_interval\" or \"counting\"");
  }
  if (auto nodes = f.find("nodes")) {
    m.nodes = nodes->integer();
  }
  if (m.nodes < 1) {
    f["nodes"].fail("expected a positive node count");
  }
  return m;
}

Relaxation parse_relaxation(const Field &f) {
  if (f.raw().is_number()) {
    return Relaxation::fixed(f.number());
  }
  const std::string name = f.string();
  if (name == "reciprocal_upper") {
    return Relaxation::reciprocal_upper();
  }
  if (name == "optimal") {
    return Relaxation::optimal();
  }
  f.fail("expected \"reciprocal_upper\", \"optimal\" or a number");
}

json relaxation_to_json(const Relaxation &r) {
  switch (r.kind) {
  case Relaxation::Kind::reciprocal_upper:
    return "reciprocal_upper";
  case Relaxation::Kind::optimal:
    return "optimal";
  case Relaxation::Kind::fixed:
    break;
  }
  return r.value;
}

json function_to_json(const ScalarFunctionD &f) {
  if (f.is_polynomial()) {
    return {{"polynomial", polynomial_to_json(f.poly())}};
  }
  json samples = json::array();
  for (Eigen::Index i = 0; i < f.samples().size(); ++i) {
    samples.push_back(complex_to_json(f.samples()(i)));
  }
  return {{"samples", samples}};
}

json family_spec_to_json(const FamilySpec &spec) {
  if (spec.form == FamilySpec::Form::parametric) {
    json entries = json::array();
    for (const auto &row : spec.entries) {
      json r = json::array();
      for (const auto &p : row) {
        r.push_back(polynomial_to_json(p));
      }
      entries.push_back(std::move(r));
    }
    return {{"form", "parametric"}, {"entries", std::move(entries)}};
  }
  json ops = json::array();
  for (const auto &m : spec.operators) {
    ops.push_back(matrix_to_json(m));
  }
  return {{"form", "sampled"}, {"operators", std::move(ops)}};
}

} // namespace

json complex_to_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const MatrixD &m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(complex_to_json(m(i, j)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json polynomial_to_json(const PolynomialD &p) {
  json out = json::array();
  for (const auto &c : p.coefficients) {
    out.push_back(complex_to_json(c));
  }
  return out;
}

// Parametric families are written back as polynomial tables with trailing
// zero coefficients trimmed; sampled ones as their node operators.
json family_to_json(const OperatorFamilyD &family) {
  FamilySpec spec;
  if (family.is_parametric()) {
    spec.form = FamilySpec::Form::parametric;
    const Eigen::Index d = family.flat_dim();
    spec.entries.assign(static_cast<std::size_t>(d),
                        std::vector<PolynomialD>(static_cast<std::size_t>(d)));
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        auto &coeffs = spec.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                           .coefficients;
        for (const auto &c : family.coefficients()) {
          coeffs.push_back(c(i, j));
        }
        while (!coeffs.empty() && coeffs.back() == std::complex<double>(0.0)) {
          coeffs.pop_back();
        }
      }
    }
  } else {
    spec.form = FamilySpec::Form::sampled;
    for (const auto &m : family.operators()) {
      spec.operators.push_back(m.flat());
    }
  }
  return family_spec_to_json(spec);
}

Scenario parse_scenario(const json &doc) {
  const Field root(doc, "");
  root.require_object();
  Scenario s;
  s.schema_version = root["schema_version"].integer();
  if (s.schema_version != 1) {
    root["schema_version"].fail("unsupported schema version " +
                                std::to_string(s.schema_version));
  }
  if (auto name = root.find("name")) {
    s.name = name->string();
  }

  const Field algebra = root["algebra"];
  const std::string kind = algebra["kind"].string();
  const int dim = algebra["dim"].integer();
  if (dim < 1) {
    algebra["dim"].fail("expected a positive dimension");
  }
  if (kind == "full") {
    s.algebra = AlgebraDescriptor::full(dim);
  } else if (kind == "diagonal") {
    s.algebra = AlgebraDescriptor::diagonal(dim);
  } else {
    algebra["kind"].fail("expected \"full\" or \"diagonal\"");
  }

  s.module_rank = root["module_rank"].integer();
  if (s.module_rank < 1) {
    root["module_rank"].fail("expected a positive module rank");
  }
  const Eigen::Index k = s.algebra.dim;
  const Eigen::Index d = k * s.module_rank;

  s.measure = parse_measure(root["measure"]);
  s.family = parse_family(root["family"], s.algebra, d);
  auto check_count = [&](const FamilySpec &spec, const Field &f) {
    if (spec.form == FamilySpec::Form::sampled &&
        spec.operators.size() != static_cast<std::size_t>(s.measure.nodes)) {
      f["operators"].fail("expected one operator per node (" + std::to_string(s.measure.nodes) +
                          "), got " + std::to_string(spec.operators.size()));
    }
  };
  check_count(s.family, root["family"]);

  if (auto pert = root.find("perturbation")) {
    pert->require_object();
    if (auto add = pert->find("additive")) {
      AdditiveSpec spec;
      spec.K = parse_matrix((*add)["K"], d, d, &s.algebra);
      spec.c = parse_function((*add)["c"]);
      s.additive = std::move(spec);
    }
    if (auto rel = pert->find("relative")) {
      RelativeSpec spec;
      spec.family = parse_family((*rel)["family"], s.algebra, d);
      check_count(spec.family, (*rel)["family"]);
      if (auto a = rel->find("a")) {
        spec.a = parse_function(*a);
      }
      if (auto b = rel->find("b")) {
        spec.b = parse_function(*b);
      }
      spec.alpha = (*rel)["alpha"].number();
      spec.beta = (*rel)["beta"].number();
      if (!(spec.alpha >= 0 && spec.alpha < 0.5)) {
        (*rel)["alpha"].fail("expected 0 <= alpha < 1/2");
      }
      if (!(spec.beta >= 0 && spec.beta < 0.5)) {
        (*rel)["beta"].fail("expected 0 <= beta < 1/2");
      }
      if (auto n = rel->find("random_samples")) {
        spec.random_samples = n->integer();
        if (spec.random_samples < 0) {
          n->fail("expected a non-negative count");
        }
      }
      s.relative = std::move(spec);
    }
  }

  if (auto rec = root.find("reconstruction")) {
    ReconstructionSpec spec;
    if (auto method = rec->find("method")) {
      const std::string m = method->string();
      if (m == "direct") {
        spec.method = ReconstructionMethod::direct;
      } else if (m == "neumann") {
        spec.method = ReconstructionMethod::neumann;
      } else {
        method->fail("expected \"direct\" or \"neumann\"");
      }
    }
    if (auto relax = rec->find("relaxation")) {
      spec.relaxation = parse_relaxation(*relax);
    }
    if (auto x = rec->find("x")) {
      spec.x = parse_matrix(*x, k, d, &s.algebra);
    }
    if (auto it = rec->find("max_iter")) {
      spec.max_iter = it->integer();
      if (spec.max_iter < 1) {
        it->fail("expected a positive iteration cap");
      }
    }
    s.reconstruction = std::move(spec);
  }

  if (auto tol = root.find("tolerances")) {
    auto read = [&](const char *key, double &out) {
      if (auto f = tol->find(key)) {
        out = f->number();
        if (!(out > 0)) {
          f->fail("expected a positive tolerance");
        }
      }
    };
    read("classification", s.tolerances.classification);
    read("positivity", s.tolerances.positivity);
    read("reconstruction", s.tolerances.reconstruction);
    read("dual", s.tolerances.dual);
    read("independence", s.tolerances.independence);
  }
  return s;
}

Scenario load_scenario(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError(path, "cannot open scenario file");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ScenarioError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const Scenario &s) {
  json doc;
  doc["schema_version"] = s.schema_version;
  doc["name"] = s.name;
  doc["algebra"] = {{"kind", to_string(s.algebra.kind)}, {"dim", s.algebra.dim}};
  doc["module_rank"] = s.module_rank;

  json measure;
  if (s.measure.kind == MeasureKind::lebesgue_interval) {
    measure = {{"kind", "lebesgue_interval"},
               {"interval", {s.measure.a, s.measure.b}},
               {"rule", to_string(s.measure.rule)},
               {"nodes", s.measure.nodes}};
  } else {
    measure = {{"kind", "counting"}, {"nodes", s.measure.nodes}};
  }
  doc["measure"] = std::move(measure);
  doc["family"] = family_spec_to_json(s.family);

  if (s.additive || s.relative) {
    json pert = json::object();
    if (s.additive) {
      pert["additive"] = {{"K", matrix_to_json(s.additive->K)},
                          {"c", function_to_json(s.additive->c)}};
    }
    if (s.relative) {
      pert["relative"] = {{"family", family_spec_to_json(s.relative->family)},
                          {"a", function_to_json(s.relative->a)},
                          {"b", function_to_json(s.relative->b)},
                          {"alpha", s.relative->alpha},
                          {"beta", s.relative->beta},
                          {"random_samples", s.relative->random_samples}};
    }
    doc["perturbation"] = std::move(pert);
  }

  if (s.reconstruction) {
    json rec = {{"method", to_string(s.reconstruction->method)},
                {"relaxation", relaxation_to_json(s.reconstruction->relaxation)},
                {"max_iter", s.reconstruction->max_iter}};
    if (s.reconstruction->x) {
      rec["x"] = matrix_to_json(*s.reconstruction->x);
    }
    doc["reconstruction"] = std::move(rec);
  }

  doc["tolerances"] = {{"classification", s.tolerances.classification},
                       {"positivity", s.tolerances.positivity},
                       {"reconstruction", s.tolerances.reconstruction},
                       {"dual", s.tolerances.dual},
                       {"independence", s.tolerances.independence}};
  return doc;
}

QuadratureRuleD build_rule(const MeasureSpec &m) {
  switch (m.rule) {
  case RuleKind::gauss_legendre:
    return gauss_legendre(m.a, m.b, m.nodes);
  case RuleKind::midpoint:
    return midpoint(m.a, m.b, m.nodes);
  case RuleKind::counting:
    return counting(m.nodes);
  }
  throw InvalidArgument("unknown quadrature rule");
}

OperatorFamilyD build_family(const Scenario &s, const FamilySpec &spec,
                             const QuadratureRuleD &rule) {
  const Eigen::Index d = s.algebra.dim * s.module_rank;
  if (spec.form == FamilySpec::Form::parametric) {
    std::size_t degree = 1;
    for (const auto &row : spec.entries) {
      for (const auto &p : row) {
        degree = std::max(degree, p.coefficients.size());
      }
    }
    std::vector<MatrixD> coefficients(degree, MatrixD::Zero(d, d));
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const auto &p = spec.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        for (std::size_t c = 0; c < p.coefficients.size(); ++c) {
          coefficients[c](i, j) = p.coefficients[c];
        }
      }
    }
    return OperatorFamilyD::parametric(rule, s.algebra, s.module_rank, std::move(coefficients));
  }
  std::vector<ModuleOperatorD> ops;
  for (const auto &m : spec.operators) {
    ops.emplace_back(s.algebra, s.module_rank, m);
  }
  return OperatorFamilyD::sampled(rule, std::move(ops));
}

OperatorFamilyD build_family(const Scenario &s) {
  return build_family(s, s.family, build_rule(s.measure));
}

} // namespace opframe
