#include "locrho/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "locrho/error.hpp"
#include "locrho/random.hpp"

namespace locrho::io {

namespace {

class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& text) : s_(text) {}

  double parse() {
    const double v = expr();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected character");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("bad expression \"" + s_ + "\" at offset " + std::to_string(pos_) + ": " + why);
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (accept('+')) {
        v += term();
      } else if (accept('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        v /= unary();
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  double power() {
    const double base = primary();
    if (accept('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (accept('(')) {
      const double v = expr();
      if (!accept(')')) fail("expected ')'");
      return v;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string name;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) name += s_[pos_++];
      if (name == "pi") return std::numbers::pi;
      if (!accept('(')) fail("expected '(' after " + name);
      const double arg = expr();
      if (!accept(')')) fail("expected ')'");
      if (name == "sqrt") {
        if (arg < 0.0) fail("sqrt of a negative number");
        return std::sqrt(arg);
      }
      if (name == "cos") return std::cos(arg);
      if (name == "sin") return std::sin(arg);
      if (name == "exp") return std::exp(arg);
      fail("unknown function " + name);
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double parse_real(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return evaluate_expression(j.get<std::string>());
  throw InputError("expected a number or an expression string, got " + j.dump());
}

const Json& require(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  return obj.at(key);
}

void require_shape(const ComplexMatrix& m, std::size_t rows, std::size_t cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InputError(what + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::uint64_t parse_seed(const Json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw InputError("seed must be a non-negative integer");
}

ComplexMatrix parse_rho(const Json& j, std::size_t da) {
  if (j.is_string() && j.get<std::string>() == "maximally_mixed") {
    return ComplexMatrix::identity(da) * Complex(1.0 / static_cast<double>(da));
  }
  if (j.is_object()) {
    const Json& r = require(j, "random");
    Rng rng(parse_seed(require(r, "seed")));
    return random_density(da, rng);
  }
  ComplexMatrix m = parse_matrix(j);
  require_shape(m, da, da, "rho");
  return m;
}

KrausChannel parse_channel(const Json& j, BipartiteDims dims, double tol) {
  if (!j.is_object()) throw InputError("channel must be an object");
  if (j.contains("kraus")) {
    const Json& list = j.at("kraus");
    if (!list.is_array() || list.empty()) throw InputError("channel.kraus must be a non-empty list of matrices");
    std::vector<ComplexMatrix> kraus;
    for (const Json& k : list) {
      kraus.push_back(parse_matrix(k));
      require_shape(kraus.back(), dims.b, dims.a, "Kraus operator");
    }
    return KrausChannel::make(std::move(kraus), tol);
  }
  if (j.contains("random")) {
    const Json& r = j.at("random");
    Rng rng(parse_seed(require(r, "seed")));
    const std::size_t num = r.contains("num_kraus") ? r.at("num_kraus").get<std::size_t>() : dims.a * dims.b;
    return random_channel(dims.a, dims.b, num, rng);
  }
  if (j.contains("standard")) {
    const Json& s = j.at("standard");
    const std::string name = s.is_string() ? s.get<std::string>() : require(s, "name").get<std::string>();
    if (name == "identity") {
      if (dims.a != dims.b) throw InputError("identity channel needs equal dimensions");
      return standard_channel(standard::Identity{dims.a}, tol);
    }
    if (name == "unitary") {
      ComplexMatrix u = parse_matrix(require(s, "u"));
      if (dims.a != dims.b) throw InputError("unitary channel needs equal dimensions");
      require_shape(u, dims.a, dims.a, "unitary");
      return standard_channel(standard::Unitary{std::move(u)}, tol);
    }
    if (name == "depolarizing") {
      if (dims.a != dims.b) throw InputError("depolarizing channel needs equal dimensions");
      return standard_channel(standard::Depolarizing{dims.a, parse_real(require(s, "p"))}, tol);
    }
    if (name == "discard_and_prepare") {
      ComplexMatrix sigma = parse_matrix(require(s, "sigma"));
      require_shape(sigma, dims.b, dims.b, "sigma");
      return standard_channel(standard::DiscardAndPrepare{dims.a, std::move(sigma)}, tol);
    }
    throw InputError("unknown standard channel \"" + name + "\"");
  }
  throw InputError("channel needs one of \"kraus\", \"standard\" or \"random\"");
}

ComplexMatrix parse_operator(const Json& j, BipartiteDims dims) {
  if (j.is_object()) {
    const double t = parse_real(require(j, "counterexample_family"));
    if (dims != BipartiteDims{2, 2}) throw InputError("counterexample_family needs dims [2, 2]");
    return counterexample_family(t).matrix();
  }
  ComplexMatrix m = parse_matrix(j);
  require_shape(m, dims.total(), dims.total(), "operator");
  return m;
}

void flatten(const Json& j, const std::string& path, std::ostringstream& os) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) flatten(value, path.empty() ? key : path + "." + key, os);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", os);
  } else {
    std::string value = j.is_string() ? j.get<std::string>() : j.dump();
    if (value.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : value) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      value = quoted + "\"";
    }
    os << path << ',' << value << '\n';
  }
}

Json notes_json(const std::vector<std::string>& notes) { return Json(notes); }

}  // namespace

double evaluate_expression(const std::string& text) { return ExpressionParser(text).parse(); }

Complex parse_scalar(const Json& j) {
  if (j.is_array()) {
    if (j.size() != 2) throw InputError("complex scalar must be [re, im], got " + j.dump());
    return {parse_real(j[0]), parse_real(j[1])};
  }
  return parse_real(j);
}

ComplexMatrix parse_matrix(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw InputError("matrix must be a non-empty list of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  if (cols == 0) throw InputError("matrix rows must be non-empty");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw InputError("matrix rows have unequal lengths");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = parse_scalar(j[i][k]);
  }
  return m;
}

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) throw InputError("scenario must be a JSON object");
  static const char* kKnown[] = {"dims", "rho", "channel", "operator", "pvms", "observables", "seed", "tol",
                                 "description"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) { return key == k; }) ==
        std::end(kKnown)) {
      throw InputError("unknown scenario field \"" + key + "\"");
    }
  }

  Scenario s;
  const Json& dims = require(j, "dims");
  if (!dims.is_array() || dims.size() != 2 || !dims[0].is_number_unsigned() || !dims[1].is_number_unsigned()) {
    throw InputError("dims must be [dA, dB] with positive integers");
  }
  s.dims = {dims[0].get<std::size_t>(), dims[1].get<std::size_t>()};
  if (s.dims.a == 0 || s.dims.b == 0) throw InputError("dims must be positive");

  if (j.contains("seed")) s.seed = parse_seed(j.at("seed"));
  if (j.contains("tol")) {
    s.tol = parse_real(j.at("tol"));
    if (!(*s.tol > 0.0)) throw InputError("tol must be positive");
  }
  const double tol = s.tol.value_or(1e-8);

  if (j.contains("rho")) s.rho = parse_rho(j.at("rho"), s.dims.a);
  if (j.contains("channel")) s.channel = parse_channel(j.at("channel"), s.dims, tol);
  if (j.contains("operator")) s.op = parse_operator(j.at("operator"), s.dims);
  if (s.rho.has_value() != s.channel.has_value()) throw InputError("rho and channel must be given together");
  if (s.rho && s.op) throw InputError("give either rho + channel or operator, not both");

  if (j.contains("pvms")) {
    const Json& pvms = j.at("pvms");
    if (!pvms.is_object()) throw InputError("pvms must map names to lists of projectors");
    for (const auto& [name, list] : pvms.items()) {
      if (!list.is_array() || list.empty()) throw InputError("pvm \"" + name + "\" must be a non-empty list");
      std::vector<ComplexMatrix> projectors;
      for (const Json& p : list) projectors.push_back(parse_matrix(p));
      s.pvms.emplace(name, std::move(projectors));
    }
  }
  if (j.contains("observables")) {
    const Json& obs = j.at("observables");
    if (!obs.is_object()) throw InputError("observables must map names to matrices");
    for (const auto& [name, m] : obs.items()) s.observables.emplace(name, parse_matrix(m));
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("scenario " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("scenario schema error: ") + e.what());
  }
}

Json to_json(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json to_json(Complex z) { return Json::array({to_json(z.real()), to_json(z.imag())}); }

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(BipartiteDims dims) { return Json::array({dims.a, dims.b}); }

Json to_json(const VerificationReport& r) {
  Json metrics = Json::object();
  for (const auto& [name, value] : r.metrics) metrics[name] = to_json(value);
  Json out{{"check", r.check}, {"pass", r.pass}, {"metrics", metrics}, {"notes", notes_json(r.notes)}};
  out["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
  return out;
}

Json to_json(const ClassificationReport& r) {
  return Json{{"hermitian", r.hermitian},
              {"hermiticity_residual", to_json(r.hermiticity_residual)},
              {"psd", r.psd},
              {"min_eigenvalue", to_json(r.min_eigenvalue)},
              {"unit_trace", r.unit_trace},
              {"trace_residual", to_json(r.trace_residual)},
              {"density", r.density},
              {"local_density", r.local_density},
              {"marginal_a_min_eigenvalue", to_json(r.marginal_a_min_eigenvalue)},
              {"marginal_b_min_eigenvalue", to_json(r.marginal_b_min_eigenvalue)},
              {"canonical_mh_form", r.canonical_mh_form},
              {"canonical_test_min_eigenvalue", to_json(r.canonical_test_min_eigenvalue)},
              {"basis_used", r.basis_used},
              {"notes", notes_json(r.notes)}};
}

Json to_json(const CanonicalFormTest& t) {
  Json spectrum = Json::array();
  for (double p : t.marginal_spectrum) spectrum.push_back(to_json(p));
  Json out{{"verdict", t.verdict},
           {"min_eigenvalue", to_json(t.min_eigenvalue)},
           {"basis", to_json(t.basis)},
           {"marginal_spectrum", spectrum},
           {"basis_ambiguous", t.basis_ambiguous},
           {"singular_marginal", t.singular_marginal},
           {"notes", notes_json(t.notes)}};
  if (t.channel) {
    Json kraus = Json::array();
    for (const ComplexMatrix& k : t.channel->kraus()) kraus.push_back(to_json(k));
    out["channel"] = Json{{"kraus", kraus}};
  } else {
    out["channel"] = nullptr;
  }
  return out;
}

Json to_json(const AxiomReport& r) {
  Json positivity = Json::array();
  for (const PositivityWitness& w : r.positivity_witnesses) {
    positivity.push_back(Json{{"projector", w.projector}, {"value", to_json(w.value)}});
  }
  Json additivity = Json::array();
  for (const AdditivityRecord& a : r.additivity) {
    additivity.push_back(Json{{"pvm", a.pvm}, {"max_residual", to_json(a.max_residual)}});
  }
  return Json{{"consistent", r.consistent},
              {"violated", Json(r.violated)},
              {"normalization_residual", to_json(r.normalization_residual)},
              {"max_additivity_residual", to_json(r.max_additivity_residual)},
              {"positivity_witnesses", positivity},
              {"additivity", additivity},
              {"mode", to_string(r.mode)},
              {"seed", r.seed},
              {"trials", r.trials},
              {"tol", to_json(r.tol)},
              {"notes", notes_json(r.notes)}};
}

Json to_json(const Reconstruction& r) {
  return Json{{"operator", to_json(r.matrix)},
              {"dims", to_json(r.dims)},
              {"residual", to_json(r.residual())},
              {"frame_residual", to_json(r.frame_residual)},
              {"validation_residual", to_json(r.validation_residual)},
              {"condition_estimate", to_json(r.condition_estimate)},
              {"rank", r.rank},
              {"violations", Json(r.violations)}};
}

Json to_json(const JointTable& t) {
  const auto cond = [](const std::vector<std::vector<std::optional<Complex>>>& c) {
    Json rows = Json::array();
    for (const auto& row : c) {
      Json r = Json::array();
      for (const auto& z : row) r.push_back(z ? to_json(*z) : Json(nullptr));
      rows.push_back(std::move(r));
    }
    return rows;
  };
  Json ma = Json::array();
  for (double p : t.marginal_a) ma.push_back(to_json(p));
  Json mb = Json::array();
  for (double p : t.marginal_b) mb.push_back(to_json(p));
  return Json{{"joint", to_json(t.joint)},
              {"reflected_joint", to_json(t.reflected_joint)},
              {"marginal_a", ma},
              {"marginal_b", mb},
              {"conditional", cond(t.conditional)},
              {"reflected_conditional", cond(t.reflected_conditional)},
              {"bayes_residual", to_json(t.bayes_residual)},
              {"skipped_entries", t.skipped_entries},
              {"marginal_residual", to_json(t.marginal_residual)}};
}

std::string to_csv(const Json& j) {
  std::ostringstream os;
  os << "path,value\n";
  flatten(j, "", os);
  return os.str();
}

}  // namespace locrho::io
