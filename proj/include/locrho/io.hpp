#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "locrho/bayes.hpp"
#include "locrho/channels.hpp"
#include "locrho/classify.hpp"
#include "locrho/gleason.hpp"
#include "locrho/matrix.hpp"
#include "locrho/tensor.hpp"

namespace locrho::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Parsed scenario file. Matrices are already checked against dims.
struct Scenario {
  BipartiteDims dims;
  std::optional<ComplexMatrix> rho;
  std::optional<KrausChannel> channel;
  std::optional<ComplexMatrix> op;
  std::map<std::string, std::vector<ComplexMatrix>> pvms;
  std::map<std::string, ComplexMatrix> observables;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

/// Evaluates "sqrt(5)/6", "-(1+2)*pi" and the like. Throws InputError.
double evaluate_expression(const std::string& text);

/// A number, an expression string, or [re, im] with either part in those forms.
Complex parse_scalar(const Json& j);
ComplexMatrix parse_matrix(const Json& j);

/// Throws InputError on schema problems and DomainError when an object is
/// well-formed but mathematically invalid (for example a non-CPTP channel).
Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::filesystem::path& path);

Json to_json(Complex z);
/// NaN and infinities become null.
Json to_json(double x);
Json to_json(const ComplexMatrix& m);
Json to_json(BipartiteDims dims);
Json to_json(const VerificationReport& r);
Json to_json(const ClassificationReport& r);
Json to_json(const CanonicalFormTest& t);
Json to_json(const AxiomReport& r);
Json to_json(const Reconstruction& r);
Json to_json(const JointTable& t);

/// One "path,value" line per scalar leaf, in document order.
std::string to_csv(const Json& j);

}  // namespace locrho::io
