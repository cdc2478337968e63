#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "locrho/bayes.hpp"
#include "locrho/classify.hpp"
#include "locrho/distributions.hpp"
#include "locrho/error.hpp"
#include "locrho/gleason.hpp"
#include "locrho/io.hpp"
#include "locrho/random.hpp"

namespace py = pybind11;
using namespace locrho;

namespace {

using Array = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ComplexMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw InputError("expected a 2-D array");
  const auto r = a.unchecked<2>();
  ComplexMatrix m(r.shape(0), r.shape(1));
  for (py::ssize_t i = 0; i < r.shape(0); ++i)
    for (py::ssize_t j = 0; j < r.shape(1); ++j) m(i, j) = r(i, j);
  return m;
}

Array to_array(const ComplexMatrix& m) {
  Array out({m.rows(), m.cols()});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
  return out;
}

std::vector<ComplexMatrix> to_matrices(const std::vector<Array>& list) {
  std::vector<ComplexMatrix> out;
  for (const auto& a : list) out.push_back(to_matrix(a));
  return out;
}

std::vector<Array> to_arrays(const std::vector<ComplexMatrix>& list) {
  std::vector<Array> out;
  for (const auto& m : list) out.push_back(to_array(m));
  return out;
}

BipartiteDims dims_of(const std::pair<std::size_t, std::size_t>& d) { return {d.first, d.second}; }

// Reports cross the boundary as the same JSON the CLI emits.
py::object to_python(const io::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

DiracMeasureSpec make_spec(const std::string& family, const Array& rho, const std::vector<Array>& kraus) {
  return DiracMeasureSpec::from_state_channel(parse_family(family), to_matrix(rho),
                                              KrausChannel::make(to_matrices(kraus)));
}

}  // namespace

PYBIND11_MODULE(_locrho, m) {
  m.doc() = "Local-density operators and Dirac measures on bipartite systems.";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<InputError>(m, "InputError", base);
  py::register_exception<DomainError>(m, "DomainError", base);

  m.attr("schema_version") = io::kSchemaVersion;

  m.def("random_density", [](std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    return to_array(random_density(d, rng));
  }, py::arg("d"), py::arg("seed") = 0);

  m.def("random_channel", [](std::size_t din, std::size_t dout, std::size_t num_kraus, std::uint64_t seed) {
    Rng rng(seed);
    return to_arrays(random_channel(din, dout, num_kraus, rng).kraus());
  }, py::arg("dim_in"), py::arg("dim_out"), py::arg("num_kraus"), py::arg("seed") = 0);

  m.def("local_density_operator", [](const std::string& family, const Array& rho, const std::vector<Array>& kraus) {
    return to_array(local_density_operator(make_spec(family, rho, kraus)).matrix());
  }, py::arg("family"), py::arg("rho"), py::arg("kraus"),
     "Closed-form operator of family kd, ls, mh or lvn for (rho, channel).");

  m.def("measure_eval", [](const std::string& family, const Array& rho, const std::vector<Array>& kraus,
                           const Array& p, const Array& q) {
    return measure_eval(make_spec(family, rho, kraus), to_matrix(p), to_matrix(q));
  }, py::arg("family"), py::arg("rho"), py::arg("kraus"), py::arg("p"), py::arg("q"));

  m.def("verify_measure", [](const std::string& family, const Array& rho, const std::vector<Array>& kraus,
                             std::size_t trials, std::uint64_t seed, double tol) {
    AxiomOptions options;
    options.trials = trials;
    options.seed = seed;
    options.tol = tol;
    return to_python(io::to_json(verify_axioms(oracle_from_spec(make_spec(family, rho, kraus)), options)));
  }, py::arg("family"), py::arg("rho"), py::arg("kraus"), py::arg("trials") = 50, py::arg("seed") = 0,
     py::arg("tol") = 1e-8);

  m.def("reconstruct", [](const Array& op, std::pair<std::size_t, std::size_t> dims) {
    const auto ldo = LocalDensityOperator::make(to_matrix(op), dims_of(dims));
    const Reconstruction r = reconstruct_operator(oracle_from_operator(ldo));
    py::dict out = to_python(io::to_json(r));
    out["operator"] = to_array(r.matrix);
    return out;
  }, py::arg("operator"), py::arg("dims"),
     "Reconstructs an operator from its measure values on the frame.");

  m.def("correlation", [](const std::string& family, const Array& rho, const std::vector<Array>& kraus,
                          const Array& oa, const Array& ob, const std::string& mode) {
    if (mode != "spectral" && mode != "trace") throw InputError("mode must be spectral or trace");
    return correlation(make_spec(family, rho, kraus), Observable::make(to_matrix(oa)), Observable::make(to_matrix(ob)),
                       mode == "spectral" ? CorrelationMode::kSpectral : CorrelationMode::kTrace);
  }, py::arg("family"), py::arg("rho"), py::arg("kraus"), py::arg("obs_a"), py::arg("obs_b"),
     py::arg("mode") = "spectral");

  m.def("reflect", [](const Array& op, std::pair<std::size_t, std::size_t> dims) {
    return to_array(reflect(LocalDensityOperator::make(to_matrix(op), dims_of(dims))).matrix());
  }, py::arg("operator"), py::arg("dims"));

  m.def("joint_table", [](const Array& op, std::pair<std::size_t, std::size_t> dims, const std::vector<Array>& pvm_a,
                          const std::vector<Array>& pvm_b) {
    const auto ldo = LocalDensityOperator::make(to_matrix(op), dims_of(dims));
    return to_python(io::to_json(joint_table(ldo, to_matrices(pvm_a), to_matrices(pvm_b))));
  }, py::arg("operator"), py::arg("dims"), py::arg("pvm_a"), py::arg("pvm_b"));

  m.def("classify", [](const Array& op, std::pair<std::size_t, std::size_t> dims, double tol) {
    return to_python(io::to_json(classify(to_matrix(op), dims_of(dims), tol)));
  }, py::arg("operator"), py::arg("dims"), py::arg("tol") = kDefaultTol);

  m.def("canonical_form_test", [](const Array& op, std::pair<std::size_t, std::size_t> dims, double tol) {
    const CanonicalFormTest t = song_parzygnat_test(LocalDensityOperator::make(to_matrix(op), dims_of(dims)), tol);
    py::dict out = to_python(io::to_json(t));
    out["kraus"] = t.channel ? py::cast(to_arrays(t.channel->kraus())) : py::none();
    return out;
  }, py::arg("operator"), py::arg("dims"), py::arg("tol") = kDefaultTol,
     "Tests whether the operator equals (1/2){rho_A (x) I, J[E]} for a CPTP E.");

  m.def("counterexample_family", [](double t) { return to_array(counterexample_family(t).matrix()); },
        py::arg("t"));
}
