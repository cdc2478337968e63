#include "locrho/gleason.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "locrho/linalg.hpp"
#include "locrho/random.hpp"

namespace locrho {

namespace {

ComplexMatrix projector_onto(const std::vector<Complex>& v) { return ComplexMatrix::outer(v, v); }

// Rank-1 projectors onto the discrete Fourier basis.
std::vector<ComplexMatrix> fourier_pvm(std::size_t d) {
  std::vector<ComplexMatrix> out;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<Complex> v(d);
    for (std::size_t j = 0; j < d; ++j) {
      v[j] = std::polar(norm, 2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(d));
    }
    out.push_back(projector_onto(v));
  }
  return out;
}

std::vector<ComplexMatrix> computational_pvm(std::size_t d) {
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(ComplexMatrix::ket_bra(d, i, i));
  return out;
}

std::string blocks_label(const std::vector<std::size_t>& blocks) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < blocks.size(); ++k) os << (k ? "," : "") << blocks[k];
  os << ")";
  return os.str();
}

// Largest additivity defect of `pvm` (on `side`) against each partner on the
// other side, over every prefix coarse-graining P_0 + ... + P_k, k >= 1.
double additivity_defect(const MeasureOracle& oracle, Factor side, std::span<const ComplexMatrix> pvm,
                         std::span<const ComplexMatrix> partners) {
  const auto eval = [&](const ComplexMatrix& local, const ComplexMatrix& partner) {
    return side == Factor::A ? oracle.eval(local, partner) : oracle.eval(partner, local);
  };
  double worst = 0.0;
  for (const ComplexMatrix& partner : partners) {
    ComplexMatrix coarse = pvm.front();
    Complex summed = eval(pvm.front(), partner);
    for (std::size_t k = 1; k < pvm.size(); ++k) {
      coarse += pvm[k];
      summed += eval(pvm[k], partner);
      worst = std::max(worst, std::abs(eval(coarse, partner) - summed));
    }
  }
  return worst;
}

}  // namespace

MeasureOracle oracle_from_operator(const LocalDensityOperator& op) {
  return {op.dims(), [op](const ComplexMatrix& p, const ComplexMatrix& q) { return op.expectation(p, q); }, true,
          "operator"};
}

MeasureOracle oracle_from_spec(const DiracMeasureSpec& spec) {
  return {spec.dims(),
          [spec](const ComplexMatrix& p, const ComplexMatrix& q) { return measure_eval_unchecked(spec, p, q); },
          spec.guaranteed_dirac(), to_string(spec.family())};
}

std::vector<ComplexMatrix> ic_projectors(std::size_t d) {
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(ComplexMatrix::ket_bra(d, i, i));
  const double h = std::numbers::sqrt2 / 2.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      std::vector<Complex> v(d);
      v[i] = h;
      v[j] = h;
      out.push_back(projector_onto(v));
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      std::vector<Complex> v(d);
      v[i] = h;
      v[j] = Complex(0.0, h);
      out.push_back(projector_onto(v));
    }
  }
  return out;
}

ComplexMatrix design_matrix(BipartiteDims dims) {
  const auto frame_a = ic_projectors(dims.a);
  const auto frame_b = ic_projectors(dims.b);
  const std::size_t n = dims.total();
  ComplexMatrix design(frame_a.size() * frame_b.size(), n * n);
  std::size_t row = 0;
  for (const auto& p : frame_a) {
    for (const auto& q : frame_b) {
      const ComplexMatrix h = tensor(p, q);
      // Tr[rho H] = sum_kl rho_kl H_lk.
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) design(row, k * n + l) = h(l, k);
      }
      ++row;
    }
  }
  return design;
}

Reconstruction reconstruct_operator(const MeasureOracle& oracle, const ReconstructOptions& options) {
  const BipartiteDims dims = oracle.dims;
  const std::size_t n = dims.total();
  const auto frame_a = ic_projectors(dims.a);
  const auto frame_b = ic_projectors(dims.b);

  std::vector<Complex> values;
  values.reserve(frame_a.size() * frame_b.size());
  for (const auto& p : frame_a) {
    for (const auto& q : frame_b) values.push_back(oracle.eval(p, q));
  }

  const ComplexMatrix design = design_matrix(dims);
  const LeastSquaresSolution solution = solve_least_squares(design, values);
  Reconstruction out{ComplexMatrix(n, n, solution.x), dims};
  out.rank = solution.rank;
  out.condition_estimate = solution.condition_estimate;

  const std::vector<Complex> fitted = design * std::span<const Complex>(solution.x);
  for (std::size_t r = 0; r < values.size(); ++r) {
    out.frame_residual = std::max(out.frame_residual, std::abs(fitted[r] - values[r]));
  }

  Rng rng(options.validation_seed);
  for (std::size_t k = 0; k < options.validation_pairs; ++k) {
    const ComplexMatrix p = k == 0 ? ComplexMatrix::identity(dims.a) : random_projector_any_rank(dims.a, rng);
    const ComplexMatrix q = k == 0 ? ComplexMatrix::identity(dims.b) : random_projector_any_rank(dims.b, rng);
    const Complex predicted = trace_of_product(out.matrix, tensor(p, q));
    out.validation_residual = std::max(out.validation_residual, std::abs(predicted - oracle.eval(p, q)));
  }

  if (out.rank < n * n) out.violations.push_back("design matrix is rank deficient");
  for (auto& v : local_density_violations(out.matrix, dims, options.tol)) out.violations.push_back(std::move(v));
  return out;
}

LocalDensityOperator reconstruct(const MeasureOracle& oracle, const ReconstructOptions& options) {
  Reconstruction result = reconstruct_operator(oracle, options);
  if (result.residual() > options.tol) {
    std::ostringstream os;
    os << "reconstruct: oracle is not induced by any operator (residual " << result.residual() << ")";
    throw ReconstructionError(os.str(), std::move(result));
  }
  if (!result.violations.empty()) {
    std::string what = "reconstruct: " + result.violations.front();
    throw ReconstructionError(what, std::move(result));
  }
  return LocalDensityOperator::make(result.matrix, result.dims, options.tol);
}

std::vector<ComplexMatrix> random_pvm(std::size_t d, const std::vector<std::size_t>& blocks, std::uint64_t seed) {
  Rng rng(seed);
  return pvm_from_unitary(random_unitary(d, rng), blocks);
}

std::string to_string(AxiomMode mode) { return mode == AxiomMode::kSampled ? "sampled" : "certified"; }

AxiomReport verify_axioms(const MeasureOracle& oracle, const AxiomOptions& options) {
  const BipartiteDims dims = oracle.dims;
  const double tol = options.tol;
  AxiomReport report;
  report.seed = options.seed;
  report.trials = options.trials;
  report.tol = tol;

  const ComplexMatrix ia = ComplexMatrix::identity(dims.a);
  const ComplexMatrix ib = ComplexMatrix::identity(dims.b);
  report.normalization_residual = std::abs(oracle.eval(ia, ib) - 1.0);

  const auto check_positive = [&](const ComplexMatrix& p, const ComplexMatrix& q, std::string label) {
    const Complex value = oracle.eval(p, q);
    if (value.real() < -tol || std::abs(value.imag()) > tol) {
      report.positivity_witnesses.push_back({std::move(label), value});
    }
  };
  const auto record_additivity = [&](Factor side, std::span<const ComplexMatrix> pvm,
                                     std::span<const ComplexMatrix> partners, std::string label) {
    const double defect = additivity_defect(oracle, side, pvm, partners);
    report.max_additivity_residual = std::max(report.max_additivity_residual, defect);
    report.additivity.push_back({std::move(label), defect});
  };

  // Fixed probes: the frame projectors, and the computational and Fourier
  // PVMs against identity plus computational-basis partners.
  const auto frame_a = ic_projectors(dims.a);
  const auto frame_b = ic_projectors(dims.b);
  for (std::size_t k = 0; k < frame_a.size(); ++k) check_positive(frame_a[k], ib, "A: frame projector " + std::to_string(k));
  for (std::size_t k = 0; k < frame_b.size(); ++k) check_positive(ia, frame_b[k], "B: frame projector " + std::to_string(k));

  for (Factor side : {Factor::A, Factor::B}) {
    const std::size_t d = side == Factor::A ? dims.a : dims.b;
    const std::size_t other = side == Factor::A ? dims.b : dims.a;
    if (d < 2) continue;
    std::vector<ComplexMatrix> partners = computational_pvm(other);
    partners.push_back(ComplexMatrix::identity(other));
    const std::string tag = to_string(side) + ": ";
    record_additivity(side, computational_pvm(d), partners, tag + "computational basis");
    record_additivity(side, fourier_pvm(d), partners, tag + "fourier basis");
  }

  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    Rng rng(derive_seed(options.seed, trial));
    check_positive(random_projector(dims.a, rng.uniform_index(1, dims.a), rng), ib,
                   "A: random projector, trial " + std::to_string(trial));
    check_positive(ia, random_projector(dims.b, rng.uniform_index(1, dims.b), rng),
                   "B: random projector, trial " + std::to_string(trial));
    for (Factor side : {Factor::A, Factor::B}) {
      const std::size_t d = side == Factor::A ? dims.a : dims.b;
      const std::size_t other = side == Factor::A ? dims.b : dims.a;
      if (d < 2) continue;
      const auto blocks = random_composition(d, 2, rng);
      const auto pvm = pvm_from_unitary(random_unitary(d, rng), blocks);
      std::vector<ComplexMatrix> partners;
      for (int k = 0; k < 3; ++k) partners.push_back(random_projector_any_rank(other, rng));
      record_additivity(side, pvm, partners,
                        to_string(side) + ": random blocks " + blocks_label(blocks) + ", trial " + std::to_string(trial));
    }
  }

  if (report.normalization_residual > tol) report.violated.push_back("normalization");
  if (!report.positivity_witnesses.empty()) report.violated.push_back("local positivity");
  if (report.max_additivity_residual > tol) report.violated.push_back("local additivity");

  if (oracle.linear && options.certify_linear) {
    const Reconstruction rec = reconstruct_operator(oracle, {tol, derive_seed(options.seed, options.trials)});
    if (rec.residual() <= tol && rec.violations.empty()) {
      report.mode = AxiomMode::kCertifiedLinear;
      report.notes.push_back("linear oracle: frame reconstruction yields a local-density operator, so every axiom "
                             "holds on all projectors");
    } else {
      const auto flag = [&](const std::string& axiom) {
        if (std::find(report.violated.begin(), report.violated.end(), axiom) == report.violated.end()) {
          report.violated.push_back(axiom);
        }
      };
      for (const auto& v : rec.violations) {
        report.notes.push_back("frame certificate failed: " + v);
        if (v.find("trace") != std::string::npos) flag("normalization");
        if (v.find("marginal") != std::string::npos) flag("local positivity");
      }
      if (rec.residual() > tol) {
        report.notes.push_back("frame certificate failed: oracle is not linear");
        flag("local additivity");
      }
    }
  }
  if (dims.a == 2 || dims.b == 2) {
    report.notes.push_back("a factor has dimension 2: axiom consistency alone does not imply that an operator "
                           "represents the measure");
  }
  report.consistent = report.violated.empty();
  return report;
}

LvnSearchReport lvn_additivity_search(BipartiteDims dims, std::size_t samples, std::uint64_t seed,
                                      std::size_t trials_per_sample, double tol, double mix) {
  LvnSearchReport report;
  report.dims = dims;
  report.seed = seed;
  report.tol = tol;
  report.min_residual = std::numeric_limits<double>::infinity();
  const ComplexMatrix mixed = ComplexMatrix::identity(dims.a) * Complex(1.0 / static_cast<double>(dims.a));
  for (std::size_t k = 0; k < samples; ++k) {
    LvnSearchSample sample;
    sample.seed = derive_seed(seed, k);
    Rng rng(sample.seed);
    const ComplexMatrix rho = random_density(dims.a, rng) * Complex(1.0 - mix) + mixed * Complex(mix);
    const KrausChannel channel = random_channel(dims.a, dims.b, rng.uniform_index(1, dims.a * dims.b), rng);
    const auto spec = DiracMeasureSpec::from_state_channel(MeasureFamily::kLudersVonNeumann, rho, channel, tol);

    AxiomOptions options;
    options.trials = trials_per_sample;
    options.seed = sample.seed;
    options.tol = tol;
    options.certify_linear = false;
    const AxiomReport axioms = verify_axioms(oracle_from_spec(spec), options);
    sample.max_additivity_residual = axioms.max_additivity_residual;
    sample.additive = axioms.max_additivity_residual <= tol;
    sample.admissible = admits_operator(spec, tol);

    report.min_residual = std::min(report.min_residual, sample.max_additivity_residual);
    if (sample.additive) {
      ++report.additive_count;
      if (!sample.admissible) report.unexplained_additive.push_back(sample.seed);
    }
    report.samples.push_back(sample);
  }
  return report;
}

}  // namespace locrho
