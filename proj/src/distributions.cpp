#include "locrho/distributions.hpp"

#include <cmath>

#include "locrho/error.hpp"
#include "locrho/linalg.hpp"
#include "locrho/random.hpp"

namespace locrho {

std::vector<std::string> local_density_violations(const ComplexMatrix& m, BipartiteDims dims, double tol) {
  require_bipartite(m, dims, "local_density_violations");
  std::vector<std::string> out;
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > tol) out.push_back("trace is " + std::to_string(tr.real()) + (tr.imag() != 0.0 ? " + " + std::to_string(tr.imag()) + "i" : "") + ", not 1");
  const auto check_marginal = [&](const ComplexMatrix& marginal, const char* name) {
    if (!is_hermitian(marginal, tol)) {
      out.push_back(std::string("marginal ") + name + " is not Hermitian");
      return;
    }
    const double lo = min_eigenvalue(marginal, tol);
    if (lo < -tol) out.push_back(std::string("marginal ") + name + " has negative eigenvalue " + std::to_string(lo));
  };
  check_marginal(partial_trace(m, dims, Factor::B), "A");
  check_marginal(partial_trace(m, dims, Factor::A), "B");
  return out;
}

LocalDensityOperator LocalDensityOperator::make(ComplexMatrix matrix, BipartiteDims dims, double tol) {
  const auto violations = local_density_violations(matrix, dims, tol);
  if (!violations.empty()) throw DomainError("not a local-density operator: " + violations.front());
  return LocalDensityOperator(std::move(matrix), dims);
}

Complex LocalDensityOperator::expectation(const ComplexMatrix& p, const ComplexMatrix& q) const {
  return trace_of_product(matrix_, tensor(p, q));
}

std::string to_string(MeasureFamily family) {
  switch (family) {
    case MeasureFamily::kFromOperator: return "operator";
    case MeasureFamily::kKirkwoodDirac: return "kd";
    case MeasureFamily::kLeiferSpekkens: return "ls";
    case MeasureFamily::kMargenauHill: return "mh";
    case MeasureFamily::kLudersVonNeumann: return "lvn";
  }
  return "?";
}

MeasureFamily parse_family(const std::string& name) {
  if (name == "kd") return MeasureFamily::kKirkwoodDirac;
  if (name == "ls") return MeasureFamily::kLeiferSpekkens;
  if (name == "mh") return MeasureFamily::kMargenauHill;
  if (name == "lvn") return MeasureFamily::kLudersVonNeumann;
  if (name == "operator") return MeasureFamily::kFromOperator;
  throw InputError("unknown measure family '" + name + "' (expected kd, ls, mh, lvn or operator)");
}

DiracMeasureSpec DiracMeasureSpec::from_operator(LocalDensityOperator op) {
  DiracMeasureSpec spec;
  spec.family_ = MeasureFamily::kFromOperator;
  spec.dims_ = op.dims();
  spec.op_ = std::move(op);
  return spec;
}

DiracMeasureSpec DiracMeasureSpec::from_state_channel(MeasureFamily family, ComplexMatrix rho, KrausChannel channel,
                                                      double tol) {
  if (family == MeasureFamily::kFromOperator) {
    throw InputError("DiracMeasureSpec: the operator family takes a LocalDensityOperator");
  }
  if (!rho.is_square() || rho.rows() != channel.dim_in()) {
    throw DimensionError("DiracMeasureSpec: state side does not match the channel input dimension");
  }
  if (!is_density(rho, tol)) throw DomainError("DiracMeasureSpec: rho is not a density operator");
  if (!channel.checked() || !validate_cptp(channel, tol).pass) {
    throw DomainError("DiracMeasureSpec: channel is not a validated CPTP map");
  }
  DiracMeasureSpec spec;
  spec.family_ = family;
  spec.dims_ = {channel.dim_in(), channel.dim_out()};
  if (family == MeasureFamily::kLeiferSpekkens) spec.sqrt_rho_ = sqrt_psd(rho, tol);
  spec.rho_ = std::move(rho);
  spec.channel_ = std::move(channel);
  return spec;
}

Complex measure_eval_unchecked(const DiracMeasureSpec& spec, const ComplexMatrix& p, const ComplexMatrix& q) {
  if (spec.family() == MeasureFamily::kFromOperator) return spec.op()->expectation(p, q);
  const ComplexMatrix& rho = *spec.rho();
  const KrausChannel& channel = *spec.channel();
  switch (spec.family()) {
    case MeasureFamily::kKirkwoodDirac:
      return trace_of_product(apply(channel, rho * p), q);
    case MeasureFamily::kLeiferSpekkens: {
      const ComplexMatrix& root = *spec.sqrt_rho();
      return trace_of_product(apply(channel, root * p * root), q);
    }
    case MeasureFamily::kMargenauHill:
      return 0.5 * trace_of_product(apply(channel, anticommutator(rho, p)), q);
    case MeasureFamily::kLudersVonNeumann:
      return trace_of_product(apply(channel, p * rho * p), q);
    case MeasureFamily::kFromOperator:
      break;
  }
  throw InputError("measure_eval: unknown family");
}

Complex measure_eval(const DiracMeasureSpec& spec, const ComplexMatrix& p, const ComplexMatrix& q, double tol) {
  const BipartiteDims dims = spec.dims();
  if (!p.is_square() || p.rows() != dims.a || !q.is_square() || q.rows() != dims.b) {
    throw DimensionError("measure_eval: projector sizes do not match the factor dimensions");
  }
  if (!is_projector(p, tol)) throw InputError("measure_eval: P is not a projector");
  if (!is_projector(q, tol)) throw InputError("measure_eval: Q is not a projector");
  return measure_eval_unchecked(spec, p, q);
}

namespace {

bool is_maximally_mixed(const ComplexMatrix& rho, double tol) {
  const ComplexMatrix target = ComplexMatrix::identity(rho.rows()) * Complex(1.0 / static_cast<double>(rho.rows()));
  return max_abs_diff(rho, target) <= tol;
}

}  // namespace

LocalDensityOperator local_density_operator(const DiracMeasureSpec& spec, double tol) {
  if (spec.family() == MeasureFamily::kFromOperator) return *spec.op();
  const BipartiteDims dims = spec.dims();
  const ComplexMatrix& rho = *spec.rho();
  const KrausChannel& channel = *spec.channel();
  const ComplexMatrix ib = ComplexMatrix::identity(dims.b);
  ComplexMatrix out(dims.total(), dims.total());
  switch (spec.family()) {
    case MeasureFamily::kKirkwoodDirac:
      out = jamiolkowski(channel) * tensor(rho, ib);
      break;
    case MeasureFamily::kLeiferSpekkens: {
      const ComplexMatrix root = tensor(*spec.sqrt_rho(), ib);
      out = root * jamiolkowski(channel) * root;
      break;
    }
    case MeasureFamily::kMargenauHill:
      out = anticommutator(tensor(rho, ib), jamiolkowski(channel)) * Complex(0.5);
      break;
    case MeasureFamily::kLudersVonNeumann:
      if (is_maximally_mixed(rho, tol)) {
        out = jamiolkowski(channel) * Complex(1.0 / static_cast<double>(dims.a));
      } else if (is_discard_and_prepare(channel, tol)) {
        out = tensor(rho, apply(channel, rho));
      } else {
        throw DomainError(
            "lvn: no local-density operator exists for this (rho, E); the sequential-measurement "
            "probabilities are not locally additive unless rho is maximally mixed or E is "
            "discard-and-prepare");
      }
      break;
    case MeasureFamily::kFromOperator:
      break;
  }
  return LocalDensityOperator::make(std::move(out), dims, tol);
}

bool admits_operator(const DiracMeasureSpec& spec, double tol) {
  if (spec.family() != MeasureFamily::kLudersVonNeumann) return true;
  return is_maximally_mixed(*spec.rho(), tol) || is_discard_and_prepare(*spec.channel(), tol);
}

Observable Observable::make(ComplexMatrix matrix, double grouping_tol, double herm_tol) {
  const HermEigDecomposition eig = herm_eig(matrix, herm_tol);
  const std::size_t n = eig.eigenvalues.size();
  const double threshold = grouping_tol * std::max(1.0, std::abs(eig.eigenvalues.front()));
  std::vector<SpectralTerm> spectrum;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && eig.eigenvalues[end - 1] - eig.eigenvalues[end] <= threshold) ++end;
    ComplexMatrix proj(n, n);
    double sum = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      const auto v = eig.eigenvectors.column(k);
      proj += ComplexMatrix::outer(v, v);
      sum += eig.eigenvalues[k];
    }
    spectrum.push_back({sum / static_cast<double>(end - start), std::move(proj)});
    start = end;
  }
  return Observable(std::move(matrix), std::move(spectrum));
}

std::vector<SpectralTerm> refine_spectrum(std::span<const SpectralTerm> terms, Rng& rng) {
  std::vector<SpectralTerm> out;
  for (const SpectralTerm& term : terms) {
    const auto rank = static_cast<std::size_t>(std::lround(term.projector.trace().real()));
    if (rank <= 1) {
      out.push_back(term);
      continue;
    }
    const std::size_t d = term.projector.rows();
    const HermEigDecomposition eig = herm_eig(term.projector);
    const ComplexMatrix w = random_unitary(rank, rng);
    for (std::size_t k = 0; k < rank; ++k) {
      std::vector<Complex> v(d);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t l = 0; l < rank; ++l) v[i] += eig.eigenvectors(i, l) * w(l, k);
      }
      out.push_back({term.value, ComplexMatrix::outer(v, v)});
    }
  }
  return out;
}

Complex correlation_spectral(const DiracMeasureSpec& spec, std::span<const SpectralTerm> terms_a,
                             std::span<const SpectralTerm> terms_b, double tol) {
  Complex sum = 0.0;
  for (const SpectralTerm& ta : terms_a) {
    for (const SpectralTerm& tb : terms_b) {
      sum += ta.value * tb.value * measure_eval(spec, ta.projector, tb.projector, tol);
    }
  }
  return sum;
}

Complex correlation(const DiracMeasureSpec& spec, const Observable& oa, const Observable& ob, CorrelationMode mode,
                    double tol) {
  if (mode == CorrelationMode::kSpectral) return correlation_spectral(spec, oa.spectrum(), ob.spectrum(), tol);
  const LocalDensityOperator op = local_density_operator(spec, tol);
  return trace_of_product(op.matrix(), tensor(oa.matrix(), ob.matrix()));
}

std::vector<EnsembleBranch> ensemble_decomposition(const ComplexMatrix& rho, std::span<const ComplexMatrix> pvm,
                                                   double tol) {
  if (!is_pvm(pvm, tol) || pvm.front().rows() != rho.rows()) {
    throw InputError("ensemble_decomposition: projectors do not form a PVM on the state's space");
  }
  constexpr double kZeroBranch = 1e-12;
  std::vector<EnsembleBranch> out;
  for (const ComplexMatrix& p : pvm) {
    const ComplexMatrix sandwich = p * rho * p;
    const double prob = sandwich.trace().real();
    if (prob <= kZeroBranch) {
      out.push_back({prob, std::nullopt});
    } else {
      out.push_back({prob, sandwich * Complex(1.0 / prob)});
    }
  }
  return out;
}

}  // namespace locrho
