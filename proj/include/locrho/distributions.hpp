#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locrho/channels.hpp"
#include "locrho/matrix.hpp"
#include "locrho/tensor.hpp"

namespace locrho {

class Rng;

/// Unit-trace bipartite operator whose two marginals are density operators.
/// Not necessarily Hermitian, let alone positive.
class LocalDensityOperator {
 public:
  /// Throws DomainError if the invariants fail within tol.
  static LocalDensityOperator make(ComplexMatrix matrix, BipartiteDims dims, double tol = kDefaultTol);

  const ComplexMatrix& matrix() const { return matrix_; }
  BipartiteDims dims() const { return dims_; }
  ComplexMatrix marginal_a() const { return partial_trace(matrix_, dims_, Factor::B); }
  ComplexMatrix marginal_b() const { return partial_trace(matrix_, dims_, Factor::A); }

  /// Tr[rho (P (x) Q)].
  Complex expectation(const ComplexMatrix& p, const ComplexMatrix& q) const;

 private:
  LocalDensityOperator(ComplexMatrix matrix, BipartiteDims dims) : matrix_(std::move(matrix)), dims_(dims) {}

  ComplexMatrix matrix_;
  BipartiteDims dims_;
};

/// Reasons an operator fails to be a local-density operator; empty when it is one.
std::vector<std::string> local_density_violations(const ComplexMatrix& m, BipartiteDims dims, double tol);

enum class MeasureFamily {
  kFromOperator,
  kKirkwoodDirac,     // Tr[E(rho P) Q]
  kLeiferSpekkens,    // Tr[E(sqrt(rho) P sqrt(rho)) Q]
  kMargenauHill,      // (1/2) Tr[E({rho, P}) Q]
  kLudersVonNeumann,  // Tr[E(P rho P) Q]; not locally additive in general
};

std::string to_string(MeasureFamily family);
/// Accepts "kd", "ls", "mh", "lvn" and "operator".
MeasureFamily parse_family(const std::string& name);

/// How mu(P (x) Q) is evaluated: from an operator, or from a named
/// (state, channel) formula.
class DiracMeasureSpec {
 public:
  static DiracMeasureSpec from_operator(LocalDensityOperator op);
  /// `family` must not be kFromOperator. Throws DomainError if rho is not a
  /// density operator or the channel is not a validated CPTP map.
  static DiracMeasureSpec from_state_channel(MeasureFamily family, ComplexMatrix rho, KrausChannel channel,
                                             double tol = kDefaultTol);

  MeasureFamily family() const { return family_; }
  BipartiteDims dims() const { return dims_; }
  /// False only for the sequential-measurement (LvN) family.
  bool guaranteed_dirac() const { return family_ != MeasureFamily::kLudersVonNeumann; }

  const std::optional<LocalDensityOperator>& op() const { return op_; }
  const std::optional<ComplexMatrix>& rho() const { return rho_; }
  const std::optional<KrausChannel>& channel() const { return channel_; }
  /// sqrt(rho), cached for the Leifer-Spekkens formulas.
  const std::optional<ComplexMatrix>& sqrt_rho() const { return sqrt_rho_; }

 private:
  DiracMeasureSpec() = default;

  MeasureFamily family_ = MeasureFamily::kFromOperator;
  BipartiteDims dims_;
  std::optional<LocalDensityOperator> op_;
  std::optional<ComplexMatrix> rho_;
  std::optional<KrausChannel> channel_;
  std::optional<ComplexMatrix> sqrt_rho_;
};

/// Evaluates the family's formula directly (never through the operator).
/// Throws InputError if P or Q is not a projector and DimensionError on a size mismatch.
Complex measure_eval(const DiracMeasureSpec& spec, const ComplexMatrix& p, const ComplexMatrix& q,
                     double tol = kDefaultTol);

/// Formula evaluation without the projector checks; accepts any operators.
Complex measure_eval_unchecked(const DiracMeasureSpec& spec, const ComplexMatrix& p, const ComplexMatrix& q);

/// Closed-form operator of the family. LvN is admissible only for maximally
/// mixed rho (J[E]/d) or discard-and-prepare E (rho (x) sigma); elsewhere no
/// local-density operator reproduces it and DomainError is raised.
LocalDensityOperator local_density_operator(const DiracMeasureSpec& spec, double tol = kDefaultTol);

/// True when local_density_operator(spec) succeeds.
bool admits_operator(const DiracMeasureSpec& spec, double tol = kDefaultTol);

struct SpectralTerm {
  double value;
  ComplexMatrix projector;
};

/// Hermitian matrix with its eigenspace decomposition. Eigenvalues closer
/// than grouping_tol * max(1, |lambda_max|) share one projector.
class Observable {
 public:
  static Observable make(ComplexMatrix matrix, double grouping_tol = 1e-9, double herm_tol = kDefaultTol);

  const ComplexMatrix& matrix() const { return matrix_; }
  const std::vector<SpectralTerm>& spectrum() const { return spectrum_; }

 private:
  Observable(ComplexMatrix matrix, std::vector<SpectralTerm> spectrum)
      : matrix_(std::move(matrix)), spectrum_(std::move(spectrum)) {}

  ComplexMatrix matrix_;
  std::vector<SpectralTerm> spectrum_;
};

/// Splits every projector of rank > 1 into rank-1 projectors onto a random
/// orthonormal basis of its range, keeping the eigenvalue.
std::vector<SpectralTerm> refine_spectrum(std::span<const SpectralTerm> terms, Rng& rng);

enum class CorrelationMode { kSpectral, kTrace };

/// sum_ij lambda_i nu_j mu(P_i (x) Q_j) over explicit spectral decompositions.
Complex correlation_spectral(const DiracMeasureSpec& spec, std::span<const SpectralTerm> terms_a,
                             std::span<const SpectralTerm> terms_b, double tol = kDefaultTol);

/// kSpectral: sum over the observables' eigenspace projectors. kTrace:
/// Tr[rho (O_A (x) O_B)] on the spec's local-density operator (propagates
/// local_density_operator errors).
Complex correlation(const DiracMeasureSpec& spec, const Observable& oa, const Observable& ob, CorrelationMode mode,
                    double tol = kDefaultTol);

struct EnsembleBranch {
  double probability;
  /// P rho P / p; absent when p <= 1e-12.
  std::optional<ComplexMatrix> state;
};

/// p_i = Tr[rho P_i], rho_i = P_i rho P_i / p_i. Throws InputError on a non-PVM.
std::vector<EnsembleBranch> ensemble_decomposition(const ComplexMatrix& rho, std::span<const ComplexMatrix> pvm,
                                                   double tol = kDefaultTol);

}  // namespace locrho
