#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "locrho/distributions.hpp"
#include "locrho/error.hpp"
#include "locrho/matrix.hpp"
#include "locrho/tensor.hpp"

namespace locrho {

/// A candidate measure mu(P (x) Q). Nothing is assumed about it: checking the
/// Dirac axioms is verify_axioms' job.
struct MeasureOracle {
  BipartiteDims dims;
  std::function<Complex(const ComplexMatrix&, const ComplexMatrix&)> eval;
  /// Set when the oracle is known to be linear in P and Q (for example
  /// operator-induced); enables certified additivity.
  bool linear = false;
  std::string description;
};

MeasureOracle oracle_from_operator(const LocalDensityOperator& op);
/// Evaluates the family formulas; flagged linear unless the family is LvN.
MeasureOracle oracle_from_spec(const DiracMeasureSpec& spec);

/// d^2 rank-1 projectors onto e_i, (e_i + e_j)/sqrt2 and (e_i + i e_j)/sqrt2
/// (i < j), whose real span is the space of d x d Hermitian matrices.
std::vector<ComplexMatrix> ic_projectors(std::size_t d);

/// Rows indexed by projector pairs (a, b) of ic_projectors(dA) x
/// ic_projectors(dB), columns by operator entries (k, l) row-major:
/// row . vec(rho) = Tr[rho (P_a (x) Q_b)].
ComplexMatrix design_matrix(BipartiteDims dims);

struct Reconstruction {
  ComplexMatrix matrix;
  BipartiteDims dims;
  /// Max |Tr[rho (P (x) Q)] - mu(P (x) Q)| over the frame pairs.
  double frame_residual = 0.0;
  /// Same, over seeded held-out projector pairs of varied rank. A linear
  /// oracle reproduces these; anything nonlinear shows up here.
  double validation_residual = 0.0;
  double condition_estimate = 0.0;
  std::size_t rank = 0;
  /// Local-density invariants the result breaks (trace, marginal positivity).
  std::vector<std::string> violations{};

  double residual() const { return std::max(frame_residual, validation_residual); }
};

struct ReconstructOptions {
  double tol = 1e-8;
  std::uint64_t validation_seed = 0x5eed;
  std::size_t validation_pairs = 32;
};

/// Solves the frame system for rho. Never throws on inconsistent oracles;
/// inspect the residuals and violations.
Reconstruction reconstruct_operator(const MeasureOracle& oracle, const ReconstructOptions& options = {});

/// Raised by reconstruct() when the oracle is not representable.
class ReconstructionError : public DomainError {
 public:
  ReconstructionError(const std::string& what, Reconstruction result)
      : DomainError(what), result_(std::move(result)) {}
  const Reconstruction& result() const { return result_; }

 private:
  Reconstruction result_;
};

/// Strict form: throws ReconstructionError if the residual exceeds tol or the
/// result is not a local-density operator.
LocalDensityOperator reconstruct(const MeasureOracle& oracle, const ReconstructOptions& options = {});

struct PositivityWitness {
  std::string projector;
  Complex value;
};

struct AdditivityRecord {
  std::string pvm;
  double max_residual = 0.0;
};

enum class AxiomMode { kSampled, kCertifiedLinear };

struct AxiomOptions {
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  /// Adds a frame-based certificate when the oracle is flagged linear.
  bool certify_linear = true;
};

struct AxiomReport {
  double normalization_residual = 0.0;
  std::vector<PositivityWitness> positivity_witnesses;
  std::vector<AdditivityRecord> additivity;
  double max_additivity_residual = 0.0;
  bool consistent = false;
  /// "normalization", "local positivity" or "local additivity"; empty when consistent.
  std::vector<std::string> violated;
  AxiomMode mode = AxiomMode::kSampled;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  double tol = 0.0;
  std::vector<std::string> notes;
};

std::string to_string(AxiomMode mode);

/// Checks normalization, local positivity on `trials` random projectors per
/// side and both local-additivity equalities on fixed probe PVMs plus
/// `trials` random PVMs per side (three random partners each). Trial k draws
/// from derive_seed(seed, k), so the report depends only on the options.
AxiomReport verify_axioms(const MeasureOracle& oracle, const AxiomOptions& options = {});

/// Randomized search for (rho, E) pairs whose sequential-measurement (LvN)
/// measure is locally additive although rho is not maximally mixed and E is
/// not discard-and-prepare. Sample k uses derive_seed(seed, k). Nothing is
/// asserted: the harness only reports what it finds.
struct LvnSearchSample {
  std::uint64_t seed = 0;
  double max_additivity_residual = 0.0;
  bool additive = false;
  bool admissible = false;  // maximally mixed rho or discard-and-prepare E
};

struct LvnSearchReport {
  BipartiteDims dims;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::vector<LvnSearchSample> samples;
  std::size_t additive_count = 0;
  /// Seeds of additive samples outside the two admissible cases.
  std::vector<std::uint64_t> unexplained_additive;
  double min_residual = 0.0;
};

/// `mix` in [0, 1] pulls each sampled rho towards I/d, so the search can also
/// probe the neighbourhood of the maximally mixed case.
LvnSearchReport lvn_additivity_search(BipartiteDims dims, std::size_t samples, std::uint64_t seed,
                                      std::size_t trials_per_sample = 10, double tol = 1e-8, double mix = 0.0);

/// Haar unitary from `seed`, columns grouped by `blocks` (which must sum to d).
std::vector<ComplexMatrix> random_pvm(std::size_t d, const std::vector<std::size_t>& blocks, std::uint64_t seed);

}  // namespace locrho
