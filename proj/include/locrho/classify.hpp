#pragma once

#include <optional>
#include <string>
#include <vector>

#include "locrho/channels.hpp"
#include "locrho/distributions.hpp"

namespace locrho {

/// Outcome of the canonical-form (Song-Parzygnat) test.
///
/// In the eigenbasis {|i>} of rho_A with eigenvalues p_i, an operator of the
/// form (1/2){rho_A (x) I, J[E]} has blocks (p_i + p_j)/2 E(|j><i|). The test
/// divides each block by (p_i + p_j)/2, partially transposes the A factor in
/// that basis and checks that the resulting Choi matrix is PSD. Blocks with
/// p_i + p_j = 0 must vanish; there the Choi matrix is completed minimally
/// (Schur complement plus the trace budget each input still has).
struct CanonicalFormTest {
  bool verdict = false;
  /// Minimum eigenvalue of the (completed) Choi matrix; NaN when the test
  /// could not be evaluated (non-Hermitian input).
  double min_eigenvalue = 0.0;
  ComplexMatrix basis;
  std::vector<double> marginal_spectrum;
  /// Two eigenvalues of rho_A closer than 1e-9. The verdict does not depend
  /// on the choice of basis inside an eigenspace, but the basis does.
  bool basis_ambiguous = false;
  /// rho_A has eigenvalues <= tol.
  bool singular_marginal = false;
  /// A channel E with rho = (1/2){rho_A (x) I, J[E]}, when the verdict is true.
  std::optional<KrausChannel> channel;
  std::vector<std::string> notes;
};

/// `basis` overrides the eigenbasis of rho_A; it must be unitary and
/// diagonalize rho_A (DomainError otherwise).
CanonicalFormTest song_parzygnat_test(const LocalDensityOperator& rho, double tol = kDefaultTol,
                                      const std::optional<ComplexMatrix>& basis = std::nullopt);

struct ClassificationReport {
  bool hermitian = false;
  double hermiticity_residual = 0.0;
  bool psd = false;
  /// NaN for non-Hermitian input.
  double min_eigenvalue = 0.0;
  bool unit_trace = false;
  double trace_residual = 0.0;
  bool density = false;
  bool local_density = false;
  double marginal_a_min_eigenvalue = 0.0;
  double marginal_b_min_eigenvalue = 0.0;
  bool canonical_mh_form = false;
  double canonical_test_min_eigenvalue = 0.0;
  std::string basis_used;
  std::vector<std::string> notes;
};

ClassificationReport classify(const ComplexMatrix& m, BipartiteDims dims, double tol = kDefaultTol,
                              const std::optional<ComplexMatrix>& basis = std::nullopt);

/// ((1-t)/12) [[-6,r,r,0],[r,8,0,r],[r,0,8,r],[0,r,r,2]] + (t/4) I_4 with
/// r = sqrt(5): Hermitian, unit trace, identical marginals, and not positive
/// for small t. Throws DomainError for t outside [0, 1].
LocalDensityOperator counterexample_family(double t);

/// Closed-form marginal of counterexample_family(t) (both factors):
/// ((1-t)/6) [[1,r],[r,5]] + (t/2) I_2.
ComplexMatrix counterexample_marginal(double t);

}  // namespace locrho
