#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "locrho/distributions.hpp"
#include "locrho/report.hpp"

namespace locrho {

/// S rho S with S the swap; the result lives on H_B (x) H_A.
LocalDensityOperator reflect(const LocalDensityOperator& rho);

/// Samples `trials` random projector pairs and compares
/// Tr[rho (P (x) Q)] with Tr[S rho S (Q (x) P)]. Metric "max_residual".
VerificationReport reflection_identity_check(const LocalDensityOperator& rho, std::size_t trials, std::uint64_t seed,
                                             double tol = 1e-10);

/// Joint quasi-probabilities of a pair of PVMs, their marginals and both
/// families of conditionals. Conditionals whose denominator has modulus
/// <= 1e-10 are std::nullopt.
struct JointTable {
  ComplexMatrix joint;                 // P(i, j) = Tr[rho (P_i (x) Q_j)]
  ComplexMatrix reflected_joint;       // Pbar(j, i) = Tr[S rho S (Q_j (x) P_i)], indexed [j][i]
  std::vector<double> marginal_a;      // P(i) = Tr[rho_A P_i]
  std::vector<double> marginal_b;      // Pbar(j) = Tr[rho_B Q_j]
  std::vector<std::vector<std::optional<Complex>>> conditional;            // P(j|i), indexed [i][j]
  std::vector<std::vector<std::optional<Complex>>> reflected_conditional;  // Pbar(j|i) = Pbar(j,i)/Pbar(j), [i][j]
  /// Max |P(j|i) - Pbar(j) Pbar(j|i) / P(i)| over entries where both
  /// marginals exceed the guard.
  double bayes_residual = 0.0;
  std::size_t skipped_entries = 0;
  /// Max |sum_j P(i,j) - P(i)| and |sum_i P(i,j) - Pbar(j)|.
  double marginal_residual = 0.0;
};

/// Throws InputError unless both arguments are PVMs on the right factors.
JointTable joint_table(const LocalDensityOperator& rho, std::span<const ComplexMatrix> pvm_a,
                       std::span<const ComplexMatrix> pvm_b, double tol = kDefaultTol);

}  // namespace locrho
