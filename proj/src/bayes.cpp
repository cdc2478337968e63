#include "locrho/bayes.hpp"

#include <algorithm>
#include <cmath>

#include "locrho/error.hpp"
#include "locrho/random.hpp"

namespace locrho {

namespace {

constexpr double kDivisionGuard = 1e-10;

}  // namespace

LocalDensityOperator reflect(const LocalDensityOperator& rho) {
  const BipartiteDims dims = rho.dims();
  const ComplexMatrix s = swap_operator(dims.a, dims.b);
  // S maps AB -> BA, so the reflected operator is S rho S^dagger; for equal
  // factor dimensions S^dagger = S.
  return LocalDensityOperator::make(s * rho.matrix() * s.adjoint(), dims.swapped(), 1e-8);
}

VerificationReport reflection_identity_check(const LocalDensityOperator& rho, std::size_t trials, std::uint64_t seed,
                                             double tol) {
  const BipartiteDims dims = rho.dims();
  const LocalDensityOperator reflected = reflect(rho);
  VerificationReport report;
  report.check = "reflection_identity";
  report.seed = seed;

  double worst = std::abs(rho.expectation(ComplexMatrix::identity(dims.a), ComplexMatrix::identity(dims.b)) -
                          reflected.expectation(ComplexMatrix::identity(dims.b), ComplexMatrix::identity(dims.a)));
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, k));
    const ComplexMatrix p = random_projector_any_rank(dims.a, rng);
    const ComplexMatrix q = random_projector_any_rank(dims.b, rng);
    worst = std::max(worst, std::abs(rho.expectation(p, q) - reflected.expectation(q, p)));
  }
  report.add_metric("max_residual", worst);
  report.add_metric("trials", static_cast<double>(trials));
  report.pass = worst <= tol;
  return report;
}

JointTable joint_table(const LocalDensityOperator& rho, std::span<const ComplexMatrix> pvm_a,
                       std::span<const ComplexMatrix> pvm_b, double tol) {
  const BipartiteDims dims = rho.dims();
  if (!is_pvm(pvm_a, tol) || pvm_a.front().rows() != dims.a) throw InputError("joint_table: pvmA is not a PVM on A");
  if (!is_pvm(pvm_b, tol) || pvm_b.front().rows() != dims.b) throw InputError("joint_table: pvmB is not a PVM on B");

  const LocalDensityOperator reflected = reflect(rho);
  const ComplexMatrix rho_a = rho.marginal_a();
  const ComplexMatrix rho_b = rho.marginal_b();
  const std::size_t na = pvm_a.size();
  const std::size_t nb = pvm_b.size();

  JointTable t{ComplexMatrix(na, nb), ComplexMatrix(nb, na)};
  for (std::size_t i = 0; i < na; ++i) t.marginal_a.push_back(trace_of_product(rho_a, pvm_a[i]).real());
  for (std::size_t j = 0; j < nb; ++j) t.marginal_b.push_back(trace_of_product(rho_b, pvm_b[j]).real());
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      t.joint(i, j) = rho.expectation(pvm_a[i], pvm_b[j]);
      t.reflected_joint(j, i) = reflected.expectation(pvm_b[j], pvm_a[i]);
    }
  }

  t.conditional.assign(na, std::vector<std::optional<Complex>>(nb));
  t.reflected_conditional.assign(na, std::vector<std::optional<Complex>>(nb));
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const bool a_defined = std::abs(t.marginal_a[i]) > kDivisionGuard;
      const bool b_defined = std::abs(t.marginal_b[j]) > kDivisionGuard;
      if (a_defined) t.conditional[i][j] = t.joint(i, j) / t.marginal_a[i];
      if (b_defined) t.reflected_conditional[i][j] = t.reflected_joint(j, i) / t.marginal_b[j];
      if (!a_defined || !b_defined) {
        ++t.skipped_entries;
        continue;
      }
      const Complex bayes = t.marginal_b[j] * *t.reflected_conditional[i][j] / t.marginal_a[i];
      t.bayes_residual = std::max(t.bayes_residual, std::abs(*t.conditional[i][j] - bayes));
    }
  }

  for (std::size_t i = 0; i < na; ++i) {
    Complex row = 0.0;
    for (std::size_t j = 0; j < nb; ++j) row += t.joint(i, j);
    t.marginal_residual = std::max(t.marginal_residual, std::abs(row - t.marginal_a[i]));
  }
  for (std::size_t j = 0; j < nb; ++j) {
    Complex col = 0.0;
    for (std::size_t i = 0; i < na; ++i) col += t.joint(i, j);
    t.marginal_residual = std::max(t.marginal_residual, std::abs(col - t.marginal_b[j]));
  }
  return t;
}

}  // namespace locrho
