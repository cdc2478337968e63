#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "locrho/matrix.hpp"

namespace locrho {

/// Factor dimensions of a bipartite space H_A (x) H_B.
struct BipartiteDims {
  std::size_t a = 1;
  std::size_t b = 1;

  std::size_t total() const { return a * b; }
  BipartiteDims swapped() const { return {b, a}; }
  friend bool operator==(const BipartiteDims&, const BipartiteDims&) = default;
};

enum class Factor { A, B };

std::string to_string(Factor f);

/// Throws DimensionError unless `m` is square with side dims.total().
void require_bipartite(const ComplexMatrix& m, BipartiteDims dims, const char* what);

/// Kronecker product; entry ((iA,iB),(jA,jB)) = X[iA,jA] * Y[iB,jB].
ComplexMatrix tensor(const ComplexMatrix& x, const ComplexMatrix& y);

/// Traces out `factor`: Factor::B returns the dimA x dimA operator Tr_B[M].
ComplexMatrix partial_trace(const ComplexMatrix& m, BipartiteDims dims, Factor factor);

/// S(|a> (x) |b>) = |b> (x) |a>, mapping H_A (x) H_B onto H_B (x) H_A.
ComplexMatrix swap_operator(std::size_t dim_a, std::size_t dim_b);

/// Partial transpose of `factor` taken in the orthonormal basis given by the
/// columns of `basis`. Throws DomainError if `basis` is not unitary.
ComplexMatrix partial_transpose(const ComplexMatrix& m, BipartiteDims dims, Factor factor,
                                const ComplexMatrix& basis, double tol = kDefaultTol);
/// Computational-basis partial transpose.
ComplexMatrix partial_transpose(const ComplexMatrix& m, BipartiteDims dims, Factor factor);

/// sum_i |b_i><b_i| X |b_i><b_i| over the columns b_i of `basis`.
ComplexMatrix dephase(const ComplexMatrix& x, const ComplexMatrix& basis, double tol = kDefaultTol);

/// (U (x) I) M (U (x) I)^dagger or (I (x) U) M (I (x) U)^dagger.
ComplexMatrix conjugate_factor(const ComplexMatrix& m, BipartiteDims dims, Factor factor,
                               const ComplexMatrix& u);

/// XY + YX.
ComplexMatrix anticommutator(const ComplexMatrix& x, const ComplexMatrix& y);

// Predicates. All tolerances are absolute, on the entrywise infinity norm.

double hermiticity_residual(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol);
bool is_unitary(const ComplexMatrix& u, double tol = kDefaultTol);
bool is_projector(const ComplexMatrix& p, double tol = kDefaultTol);
/// Hermitian, unit trace and min eigenvalue >= -tol.
bool is_density(const ComplexMatrix& m, double tol = kDefaultTol);

/// Mutually orthogonal projectors summing to the identity.
bool is_pvm(std::span<const ComplexMatrix> pvm, double tol = kDefaultTol);

}  // namespace locrho
