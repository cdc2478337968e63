#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "locrho/matrix.hpp"

namespace locrho {

/// M = U diag(eigenvalues) U^dagger with eigenvalues in descending order.
///
/// Output is deterministic: the first eigenvector component with modulus
/// above 1e-9 is real positive, and exactly equal eigenvalues are ordered by
/// lexicographic comparison of their eigenvectors.
struct HermEigDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;

  ComplexMatrix reconstruct() const;
};

/// Cyclic complex Jacobi. Throws DomainError if max|M - M^dagger| > herm_tol.
HermEigDecomposition herm_eig(const ComplexMatrix& m, double herm_tol = kDefaultTol);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const ComplexMatrix& m, double herm_tol = kDefaultTol);

/// Principal square root of a PSD matrix. Eigenvalues in [-tol, 0) are clamped
/// to zero; anything below -tol raises DomainError.
ComplexMatrix sqrt_psd(const ComplexMatrix& m, double tol = kDefaultTol);

/// Householder QR, optionally with column pivoting: A P = Q R.
struct QrDecomposition {
  ComplexMatrix q;                   // rows x rows, unitary
  ComplexMatrix r;                   // rows x cols, upper triangular
  std::vector<std::size_t> perm;     // column j of A P is column perm[j] of A
};

QrDecomposition qr_decompose(const ComplexMatrix& a, bool pivoting);

/// Least-squares solution of A x = b through a column-pivoted QR.
struct LeastSquaresSolution {
  std::vector<Complex> x;
  std::size_t rank = 0;
  /// |R_00| / |R_kk| over the retained diagonal of the triangular factor.
  double condition_estimate = 0.0;
};

LeastSquaresSolution solve_least_squares(const ComplexMatrix& a, std::span<const Complex> b,
                                         double rank_tol = 1e-12);

/// Numerical rank from the pivoted-QR diagonal, relative threshold rank_tol.
std::size_t numerical_rank(const ComplexMatrix& a, double rank_tol = 1e-10);

}  // namespace locrho
