#include "locrho/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "locrho/error.hpp"
#include "locrho/tensor.hpp"

namespace locrho {

namespace {

constexpr double kJacobiOffTol = 1e-12;
constexpr int kJacobiMaxSweeps = 100;
constexpr double kPhaseThreshold = 1e-9;

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

// Applies the unitary G, nonzero only on the (p,q) block, as A <- G^dagger A G
// and V <- V G.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = apq / mag;
  const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const Complex gpp = c;
  const Complex gpq = s;
  const Complex gqp = -s * std::conj(phase);
  const Complex gqq = c * std::conj(phase);

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * gpp + akq * gqp;
    a(k, q) = akp * gpq + akq * gqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * gpp + vkq * gqp;
    v(k, q) = vkp * gpq + vkq * gqq;
  }
}

bool lexicographically_less(std::span<const Complex> x, std::span<const Complex> y) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k].real() != y[k].real()) return x[k].real() < y[k].real();
    if (x[k].imag() != y[k].imag()) return x[k].imag() < y[k].imag();
  }
  return false;
}

}  // namespace

ComplexMatrix HermEigDecomposition::reconstruct() const {
  return eigenvectors * ComplexMatrix::diagonal(std::span<const double>(eigenvalues)) * eigenvectors.adjoint();
}

HermEigDecomposition herm_eig(const ComplexMatrix& m, double herm_tol) {
  if (!m.is_square()) throw DimensionError("herm_eig: matrix is not square");
  const double herm_res = hermiticity_residual(m);
  if (herm_res > herm_tol) {
    throw DomainError("herm_eig: input is not Hermitian (residual " + std::to_string(herm_res) + ")");
  }
  const std::size_t n = m.rows();
  ComplexMatrix a = (m + m.adjoint()) * Complex(0.5);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = a.frobenius_norm();

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= kJacobiOffTol * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
    }
  }

  struct Pair {
    double value;
    std::vector<Complex> vec;
  };
  std::vector<Pair> pairs(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Complex> col = v.column(j);
    for (Complex& z : col) {
      if (std::abs(z) > kPhaseThreshold) {
        const double mag = std::abs(z);
        const Complex fix = std::conj(z) / mag;
        for (Complex& w : col) w *= fix;
        z = mag;  // exactly real, not just up to rounding
        break;
      }
    }
    pairs[j] = {a(j, j).real(), std::move(col)};
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.value != y.value) return x.value > y.value;
    return lexicographically_less(x.vec, y.vec);
  });

  HermEigDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = pairs[j].value;
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = pairs[j].vec[i];
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& m, double herm_tol) {
  return herm_eig(m, herm_tol).eigenvalues.back();
}

ComplexMatrix sqrt_psd(const ComplexMatrix& m, double tol) {
  HermEigDecomposition eig = herm_eig(m, tol);
  for (double& lambda : eig.eigenvalues) {
    if (lambda < -tol) {
      throw DomainError("sqrt_psd: matrix is not positive semi-definite (eigenvalue " +
                        std::to_string(lambda) + ")");
    }
    lambda = std::sqrt(std::max(lambda, 0.0));
  }
  return eig.reconstruct();
}

QrDecomposition qr_decompose(const ComplexMatrix& a, bool pivoting) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  ComplexMatrix r = a;
  ComplexMatrix q = ComplexMatrix::identity(m);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  const std::size_t steps = std::min(m, n);
  for (std::size_t k = 0; k < steps; ++k) {
    if (pivoting) {
      std::size_t best = k;
      double best_norm = -1.0;
      for (std::size_t j = k; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += std::norm(r(i, j));
        if (s > best_norm) {
          best_norm = s;
          best = j;
        }
      }
      if (best != k) {
        for (std::size_t i = 0; i < m; ++i) std::swap(r(i, k), r(i, best));
        std::swap(perm[k], perm[best]);
      }
    }

    double xnorm2 = 0.0;
    for (std::size_t i = k; i < m; ++i) xnorm2 += std::norm(r(i, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) continue;
    const Complex x0 = r(k, k);
    const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0) : x0 / std::abs(x0);
    const Complex alpha = -phase * xnorm;

    std::vector<Complex> v(m - k);
    for (std::size_t i = k; i < m; ++i) v[i - k] = r(i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (const Complex& z : v) vnorm2 += std::norm(z);
    if (vnorm2 == 0.0) continue;
    const double vnorm = std::sqrt(vnorm2);
    for (Complex& z : v) z /= vnorm;

    // R <- (I - 2 v v^dagger) R on rows k..m-1.
    for (std::size_t j = k; j < n; ++j) {
      Complex dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += std::conj(v[i - k]) * r(i, j);
      for (std::size_t i = k; i < m; ++i) r(i, j) -= 2.0 * v[i - k] * dot;
    }
    // Q <- Q (I - 2 v v^dagger) on columns k..m-1.
    for (std::size_t i = 0; i < m; ++i) {
      Complex dot = 0.0;
      for (std::size_t l = k; l < m; ++l) dot += q(i, l) * v[l - k];
      for (std::size_t l = k; l < m; ++l) q(i, l) -= 2.0 * dot * std::conj(v[l - k]);
    }
    for (std::size_t i = k + 1; i < m; ++i) r(i, k) = 0.0;
  }
  return {std::move(q), std::move(r), std::move(perm)};
}

LeastSquaresSolution solve_least_squares(const ComplexMatrix& a, std::span<const Complex> b, double rank_tol) {
  if (b.size() != a.rows()) throw DimensionError("solve_least_squares: right-hand side has the wrong length");
  const QrDecomposition qr = qr_decompose(a, true);
  const std::size_t n = a.cols();
  const std::size_t steps = std::min(a.rows(), n);

  LeastSquaresSolution out;
  out.x.assign(n, Complex{});
  const double r00 = std::abs(qr.r(0, 0));
  if (r00 == 0.0) return out;
  std::size_t rank = 0;
  while (rank < steps && std::abs(qr.r(rank, rank)) > rank_tol * r00) ++rank;
  out.rank = rank;
  out.condition_estimate = r00 / std::abs(qr.r(rank - 1, rank - 1));

  std::vector<Complex> y = qr.q.adjoint() * b;
  std::vector<Complex> z(rank);
  for (std::size_t kk = rank; kk-- > 0;) {
    Complex s = y[kk];
    for (std::size_t j = kk + 1; j < rank; ++j) s -= qr.r(kk, j) * z[j];
    z[kk] = s / qr.r(kk, kk);
  }
  for (std::size_t k = 0; k < rank; ++k) out.x[qr.perm[k]] = z[k];
  return out;
}

std::size_t numerical_rank(const ComplexMatrix& a, double rank_tol) {
  const QrDecomposition qr = qr_decompose(a, true);
  const std::size_t steps = std::min(a.rows(), a.cols());
  const double r00 = std::abs(qr.r(0, 0));
  if (r00 == 0.0) return 0;
  std::size_t rank = 0;
  while (rank < steps && std::abs(qr.r(rank, rank)) > rank_tol * r00) ++rank;
  return rank;
}

}  // namespace locrho
