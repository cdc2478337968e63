#include "locrho/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "locrho/error.hpp"
#include "locrho/linalg.hpp"

namespace locrho {

std::string to_string(Factor f) { return f == Factor::A ? "A" : "B"; }

void require_bipartite(const ComplexMatrix& m, BipartiteDims dims, const char* what) {
  if (dims.a == 0 || dims.b == 0) throw DimensionError(std::string(what) + ": factor dimensions must be positive");
  if (!m.is_square() || m.rows() != dims.total()) {
    throw DimensionError(std::string(what) + ": expected a square matrix of side " +
                         std::to_string(dims.total()) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

ComplexMatrix tensor(const ComplexMatrix& x, const ComplexMatrix& y) {
  ComplexMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (std::size_t ia = 0; ia < x.rows(); ++ia) {
    for (std::size_t ja = 0; ja < x.cols(); ++ja) {
      const Complex xa = x(ia, ja);
      if (xa == Complex{}) continue;
      for (std::size_t ib = 0; ib < y.rows(); ++ib) {
        for (std::size_t jb = 0; jb < y.cols(); ++jb) {
          out(ia * y.rows() + ib, ja * y.cols() + jb) = xa * y(ib, jb);
        }
      }
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, BipartiteDims dims, Factor factor) {
  require_bipartite(m, dims, "partial_trace");
  const std::size_t da = dims.a;
  const std::size_t db = dims.b;
  if (factor == Factor::B) {
    ComplexMatrix out(da, da);
    for (std::size_t i = 0; i < da; ++i) {
      for (std::size_t j = 0; j < da; ++j) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < db; ++k) s += m(i * db + k, j * db + k);
        out(i, j) = s;
      }
    }
    return out;
  }
  ComplexMatrix out(db, db);
  for (std::size_t i = 0; i < db; ++i) {
    for (std::size_t j = 0; j < db; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < da; ++k) s += m(k * db + i, k * db + j);
      out(i, j) = s;
    }
  }
  return out;
}

ComplexMatrix swap_operator(std::size_t dim_a, std::size_t dim_b) {
  ComplexMatrix s(dim_a * dim_b, dim_a * dim_b);
  for (std::size_t a = 0; a < dim_a; ++a) {
    for (std::size_t b = 0; b < dim_b; ++b) s(b * dim_a + a, a * dim_b + b) = 1.0;
  }
  return s;
}

ComplexMatrix conjugate_factor(const ComplexMatrix& m, BipartiteDims dims, Factor factor,
                               const ComplexMatrix& u) {
  require_bipartite(m, dims, "conjugate_factor");
  const std::size_t d = factor == Factor::A ? dims.a : dims.b;
  if (!u.is_square() || u.rows() != d) throw DimensionError("conjugate_factor: unitary has the wrong size");
  const ComplexMatrix full = factor == Factor::A ? tensor(u, ComplexMatrix::identity(dims.b))
                                                 : tensor(ComplexMatrix::identity(dims.a), u);
  return full * m * full.adjoint();
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, BipartiteDims dims, Factor factor) {
  require_bipartite(m, dims, "partial_transpose");
  const std::size_t da = dims.a;
  const std::size_t db = dims.b;
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t ia = 0; ia < da; ++ia) {
    for (std::size_t ib = 0; ib < db; ++ib) {
      for (std::size_t ja = 0; ja < da; ++ja) {
        for (std::size_t jb = 0; jb < db; ++jb) {
          const Complex v = m(ia * db + ib, ja * db + jb);
          if (factor == Factor::A) {
            out(ja * db + ib, ia * db + jb) = v;
          } else {
            out(ia * db + jb, ja * db + ib) = v;
          }
        }
      }
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, BipartiteDims dims, Factor factor,
                                const ComplexMatrix& basis, double tol) {
  require_bipartite(m, dims, "partial_transpose");
  if (!is_unitary(basis, tol)) throw DomainError("partial_transpose: basis is not unitary");
  const ComplexMatrix in_basis = conjugate_factor(m, dims, factor, basis.adjoint());
  return conjugate_factor(partial_transpose(in_basis, dims, factor), dims, factor, basis);
}

ComplexMatrix dephase(const ComplexMatrix& x, const ComplexMatrix& basis, double tol) {
  if (!x.is_square() || !basis.is_square() || x.rows() != basis.rows()) {
    throw DimensionError("dephase: operator and basis must be square of equal size");
  }
  if (!is_unitary(basis, tol)) throw DomainError("dephase: basis is not unitary");
  const ComplexMatrix rotated = basis.adjoint() * x * basis;
  ComplexMatrix diag(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) diag(i, i) = rotated(i, i);
  return basis * diag * basis.adjoint();
}

ComplexMatrix anticommutator(const ComplexMatrix& x, const ComplexMatrix& y) {
  if (!x.is_square() || x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionError("anticommutator: operands must be square of equal size");
  }
  return x * y + y * x;
}

double hermiticity_residual(const ComplexMatrix& m) {
  if (!m.is_square()) return INFINITY;
  double r = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j) - std::conj(m(j, i))));
  }
  return r;
}

bool is_hermitian(const ComplexMatrix& m, double tol) { return hermiticity_residual(m) <= tol; }

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (!u.is_square()) return false;
  return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.rows())) <= tol;
}

bool is_projector(const ComplexMatrix& p, double tol) {
  if (!p.is_square() || !is_hermitian(p, tol)) return false;
  return max_abs_diff(p * p, p) <= tol;
}

bool is_density(const ComplexMatrix& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  if (std::abs(m.trace() - 1.0) > tol) return false;
  return min_eigenvalue(m, tol) >= -tol;
}

bool is_pvm(std::span<const ComplexMatrix> pvm, double tol) {
  if (pvm.empty()) return false;
  const std::size_t d = pvm.front().rows();
  ComplexMatrix sum(d, d);
  for (std::size_t i = 0; i < pvm.size(); ++i) {
    if (pvm[i].rows() != d || !is_projector(pvm[i], tol)) return false;
    for (std::size_t j = i + 1; j < pvm.size(); ++j) {
      if ((pvm[i] * pvm[j]).max_abs() > tol) return false;
    }
    sum += pvm[i];
  }
  return max_abs_diff(sum, ComplexMatrix::identity(d)) <= tol;
}

}  // namespace locrho
