#include "locrho/classify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "locrho/error.hpp"
#include "locrho/linalg.hpp"

namespace locrho {

namespace {

constexpr double kGapTol = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ComplexMatrix block(const ComplexMatrix& m, std::size_t i, std::size_t j, std::size_t db) {
  ComplexMatrix out(db, db);
  for (std::size_t r = 0; r < db; ++r) {
    for (std::size_t c = 0; c < db; ++c) out(r, c) = m(i * db + r, j * db + c);
  }
  return out;
}

void set_block(ComplexMatrix& m, std::size_t i, std::size_t j, const ComplexMatrix& b) {
  const std::size_t db = b.rows();
  for (std::size_t r = 0; r < db; ++r) {
    for (std::size_t c = 0; c < db; ++c) m(i * db + r, j * db + c) = b(r, c);
  }
}

// Pseudo-inverse of a Hermitian matrix, dropping eigenvalues with |lambda| <= cutoff.
ComplexMatrix hermitian_pinv(const ComplexMatrix& m, double cutoff) {
  HermEigDecomposition eig = herm_eig(m, 1e-6);
  for (double& lambda : eig.eigenvalues) lambda = std::abs(lambda) > cutoff ? 1.0 / lambda : 0.0;
  return eig.reconstruct();
}

// Index-set restriction of a block matrix (blocks of side db).
ComplexMatrix restrict_blocks(const ComplexMatrix& m, const std::vector<std::size_t>& rows,
                              const std::vector<std::size_t>& cols, std::size_t db) {
  ComplexMatrix out(rows.size() * db, cols.size() * db);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) set_block(out, r, c, block(m, rows[r], cols[c], db));
  }
  return out;
}

}  // namespace

CanonicalFormTest song_parzygnat_test(const LocalDensityOperator& rho, double tol,
                                      const std::optional<ComplexMatrix>& basis) {
  const BipartiteDims dims = rho.dims();
  const std::size_t da = dims.a;
  const std::size_t db = dims.b;
  const ComplexMatrix rho_a = rho.marginal_a();

  CanonicalFormTest out{false, 0.0, ComplexMatrix::identity(da)};
  if (basis) {
    if (!is_unitary(*basis, tol) || basis->rows() != da) throw DomainError("song_parzygnat_test: basis is not unitary");
    const ComplexMatrix rotated = basis->adjoint() * rho_a * *basis;
    for (std::size_t i = 0; i < da; ++i) {
      for (std::size_t j = 0; j < da; ++j) {
        if (i != j && std::abs(rotated(i, j)) > tol) {
          throw DomainError("song_parzygnat_test: override basis does not diagonalize rho_A");
        }
      }
      out.marginal_spectrum.push_back(rotated(i, i).real());
    }
    out.basis = *basis;
  } else {
    const HermEigDecomposition eig = herm_eig(rho_a, tol);
    out.marginal_spectrum = eig.eigenvalues;
    out.basis = eig.eigenvectors;
  }
  for (std::size_t i = 0; i < da; ++i) {
    for (std::size_t j = i + 1; j < da; ++j) {
      if (std::abs(out.marginal_spectrum[i] - out.marginal_spectrum[j]) < kGapTol) out.basis_ambiguous = true;
    }
  }
  if (out.basis_ambiguous) out.notes.push_back("rho_A has a degenerate spectrum; the dephasing basis is not unique");

  if (!is_hermitian(rho.matrix(), tol)) {
    out.min_eigenvalue = kNaN;
    out.notes.push_back("operator is not Hermitian, so it is not of the canonical Margenau-Hill form");
    return out;
  }

  const ComplexMatrix x = conjugate_factor(rho.matrix(), dims, Factor::A, out.basis.adjoint());
  std::vector<std::size_t> support;
  std::vector<std::size_t> kernel;
  for (std::size_t i = 0; i < da; ++i) (out.marginal_spectrum[i] > tol ? support : kernel).push_back(i);
  out.singular_marginal = !kernel.empty();

  // Jamiolkowski operator of the candidate channel, in the rotated frame.
  ComplexMatrix jam(dims.total(), dims.total());
  bool support_violation = false;
  for (std::size_t i = 0; i < da; ++i) {
    for (std::size_t j = 0; j < da; ++j) {
      const double weight = 0.5 * (out.marginal_spectrum[i] + out.marginal_spectrum[j]);
      const ComplexMatrix b = block(x, i, j, db);
      if (weight > tol) {
        set_block(jam, i, j, b * Complex(1.0 / weight));
      } else if (b.max_abs() > tol) {
        support_violation = true;
      }
    }
  }
  if (support_violation) out.notes.push_back("operator has weight outside the support of rho_A");

  ComplexMatrix choi_rotated = partial_transpose(jam, dims, Factor::A);
  if (!kernel.empty()) {
    // Minimal PSD completion of the kernel-kernel blocks, then top up each
    // kernel input to unit trace with a maximally mixed output.
    const ComplexMatrix css = restrict_blocks(choi_rotated, support, support, db);
    const ComplexMatrix csk = restrict_blocks(choi_rotated, support, kernel, db);
    const ComplexMatrix schur = csk.adjoint() * hermitian_pinv(css, tol) * csk;
    for (std::size_t r = 0; r < kernel.size(); ++r) {
      for (std::size_t c = 0; c < kernel.size(); ++c) {
        ComplexMatrix b = block(schur, r, c, db);
        if (r == c) {
          const double deficit = 1.0 - b.trace().real();
          b += ComplexMatrix::identity(db) * Complex(deficit / static_cast<double>(db));
        }
        set_block(choi_rotated, kernel[r], kernel[c], b);
      }
    }
    out.notes.push_back("rho_A is singular; the channel is completed on its kernel");
  }

  out.min_eigenvalue = min_eigenvalue(choi_rotated, 1e-6);
  out.verdict = !support_violation && out.min_eigenvalue >= -tol;
  if (out.verdict) {
    // Back to the computational basis: C = (conj(V) (x) I) C' (conj(V) (x) I)^dagger.
    const ComplexMatrix choi_matrix = conjugate_factor(choi_rotated, dims, Factor::A, out.basis.conj());
    try {
      out.channel = KrausChannel::from_choi((choi_matrix + choi_matrix.adjoint()) * Complex(0.5), da, db, true,
                                            std::max(tol, 1e-8));
    } catch (const DomainError& e) {
      out.notes.push_back(std::string("could not extract the realizing channel: ") + e.what());
    }
  }
  return out;
}

ClassificationReport classify(const ComplexMatrix& m, BipartiteDims dims, double tol,
                              const std::optional<ComplexMatrix>& basis) {
  require_bipartite(m, dims, "classify");
  ClassificationReport r;
  r.hermiticity_residual = hermiticity_residual(m);
  r.hermitian = r.hermiticity_residual <= tol;
  r.trace_residual = std::abs(m.trace() - 1.0);
  r.unit_trace = r.trace_residual <= tol;
  if (r.hermitian) {
    r.min_eigenvalue = min_eigenvalue(m, tol);
    r.psd = r.min_eigenvalue >= -tol;
  } else {
    r.min_eigenvalue = kNaN;
  }
  r.density = r.hermitian && r.psd && r.unit_trace;

  const ComplexMatrix ma = partial_trace(m, dims, Factor::B);
  const ComplexMatrix mb = partial_trace(m, dims, Factor::A);
  r.marginal_a_min_eigenvalue = is_hermitian(ma, tol) ? min_eigenvalue(ma, tol) : kNaN;
  r.marginal_b_min_eigenvalue = is_hermitian(mb, tol) ? min_eigenvalue(mb, tol) : kNaN;
  r.local_density = local_density_violations(m, dims, tol).empty();

  r.canonical_test_min_eigenvalue = kNaN;
  r.basis_used = "not applicable";
  if (r.local_density) {
    const CanonicalFormTest sp = song_parzygnat_test(LocalDensityOperator::make(m, dims, tol), tol, basis);
    r.canonical_mh_form = sp.verdict;
    r.canonical_test_min_eigenvalue = sp.min_eigenvalue;
    r.basis_used = basis ? "override basis" : "eigenbasis of rho_A";
    if (sp.basis_ambiguous) r.basis_used += " (ambiguous: degenerate spectrum)";
    r.notes.insert(r.notes.end(), sp.notes.begin(), sp.notes.end());
  } else {
    r.notes.push_back("not a local-density operator; canonical-form test skipped");
  }
  return r;
}

ComplexMatrix counterexample_marginal(double t) {
  const double r5 = std::sqrt(5.0);
  const ComplexMatrix base = ComplexMatrix::from_rows({{1.0, r5}, {r5, 5.0}});
  return base * Complex((1.0 - t) / 6.0) + ComplexMatrix::identity(2) * Complex(t / 2.0);
}

LocalDensityOperator counterexample_family(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "counterexample_family: t = " << t << " is outside [0, 1]";
    throw DomainError(os.str());
  }
  const double r5 = std::sqrt(5.0);
  const ComplexMatrix base = ComplexMatrix::from_rows({
      {-6.0, r5, r5, 0.0},
      {r5, 8.0, 0.0, r5},
      {r5, 0.0, 8.0, r5},
      {0.0, r5, r5, 2.0},
  });
  return LocalDensityOperator::make(base * Complex((1.0 - t) / 12.0) + ComplexMatrix::identity(4) * Complex(t / 4.0),
                                    {2, 2}, 1e-12);
}

}  // namespace locrho
