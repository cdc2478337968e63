#include "locrho/random.hpp"

#include <cmath>
#include <numbers>

#include "locrho/error.hpp"
#include "locrho/linalg.hpp"

namespace locrho {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::uniform_index(std::size_t lo, std::size_t hi) {
  if (hi < lo) throw InputError("Rng::uniform_index: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return lo + static_cast<std::size_t>(engine_());
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::size_t>(x % span);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 == 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) * std::numbers::sqrt2 * 0.5;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  for (Complex& z : g.entries()) z = rng.complex_normal();
  return g;
}

ComplexMatrix random_unitary(std::size_t d, Rng& rng) {
  QrDecomposition qr = qr_decompose(random_ginibre(d, d, rng), false);
  for (std::size_t j = 0; j < d; ++j) {
    const Complex rjj = qr.r(j, j);
    const Complex phase = std::abs(rjj) == 0.0 ? Complex(1.0) : rjj / std::abs(rjj);
    for (std::size_t i = 0; i < d; ++i) qr.q(i, j) *= phase;
  }
  return qr.q;
}

ComplexMatrix random_hermitian(std::size_t d, Rng& rng) {
  const ComplexMatrix g = random_ginibre(d, d, rng);
  return (g + g.adjoint()) * Complex(0.5);
}

ComplexMatrix random_density(std::size_t d, Rng& rng) {
  const ComplexMatrix g = random_ginibre(d, d, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho *= 1.0 / rho.trace().real();
  return rho;
}

ComplexMatrix random_pure_state(std::size_t d, Rng& rng) { return random_projector(d, 1, rng); }

ComplexMatrix random_projector(std::size_t d, std::size_t rank, Rng& rng) {
  if (rank > d) throw InputError("random_projector: rank exceeds dimension");
  const ComplexMatrix u = random_unitary(d, rng);
  ComplexMatrix p(d, d);
  for (std::size_t k = 0; k < rank; ++k) {
    const auto col = u.column(k);
    p += ComplexMatrix::outer(col, col);
  }
  return p;
}

ComplexMatrix random_projector_any_rank(std::size_t d, Rng& rng) {
  return random_projector(d, rng.uniform_index(0, d), rng);
}

std::vector<std::size_t> random_composition(std::size_t d, std::size_t min_blocks, Rng& rng) {
  if (d == 0 || min_blocks > d) throw InputError("random_composition: need d >= min_blocks >= 0 and d > 0");
  // Each of the d-1 gaps is a cut with probability 1/2; resample until enough
  // blocks appear. Conditioning keeps the distribution uniform over the
  // admissible compositions.
  while (true) {
    std::vector<std::size_t> blocks;
    std::size_t current = 1;
    for (std::size_t gap = 0; gap + 1 < d; ++gap) {
      if (rng.next_u64() >> 63) {
        blocks.push_back(current);
        current = 1;
      } else {
        ++current;
      }
    }
    blocks.push_back(current);
    if (blocks.size() >= min_blocks) return blocks;
  }
}

std::vector<ComplexMatrix> pvm_from_unitary(const ComplexMatrix& u, const std::vector<std::size_t>& blocks) {
  std::size_t total = 0;
  for (std::size_t b : blocks) total += b;
  if (total != u.cols()) throw InputError("pvm_from_unitary: block sizes must sum to the dimension");
  std::vector<ComplexMatrix> pvm;
  std::size_t col = 0;
  for (std::size_t b : blocks) {
    ComplexMatrix p(u.rows(), u.rows());
    for (std::size_t k = 0; k < b; ++k, ++col) {
      const auto v = u.column(col);
      p += ComplexMatrix::outer(v, v);
    }
    pvm.push_back(std::move(p));
  }
  return pvm;
}

ComplexMatrix random_local_density_matrix(BipartiteDims dims, Rng& rng, double spread) {
  const ComplexMatrix base = tensor(random_density(dims.a, rng), random_density(dims.b, rng));
  ComplexMatrix x = random_ginibre(dims.total(), dims.total(), rng);
  const ComplexMatrix ia = ComplexMatrix::identity(dims.a);
  const ComplexMatrix ib = ComplexMatrix::identity(dims.b);
  const double da = static_cast<double>(dims.a);
  const double db = static_cast<double>(dims.b);
  // Remove both marginals (and add back the doubly removed trace).
  ComplexMatrix perturbation = x - tensor(partial_trace(x, dims, Factor::B), ib) * Complex(1.0 / db) -
                               tensor(ia, partial_trace(x, dims, Factor::A)) * Complex(1.0 / da) +
                               ComplexMatrix::identity(dims.total()) * (x.trace() / (da * db));
  const double norm = perturbation.frobenius_norm();
  if (norm > 0.0) perturbation *= spread / norm;
  return base + perturbation;
}

}  // namespace locrho
