#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "locrho/matrix.hpp"
#include "locrho/tensor.hpp"

namespace locrho {

/// Seedable generator: std::mt19937_64 for raw bits, with uniform and normal
/// variates derived here (53-bit mantissa fill, Box-Muller) so sampled values
/// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer in [lo, hi].
  std::size_t uniform_index(std::size_t lo, std::size_t hi);
  double normal();
  /// (N(0,1) + i N(0,1)) / sqrt(2).
  Complex complex_normal();

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 mix of (seed, stream): independent per-trial seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, Rng& rng);
/// Haar unitary via QR of a complex Gaussian matrix with phase-corrected diagonal.
ComplexMatrix random_unitary(std::size_t d, Rng& rng);
ComplexMatrix random_hermitian(std::size_t d, Rng& rng);
/// G G^dagger / Tr[G G^dagger] with G square Ginibre (full rank almost surely).
ComplexMatrix random_density(std::size_t d, Rng& rng);
ComplexMatrix random_pure_state(std::size_t d, Rng& rng);
/// Projector onto the span of `rank` Haar-random orthonormal vectors.
ComplexMatrix random_projector(std::size_t d, std::size_t rank, Rng& rng);
/// Rank drawn uniformly from {0, ..., d}.
ComplexMatrix random_projector_any_rank(std::size_t d, Rng& rng);
/// Uniformly random composition of d with at least min_blocks parts (d >= min_blocks).
std::vector<std::size_t> random_composition(std::size_t d, std::size_t min_blocks, Rng& rng);
/// PVM obtained by grouping the columns of `u` into consecutive blocks.
std::vector<ComplexMatrix> pvm_from_unitary(const ComplexMatrix& u, const std::vector<std::size_t>& blocks);

/// A generally non-Hermitian operator with unit trace whose marginals are
/// random density operators: rho_A (x) rho_B plus a traceless-marginal
/// perturbation of Frobenius size `spread`.
ComplexMatrix random_local_density_matrix(BipartiteDims dims, Rng& rng, double spread = 0.5);

}  // namespace locrho
