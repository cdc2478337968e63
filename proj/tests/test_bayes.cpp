#include <cmath>

#include "doctest.h"
#include "locrho/bayes.hpp"
#include "locrho/classify.hpp"
#include "locrho/error.hpp"
#include "locrho/gleason.hpp"
#include "locrho/random.hpp"
#include "test_util.hpp"

using namespace locrho;
using namespace locrho::testing;

namespace {

std::vector<ComplexMatrix> computational(std::size_t d) {
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(ComplexMatrix::ket_bra(d, i, i));
  return out;
}

}  // namespace

TEST_CASE("reflect") {
  Rng rng(401);
  const ComplexMatrix rho = random_density(2, rng);
  const ComplexMatrix sigma = random_density(3, rng);
  const LocalDensityOperator product = LocalDensityOperator::make(tensor(rho, sigma), {2, 3});
  const LocalDensityOperator r = reflect(product);
  CHECK(r.dims() == BipartiteDims{3, 2});
  CHECK(max_abs_diff(r.matrix(), tensor(sigma, rho)) < 1e-15);

  const LocalDensityOperator half_swap = LocalDensityOperator::make(swap_operator(2, 2) * 0.5, {2, 2});
  CHECK(max_abs_diff(reflect(half_swap).matrix(), half_swap.matrix()) == 0.0);

  for (double t : {0.0, 0.3, 1.0}) {
    const LocalDensityOperator f = counterexample_family(t);
    const LocalDensityOperator fr = reflect(f);
    CHECK(max_abs_diff(fr.marginal_a(), f.marginal_a()) < 1e-14);
    CHECK(max_abs_diff(fr.marginal_b(), f.marginal_b()) < 1e-14);
  }

  for (auto dims : {BipartiteDims{2, 2}, BipartiteDims{2, 3}, BipartiteDims{3, 2}}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto op = LocalDensityOperator::make(random_local_density_matrix(dims, rng), dims);
      const auto once = reflect(op);
      CHECK(max_abs_diff(reflect(once).matrix(), op.matrix()) <= 1e-14);
      CHECK(max_abs_diff(once.marginal_a(), op.marginal_b()) < 1e-12);
      CHECK(max_abs_diff(once.marginal_b(), op.marginal_a()) < 1e-12);
    }
  }
}

TEST_CASE("reflection_identity_check") {
  Rng rng(402);
  for (auto dims : {BipartiteDims{2, 2}, BipartiteDims{3, 2}}) {
    const auto op = LocalDensityOperator::make(random_local_density_matrix(dims, rng), dims);
    const VerificationReport r = reflection_identity_check(op, 200, 7);
    CHECK(r.pass);
    CHECK(r.metric("max_residual") <= 1e-10);
    CHECK(r.metric("trials") == 200.0);
    REQUIRE(r.seed);
    CHECK(*r.seed == 7);
  }
  // Both sides at P = Q = I and on a product operator, by hand.
  const ComplexMatrix rho = random_density(2, rng);
  const ComplexMatrix sigma = random_density(2, rng);
  const auto product = LocalDensityOperator::make(tensor(rho, sigma), {2, 2});
  const auto reflected = reflect(product);
  CHECK(std::abs(product.expectation(ComplexMatrix::identity(2), ComplexMatrix::identity(2)) - 1.0) < 1e-14);
  CHECK(std::abs(reflected.expectation(ComplexMatrix::identity(2), ComplexMatrix::identity(2)) - 1.0) < 1e-14);
  const ComplexMatrix p = random_projector(2, 1, rng);
  const ComplexMatrix q = random_projector(2, 1, rng);
  const Complex expected = (rho * p).trace() * (sigma * q).trace();
  CHECK(std::abs(product.expectation(p, q) - expected) < 1e-14);
  CHECK(std::abs(reflected.expectation(q, p) - expected) < 1e-14);
}

TEST_CASE("joint_table") {
  Rng rng(403);
  SUBCASE("product operator factorizes") {
    const ComplexMatrix rho = random_density(2, rng);
    const ComplexMatrix sigma = random_density(3, rng);
    const auto op = LocalDensityOperator::make(tensor(rho, sigma), {2, 3});
    const JointTable t = joint_table(op, computational(2), computational(3));
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::abs(t.marginal_a[i] - rho(i, i).real()) < 1e-14);
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(t.joint(i, j) - rho(i, i) * sigma(j, j)) < 1e-14);
        REQUIRE(t.conditional[i][j]);
        CHECK(std::abs(*t.conditional[i][j] - sigma(j, j)) < 1e-12);
      }
    }
    CHECK(t.bayes_residual < 1e-12);
    CHECK(t.skipped_entries == 0);
  }
  SUBCASE("MH qubit with |0><0| and the identity channel") {
    const auto mh = DiracMeasureSpec::from_state_channel(MeasureFamily::kMargenauHill, ket0_projector(),
                                                         standard_channel(standard::Identity{2}));
    const JointTable t = joint_table(local_density_operator(mh), computational(2), computational(2));
    CHECK(std::abs(t.joint(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(t.joint(0, 1)) < 1e-15);
    CHECK(std::abs(t.joint(1, 0)) < 1e-15);
    CHECK(std::abs(t.joint(1, 1)) < 1e-15);
    CHECK_FALSE(t.conditional[1][0].has_value());
    CHECK(t.skipped_entries > 0);
  }
  SUBCASE("KD table is complex but its row sums are the real marginals") {
    const ComplexMatrix rho = random_density(2, rng);
    const auto kd = DiracMeasureSpec::from_state_channel(MeasureFamily::kKirkwoodDirac, rho, random_channel(2, 2, 2, rng));
    const auto op = local_density_operator(kd);
    const auto pb = random_pvm(2, {1, 1}, 11);
    const JointTable t = joint_table(op, computational(2), pb);
    double max_imag = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      Complex row(0.0);
      for (std::size_t j = 0; j < 2; ++j) {
        row += t.joint(i, j);
        max_imag = std::max(max_imag, std::abs(t.joint(i, j).imag()));
      }
      CHECK(std::abs(row - rho(i, i).real()) < 1e-12);
    }
    CHECK(max_imag > 1e-6);
    CHECK(t.marginal_residual < 1e-12);
    CHECK(t.bayes_residual < 1e-9);
  }
  SUBCASE("Bayes identity on random operators and PVMs") {
    for (int trial = 0; trial < 20; ++trial) {
      const BipartiteDims dims{2 + static_cast<std::size_t>(trial % 2), 3 - static_cast<std::size_t>(trial % 2)};
      const auto op = LocalDensityOperator::make(random_local_density_matrix(dims, rng), dims);
      const auto pa = random_pvm(dims.a, random_composition(dims.a, 1, rng), rng.next_u64());
      const auto pb = random_pvm(dims.b, random_composition(dims.b, 1, rng), rng.next_u64());
      const JointTable t = joint_table(op, pa, pb);
      CHECK(t.bayes_residual <= 1e-9);
      CHECK(t.marginal_residual <= 1e-12);
      Complex total(0.0);
      for (std::size_t i = 0; i < t.joint.rows(); ++i)
        for (std::size_t j = 0; j < t.joint.cols(); ++j) total += t.joint(i, j);
      CHECK(std::abs(total - 1.0) < 1e-12);
      for (std::size_t i = 0; i < t.joint.rows(); ++i)
        for (std::size_t j = 0; j < t.joint.cols(); ++j)
          CHECK(std::abs(t.reflected_joint(j, i) - t.joint(i, j)) < 1e-12);
    }
  }
  SUBCASE("density operators reproduce the classical Bayes rule") {
    const ComplexMatrix rho = random_density(6, rng);
    const auto op = LocalDensityOperator::make(rho, {2, 3});
    const auto pa = random_pvm(2, {1, 1}, 12);
    const auto pb = random_pvm(3, {1, 2}, 13);
    const JointTable t = joint_table(op, pa, pb);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        const Complex pij = t.joint(i, j);
        CHECK(std::abs(pij.imag()) < 1e-14);
        CHECK(pij.real() >= -1e-14);
        CHECK(pij.real() <= 1.0 + 1e-14);
        // Classical Bayes: P(j|i) P(i) = P(i|j) P(j).
        const Complex lhs = *t.conditional[i][j] * t.marginal_a[i];
        const Complex rhs = (pij / t.marginal_b[j]) * t.marginal_b[j];
        CHECK(std::abs(lhs - rhs) < 1e-12);
      }
    }
  }
  SUBCASE("non-PVM input") {
    const auto op = LocalDensityOperator::make(ComplexMatrix::identity(4) * 0.25, {2, 2});
    const std::vector<ComplexMatrix> bad = {ket0_projector(), ket_plus_projector()};
    CHECK_THROWS_AS(joint_table(op, bad, computational(2)), InputError);
    CHECK_THROWS_AS(joint_table(op, computational(3), computational(2)), InputError);
  }
}
