#include <cmath>

#include "doctest.h"
#include "locrho/classify.hpp"
#include "locrho/error.hpp"
#include "locrho/linalg.hpp"
#include "locrho/random.hpp"
#include "test_util.hpp"

using namespace locrho;
using namespace locrho::testing;

namespace {

// Oracle for "rho is of canonical MH form with channel E": rebuild
// (1/2){rho_A (x) I, J[E]} directly and compare.
double canonical_form_residual(const LocalDensityOperator& op, const KrausChannel& e) {
  const ComplexMatrix ra = op.marginal_a();
  const ComplexMatrix rebuilt = anticommutator(tensor(ra, ComplexMatrix::identity(op.dims().b)), jamiolkowski(e)) * 0.5;
  return max_abs_diff(rebuilt, op.matrix());
}

ComplexMatrix nondegenerate_density(std::size_t d, Rng& rng) {
  for (;;) {
    const ComplexMatrix rho = random_density(d, rng);
    const auto ev = oracle_eigenvalues(rho);
    bool ok = true;
    for (std::size_t k = 1; k < ev.size(); ++k) ok = ok && ev[k] - ev[k - 1] > 1e-3;
    if (ok) return rho;
  }
}

}  // namespace

TEST_CASE("counterexample family fixture") {
  const double r5 = std::sqrt(5.0);
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const LocalDensityOperator f = counterexample_family(t);
    CHECK(std::abs(f.matrix().trace() - 1.0) <= 1e-12);
    CHECK(hermiticity_residual(f.matrix()) <= 1e-12);
    const ComplexMatrix expected = ComplexMatrix::from_rows({{1.0, r5}, {r5, 5.0}}) * ((1.0 - t) / 6.0) +
                                   ComplexMatrix::identity(2) * (t / 2.0);
    CHECK(max_abs_diff(f.marginal_a(), expected) <= 1e-12);
    CHECK(max_abs_diff(f.marginal_b(), expected) <= 1e-12);
    CHECK(max_abs_diff(counterexample_marginal(t), expected) <= 1e-15);
  }
  CHECK(max_abs_diff(counterexample_family(1.0).matrix(), ComplexMatrix::identity(4) * 0.25) < 1e-16);
  CHECK_THROWS_AS(counterexample_family(-0.1), DomainError);
  CHECK_THROWS_AS(counterexample_family(1.5), DomainError);

  const double lo = oracle_min_eigenvalue(counterexample_family(0.0).matrix());
  CHECK(lo < -1e-3);
  CHECK(std::abs(min_eigenvalue(counterexample_family(0.0).matrix()) - lo) < 1e-12);
}

TEST_CASE("classify examples") {
  SUBCASE("maximally mixed") {
    const ClassificationReport r = classify(ComplexMatrix::identity(4) * 0.25, {2, 2});
    CHECK(r.density);
    CHECK(r.local_density);
    CHECK(r.canonical_mh_form);
  }
  SUBCASE("family at t=0") {
    const ClassificationReport r = classify(counterexample_family(0.0).matrix(), {2, 2});
    CHECK(r.hermitian);
    CHECK(r.unit_trace);
    CHECK_FALSE(r.psd);
    CHECK_FALSE(r.density);
    CHECK(r.local_density);
    CHECK_FALSE(r.canonical_mh_form);
    CHECK(r.canonical_test_min_eigenvalue < -1e-3);
  }
  SUBCASE("generic KD operator") {
    Rng rng(501);
    const auto kd = DiracMeasureSpec::from_state_channel(MeasureFamily::kKirkwoodDirac, random_density(2, rng),
                                                         random_channel(2, 2, 2, rng));
    const ClassificationReport r = classify(local_density_operator(kd).matrix(), {2, 2});
    CHECK_FALSE(r.hermitian);
    CHECK(r.hermiticity_residual > 1e-3);
    CHECK(r.local_density);
    CHECK(std::isnan(r.min_eigenvalue));
    CHECK_FALSE(r.canonical_mh_form);
  }
  SUBCASE("not local-density") {
    const ClassificationReport r = classify(ComplexMatrix::identity(4), {2, 2});
    CHECK_FALSE(r.unit_trace);
    CHECK_FALSE(r.local_density);
    CHECK(r.basis_used == "not applicable");
  }
  SUBCASE("random densities") {
    Rng rng(502);
    for (int trial = 0; trial < 10; ++trial) {
      const ClassificationReport r = classify(random_density(6, rng), {3, 2});
      CHECK(r.density);
      CHECK(r.local_density);
      CHECK(r.psd);
    }
  }
  CHECK_THROWS_AS(classify(ComplexMatrix::identity(3), {2, 2}), DimensionError);
}

TEST_CASE("canonical-form test: soundness on MH operators") {
  Rng rng(503);
  for (auto dims : {BipartiteDims{2, 2}, BipartiteDims{2, 3}, BipartiteDims{3, 2}, BipartiteDims{3, 3}}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto spec = DiracMeasureSpec::from_state_channel(
          MeasureFamily::kMargenauHill, nondegenerate_density(dims.a, rng),
          random_channel(dims.a, dims.b, dims.a + trial % dims.b, rng));
      const LocalDensityOperator op = local_density_operator(spec);
      const CanonicalFormTest t = song_parzygnat_test(op);
      CHECK(t.verdict);
      CHECK_FALSE(t.basis_ambiguous);
      REQUIRE(t.channel);
      CHECK(canonical_form_residual(op, *t.channel) < 1e-9);
    }
  }
}

TEST_CASE("canonical-form test: special cases") {
  Rng rng(504);
  SUBCASE("product of densities is realized by discard-and-prepare") {
    const ComplexMatrix rho = nondegenerate_density(2, rng);
    const ComplexMatrix sigma = random_density(3, rng);
    const auto op = LocalDensityOperator::make(tensor(rho, sigma), {2, 3});
    const CanonicalFormTest t = song_parzygnat_test(op);
    CHECK(t.verdict);
    REQUIRE(t.channel);
    CHECK(is_discard_and_prepare(*t.channel, 1e-9));
    CHECK(canonical_form_residual(op, *t.channel) < 1e-10);
  }
  SUBCASE("singular marginal: pure input state") {
    const auto spec = DiracMeasureSpec::from_state_channel(MeasureFamily::kMargenauHill, random_pure_state(3, rng),
                                                           random_channel(3, 2, 2, rng));
    const LocalDensityOperator op = local_density_operator(spec);
    const CanonicalFormTest t = song_parzygnat_test(op);
    CHECK(t.singular_marginal);
    CHECK(t.verdict);
    REQUIRE(t.channel);
    CHECK(validate_cptp(*t.channel, 1e-9).pass);
    CHECK(canonical_form_residual(op, *t.channel) < 1e-9);
  }
  SUBCASE("weight outside the support of rho_A") {
    // rho_A = |0><0|, yet the kernel-kernel block |1><1| (x) X/10 is nonzero (it traces out).
    ComplexMatrix m = tensor(ket0_projector(), ComplexMatrix::identity(2) * 0.5);
    m(2, 3) = 0.1;
    m(3, 2) = 0.1;
    const CanonicalFormTest t = song_parzygnat_test(LocalDensityOperator::make(m, {2, 2}));
    CHECK_FALSE(t.verdict);
  }
  SUBCASE("degenerate spectrum is flagged, not fatal") {
    const CanonicalFormTest t = song_parzygnat_test(LocalDensityOperator::make(swap_operator(2, 2) * 0.5, {2, 2}));
    CHECK(t.basis_ambiguous);
    CHECK(t.verdict);
  }
  SUBCASE("override basis") {
    const auto op = counterexample_family(0.0);
    const CanonicalFormTest def = song_parzygnat_test(op);
    const CanonicalFormTest over = song_parzygnat_test(op, kDefaultTol, def.basis);
    CHECK(over.verdict == def.verdict);
    CHECK(std::abs(over.min_eigenvalue - def.min_eigenvalue) < 1e-12);
    CHECK_THROWS_AS(song_parzygnat_test(op, kDefaultTol, ComplexMatrix::identity(2)), DomainError);
    CHECK_THROWS_AS(song_parzygnat_test(op, kDefaultTol, ComplexMatrix::identity(2) * 2.0), DomainError);
  }
  SUBCASE("non-Hermitian input") {
    const auto kd = DiracMeasureSpec::from_state_channel(MeasureFamily::kKirkwoodDirac, nondegenerate_density(2, rng),
                                                         random_channel(2, 2, 2, rng));
    const CanonicalFormTest t = song_parzygnat_test(local_density_operator(kd));
    CHECK_FALSE(t.verdict);
    CHECK(std::isnan(t.min_eigenvalue));
  }
}

TEST_CASE("canonical-form test along the counterexample family") {
  // Small t: not of canonical form. The operator is not even PSD there, and
  // the test agrees.
  for (double t : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6}) {
    const CanonicalFormTest r = song_parzygnat_test(counterexample_family(t));
    CHECK_MESSAGE(!r.verdict, "t = " << t);
    CHECK(r.min_eigenvalue < 0.0);
  }
  // From t = 0.7 on the operator is realizable: the test returns a channel and
  // the independent rebuild reproduces the operator exactly.
  for (double t : {0.7, 0.8, 0.9, 1.0}) {
    const LocalDensityOperator op = counterexample_family(t);
    const CanonicalFormTest r = song_parzygnat_test(op);
    CHECK_MESSAGE(r.verdict, "t = " << t);
    REQUIRE(r.channel);
    CHECK(validate_cptp(*r.channel, 1e-9).pass);
    CHECK(canonical_form_residual(op, *r.channel) < 1e-12);
  }
}
