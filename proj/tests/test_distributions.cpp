#include <cmath>

#include "doctest.h"
#include "locrho/distributions.hpp"
#include "locrho/error.hpp"
#include "locrho/linalg.hpp"
#include "locrho/random.hpp"
#include "test_util.hpp"

using namespace locrho;
using namespace locrho::testing;

namespace {

const MeasureFamily kStateFamilies[] = {MeasureFamily::kKirkwoodDirac, MeasureFamily::kLeiferSpekkens,
                                        MeasureFamily::kMargenauHill};

ComplexMatrix ket_plus_i_projector() {
  return ComplexMatrix::from_rows({{0.5, Complex(0, -0.5)}, {Complex(0, 0.5), 0.5}});
}

DiracMeasureSpec random_spec(MeasureFamily f, std::size_t da, std::size_t db, Rng& rng) {
  return DiracMeasureSpec::from_state_channel(f, random_density(da, rng), random_channel(da, db, 2, rng));
}

}  // namespace

TEST_CASE("LocalDensityOperator::make enforces the invariants") {
  CHECK_NOTHROW(LocalDensityOperator::make(ComplexMatrix::identity(4) * 0.25, {2, 2}));
  CHECK_THROWS_AS(LocalDensityOperator::make(ComplexMatrix::identity(4), {2, 2}), DomainError);
  // Unit trace but marginal A = diag(1.5, -0.5).
  const double d[] = {0.75, 0.75, -0.25, -0.25};
  CHECK_THROWS_AS(LocalDensityOperator::make(ComplexMatrix::diagonal(std::span<const double>(d)), {2, 2}), DomainError);
  CHECK_FALSE(local_density_violations(ComplexMatrix::diagonal(std::span<const double>(d)), {2, 2}, 1e-9).empty());
  // Non-Hermitian operators are allowed as long as the marginals are states.
  const KrausChannel id = standard_channel(standard::Identity{2});
  const auto kd = DiracMeasureSpec::from_state_channel(MeasureFamily::kKirkwoodDirac, ket_plus_projector(), id);
  CHECK_NOTHROW(local_density_operator(kd));
}

TEST_CASE("DiracMeasureSpec validation") {
  const KrausChannel id = standard_channel(standard::Identity{2});
  CHECK_THROWS_AS(DiracMeasureSpec::from_state_channel(MeasureFamily::kMargenauHill, pauli_z(), id), DomainError);
  const KrausChannel transpose = KrausChannel::from_choi(swap_operator(2, 2), 2, 2, false);
  CHECK_THROWS_AS(DiracMeasureSpec::from_state_channel(MeasureFamily::kMargenauHill, ket0_projector(), transpose),
                  DomainError);
  CHECK(parse_family("kd") == MeasureFamily::kKirkwoodDirac);
  CHECK(parse_family("lvn") == MeasureFamily::kLudersVonNeumann);
  CHECK_THROWS_AS(parse_family("xyz"), InputError);
  const auto lvn = DiracMeasureSpec::from_state_channel(MeasureFamily::kLudersVonNeumann, ket0_projector(), id);
  CHECK_FALSE(lvn.guaranteed_dirac());
}

TEST_CASE("measure_eval examples") {
  const KrausChannel id = standard_channel(standard::Identity{2});
  const auto kd = DiracMeasureSpec::from_state_channel(MeasureFamily::kKirkwoodDirac, ket0_projector(), id);
  const Complex v = measure_eval(kd, ket_plus_projector(), ket_plus_i_projector());
  // Oracle: Tr[rho P Q] by plain matrix products.
  const Complex oracle = (ket0_projector() * ket_plus_projector() * ket_plus_i_projector()).trace();
  CHECK(std::abs(v - Complex(0.25, 0.25)) < 1e-15);
  CHECK(std::abs(v - oracle) < 1e-15);

  const auto lvn = DiracMeasureSpec::from_state_channel(MeasureFamily::kLudersVonNeumann, ket0_projector(), id);
  CHECK(std::abs(measure_eval(lvn, ket_plus_projector(), ket0_projector()) - 0.25) < 1e-15);

  Rng rng(201);
  for (MeasureFamily f : {MeasureFamily::kKirkwoodDirac, MeasureFamily::kLeiferSpekkens, MeasureFamily::kMargenauHill,
                          MeasureFamily::kLudersVonNeumann}) {
    const auto spec = random_spec(f, 3, 2, rng);
    CHECK(std::abs(measure_eval(spec, ComplexMatrix::identity(3), ComplexMatrix::identity(2)) - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(measure_eval(kd, pauli_x(), ket0_projector()), InputError);
  CHECK_THROWS_AS(measure_eval(kd, ComplexMatrix::identity(3), ket0_projector()), DimensionError);
}

TEST_CASE("local_density_operator examples") {
  const KrausChannel id = standard_channel(standard::Identity{2});
  const ComplexMatrix half = ComplexMatrix::identity(2) * 0.5;
  const auto mh = DiracMeasureSpec::from_state_channel(MeasureFamily::kMargenauHill, half, id);
  CHECK(max_abs_diff(local_density_operator(mh).matrix(), swap_operator(2, 2) * 0.5) < 1e-15);

  const auto ls = DiracMeasureSpec::from_state_channel(MeasureFamily::kLeiferSpekkens, ket0_projector(), id);
  CHECK(max_abs_diff(local_density_operator(ls).matrix(), ComplexMatrix::ket_bra(4, 0, 0)) < 1e-14);

  Rng rng(202);
  const ComplexMatrix rho = random_density(2, rng);
  const ComplexMatrix sigma = random_density(3, rng);
  const KrausChannel prep = standard_channel(standard::DiscardAndPrepare{2, sigma});
  for (MeasureFamily f : kStateFamilies) {
    const auto spec = DiracMeasureSpec::from_state_channel(f, rho, prep);
    CHECK(max_abs_diff(local_density_operator(spec).matrix(), tensor(rho, sigma)) < 1e-12);
  }
  const auto lvn_prep = DiracMeasureSpec::from_state_channel(MeasureFamily::kLudersVonNeumann, rho, prep);
  CHECK(max_abs_diff(local_density_operator(lvn_prep).matrix(), tensor(rho, sigma)) < 1e-12);

  const KrausChannel e = random_channel(2, 2, 2, rng);
  const auto lvn_mixed = DiracMeasureSpec::from_state_channel(MeasureFamily::kLudersVonNeumann, half, e);
  CHECK(max_abs_diff(local_density_operator(lvn_mixed).matrix(), jamiolkowski(e) * 0.5) < 1e-14);

  const auto lvn_bad = DiracMeasureSpec::from_state_channel(MeasureFamily::kLudersVonNeumann, ket0_projector(), id);
  CHECK_FALSE(admits_operator(lvn_bad));
  CHECK_THROWS_AS(local_density_operator(lvn_bad), DomainError);
}

TEST_CASE("operator/formula agreement, marginals and Hermiticity") {
  Rng rng(203);
  for (auto dims : {BipartiteDims{2, 2}, BipartiteDims{2, 3}, BipartiteDims{3, 2}}) {
    for (MeasureFamily f : kStateFamilies) {
      for (int trial = 0; trial < 5; ++trial) {
        const auto spec = random_spec(f, dims.a, dims.b, rng);
        const LocalDensityOperator op = local_density_operator(spec);
        CHECK(max_abs_diff(op.marginal_a(), *spec.rho()) < 1e-10);
        CHECK(max_abs_diff(op.marginal_b(), apply(*spec.channel(), *spec.rho())) < 1e-10);
        if (f != MeasureFamily::kKirkwoodDirac) CHECK(hermiticity_residual(op.matrix()) < 1e-10);
        for (int k = 0; k < 5; ++k) {
          const ComplexMatrix p = random_projector_any_rank(dims.a, rng);
          const ComplexMatrix q = random_projector_any_rank(dims.b, rng);
          CHECK(std::abs(measure_eval(spec, p, q) - op.expectation(p, q)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("KD is not Hermitian in general; MH is its real part; LS is positive") {
  const KrausChannel id = standard_channel(standard::Identity{2});
  const auto kd = DiracMeasureSpec::from_state_channel(MeasureFamily::kKirkwoodDirac, ket_plus_projector(), id);
  CHECK(hermiticity_residual(local_density_operator(kd).matrix()) > 1e-3);

  Rng rng(204);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix rho = random_density(3, rng);
    const KrausChannel e = random_channel(3, 3, 2, rng);
    const auto skd = DiracMeasureSpec::from_state_channel(MeasureFamily::kKirkwoodDirac, rho, e);
    const auto smh = DiracMeasureSpec::from_state_channel(MeasureFamily::kMargenauHill, rho, e);
    const auto sls = DiracMeasureSpec::from_state_channel(MeasureFamily::kLeiferSpekkens, rho, e);
    for (int k = 0; k < 10; ++k) {
      const ComplexMatrix p = random_projector_any_rank(3, rng);
      const ComplexMatrix q = random_projector_any_rank(3, rng);
      const Complex vmh = measure_eval(smh, p, q);
      CHECK(std::abs(vmh - measure_eval(skd, p, q).real()) < 1e-12);
      const Complex vls = measure_eval(sls, p, q);
      CHECK(std::abs(vls.imag()) < 1e-12);
      CHECK(vls.real() >= -1e-9);
    }
  }
}

TEST_CASE("Observable grouping") {
  const Observable z = Observable::make(pauli_z());
  REQUIRE(z.spectrum().size() == 2);
  const double d[] = {1.0, 1.0, -2.0};
  const Observable deg = Observable::make(ComplexMatrix::diagonal(std::span<const double>(d)));
  REQUIRE(deg.spectrum().size() == 2);
  ComplexMatrix sum(3, 3);
  ComplexMatrix recon(3, 3);
  for (const SpectralTerm& t : deg.spectrum()) {
    CHECK(is_projector(t.projector));
    sum += t.projector;
    recon += t.projector * t.value;
  }
  CHECK(max_abs_diff(sum, ComplexMatrix::identity(3)) < 1e-12);
  CHECK(max_abs_diff(recon, deg.matrix()) < 1e-12);
  CHECK(std::abs(deg.spectrum()[0].projector.trace() - 2.0) < 1e-12);
  CHECK_THROWS_AS(Observable::make(ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})), DomainError);

  Rng rng(205);
  const auto refined = refine_spectrum(deg.spectrum(), rng);
  CHECK(refined.size() == 3);
  for (const SpectralTerm& t : refined) CHECK(std::abs(t.projector.trace() - 1.0) < 1e-12);
}

TEST_CASE("correlation") {
  const KrausChannel id = standard_channel(standard::Identity{2});
  const Observable ia = Observable::make(ComplexMatrix::identity(2));
  Rng rng(206);
  for (MeasureFamily f : kStateFamilies) {
    const auto spec = random_spec(f, 2, 2, rng);
    CHECK(std::abs(correlation(spec, ia, ia, CorrelationMode::kSpectral) - 1.0) < 1e-12);
    CHECK(std::abs(correlation(spec, ia, ia, CorrelationMode::kTrace) - 1.0) < 1e-12);
  }

  SUBCASE("product operator factorizes") {
    const ComplexMatrix ra = random_density(2, rng);
    const ComplexMatrix rb = random_density(3, rng);
    const auto spec = DiracMeasureSpec::from_operator(LocalDensityOperator::make(tensor(ra, rb), {2, 3}));
    const ComplexMatrix oa = random_hermitian(2, rng);
    const ComplexMatrix ob = random_hermitian(3, rng);
    const Complex expected = (ra * oa).trace() * (rb * ob).trace();
    for (auto mode : {CorrelationMode::kSpectral, CorrelationMode::kTrace}) {
      CHECK(std::abs(correlation(spec, Observable::make(oa), Observable::make(ob), mode) - expected) < 1e-12);
    }
  }

  SUBCASE("KD with rho=|0><0|, identity, sigma_x, sigma_z") {
    const auto kd = DiracMeasureSpec::from_state_channel(MeasureFamily::kKirkwoodDirac, ket0_projector(), id);
    // sigma_x sigma_z = -i sigma_y, whose |0> expectation vanishes: the value is 0.
    const Complex oracle = (ket0_projector() * pauli_x() * pauli_z()).trace();
    CHECK(oracle == Complex(0.0));
    const Observable x = Observable::make(pauli_x());
    const Observable z = Observable::make(pauli_z());
    CHECK(std::abs(correlation(kd, x, z, CorrelationMode::kSpectral) - oracle) < 1e-14);
    CHECK(std::abs(correlation(kd, x, z, CorrelationMode::kTrace) - oracle) < 1e-14);

    // On |+i> the same product has expectation -i.
    const auto kdi = DiracMeasureSpec::from_state_channel(MeasureFamily::kKirkwoodDirac, ket_plus_i_projector(), id);
    const Complex oracle_i = (ket_plus_i_projector() * pauli_x() * pauli_z()).trace();
    CHECK(std::abs(oracle_i - Complex(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(correlation(kdi, x, z, CorrelationMode::kSpectral) - oracle_i) < 1e-14);
    CHECK(std::abs(correlation(kdi, x, z, CorrelationMode::kTrace) - oracle_i) < 1e-14);
  }

  SUBCASE("bilinearity") {
    for (MeasureFamily f : kStateFamilies) {
      const auto spec = random_spec(f, 2, 3, rng);
      const ComplexMatrix a1 = random_hermitian(2, rng);
      const ComplexMatrix a2 = random_hermitian(2, rng);
      const ComplexMatrix b = random_hermitian(3, rng);
      const double s = 1.7;
      const auto c = [&](const ComplexMatrix& oa, const ComplexMatrix& ob) {
        return correlation(spec, Observable::make(oa), Observable::make(ob), CorrelationMode::kSpectral);
      };
      CHECK(std::abs(c(a1 + a2, b) - c(a1, b) - c(a2, b)) < 1e-9);
      CHECK(std::abs(c(a1 * s, b) - s * c(a1, b)) < 1e-9);
      CHECK(std::abs(c(a1, b * s) - s * c(a1, b)) < 1e-9);
    }
  }

  SUBCASE("LvN outside the admissible cases has no trace mode") {
    const auto lvn = DiracMeasureSpec::from_state_channel(MeasureFamily::kLudersVonNeumann, ket0_projector(), id);
    CHECK_THROWS_AS(correlation(lvn, ia, ia, CorrelationMode::kTrace), DomainError);
  }
}

TEST_CASE("ensemble_decomposition") {
  const double d[] = {0.2, 0.5, 0.3};
  const ComplexMatrix rho = ComplexMatrix::diagonal(std::span<const double>(d));
  std::vector<ComplexMatrix> comp;
  for (std::size_t i = 0; i < 3; ++i) comp.push_back(ComplexMatrix::ket_bra(3, i, i));
  const auto branches = ensemble_decomposition(rho, comp);
  REQUIRE(branches.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(branches[i].probability - d[i]) < 1e-15);
    REQUIRE(branches[i].state);
    CHECK(max_abs_diff(*branches[i].state, comp[i]) < 1e-15);
  }

  const std::vector<ComplexMatrix> z = {ket0_projector(), ket1_projector()};
  const auto plus = ensemble_decomposition(ket_plus_projector(), z);
  CHECK(std::abs(plus[0].probability - 0.5) < 1e-15);
  CHECK(std::abs(plus[1].probability - 0.5) < 1e-15);
  CHECK(max_abs_diff(*plus[0].state, ket0_projector()) < 1e-15);
  CHECK(max_abs_diff(*plus[1].state, ket1_projector()) < 1e-15);

  const std::vector<ComplexMatrix> trivial = {ComplexMatrix::identity(2)};
  const auto one = ensemble_decomposition(ket_plus_projector(), trivial);
  REQUIRE(one.size() == 1);
  CHECK(one[0].probability == doctest::Approx(1.0));
  CHECK(max_abs_diff(*one[0].state, ket_plus_projector()) < 1e-15);

  const auto zero = ensemble_decomposition(ket0_projector(), z);
  CHECK_FALSE(zero[1].state.has_value());

  const std::vector<ComplexMatrix> bad = {ket0_projector(), ket_plus_projector()};
  CHECK_THROWS_AS(ensemble_decomposition(ket0_projector(), bad), InputError);
}
