#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmeas/chain.hpp"
#include "qmeas/error.hpp"

using namespace qmeas;

namespace {

QuantumState born_state() {
  Vector v(2);
  v << 0.6, 0.8;
  return QuantumState::from_vector(v);
}

}  // namespace

TEST(FuzzyKraus, OutcomeOperatorClosedForm) {
  const FuzzyKraus k(diagonal_operator({1.0, 2.0}), 0.3);
  const Matrix r = k.outcome_operator(1.4);
  EXPECT_NEAR(r(0, 0).real(), std::exp(-0.3 * 0.16), 1e-15);
  EXPECT_NEAR(r(1, 1).real(), std::exp(-0.3 * 0.36), 1e-15);
  EXPECT_LT(k.completeness_defect(), 1e-10);
}

TEST(FuzzyKraus, GroupsDegenerateEigenvalues) {
  const FuzzyKraus k(diagonal_operator({1.0, 3.0, 1.0}), 0.5);
  ASSERT_EQ(k.eigenspaces().size(), 2u);
  EXPECT_EQ(k.eigenspaces()[0].basis.cols(), 2);
  EXPECT_NEAR(k.eigenspaces()[1].value, 3.0, 1e-14);
  EXPECT_THROW(FuzzyKraus(pauli_z(), 0.0), ValidationError);
}

TEST(FuzzyKraus, PopulationsAreBornWeights) {
  const FuzzyKraus k(diagonal_operator({1.0, 2.0}), 0.1);
  const auto p = eigenspace_populations(k, born_state());
  EXPECT_NEAR(p[0], 0.36, 1e-15);
  EXPECT_NEAR(p[1], 0.64, 1e-15);
}

TEST(FuzzyShot, DensityMatchesMixture) {
  const FuzzyKraus k(diagonal_operator({1.0, 2.0}), 0.4);
  CounterRng rng(5);
  const FuzzyShot shot = sample_fuzzy_shot(k, born_state(), rng);
  const double s = 0.4, a = shot.readout;
  const double oracle = std::sqrt(2 * s / std::numbers::pi) *
                        (0.36 * std::exp(-2 * s * (a - 1) * (a - 1)) + 0.64 * std::exp(-2 * s * (a - 2) * (a - 2)));
  EXPECT_NEAR(shot.density, oracle, 1e-14);
  EXPECT_NEAR(shot.state.amplitudes().norm(), 1.0, 1e-14);
}

TEST(DecoherenceChain, EigenstateCollapsedBeforeFirstShot) {
  const FuzzyKraus k(diagonal_operator({1.0, 2.0}), 0.1);
  const ChainOutcome out = run_decoherence_chain(k, QuantumState::basis(2, 1), 50, 1);
  ASSERT_TRUE(out.collapsed_to.has_value());
  EXPECT_EQ(*out.collapsed_to, 1u);
  EXPECT_TRUE(out.readouts.empty());
}

TEST(DecoherenceChain, CollapsesAndStops) {
  const FuzzyKraus k(diagonal_operator({1.0, 2.0}), 0.5);
  const ChainOutcome out = run_decoherence_chain(k, born_state(), 1000, 7);
  ASSERT_TRUE(out.collapsed_to.has_value());
  EXPECT_LT(out.readouts.size(), 1000u);
  EXPECT_EQ(out.populations.size(), out.readouts.size() + 1);
  EXPECT_GT(out.populations.back()[*out.collapsed_to], 1.0 - 1e-4);
}

TEST(DecoherenceChain, RejectsDegenerateSpectrum) {
  const FuzzyKraus k(diagonal_operator({1.0, 1.0, 2.0}), 0.5);
  EXPECT_THROW(run_decoherence_chain(k, QuantumState::basis(3, 0), 10, 1), ValidationError);
}

TEST(DecoherenceChain, CollapseFrequencyFollowsBorn) {
  const FuzzyKraus k(diagonal_operator({1.0, 2.0}), 0.2);
  const int n = 1000;
  int first = 0;
  for (int c = 0; c < n; ++c) {
    const ChainOutcome out = run_decoherence_chain(k, born_state(), 500, 100 + c);
    ASSERT_TRUE(out.collapsed_to.has_value());
    first += *out.collapsed_to == 0 ? 1 : 0;
  }
  EXPECT_NEAR(first / double(n), 0.36, 4.0 * std::sqrt(0.36 * 0.64 / n));
}

TEST(Ancilla, BranchOperatorsClosedForm) {
  const HermitianOperator a = diagonal_operator({-1.0, 0.5});
  const double g = std::numbers::pi / 4;
  const BranchOperators b = ancilla_branch_operators(g, a);
  for (int i = 0; i < 2; ++i) {
    const double x = g * a.spectrum().eigenvalues(i);
    EXPECT_NEAR(std::abs(b.m0(i, i)), std::abs(std::cos(x)), 1e-14);
    EXPECT_NEAR(std::abs(b.m1(i, i)), std::abs(std::sin(x)), 1e-14);
  }
  EXPECT_LT((b.m0.adjoint() * b.m0 + b.m1.adjoint() * b.m1 - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(Ancilla, ShotProbabilitiesSumToOne) {
  const auto branches = weak_ancilla_shot({0.1, 1}, pauli_z(), born_state());
  double total = 0.0;
  for (const auto& b : branches) total += b.probability;
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_THROW(weak_ancilla_shot({0.6, 1}, pauli_z(), born_state()), ValidationError);
}

TEST(Ancilla, PostSelectedLogOperator) {
  const HermitianOperator a = diagonal_operator({-1.0, 1.0, 2.0});
  const double g = 0.1;
  const std::size_t n = 50;
  const Matrix log_op = post_selected_log_operator({g, n}, a, 0).matrix();
  for (int i = 0; i < 3; ++i) {
    const double x = a.spectrum().eigenvalues(i);
    EXPECT_NEAR(-log_op(i, i).imag(), -double(n) * std::log(std::cos(g * x)), 1e-11);
  }
}

TEST(QuadraticFit, RecoversExactQuadratic) {
  const HermitianOperator a = diagonal_operator({-1.0, 1.0, 2.0});
  const double kappa = 0.37, center = 0.4, T = 3.0;
  const Matrix shifted = a.matrix() - center * Matrix::Identity(3, 3);
  const NonHermitianOperator op(Complex(0, -kappa * T) * shifted * shifted);
  const QuadraticFit fit = fit_effective_quadratic(op, a, T);
  EXPECT_NEAR(fit.kappa_eff, kappa, 1e-10);
  EXPECT_NEAR(fit.offset, center, 1e-9);
  EXPECT_LT(fit.residual, 1e-10);
}

TEST(QuadraticFit, TwoLevelIsAlwaysExact) {
  const QuadraticFit fit = fit_effective_quadratic(post_selected_log_operator({0.2, 30}, pauli_z(), 0), pauli_z(), 30);
  EXPECT_LT(fit.residual, 1e-12);
}
