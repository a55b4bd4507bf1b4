#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qmeas/error.hpp"
#include "qmeas/lindblad.hpp"

using namespace qmeas;

namespace {

DensityMatrix plus_state() {
  Matrix rho(2, 2);
  rho << 0.5, 0.5, 0.5, 0.5;
  return DensityMatrix(rho);
}

}  // namespace

TEST(Lindblad, PureDephasingClosedForm) {
  // H = 0, A = sz: rho01(t) = rho01(0) exp(-2 kappa t).
  const double kappa = 0.8;
  const LindbladModel model(HermitianOperator(Matrix::Zero(2, 2)), pauli_z(), kappa);
  const TimeGrid grid(0.0, 0.01, 150);
  const LindbladTrajectory run = integrate_lindblad(model, plus_state(), grid);
  for (std::size_t k = 0; k <= grid.n_steps(); k += 30)
    EXPECT_NEAR(run.states[k](0, 1).real(), 0.5 * std::exp(-2.0 * kappa * grid.time(k)), 1e-9);
  EXPECT_NEAR(run.states.back()(0, 0).real(), 0.5, 1e-14);
}

TEST(Lindblad, WeakMeasurementReducesToRabiFlopping) {
  const LindbladModel model(pauli_x(), pauli_z(), 1e-12);
  const TimeGrid grid(0.0, 0.01, 100);
  const LindbladTrajectory run = integrate_lindblad(model, DensityMatrix::pure(QuantumState::basis(2, 0)), grid);
  EXPECT_NEAR(run.states.back()(1, 1).real(), std::pow(std::sin(1.0), 2), 1e-8);
}

TEST(Lindblad, TraceAndHermiticityPreserved) {
  Matrix h(3, 3);
  h << 0, 1, 0, 1, 0.5, Complex(0, 1), 0, Complex(0, -1), -1;
  const LindbladModel model(HermitianOperator(h), diagonal_operator({0, 1, 3}), 2.0);
  const LindbladTrajectory run =
      integrate_lindblad(model, DensityMatrix::pure(QuantumState::basis(3, 2)), TimeGrid(0.0, 0.002, 500));
  EXPECT_LT(run.max_trace_drift, 1e-10);
  EXPECT_LT(run.max_hermiticity_defect, 1e-12);
  for (const DensityMatrix& rho : run.states) EXPECT_LE(rho.purity(), 1.0 + 1e-12);
}

TEST(Lindblad, CommutingHamiltonianConservesPopulations) {
  const LindbladModel model(diagonal_operator({1.0, -1.0}), pauli_z(), 3.0);
  const LindbladTrajectory run = integrate_lindblad(model, plus_state(), TimeGrid(0.0, 0.01, 100));
  EXPECT_NEAR(run.states.back()(0, 0).real(), 0.5, 1e-14);
}

TEST(Lindblad, RhsMatchesDoubleCommutatorForm) {
  const LindbladModel model(pauli_x(), pauli_z(), 0.5);
  const DensityMatrix rho = plus_state();
  const Matrix expected = Complex(0, -1) * commutator(pauli_x().matrix(), rho.matrix()) -
                          0.25 * double_commutator(pauli_z().matrix(), rho.matrix());
  EXPECT_LT((lindblad_rhs(model, rho) - expected).norm(), 1e-15);
}

TEST(Lindblad, CoarseStepIsDiagnosed) {
  const LindbladModel model(pauli_x(), pauli_z(), 50.0);
  EXPECT_THROW(integrate_lindblad(model, plus_state(), TimeGrid(0.0, 0.5, 4)), NumericalError);
}

TEST(Lindblad, KappaFromPhysicalParameters) {
  EXPECT_NEAR(kappa_from_brownian(0.5, 3.0), 3.0, 1e-15);
  EXPECT_NEAR(kappa_from_atoms(2.0, 0.25), 2.0, 1e-15);
  EXPECT_THROW(kappa_from_brownian(-1.0, 1.0), ValidationError);
}

TEST(Lindblad, CsvLayout) {
  const LindbladModel model(pauli_x(), pauli_z(), 0.5);
  const TimeGrid grid(0.0, 0.1, 2);
  const LindbladTrajectory run = integrate_lindblad(model, plus_state(), grid);
  std::ostringstream os;
  write_density_csv(os, grid, run.states);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,re_0_0,im_0_0,re_0_1,im_0_1,re_1_0,im_1_0,re_1_1,im_1_1");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}
