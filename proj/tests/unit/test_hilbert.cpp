#include <gtest/gtest.h>

#include <cmath>

#include "qmeas/error.hpp"
#include "qmeas/hilbert.hpp"

using namespace qmeas;

TEST(HermitianOperator, RejectsNonHermitian) {
  Matrix m(2, 2);
  m << 1, 2, 0, -1;
  EXPECT_THROW(HermitianOperator{m}, ValidationError);
}

TEST(HermitianOperator, RejectsBadShapes) {
  EXPECT_THROW(HermitianOperator{Matrix::Zero(2, 3)}, ValidationError);
  EXPECT_THROW(HermitianOperator{Matrix::Ones(1, 1)}, ValidationError);
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::nan("");
  EXPECT_THROW(HermitianOperator{m}, ValidationError);
}

TEST(HermitianOperator, AcceptsRoundoffAndSymmetrizes) {
  Matrix m(2, 2);
  m << 1, Complex(0.5, 1e-14), 0.5, 2;
  const HermitianOperator h(m);
  EXPECT_EQ(hermiticity_defect(h.matrix()), 0.0);
}

TEST(HermitianOperator, PauliSpectra) {
  for (const HermitianOperator& p : {pauli_x(), pauli_y(), pauli_z()}) {
    EXPECT_NEAR(p.min_eigenvalue(), -1.0, 1e-14);
    EXPECT_NEAR(p.max_eigenvalue(), 1.0, 1e-14);
    EXPECT_NEAR(p.spectral_norm(), 1.0, 1e-14);
    EXPECT_NEAR(p.spectral_spread(), 2.0, 1e-14);
  }
}

TEST(HermitianOperator, ApplyReconstructsMatrix) {
  Matrix m(3, 3);
  m << 2, Complex(0, 1), 0, Complex(0, -1), 1, 0.5, 0, 0.5, -1;
  const HermitianOperator h(m);
  EXPECT_LT((h.apply([](double x) { return Complex(x, 0); }) - m).norm(), 1e-13);
  // f(x) = x^2 must agree with the matrix square.
  EXPECT_LT((h.apply([](double x) { return Complex(x * x, 0); }) - m * m).norm(), 1e-12);
}

TEST(QuantumState, FromVectorNormalizesAndKeepsLogNorm) {
  Vector v(2);
  v << 3, 4;
  const QuantumState s = QuantumState::from_vector(v);
  EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-15);
  EXPECT_NEAR(s.log_norm(), std::log(5.0), 1e-15);
}

TEST(QuantumState, RejectsUnnormalizedAmplitudes) {
  Vector v(2);
  v << 1, 1;
  EXPECT_THROW(QuantumState(v, 0.0), ValidationError);
  EXPECT_THROW(QuantumState::from_vector(Vector::Zero(2)), ValidationError);
}

TEST(DensityMatrix, ValidatesTraceAndPositivity) {
  Matrix m(2, 2);
  m << 0.5, 0, 0, 0.6;
  EXPECT_THROW(DensityMatrix{m}, ValidationError);
  m << 1.2, 0, 0, -0.2;
  EXPECT_THROW(DensityMatrix{m}, NumericalError);
  EXPECT_NEAR(DensityMatrix::maximally_mixed(4).purity(), 0.25, 1e-15);
}

TEST(TraceDistance, ClosedFormForPureStates) {
  Vector a(2), b(2);
  a << 1, 0;
  b << std::cos(0.3), Complex(0, std::sin(0.3));
  const double overlap = std::abs(a.dot(b));
  const double oracle = std::sqrt(1.0 - overlap * overlap);
  EXPECT_NEAR(trace_distance(DensityMatrix::pure(QuantumState::from_vector(a)),
                             DensityMatrix::pure(QuantumState::from_vector(b))),
              oracle, 1e-14);
  EXPECT_NEAR(trace_distance(DensityMatrix::pure(QuantumState::basis(2, 0)),
                              DensityMatrix::pure(QuantumState::basis(2, 1))),
              1.0, 1e-15);
}

TEST(Expectation, PauliOnBasisStates) {
  EXPECT_NEAR(expectation(QuantumState::basis(2, 0), pauli_z()), 1.0, 1e-15);
  EXPECT_NEAR(expectation(QuantumState::basis(2, 1), pauli_z()), -1.0, 1e-15);
  EXPECT_NEAR(expectation(QuantumState::basis(2, 0), pauli_x()), 0.0, 1e-15);
  EXPECT_THROW(expectation(QuantumState::basis(3, 0), pauli_z()), ValidationError);
}

TEST(DoubleCommutator, VanishesOnDiagonalState) {
  const DensityMatrix rho = DensityMatrix::pure(QuantumState::basis(2, 0));
  EXPECT_LT(double_commutator(pauli_z(), rho).norm(), 1e-15);
  // [sz, [sz, sx]] = 4 sx
  EXPECT_LT((double_commutator(pauli_z().matrix(), pauli_x().matrix()) - 4.0 * pauli_x().matrix()).norm(), 1e-14);
}
