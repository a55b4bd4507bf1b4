#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "qmeas/error.hpp"
#include "qmeas/hilbert.hpp"

using namespace qmeas;

namespace {

Matrix random_matrix(Index n, std::mt19937_64& gen, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(d(gen), d(gen));
  return m;
}

// exp(t M) through a complex eigendecomposition; fine for diagonalizable M.
Matrix eigen_oracle(const Matrix& m, double t) {
  Eigen::ComplexEigenSolver<Matrix> es(m);
  const Matrix& v = es.eigenvectors();
  Vector d = (t * es.eigenvalues().array()).exp().matrix();
  return v * d.asDiagonal() * v.inverse();
}

double rel_err(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(MatrixExponential, ZeroAndIdentity) {
  EXPECT_LT((matrix_exponential(Matrix::Zero(3, 3), 1.0) - Matrix::Identity(3, 3)).norm(), 1e-15);
  EXPECT_NEAR(matrix_exponential(Matrix::Identity(2, 2), 1.0)(0, 0).real(), std::exp(1.0), 1e-14);
}

TEST(MatrixExponential, NilpotentClosedForm) {
  Matrix n = Matrix::Zero(3, 3);
  n(0, 1) = 1;
  n(1, 2) = 1;
  Matrix oracle = Matrix::Identity(3, 3) + 2.0 * n + 2.0 * n * n;
  EXPECT_LT((matrix_exponential(n, 2.0) - oracle).norm(), 1e-14);
}

TEST(MatrixExponential, PauliRotationClosedForm) {
  const double t = 0.7;
  const Matrix u = matrix_exponential(Complex(0, -1) * pauli_x().matrix(), t);
  Matrix oracle(2, 2);
  oracle << std::cos(t), Complex(0, -std::sin(t)), Complex(0, -std::sin(t)), std::cos(t);
  EXPECT_LT((u - oracle).norm(), 1e-15);
}

TEST(MatrixExponential, UnitaryFromHermitian) {
  std::mt19937_64 gen(3);
  const Matrix m = random_matrix(6, gen, 1.0);
  const Matrix h = 0.5 * (m + m.adjoint());
  const Matrix u = matrix_exponential(Complex(0, -1) * h, 2.5);
  EXPECT_LT((u.adjoint() * u - Matrix::Identity(6, 6)).norm(), 1e-13);
  EXPECT_LT(rel_err(u, eigen_oracle(Complex(0, -1) * h, 2.5)), 1e-13);
}

class ExpmAcrossNorms : public ::testing::TestWithParam<double> {};

TEST_P(ExpmAcrossNorms, MatchesEigenOracle) {
  // Norms span every Pade degree and the scaling-and-squaring branch.
  std::mt19937_64 gen(11);
  const Matrix m = random_matrix(5, gen, GetParam());
  EXPECT_LT(rel_err(matrix_exponential(m, 1.0), eigen_oracle(m, 1.0)), 1e-11) << "scale " << GetParam();
}

INSTANTIATE_TEST_SUITE_P(Norms, ExpmAcrossNorms, ::testing::Values(1e-4, 0.01, 0.1, 0.3, 1.0, 3.0, 10.0));

TEST(MatrixExponential, SemigroupProperty) {
  std::mt19937_64 gen(5);
  const Matrix m = random_matrix(4, gen, 1.5);
  const Matrix whole = matrix_exponential(m, 1.0);
  const Matrix half = matrix_exponential(m, 0.5);
  EXPECT_LT(rel_err(half * half, whole), 1e-12);
}

TEST(MatrixExponential, RejectsNonFinite) {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(matrix_exponential(m, 1.0), NumericalError);
  EXPECT_THROW(matrix_exponential(Matrix::Identity(2, 2) * 1e6, 1.0), NumericalError);
}
