#pragma once

// Dense finite-dimensional quantum types. Natural units, hbar = 1.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace qmeas {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPositivityTolerance = 1e-9;

/// Orthonormal eigendecomposition of a Hermitian matrix, eigenvalues ascending.
struct Spectrum {
  RealVector eigenvalues;
  Matrix eigenvectors;  // columns
};

/// Dense Hermitian matrix: Hamiltonians and measured observables.
///
/// The spectral decomposition is computed once at construction; every
/// measurement operator f(A) in this library is evaluated through it.
class HermitianOperator {
 public:
  /// Throws ValidationError if dim < 2 or the input deviates from Hermitian by
  /// more than 1e-12. The stored matrix is exactly Hermitian.
  explicit HermitianOperator(const Matrix& entries);

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  const Spectrum& spectrum() const { return spectrum_; }

  double min_eigenvalue() const { return spectrum_.eigenvalues(0); }
  double max_eigenvalue() const { return spectrum_.eigenvalues(dim() - 1); }
  /// Largest |eigenvalue|.
  double spectral_norm() const;
  /// max eigenvalue - min eigenvalue.
  double spectral_spread() const { return max_eigenvalue() - min_eigenvalue(); }

  /// V diag(f(lambda)) V^dagger.
  Matrix apply(const std::function<Complex(double)>& f) const;

 private:
  Matrix matrix_;
  Spectrum spectrum_;
};

/// Arbitrary square complex matrix, e.g. the effective Hamiltonian H - i kappa (A - a)^2.
class NonHermitianOperator {
 public:
  explicit NonHermitianOperator(Matrix entries);

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }

 private:
  Matrix matrix_;
};

/// Pure state with the norm factored out: true vector = exp(log_norm) * amplitudes.
///
/// Unnormalized solutions of the complex-Hamiltonian equation decay like
/// exp(-kappa T); keeping the norm in log form means they never underflow.
class QuantumState {
 public:
  /// Normalizes `vector` and records log of its Euclidean norm. Zero or
  /// non-finite vectors are rejected.
  static QuantumState from_vector(const Vector& vector);
  /// `amplitudes` must already have unit norm (to 1e-10).
  QuantumState(Vector amplitudes, double log_norm);

  static QuantumState basis(Index dim, Index k);

  Index dim() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }
  double log_norm() const { return log_norm_; }

  /// |psi><psi| of the normalized amplitudes.
  Matrix projector() const;

 private:
  Vector amplitudes_;
  double log_norm_ = 0.0;
};

/// Positive semidefinite, unit-trace, Hermitian matrix.
class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-12), trace (1e-10) and the smallest eigenvalue
  /// against -positivity_tolerance. The stored matrix is exactly Hermitian.
  explicit DensityMatrix(const Matrix& entries,
                         double positivity_tolerance = kPositivityTolerance);

  static DensityMatrix pure(const QuantumState& state);
  static DensityMatrix maximally_mixed(Index dim);

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  Complex operator()(Index i, Index j) const { return matrix_(i, j); }

  double purity() const;

 private:
  Matrix matrix_;
};

// Named operators.
HermitianOperator pauli_x();
HermitianOperator pauli_y();
HermitianOperator pauli_z();
HermitianOperator identity_operator(Index dim);
HermitianOperator diagonal_operator(const std::vector<double>& values);

/// Largest |m_ij - conj(m_ji)|.
double hermiticity_defect(const Matrix& m);

/// <psi|A|psi> for the stored (normalized) amplitudes.
double expectation(const QuantumState& state, const HermitianOperator& obs);

/// exp(M t) by Pade scaling and squaring. Throws NumericalError on non-finite input.
NonHermitianOperator matrix_exponential(const NonHermitianOperator& m, double t);
Matrix matrix_exponential(const Matrix& m, double t);

/// Half the trace norm of r1 - r2.
double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2);

/// [A, [A, rho]] = A^2 rho - 2 A rho A + rho A^2.
Matrix double_commutator(const HermitianOperator& a, const DensityMatrix& rho);
Matrix double_commutator(const Matrix& a, const Matrix& rho);

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

}  // namespace qmeas
