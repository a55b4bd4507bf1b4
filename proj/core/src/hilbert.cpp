#include "qmeas/hilbert.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qmeas/error.hpp"

namespace qmeas {
namespace {

bool all_finite(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": matrix must be square, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
}

Spectrum decompose(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(const Matrix& entries) {
  require_square(entries, "HermitianOperator");
  if (entries.rows() < 2) throw ValidationError("HermitianOperator: dim must be >= 2");
  if (!all_finite(entries)) throw ValidationError("HermitianOperator: non-finite entries");
  const double defect = hermiticity_defect(entries);
  if (defect > kHermitianTolerance) {
    std::ostringstream os;
    os << "HermitianOperator: not Hermitian (max |m_ij - conj(m_ji)| = " << defect << ")";
    throw ValidationError(os.str());
  }
  matrix_ = 0.5 * (entries + entries.adjoint());
  spectrum_ = decompose(matrix_);
}

double HermitianOperator::spectral_norm() const {
  return std::max(std::abs(min_eigenvalue()), std::abs(max_eigenvalue()));
}

Matrix HermitianOperator::apply(const std::function<Complex(double)>& f) const {
  const auto& v = spectrum_.eigenvectors;
  Vector d(dim());
  for (Index k = 0; k < dim(); ++k) d(k) = f(spectrum_.eigenvalues(k));
  return v * d.asDiagonal() * v.adjoint();
}

NonHermitianOperator::NonHermitianOperator(Matrix entries) : matrix_(std::move(entries)) {
  require_square(matrix_, "NonHermitianOperator");
  if (matrix_.rows() < 2) throw ValidationError("NonHermitianOperator: dim must be >= 2");
}

QuantumState QuantumState::from_vector(const Vector& vector) {
  if (vector.size() < 1) throw ValidationError("QuantumState: empty vector");
  const double norm = vector.norm();
  if (!std::isfinite(norm)) throw NumericalError("QuantumState: non-finite amplitudes");
  if (norm == 0.0) throw ValidationError("QuantumState: zero vector");
  return QuantumState(vector / norm, std::log(norm));
}

QuantumState::QuantumState(Vector amplitudes, double log_norm)
    : amplitudes_(std::move(amplitudes)), log_norm_(log_norm) {
  const double norm = amplitudes_.norm();
  if (!std::isfinite(norm) || !std::isfinite(log_norm_))
    throw NumericalError("QuantumState: non-finite amplitudes or log_norm");
  if (std::abs(norm - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "QuantumState: stored amplitudes must have unit norm, got " << norm;
    throw ValidationError(os.str());
  }
}

QuantumState QuantumState::basis(Index dim, Index k) {
  if (k < 0 || k >= dim) throw ValidationError("QuantumState::basis: index out of range");
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return QuantumState(std::move(v), 0.0);
}

Matrix QuantumState::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

DensityMatrix::DensityMatrix(const Matrix& entries, double positivity_tolerance) {
  require_square(entries, "DensityMatrix");
  if (entries.rows() < 1) throw ValidationError("DensityMatrix: empty matrix");
  if (!all_finite(entries)) throw NumericalError("DensityMatrix: non-finite entries");
  const double defect = hermiticity_defect(entries);
  if (defect > kHermitianTolerance) {
    std::ostringstream os;
    os << "DensityMatrix: not Hermitian (defect " << defect << ")";
    throw ValidationError(os.str());
  }
  matrix_ = 0.5 * (entries + entries.adjoint());
  const double trace = matrix_.trace().real();
  if (std::abs(trace - 1.0) > kTraceTolerance) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << trace << " differs from 1";
    throw ValidationError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
  const double smallest = solver.eigenvalues()(0);
  if (smallest < -positivity_tolerance) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << smallest;
    throw NumericalError(os.str());
  }
}

DensityMatrix DensityMatrix::pure(const QuantumState& state) {
  return DensityMatrix(state.projector());
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

HermitianOperator pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianOperator(m);
}

HermitianOperator pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return HermitianOperator(m);
}

HermitianOperator pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianOperator(m);
}

HermitianOperator identity_operator(Index dim) {
  return HermitianOperator(Matrix::Identity(dim, dim));
}

HermitianOperator diagonal_operator(const std::vector<double>& values) {
  Matrix m = Matrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) m(static_cast<Index>(k), static_cast<Index>(k)) = values[k];
  return HermitianOperator(m);
}

double expectation(const QuantumState& state, const HermitianOperator& obs) {
  if (state.dim() != obs.dim()) throw ValidationError("expectation: dimension mismatch");
  const Complex value = state.amplitudes().dot(obs.matrix() * state.amplitudes());
  if (std::abs(value.imag()) > 1e-9) {
    std::ostringstream os;
    os << "expectation: imaginary part " << value.imag() << " (operator not Hermitian?)";
    throw ValidationError(os.str());
  }
  return value.real();
}

double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2) {
  if (r1.dim() != r2.dim()) throw ValidationError("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(r1.matrix() - r2.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

Matrix double_commutator(const Matrix& a, const Matrix& rho) {
  if (a.rows() != rho.rows() || a.cols() != rho.cols())
    throw ValidationError("double_commutator: dimension mismatch");
  const Matrix inner = a * rho - rho * a;
  return a * inner - inner * a;
}

Matrix double_commutator(const HermitianOperator& a, const DensityMatrix& rho) {
  return double_commutator(a.matrix(), rho.matrix());
}

}  // namespace qmeas
