// Scaling and squaring with diagonal Pade approximants of degree 3..13,
// following Higham, "The scaling and squaring method for the matrix
// exponential revisited" (SIAM J. Matrix Anal. Appl. 26, 2005).

#include <array>
#include <cmath>
#include <span>

#include "qmeas/error.hpp"
#include "qmeas/hilbert.hpp"

namespace qmeas {
namespace {

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Largest 1-norm for which the degree-m approximant is accurate to unit roundoff.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double one_norm(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

Matrix solve_pade(const Matrix& u, const Matrix& v) {
  Eigen::PartialPivLU<Matrix> lu(v - u);
  return lu.solve(v + u);
}

// Degrees 3..9: U = A * sum b_{2j+1} A^{2j}, V = sum b_{2j} A^{2j}.
Matrix pade_low(const Matrix& a, std::span<const double> b) {
  const Index n = a.rows();
  const Matrix a2 = a * a;
  Matrix power = Matrix::Identity(n, n);
  Matrix odd = Matrix::Zero(n, n);
  Matrix even = Matrix::Zero(n, n);
  for (std::size_t j = 0; 2 * j + 1 < b.size(); ++j) {
    odd += b[2 * j + 1] * power;
    even += b[2 * j] * power;
    power = power * a2;
  }
  return solve_pade(a * odd, even);
}

Matrix pade13(const Matrix& a) {
  const auto& b = kPade13;
  const Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                         b[3] * a2 + b[1] * id;
  const Matrix u = a * u_inner;
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                   b[2] * a2 + b[0] * id;
  return solve_pade(u, v);
}

}  // namespace

Matrix matrix_exponential(const Matrix& m, double t) {
  if (m.rows() != m.cols()) throw ValidationError("matrix_exponential: matrix must be square");
  if (!std::isfinite(t)) throw NumericalError("matrix_exponential: non-finite time");
  const Matrix a = m * t;
  if (!a.allFinite()) throw NumericalError("matrix_exponential: non-finite entries");

  const double norm = one_norm(a);
  if (norm <= kTheta3) return pade_low(a, kPade3);
  if (norm <= kTheta5) return pade_low(a, kPade5);
  if (norm <= kTheta7) return pade_low(a, kPade7);
  if (norm <= kTheta9) return pade_low(a, kPade9);

  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
  Matrix result = pade13(a * std::ldexp(1.0, -squarings));
  for (int k = 0; k < squarings; ++k) result = result * result;
  if (!result.allFinite()) throw NumericalError("matrix_exponential: overflow");
  return result;
}

NonHermitianOperator matrix_exponential(const NonHermitianOperator& m, double t) {
  return NonHermitianOperator(matrix_exponential(m.matrix(), t));
}

}  // namespace qmeas
