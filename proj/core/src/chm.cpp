#include "qmeas/chm.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "qmeas/csv.hpp"
#include "qmeas/error.hpp"

namespace qmeas {
namespace {

Matrix generator(const MonitoringModel& model, double a) {
  const Matrix shifted =
      model.A.matrix() - a * Matrix::Identity(model.A.dim(), model.A.dim());
  return Complex(0, -1) * model.H.matrix() - model.kappa * (shifted * shifted);
}

void check_resolution(const MonitoringModel& model, double a, double h, std::size_t step) {
  const double reach = model.A.spectral_norm() + std::abs(a);
  if (model.kappa * reach * reach * h > 0.5) {
    std::ostringstream os;
    os << "propagate_chm: step " << step << " has kappa (|A| + |a|)^2 dt = "
       << model.kappa * reach * reach * h << " > 0.5 (readout " << a
       << "); refine the grid or raise substeps";
    throw ValidationError(os.str());
  }
}

int checked_substeps(const ChmOptions& options) {
  if (options.substeps < 1) throw ValidationError("ChmOptions: substeps must be >= 1");
  return options.substeps;
}

// Channel kernel in the eigenbasis of A: K_mn = sum_k w_k r_m(a_k) r_n(a_k).
Matrix channel_kernel(const MonitoringModel& model, double dt, int quad_order) {
  const RealVector& lambda = model.A.spectrum().eigenvalues;
  const double center = 0.5 * (model.A.min_eigenvalue() + model.A.max_eigenvalue());
  const ReadoutQuadrature q = readout_quadrature(center, model.kappa, dt, quad_order);
  const Index n = model.A.dim();
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, n);
  RealVector r(n);
  for (std::size_t k = 0; k < q.readouts.size(); ++k) {
    for (Index m = 0; m < n; ++m) {
      const double d = lambda(m) - q.readouts[k];
      r(m) = std::exp(-model.kappa * dt * d * d);
    }
    kernel.noalias() += q.weights[k] * (r * r.transpose());
  }
  return kernel.cast<Complex>();
}

double kernel_defect(const Matrix& kernel) {
  // R_a^dagger R_a is diagonal in the A eigenbasis; its integral is diag(K).
  double defect = 0.0;
  for (Index m = 0; m < kernel.rows(); ++m)
    defect = std::max(defect, std::abs(kernel(m, m) - 1.0));
  return defect;
}

}  // namespace

MonitoringModel::MonitoringModel(HermitianOperator hamiltonian, HermitianOperator observable,
                                 double kappa_)
    : H(std::move(hamiltonian)), A(std::move(observable)), kappa(kappa_) {
  if (H.dim() != A.dim()) throw ValidationError("MonitoringModel: H and A dimensions differ");
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw ValidationError("MonitoringModel: kappa must be positive");
}

NonHermitianOperator effective_hamiltonian(const MonitoringModel& model, double a) {
  if (!std::isfinite(a)) throw ValidationError("effective_hamiltonian: readout must be finite");
  const Matrix shifted =
      model.A.matrix() - a * Matrix::Identity(model.A.dim(), model.A.dim());
  return NonHermitianOperator(model.H.matrix() - Complex(0, model.kappa) * (shifted * shifted));
}

Matrix measurement_factor(const MonitoringModel& model, double a, double dt) {
  const double rate = model.kappa * dt;
  return model.A.apply([&](double lambda) {
    const double d = lambda - a;
    return Complex(std::exp(-rate * d * d), 0.0);
  });
}

ChmPropagation propagate_chm(const MonitoringModel& model, const QuantumState& psi0,
                             const ReadoutRecord& record, const ChmOptions& options) {
  if (psi0.dim() != model.H.dim()) throw ValidationError("propagate_chm: dimension mismatch");
  const int substeps = checked_substeps(options);
  const TimeGrid& grid = record.grid();
  const double h = grid.dt() / substeps;

  std::vector<QuantumState> path;
  path.reserve(grid.n_steps() + 1);
  path.push_back(psi0);

  Vector psi = psi0.amplitudes();
  double log_norm = psi0.log_norm();
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    const double a = record[k];
    check_resolution(model, a, h, k);
    const Matrix g = generator(model, a);
    for (int s = 0; s < substeps; ++s) {
      const Vector k1 = g * psi;
      const Vector k2 = g * (psi + 0.5 * h * k1);
      const Vector k3 = g * (psi + 0.5 * h * k2);
      const Vector k4 = g * (psi + h * k3);
      psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double ratio = psi.norm();
      if (!std::isfinite(ratio) || ratio == 0.0) {
        std::ostringstream os;
        os << "propagate_chm: state lost at step " << k;
        throw NumericalError(os.str());
      }
      if (ratio > 1.0 + 1e-6) {
        std::ostringstream os;
        os << "propagate_chm: norm grew by " << ratio - 1.0 << " at step " << k
           << " (unstable step size)";
        throw NumericalError(os.str());
      }
      log_norm += std::log(ratio);
      psi /= ratio;
    }
    path.emplace_back(psi, log_norm);
  }

  ChmPropagation out{path.back(), {}, std::move(path)};
  out.density.log_density = 2.0 * log_norm + reference_log_weight(record, model.kappa);
  return out;
}

Matrix chm_propagator_matrix(const MonitoringModel& model, const ReadoutRecord& record,
                             const ChmOptions& options) {
  const int substeps = checked_substeps(options);
  const TimeGrid& grid = record.grid();
  const double h = grid.dt() / substeps;
  const Index n = model.H.dim();
  Matrix u = Matrix::Identity(n, n);
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    check_resolution(model, record[k], h, k);
    const Matrix g = generator(model, record[k]);
    for (int s = 0; s < substeps; ++s) {
      const Matrix k1 = g * u;
      const Matrix k2 = g * (u + 0.5 * h * k1);
      const Matrix k3 = g * (u + 0.5 * h * k2);
      const Matrix k4 = g * (u + h * k3);
      u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return u;
}

PartialPropagator::PartialPropagator(NonHermitianOperator matrix, ReadoutRecord record)
    : matrix_(std::move(matrix)), record_(std::move(record)) {
  Eigen::JacobiSVD<Matrix> svd(matrix_.matrix());
  largest_singular_value_ = svd.singularValues()(0);
  if (largest_singular_value_ > 1.0 + 1e-9) {
    std::ostringstream os;
    os << "PartialPropagator: not a contraction (largest singular value "
       << largest_singular_value_ << ")";
    throw NumericalError(os.str());
  }
}

PartialPropagator sliced_propagator(const MonitoringModel& model, const ReadoutRecord& record) {
  const double dt = record.grid().dt();
  const Matrix unitary = matrix_exponential(Complex(0, -1) * model.H.matrix(), dt);
  const Index n = model.H.dim();
  Matrix product = Matrix::Identity(n, n);
  for (std::size_t k = 0; k < record.size(); ++k)
    product = unitary * measurement_factor(model, record[k], dt) * product;
  return PartialPropagator(NonHermitianOperator(std::move(product)), record);
}

double generalized_unitarity_defect(const MonitoringModel& model, double dt, int quad_order) {
  if (quad_order < 10) throw ValidationError("generalized_unitarity_defect: quad_order must be >= 10");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  const double defect = kernel_defect(channel_kernel(model, dt, quad_order));
  if (defect > 1e-8) {
    const double coarse = kernel_defect(channel_kernel(model, dt, quad_order / 2));
    if (defect >= coarse) {
      std::ostringstream os;
      os << "generalized_unitarity_defect: quadrature not converging (order " << quad_order / 2
         << ": " << coarse << ", order " << quad_order << ": " << defect << ")";
      throw NumericalError(os.str());
    }
  }
  return defect;
}

Matrix measurement_channel(const MonitoringModel& model, const Matrix& rho, double dt,
                           int quad_order) {
  const Matrix& v = model.A.spectrum().eigenvectors;
  const Matrix kernel = channel_kernel(model, dt, quad_order);
  const Matrix in_basis = v.adjoint() * rho * v;
  return v * in_basis.cwiseProduct(kernel) * v.adjoint();
}

std::vector<DensityMatrix> marginalize_readouts(const MonitoringModel& model,
                                                const DensityMatrix& rho0, const TimeGrid& grid,
                                                int quad_order) {
  if (rho0.dim() != model.H.dim()) throw ValidationError("marginalize_readouts: dimension mismatch");
  if (quad_order < 10) throw ValidationError("marginalize_readouts: quad_order must be >= 10");
  const double dt = grid.dt();
  const Matrix kernel = channel_kernel(model, dt, quad_order);
  if (kernel_defect(kernel) > 1e-8) {
    std::ostringstream os;
    os << "marginalize_readouts: readout quadrature defect " << kernel_defect(kernel)
       << " exceeds 1e-8; raise quad_order";
    throw NumericalError(os.str());
  }
  const Matrix& v = model.A.spectrum().eigenvectors;
  const Matrix half = matrix_exponential(Complex(0, -1) * model.H.matrix(), 0.5 * dt);
  // Work in the A eigenbasis: the channel is a Hadamard product there.
  const Matrix half_in_basis = v.adjoint() * half * v;

  std::vector<DensityMatrix> out;
  out.reserve(grid.n_steps() + 1);
  out.push_back(rho0);
  Matrix rho = v.adjoint() * rho0.matrix() * v;
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    rho = half_in_basis * rho * half_in_basis.adjoint();
    rho = rho.cwiseProduct(kernel).eval();
    rho = half_in_basis * rho * half_in_basis.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    out.emplace_back(v * rho * v.adjoint());
  }
  return out;
}

void write_chm_csv(std::ostream& out, const ReadoutRecord& record, const ChmPropagation& run) {
  const Index dim = run.final_state.dim();
  out << "t,a,log_norm";
  for (Index i = 0; i < dim; ++i) out << ",re_" << i << ",im_" << i;
  out << '\n';
  for (std::size_t k = 0; k < record.size(); ++k) {
    const QuantumState& s = run.path[k + 1];
    out << format_number(record.grid().time(k + 1)) << ',' << format_number(record[k]) << ','
        << format_number(s.log_norm());
    for (Index i = 0; i < dim; ++i)
      out << ',' << format_number(s.amplitudes()(i).real()) << ','
          << format_number(s.amplitudes()(i).imag());
    out << '\n';
  }
}

}  // namespace qmeas
