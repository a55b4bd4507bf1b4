#include "qmeas/lindblad.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "qmeas/csv.hpp"
#include "qmeas/error.hpp"

namespace qmeas {

LindbladModel::LindbladModel(HermitianOperator hamiltonian, HermitianOperator observable,
                             double kappa_)
    : H(std::move(hamiltonian)), A(std::move(observable)), kappa(kappa_) {
  if (H.dim() != A.dim()) throw ValidationError("LindbladModel: H and A dimensions differ");
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw ValidationError("LindbladModel: kappa must be positive");
}

Matrix lindblad_rhs(const LindbladModel& model, const Matrix& rho) {
  if (rho.rows() != model.H.dim() || rho.cols() != model.H.dim())
    throw ValidationError("lindblad_rhs: dimension mismatch");
  const Matrix& h = model.H.matrix();
  return Complex(0, -1) * commutator(h, rho) -
         0.5 * model.kappa * double_commutator(model.A.matrix(), rho);
}

Matrix lindblad_rhs(const LindbladModel& model, const DensityMatrix& rho) {
  return lindblad_rhs(model, rho.matrix());
}

LindbladTrajectory integrate_lindblad(const LindbladModel& model, const DensityMatrix& rho0,
                                      const TimeGrid& grid) {
  if (rho0.dim() != model.H.dim()) throw ValidationError("integrate_lindblad: dimension mismatch");
  LindbladTrajectory out{grid, {}, 0.0, 0.0};
  out.states.reserve(grid.n_steps() + 1);
  out.states.push_back(rho0);

  const double dt = grid.dt();
  Matrix rho = rho0.matrix();
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    const Matrix k1 = lindblad_rhs(model, rho);
    const Matrix k2 = lindblad_rhs(model, rho + 0.5 * dt * k1);
    const Matrix k3 = lindblad_rhs(model, rho + 0.5 * dt * k2);
    const Matrix k4 = lindblad_rhs(model, rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!rho.allFinite()) {
      std::ostringstream os;
      os << "integrate_lindblad: non-finite state at step " << k + 1 << "; reduce dt (" << dt
         << ")";
      throw NumericalError(os.str());
    }
    out.max_hermiticity_defect = std::max(out.max_hermiticity_defect, hermiticity_defect(rho));
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double trace = rho.trace().real();
    out.max_trace_drift = std::max(out.max_trace_drift, std::abs(trace - 1.0));
    rho /= trace;

    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
    const double smallest = solver.eigenvalues()(0);
    if (smallest < -1e-6) {
      std::ostringstream os;
      os << "integrate_lindblad: positivity lost at t = " << grid.time(k + 1)
         << " (eigenvalue " << smallest << "); step size dt = " << dt << " is too large";
      throw NumericalError(os.str());
    }
    out.states.emplace_back(rho, 1e-6);
  }
  return out;
}

double kappa_from_brownian(double eta, double temperature) {
  if (!(eta > 0.0) || !(temperature > 0.0))
    throw ValidationError("kappa_from_brownian: eta and kT must be positive");
  return 2.0 * eta * temperature;
}

double kappa_from_atoms(double lambda, double tau) {
  if (!(lambda > 0.0) || !(tau > 0.0))
    throw ValidationError("kappa_from_atoms: lambda and tau must be positive");
  return 2.0 / (lambda * lambda * tau);
}

void write_density_csv(std::ostream& out, const TimeGrid& grid,
                       const std::vector<DensityMatrix>& states) {
  if (states.empty()) return;
  const Index dim = states.front().dim();
  out << "t";
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) out << ",re_" << i << '_' << j << ",im_" << i << '_' << j;
  out << '\n';
  for (std::size_t k = 0; k < states.size(); ++k) {
    out << format_number(grid.time(k));
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j)
        out << ',' << format_number(states[k](i, j).real()) << ','
            << format_number(states[k](i, j).imag());
    out << '\n';
  }
}

}  // namespace qmeas
