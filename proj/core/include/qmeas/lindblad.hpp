#pragma once

// Nonselective evolution:
//   d rho / dt = -i [H, rho] - (kappa / 2) [A, [A, rho]].

#include <iosfwd>
#include <vector>

#include "qmeas/hilbert.hpp"
#include "qmeas/readout.hpp"

namespace qmeas {

struct LindbladModel {
  LindbladModel(HermitianOperator hamiltonian, HermitianOperator observable, double kappa);

  HermitianOperator H;
  HermitianOperator A;
  double kappa;
};

Matrix lindblad_rhs(const LindbladModel& model, const Matrix& rho);
Matrix lindblad_rhs(const LindbladModel& model, const DensityMatrix& rho);

struct LindbladTrajectory {
  TimeGrid grid;
  std::vector<DensityMatrix> states;  // n_steps + 1 entries, states[0] = rho0
  double max_trace_drift = 0.0;       // |Tr rho - 1| before renormalization
  double max_hermiticity_defect = 0.0;
};

/// Fixed-step RK4. Each step is re-symmetrized and trace-renormalized; an
/// eigenvalue below -1e-6 aborts with a NumericalError suggesting a smaller dt.
LindbladTrajectory integrate_lindblad(const LindbladModel& model, const DensityMatrix& rho0,
                                      const TimeGrid& grid);

/// Quantum Brownian motion coefficient 2 eta kT (hbar = 1).
double kappa_from_brownian(double eta, double temperature);
/// Position monitoring by atoms of interaction radius lambda and relaxation time tau.
double kappa_from_atoms(double lambda, double tau);

/// Header t, re_0_0, im_0_0, re_0_1, ... in row-major order, one row per grid point.
void write_density_csv(std::ostream& out, const TimeGrid& grid,
                       const std::vector<DensityMatrix>& states);

}  // namespace qmeas
