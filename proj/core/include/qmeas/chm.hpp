#pragma once

// Selective evolution under a readout record [a]:
//   d psi / dt = [-i H - kappa (A - a(t))^2] psi,
// its time-sliced partial propagator, the generalized unitarity condition and
// the readout-integrated (nonselective) map.

#include <iosfwd>
#include <vector>

#include "qmeas/hilbert.hpp"
#include "qmeas/readout.hpp"

namespace qmeas {

struct MonitoringModel {
  MonitoringModel(HermitianOperator hamiltonian, HermitianOperator observable, double kappa);

  HermitianOperator H;
  HermitianOperator A;
  double kappa;
};

/// H - i kappa (A - a)^2.
NonHermitianOperator effective_hamiltonian(const MonitoringModel& model, double a);

/// exp(-kappa (A - a)^2 dt), evaluated in the eigenbasis of A.
Matrix measurement_factor(const MonitoringModel& model, double a, double dt);

struct ChmOptions {
  /// RK4 substeps per record step. The readout is held constant across them;
  /// the stability bound kappa (|A| + |a|)^2 h <= 0.5 applies to h = dt / substeps.
  int substeps = 1;
};

struct ChmPropagation {
  QuantumState final_state;
  ReadoutDensity density;           // 2 log_norm + reference_log_weight(record, kappa)
  std::vector<QuantumState> path;   // n_steps + 1 states, log_norm accumulated
};

ChmPropagation propagate_chm(const MonitoringModel& model, const QuantumState& psi0,
                             const ReadoutRecord& record, const ChmOptions& options = {});

/// Unnormalized RK4 solution operator of the complex-Hamiltonian equation for
/// the whole record (the ODE counterpart of sliced_propagator).
Matrix chm_propagator_matrix(const MonitoringModel& model, const ReadoutRecord& record,
                             const ChmOptions& options = {});

/// Partial evolution operator U^[a]: a contraction (singular values <= 1 + 1e-9).
class PartialPropagator {
 public:
  PartialPropagator(NonHermitianOperator matrix, ReadoutRecord record);

  const NonHermitianOperator& op() const { return matrix_; }
  const Matrix& matrix() const { return matrix_.matrix(); }
  const ReadoutRecord& record() const { return record_; }
  double largest_singular_value() const { return largest_singular_value_; }

 private:
  NonHermitianOperator matrix_;
  ReadoutRecord record_;
  double largest_singular_value_ = 0.0;
};

/// Ordered product over steps of exp(-i H dt) exp(-kappa (A - a_k)^2 dt).
PartialPropagator sliced_propagator(const MonitoringModel& model, const ReadoutRecord& record);

/// Max-norm deviation from the identity of
///   integral da sqrt(2 kappa dt / pi) R_a^dagger R_a,   R_a = exp(-kappa (A - a)^2 dt),
/// by Gauss-Hermite quadrature (quad_order >= 10).
double generalized_unitarity_defect(const MonitoringModel& model, double dt, int quad_order);

/// rho -> integral da sqrt(2 kappa dt / pi) R_a rho R_a (one step, quadrature).
Matrix measurement_channel(const MonitoringModel& model, const Matrix& rho, double dt,
                           int quad_order);

/// Readout-integrated selective evolution, iterated over the grid. Each step is
/// the symmetric split U(dt/2) [measurement channel] U(dt/2)^dagger.
std::vector<DensityMatrix> marginalize_readouts(const MonitoringModel& model,
                                                const DensityMatrix& rho0, const TimeGrid& grid,
                                                int quad_order = 40);

/// Columns t, a, log_norm, re_0, im_0, ...; one row per step end, with a the
/// readout value applied during that step.
void write_chm_csv(std::ostream& out, const ReadoutRecord& record, const ChmPropagation& run);

}  // namespace qmeas
