#pragma once

// Diffusive unraveling of the monitoring master equation:
//   d psi = [-i H - (kappa/2) (A - <A>)^2] psi dt + sqrt(kappa) (A - <A>) psi dW,
// with readout a_k = <A>_{t_k} + dW_k / (2 sqrt(kappa) dt).
//
// The coefficients are chosen so that the ensemble obeys the master equation
// with the (kappa/2) [A, [A, rho]] dissipator, i.e. the same kappa as the
// Gaussian readout weight exp(-kappa integral (A - a)^2 dt).

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qmeas/chm.hpp"
#include "qmeas/hilbert.hpp"
#include "qmeas/readout.hpp"

namespace qmeas {

struct SseTrajectory {
  TimeGrid grid;
  std::vector<QuantumState> states;  // n_steps + 1, all normalized (log_norm 0)
  ReadoutRecord record;
  std::uint64_t seed;
};

struct EnsembleSummary {
  std::size_t n_traj;
  std::uint64_t seed_base;
  TimeGrid grid;
  std::vector<DensityMatrix> mean_rho;  // n_steps + 1
  std::vector<double> mean_record;      // n_steps
};

/// One Euler-Maruyama step followed by renormalization. Requires
/// kappa * spread(A)^2 * dt <= 0.1.
QuantumState sse_step(const MonitoringModel& model, const QuantumState& psi, double dW, double dt);

/// Wiener increments come from CounterRng(seed); bit-reproducible per seed.
SseTrajectory simulate_trajectory(const MonitoringModel& model, const QuantumState& psi0,
                                  const TimeGrid& grid, std::uint64_t seed);

/// Mean of |psi><psi| over trajectories with seeds seed_base + i. Trajectories
/// are grouped into fixed blocks that are summed in index order, so the result
/// does not depend on `workers` (0 = available parallelism).
EnsembleSummary ensemble_average(const MonitoringModel& model, const QuantumState& psi0,
                                 const TimeGrid& grid, std::size_t n_traj,
                                 std::uint64_t seed_base, unsigned workers = 0);

/// Columns t, mean_<A>, and trace_distance when a reference of matching length is given.
void write_ensemble_csv(std::ostream& out, const EnsembleSummary& summary,
                        const HermitianOperator& observable,
                        const std::vector<DensityMatrix>* reference = nullptr);

}  // namespace qmeas
