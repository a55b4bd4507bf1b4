#include "qmeas/sse.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "qmeas/csv.hpp"
#include "qmeas/error.hpp"
#include "qmeas/parallel.hpp"
#include "qmeas/rng.hpp"

namespace qmeas {
namespace {

constexpr std::size_t kBlockSize = 16;

// Allocation-free stepping on a working vector.
class Stepper {
 public:
  Stepper(const MonitoringModel& model, double dt)
      : h_(model.H.matrix()),
        a_(model.A.matrix()),
        kappa_(model.kappa),
        dt_(dt),
        sqrt_kappa_(std::sqrt(model.kappa)),
        b_psi_(model.A.dim()),
        work_(model.A.dim()) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    const double spread = model.A.spectral_spread();
    if (kappa_ * spread * spread * dt > 0.1) {
      std::ostringstream os;
      os << "sse_step: kappa * spread(A)^2 * dt = " << kappa_ * spread * spread * dt
         << " exceeds 0.1; reduce dt";
      throw ValidationError(os.str());
    }
  }

  // Advances psi in place; returns <A> before the step.
  double step(Vector& psi, double dw) {
    work_.noalias() = a_ * psi;
    const double mean = psi.dot(work_).real();
    b_psi_ = work_ - mean * psi;            // (A - <A>) psi
    work_.noalias() = a_ * b_psi_;
    work_ -= mean * b_psi_;                 // (A - <A>)^2 psi
    work_ *= -0.5 * kappa_ * dt_;
    work_.noalias() += Complex(0, -dt_) * (h_ * psi);
    work_ += (sqrt_kappa_ * dw) * b_psi_;
    psi += work_;
    const double norm = psi.norm();
    if (!std::isfinite(norm) || norm == 0.0) throw NumericalError("sse_step: non-finite state");
    psi /= norm;
    return mean;
  }

  double record_value(double mean, double dw) const { return mean + dw / (2.0 * sqrt_kappa_ * dt_); }

 private:
  const Matrix& h_;
  const Matrix& a_;
  double kappa_;
  double dt_;
  double sqrt_kappa_;
  Vector b_psi_;
  Vector work_;
};

template <typename Visitor>
void run_trajectory(const MonitoringModel& model, const QuantumState& psi0, const TimeGrid& grid,
                    std::uint64_t seed, Visitor&& visit) {
  if (psi0.dim() != model.H.dim()) throw ValidationError("sse: dimension mismatch");
  Stepper stepper(model, grid.dt());
  CounterRng rng(seed);
  const double sqrt_dt = std::sqrt(grid.dt());
  Vector psi = psi0.amplitudes();
  visit(std::size_t{0}, psi, 0.0);
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    const double dw = sqrt_dt * rng.normal();
    const double mean = stepper.step(psi, dw);
    visit(k + 1, psi, stepper.record_value(mean, dw));
  }
}

struct BlockSum {
  std::vector<Matrix> rho;
  std::vector<double> record;
};

}  // namespace

QuantumState sse_step(const MonitoringModel& model, const QuantumState& psi, double dW, double dt) {
  if (psi.dim() != model.H.dim()) throw ValidationError("sse_step: dimension mismatch");
  if (!std::isfinite(dW)) throw ValidationError("sse_step: dW must be finite");
  Stepper stepper(model, dt);
  Vector v = psi.amplitudes();
  stepper.step(v, dW);
  return QuantumState(std::move(v), 0.0);
}

SseTrajectory simulate_trajectory(const MonitoringModel& model, const QuantumState& psi0,
                                  const TimeGrid& grid, std::uint64_t seed) {
  std::vector<QuantumState> states;
  states.reserve(grid.n_steps() + 1);
  std::vector<double> record;
  record.reserve(grid.n_steps());
  const QuantumState start(psi0.amplitudes(), 0.0);
  run_trajectory(model, start, grid, seed, [&](std::size_t k, const Vector& psi, double a) {
    states.emplace_back(psi, 0.0);
    if (k > 0) record.push_back(a);
  });
  return SseTrajectory{grid, std::move(states), ReadoutRecord(grid, std::move(record)), seed};
}

EnsembleSummary ensemble_average(const MonitoringModel& model, const QuantumState& psi0,
                                 const TimeGrid& grid, std::size_t n_traj,
                                 std::uint64_t seed_base, unsigned workers) {
  if (n_traj < 1) throw ValidationError("ensemble_average: n_traj must be >= 1");
  if (psi0.dim() != model.H.dim()) throw ValidationError("ensemble_average: dimension mismatch");
  const QuantumState start(psi0.amplitudes(), 0.0);
  const std::size_t points = grid.n_steps() + 1;
  const Index dim = model.H.dim();
  const std::size_t n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;
  const unsigned pool = resolve_workers(workers);

  std::vector<Matrix> total(points, Matrix::Zero(dim, dim));
  std::vector<double> record_total(grid.n_steps(), 0.0);

  // Blocks are computed a wave at a time and folded into the total in block order.
  for (std::size_t first = 0; first < n_blocks; first += pool) {
    const std::size_t wave = std::min<std::size_t>(pool, n_blocks - first);
    std::vector<BlockSum> sums(wave);
    parallel_for(wave, pool, [&](std::size_t w) {
      BlockSum& sum = sums[w];
      sum.rho.assign(points, Matrix::Zero(dim, dim));
      sum.record.assign(grid.n_steps(), 0.0);
      const std::size_t begin = (first + w) * kBlockSize;
      const std::size_t end = std::min(n_traj, begin + kBlockSize);
      for (std::size_t i = begin; i < end; ++i) {
        run_trajectory(model, start, grid, seed_base + i,
                       [&](std::size_t k, const Vector& psi, double a) {
                         sum.rho[k].noalias() += psi * psi.adjoint();
                         if (k > 0) sum.record[k - 1] += a;
                       });
      }
    });
    for (const BlockSum& sum : sums) {
      for (std::size_t k = 0; k < points; ++k) total[k] += sum.rho[k];
      for (std::size_t k = 0; k < grid.n_steps(); ++k) record_total[k] += sum.record[k];
    }
  }

  EnsembleSummary out{n_traj, seed_base, grid, {}, {}};
  out.mean_rho.reserve(points);
  const double scale = 1.0 / static_cast<double>(n_traj);
  for (std::size_t k = 0; k < points; ++k) {
    Matrix mean = total[k] * scale;
    mean /= mean.trace().real();
    out.mean_rho.emplace_back(mean);
  }
  out.mean_record.resize(grid.n_steps());
  for (std::size_t k = 0; k < grid.n_steps(); ++k) out.mean_record[k] = record_total[k] * scale;
  return out;
}

void write_ensemble_csv(std::ostream& out, const EnsembleSummary& summary,
                        const HermitianOperator& observable,
                        const std::vector<DensityMatrix>* reference) {
  const bool with_reference = reference && reference->size() == summary.mean_rho.size();
  out << "t,mean_A";
  if (with_reference) out << ",trace_distance";
  out << '\n';
  for (std::size_t k = 0; k < summary.mean_rho.size(); ++k) {
    const double mean = (observable.matrix() * summary.mean_rho[k].matrix()).trace().real();
    out << format_number(summary.grid.time(k)) << ',' << format_number(mean);
    if (with_reference)
      out << ',' << format_number(trace_distance(summary.mean_rho[k], (*reference)[k]));
    out << '\n';
  }
}

}  // namespace qmeas
