#pragma once

// Measurement readouts a(t) as piecewise-constant records on a uniform grid,
// and the per-step Gaussian reference measure sqrt(2 kappa dt / pi) da under
// which the squared norm of a conditioned state is a probability density.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmeas {

class TimeGrid {
 public:
  TimeGrid(double t0, double dt, std::size_t n_steps);

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  std::size_t n_steps() const { return n_steps_; }
  double duration() const { return static_cast<double>(n_steps_) * dt_; }
  /// Start of step k (k = n_steps gives the end of the grid).
  double time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }
  double midpoint(std::size_t k) const { return t0_ + (static_cast<double>(k) + 0.5) * dt_; }

  /// Grid covering [t0, t0 + duration] with the largest step <= max_dt.
  static TimeGrid covering(double t0, double duration, double max_dt);

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t0_;
  double dt_;
  std::size_t n_steps_;
};

/// Value a_k held constant on [t_k, t_k + dt).
class ReadoutRecord {
 public:
  ReadoutRecord(TimeGrid grid, std::vector<double> values);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }

  /// Time average over the whole record.
  double mean() const;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

/// Log of the record's probability density relative to the reference measure.
struct ReadoutDensity {
  double log_density = 0.0;
};

ReadoutRecord constant_record(const TimeGrid& grid, double a);

/// sum over steps of log sqrt(2 kappa dt / pi).
double reference_log_weight(const ReadoutRecord& record, double kappa);
double reference_log_weight(const TimeGrid& grid, double kappa);

/// Joins records whose grids abut (second.t0 == first end, equal dt).
ReadoutRecord concatenate(const ReadoutRecord& first, const ReadoutRecord& second);

/// CSV with header "t,a" and one row per step midpoint. Numbers use the
/// shortest representation that round-trips.
std::string serialize_record(const ReadoutRecord& record);

/// Inverse of serialize_record. Without `dt` the step is inferred from the row
/// times (at least two rows required). Errors name the offending row, counting
/// the header as row 1.
ReadoutRecord parse_record(std::string_view text, std::optional<double> dt = std::nullopt);

/// Nodes a_k and weights m_k with
///   integral da sqrt(2 kappa dt / pi) F(a)  ~=  sum_k m_k F(a_k)
/// for F carrying a Gaussian factor of width ~ 1/sqrt(kappa dt) around `center`.
struct ReadoutQuadrature {
  std::vector<double> readouts;
  std::vector<double> weights;
};
ReadoutQuadrature readout_quadrature(double center, double kappa, double dt, int order);

}  // namespace qmeas
