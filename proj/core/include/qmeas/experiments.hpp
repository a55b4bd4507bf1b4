#pragma once

// Energy-monitoring scenarios for a resonantly driven two-level system. In the
// frame rotating with the drive, H = (Omega/2) sigma_x and the monitored
// observable is H0 = (dE/2) sigma_z.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmeas/chm.hpp"
#include "qmeas/lindblad.hpp"
#include "qmeas/sse.hpp"

namespace qmeas {

struct DrivenTwoLevel {
  /// delta_e > 0, rabi >= 0 (0 switches the drive off), kappa > 0.
  DrivenTwoLevel(double delta_e, double rabi, double kappa);

  double delta_e;
  double rabi;
  double kappa;

  HermitianOperator hamiltonian() const;
  HermitianOperator observable() const;
  MonitoringModel monitoring_model() const;
  LindbladModel lindblad_model() const;
  DrivenTwoLevel with_kappa(double k) const { return {delta_e, rabi, k}; }

  /// Soft (non-freezing) regime: kappa dE^2 < Omega.
  bool soft_regime() const { return kappa * delta_e * delta_e < rabi; }

  static constexpr Index kExcited = 0;  // eigenvalue +dE/2
  static constexpr Index kGround = 1;   // eigenvalue -dE/2
  static QuantumState ground() { return QuantumState::basis(2, kGround); }
  static QuantumState excited() { return QuantumState::basis(2, kExcited); }
};

struct ZenoOptions {
  double lindblad_dt_scale = 0.01;  // dt <= scale / (kappa dE^2 + Omega)
  double sse_dt = 1e-3;             // upper bound; tightened for large kappa
  unsigned workers = 0;
};

struct ZenoScanResult {
  std::vector<double> kappa_values;
  std::vector<double> transfer_probabilities;  // excited population at t = pi / Omega
  std::vector<double> sse_trace_distance;      // max over time; empty if n_traj == 0
  bool monotone = true;                         // transfer non-increasing along kappa
};

/// For each kappa (positive, ascending) integrates the master equation from the
/// ground state to the flip time pi/Omega; with n_traj > 0 also reports the
/// worst trace distance between an SSE ensemble and the master equation.
ZenoScanResult run_zeno_scan(const DrivenTwoLevel& system, const std::vector<double>& kappa_list,
                             std::size_t n_traj, std::uint64_t seed, const ZenoOptions& options = {});

struct SpectrumOptions {
  /// The record is block-averaged onto this step before the transform
  /// (0 = 0.05 / Omega). Averaging keeps the noise density in band unchanged.
  double resample_dt = 0.0;
  /// Bartlett segment length (0 = 100 / Omega, capped at the record duration).
  double segment_duration = 0.0;
  /// The median reference is taken over bins with frequency <= this multiple
  /// of the Rabi frequency (0 = whole spectrum).
  double median_band = 2.0;
};

struct SpectrumBin {
  double frequency;  // cycles per unit time
  double power;
};

/// Mean-removed periodogram of a record, DC bin excluded.
std::vector<SpectrumBin> record_periodogram(const ReadoutRecord& record, double resample_dt,
                                            std::size_t segments);

struct RabiMonitorResult {
  SseTrajectory trajectory;
  std::vector<SpectrumBin> spectrum;
  double rabi_frequency;        // Omega / 2 pi
  std::size_t rabi_bin;         // index into spectrum nearest the Rabi line
  std::size_t peak_bin;         // strongest bin within +-2 of rabi_bin
  double peak_to_median;        // against the median bin of the reference band
  bool line_detected;           // peak_to_median >= 3
  std::optional<std::string> warning;
};

RabiMonitorResult run_rabi_monitor(const DrivenTwoLevel& system, double duration, double dt,
                                   std::uint64_t seed, const SpectrumOptions& options = {});

struct TransitionOptions {
  double window = 0.0;              // moving-average width; 0 = 1 / (2 Omega)
  double threshold_fraction = 0.25; // thresholds at -+ fraction * dE
};

struct TransitionMonitorResult {
  SseTrajectory trajectory;
  std::vector<double> smoothed_times;  // window centres
  std::vector<double> smoothed;
  std::vector<double> detections;      // times of upward crossings
  double window;
  std::optional<std::string> warning;
};

TransitionMonitorResult run_transition_monitor(const DrivenTwoLevel& system, double duration,
                                               double dt, std::uint64_t seed,
                                               const QuantumState& psi0 = DrivenTwoLevel::ground(),
                                               const TransitionOptions& options = {});

/// Hysteresis detector: an event fires when `values` rises above `high` after
/// having been below `low`. Returns the indices of the events.
std::vector<std::size_t> upward_crossings(const std::vector<double>& values, double low, double high);

/// Trailing moving average over `width` samples (output has n - width + 1 entries).
std::vector<double> moving_average(const std::vector<double>& values, std::size_t width);

}  // namespace qmeas
