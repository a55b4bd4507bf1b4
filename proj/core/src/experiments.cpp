#include "qmeas/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qmeas/error.hpp"

namespace qmeas {

DrivenTwoLevel::DrivenTwoLevel(double delta_e_, double rabi_, double kappa_)
    : delta_e(delta_e_), rabi(rabi_), kappa(kappa_) {
  if (!(delta_e > 0.0)) throw ValidationError("DrivenTwoLevel: level splitting must be positive");
  if (!(rabi >= 0.0) || !std::isfinite(rabi))
    throw ValidationError("DrivenTwoLevel: Rabi frequency must be >= 0");
  if (!(kappa > 0.0)) throw ValidationError("DrivenTwoLevel: kappa must be positive");
}

HermitianOperator DrivenTwoLevel::hamiltonian() const {
  return HermitianOperator(0.5 * rabi * pauli_x().matrix());
}

HermitianOperator DrivenTwoLevel::observable() const {
  return HermitianOperator(0.5 * delta_e * pauli_z().matrix());
}

MonitoringModel DrivenTwoLevel::monitoring_model() const {
  return MonitoringModel(hamiltonian(), observable(), kappa);
}

LindbladModel DrivenTwoLevel::lindblad_model() const {
  return LindbladModel(hamiltonian(), observable(), kappa);
}

ZenoScanResult run_zeno_scan(const DrivenTwoLevel& system, const std::vector<double>& kappa_list,
                             std::size_t n_traj, std::uint64_t seed, const ZenoOptions& options) {
  if (kappa_list.empty()) throw ValidationError("run_zeno_scan: empty kappa list");
  if (!(system.rabi > 0.0)) throw ValidationError("run_zeno_scan: Rabi frequency must be positive");
  for (std::size_t i = 0; i < kappa_list.size(); ++i) {
    if (!(kappa_list[i] > 0.0)) throw ValidationError("run_zeno_scan: kappa values must be positive");
    if (i > 0 && !(kappa_list[i] > kappa_list[i - 1]))
      throw ValidationError("run_zeno_scan: kappa values must be sorted ascending");
  }

  const double flip_time = std::numbers::pi / system.rabi;
  const double de2 = system.delta_e * system.delta_e;
  const DensityMatrix rho0 = DensityMatrix::pure(DrivenTwoLevel::ground());
  ZenoScanResult out;
  for (double kappa : kappa_list) {
    const DrivenTwoLevel point = system.with_kappa(kappa);
    const TimeGrid grid =
        TimeGrid::covering(0.0, flip_time, options.lindblad_dt_scale / (kappa * de2 + system.rabi));
    const LindbladTrajectory run = integrate_lindblad(point.lindblad_model(), rho0, grid);
    out.kappa_values.push_back(kappa);
    out.transfer_probabilities.push_back(
        run.states.back()(DrivenTwoLevel::kExcited, DrivenTwoLevel::kExcited).real());

    if (n_traj > 0) {
      const TimeGrid sse_grid =
          TimeGrid::covering(0.0, flip_time, std::min(options.sse_dt, 0.01 / (kappa * de2)));
      const EnsembleSummary ensemble = ensemble_average(
          point.monitoring_model(), DrivenTwoLevel::ground(), sse_grid, n_traj, seed, options.workers);
      const LindbladTrajectory reference = integrate_lindblad(point.lindblad_model(), rho0, sse_grid);
      double worst = 0.0;
      for (std::size_t k = 0; k < reference.states.size(); ++k)
        worst = std::max(worst, trace_distance(ensemble.mean_rho[k], reference.states[k]));
      out.sse_trace_distance.push_back(worst);
    }
  }
  for (std::size_t i = 1; i < out.transfer_probabilities.size(); ++i)
    if (out.transfer_probabilities[i] > out.transfer_probabilities[i - 1]) out.monotone = false;
  return out;
}

std::vector<SpectrumBin> record_periodogram(const ReadoutRecord& record, double resample_dt,
                                            std::size_t segments) {
  if (segments < 1) throw ValidationError("record_periodogram: segments must be >= 1");
  const double dt = record.grid().dt();
  const std::size_t group =
      resample_dt > dt ? static_cast<std::size_t>(std::llround(resample_dt / dt)) : 1;
  std::vector<double> coarse;
  coarse.reserve(record.size() / group);
  for (std::size_t start = 0; start + group <= record.size(); start += group) {
    double sum = 0.0;
    for (std::size_t j = start; j < start + group; ++j) sum += record[j];
    coarse.push_back(sum / static_cast<double>(group));
  }
  const double step = dt * static_cast<double>(group);
  const std::size_t length = coarse.size() / segments;
  if (length < 4) throw ValidationError("record_periodogram: record too short for the segmentation");
  const std::size_t n_bins = length / 2;

  std::vector<SpectrumBin> spectrum(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    spectrum[b].frequency = static_cast<double>(b + 1) / (static_cast<double>(length) * step);
    spectrum[b].power = 0.0;
  }
  std::vector<double> x(length);
  for (std::size_t s = 0; s < segments; ++s) {
    double mean = 0.0;
    for (std::size_t j = 0; j < length; ++j) mean += coarse[s * length + j];
    mean /= static_cast<double>(length);
    for (std::size_t j = 0; j < length; ++j) x[j] = coarse[s * length + j] - mean;
    for (std::size_t b = 0; b < n_bins; ++b) {
      // Direct transform; the twiddle advances by a fixed rotation.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(b + 1) / static_cast<double>(length);
      const Complex rotation(std::cos(angle), std::sin(angle));
      Complex twiddle(1.0, 0.0);
      Complex sum(0.0, 0.0);
      for (std::size_t j = 0; j < length; ++j) {
        sum += x[j] * twiddle;
        twiddle *= rotation;
        if ((j & 255u) == 255u) {
          const double exact = angle * static_cast<double>(j + 1);
          twiddle = Complex(std::cos(exact), std::sin(exact));
        }
      }
      spectrum[b].power += std::norm(sum) * step / static_cast<double>(length);
    }
  }
  for (SpectrumBin& bin : spectrum) bin.power /= static_cast<double>(segments);
  return spectrum;
}

RabiMonitorResult run_rabi_monitor(const DrivenTwoLevel& system, double duration, double dt,
                                   std::uint64_t seed, const SpectrumOptions& options) {
  if (!(system.rabi > 0.0)) throw ValidationError("run_rabi_monitor: Rabi frequency must be positive");
  const TimeGrid grid = TimeGrid::covering(0.0, duration, dt);
  RabiMonitorResult out{simulate_trajectory(system.monitoring_model(), DrivenTwoLevel::ground(), grid, seed),
                        {}, system.rabi / (2.0 * std::numbers::pi), 0, 0, 0.0, false, std::nullopt};
  if (!system.soft_regime()) {
    std::ostringstream os;
    os << "kappa dE^2 = " << system.kappa * system.delta_e * system.delta_e
       << " >= Omega = " << system.rabi << ": outside the soft-measurement regime";
    out.warning = os.str();
  }
  const double resample = options.resample_dt > 0.0 ? options.resample_dt : 0.05 / system.rabi;
  const double segment = options.segment_duration > 0.0 ? options.segment_duration : 100.0 / system.rabi;
  const auto segments = std::max<std::size_t>(1, static_cast<std::size_t>(grid.duration() / segment));
  out.spectrum = record_periodogram(out.trajectory.record, resample, segments);

  const double bin_width = out.spectrum.front().frequency;
  const auto nearest = static_cast<long>(std::llround(out.rabi_frequency / bin_width)) - 1;
  const long last = static_cast<long>(out.spectrum.size()) - 1;
  out.rabi_bin = static_cast<std::size_t>(std::clamp(nearest, 0L, last));
  out.peak_bin = out.rabi_bin;
  for (long b = std::max(0L, nearest - 2); b <= std::min(last, nearest + 2); ++b)
    if (out.spectrum[b].power > out.spectrum[out.peak_bin].power) out.peak_bin = static_cast<std::size_t>(b);

  std::vector<double> powers;
  powers.reserve(out.spectrum.size());
  const double band_edge =
      options.median_band > 0.0 ? options.median_band * out.rabi_frequency : out.spectrum.back().frequency;
  for (const SpectrumBin& bin : out.spectrum)
    if (bin.frequency <= band_edge * (1.0 + 1e-12)) powers.push_back(bin.power);
  if (powers.size() < 5)
    throw ValidationError("run_rabi_monitor: fewer than 5 bins below the reference band edge; increase the duration");
  const auto middle = powers.begin() + static_cast<long>(powers.size() / 2);
  std::nth_element(powers.begin(), middle, powers.end());
  const double median = *middle;
  out.peak_to_median = out.spectrum[out.peak_bin].power / median;
  out.line_detected = out.peak_to_median >= 3.0;
  return out;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t width) {
  if (width < 1) throw ValidationError("moving_average: width must be >= 1");
  if (values.size() < width) return {};
  std::vector<double> out;
  out.reserve(values.size() - width + 1);
  double sum = 0.0;
  for (std::size_t j = 0; j < width; ++j) sum += values[j];
  out.push_back(sum / static_cast<double>(width));
  for (std::size_t j = width; j < values.size(); ++j) {
    sum += values[j] - values[j - width];
    out.push_back(sum / static_cast<double>(width));
  }
  return out;
}

std::vector<std::size_t> upward_crossings(const std::vector<double>& values, double low, double high) {
  std::vector<std::size_t> events;
  bool armed = false;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] < low) {
      armed = true;
    } else if (armed && values[j] > high) {
      events.push_back(j);
      armed = false;
    }
  }
  return events;
}

TransitionMonitorResult run_transition_monitor(const DrivenTwoLevel& system, double duration,
                                               double dt, std::uint64_t seed,
                                               const QuantumState& psi0,
                                               const TransitionOptions& options) {
  double window = options.window;
  if (!(window > 0.0)) {
    if (!(system.rabi > 0.0))
      throw ValidationError("run_transition_monitor: window must be given when Omega = 0");
    window = 1.0 / (2.0 * system.rabi);
  }
  const TimeGrid grid = TimeGrid::covering(0.0, duration, dt);
  TransitionMonitorResult out{simulate_trajectory(system.monitoring_model(), psi0, grid, seed),
                              {}, {}, {}, window, std::nullopt};
  if (!system.soft_regime()) {
    std::ostringstream os;
    os << "kappa dE^2 = " << system.kappa * system.delta_e * system.delta_e
       << " >= Omega = " << system.rabi << ": outside the soft-measurement regime";
    out.warning = os.str();
  }
  const auto width =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window / grid.dt())));
  out.smoothed = moving_average(out.trajectory.record.values(), width);
  out.smoothed_times.resize(out.smoothed.size());
  for (std::size_t j = 0; j < out.smoothed.size(); ++j)
    out.smoothed_times[j] = grid.t0() + (static_cast<double>(j) + 0.5 * static_cast<double>(width)) * grid.dt();
  const double threshold = options.threshold_fraction * system.delta_e;
  for (std::size_t j : upward_crossings(out.smoothed, -threshold, threshold))
    out.detections.push_back(out.smoothed_times[j]);
  return out;
}

}  // namespace qmeas
