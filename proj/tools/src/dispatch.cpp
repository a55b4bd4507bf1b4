#include "qmeas_cli/dispatch.hpp"

#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qmeas/chain.hpp"
#include "qmeas/chm.hpp"
#include "qmeas/csv.hpp"
#include "qmeas/experiments.hpp"
#include "qmeas/lindblad.hpp"
#include "qmeas/sse.hpp"
#include "qmeas_cli/verify.hpp"
#include "json.hpp"

namespace qmeas::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Outcome {
  Json results = Json::object();
  std::string headline;
  bool failed = false;  // verify only
};

class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write " + (dir_ / name).string());
    return f;
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
};

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

QuantumState initial_state(const RunConfig& c) {
  if (c.psi0.empty()) return QuantumState::basis(static_cast<Index>(c.dim()), 0);
  Vector v(static_cast<Index>(c.psi0.size()));
  for (std::size_t i = 0; i < c.psi0.size(); ++i) v(static_cast<Index>(i)) = c.psi0[i];
  return QuantumState::from_vector(v);
}

TimeGrid grid_of(const RunConfig& c) { return TimeGrid(c.t0, c.dt.value_or(0.01), c.n_steps); }

MonitoringModel monitoring_of(const RunConfig& c) {
  return MonitoringModel(HermitianOperator(c.H), HermitianOperator(c.A), c.kappa);
}

LindbladModel lindblad_of(const RunConfig& c) {
  return LindbladModel(HermitianOperator(c.H), HermitianOperator(c.A), c.kappa);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

Json config_echo(const RunConfig& c) {
  Json j;
  j["preset"] = c.preset;
  j["dim"] = c.dim();
  j["H"] = matrix_json(c.H);
  j["A"] = matrix_json(c.A);
  j["kappa"] = c.kappa;
  switch (c.scenario) {
    case Scenario::lindblad:
    case Scenario::chm:
    case Scenario::sse_ensemble:
      j["t0"] = c.t0;
      j["dt"] = c.dt.value_or(0.01);
      j["n_steps"] = c.n_steps;
      break;
    default:
      break;
  }
  if (c.scenario == Scenario::sse_ensemble) j["n_traj"] = c.n_traj;
  if (c.scenario == Scenario::chm) {
    j["substeps"] = c.substeps;
    if (c.record_file.empty()) j["readout"] = c.readout;
    else j["record_file"] = c.record_file.generic_string();
    j["marginalize"] = c.marginalize;
    if (c.marginalize) j["quad_order"] = c.quad_order;
  }
  if (c.scenario == Scenario::chain) {
    j["strength"] = c.strength;
    j["shots"] = c.shots;
    j["chains"] = c.chains;
    j["threshold"] = c.collapse_threshold;
  }
  if (c.scenario == Scenario::zeno || c.scenario == Scenario::rabi_monitor || c.scenario == Scenario::transition) {
    j.erase("preset");
    j.erase("dim");
    j.erase("H");
    j.erase("A");
    j["delta_e"] = c.delta_e;
    j["rabi"] = c.rabi;
    if (c.scenario == Scenario::zeno) {
      j.erase("kappa");
      j["kappa_list"] = c.kappa_list;
      j["n_traj"] = c.n_traj;
    } else {
      const double multiple = c.scenario == Scenario::rabi_monitor ? 50.0 : 20.0;
      j["duration"] = c.duration.value_or(c.rabi > 0.0 ? multiple / c.rabi : 0.0);
      j["dt"] = c.dt.value_or(1e-3);
    }
    if (c.scenario == Scenario::rabi_monitor) {
      j["segment_duration"] = c.segment_duration;
      j["median_band"] = c.median_band;
    }
    if (c.scenario == Scenario::transition) {
      j["window"] = c.window > 0.0 || !(c.rabi > 0.0) ? c.window : 0.5 / c.rabi;
      j["threshold_fraction"] = c.threshold_fraction;
      j["initial"] = c.initial;
    }
  }
  if (c.scenario == Scenario::verify) j = Json::object();
  return j;
}

Outcome run_lindblad(const RunConfig& c, OutputDir& dir) {
  const TimeGrid grid = grid_of(c);
  const LindbladTrajectory run = integrate_lindblad(lindblad_of(c), DensityMatrix::pure(initial_state(c)), grid);
  auto f = dir.open("density.csv");
  write_density_csv(f, grid, run.states);
  Outcome o;
  const DensityMatrix& last = run.states.back();
  std::vector<double> populations;
  for (Index i = 0; i < static_cast<Index>(last.dim()); ++i) populations.push_back(last(i, i).real());
  o.results["final_populations"] = populations;
  o.results["final_purity"] = last.purity();
  o.results["max_trace_drift"] = run.max_trace_drift;
  o.headline = "final purity " + format_number(last.purity()) + "; wrote density.csv";
  return o;
}

Outcome run_chm(const RunConfig& c, OutputDir& dir) {
  const MonitoringModel model = monitoring_of(c);
  const QuantumState psi0 = initial_state(c);
  ReadoutRecord record = [&] {
    if (c.record_file.empty()) return constant_record(grid_of(c), c.readout);
    std::ifstream in(c.record_file, std::ios::binary);
    if (!in) throw ValidationError("cannot open record file " + c.record_file.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_record(text.str(), c.dt);
  }();
  const ChmPropagation run = propagate_chm(model, psi0, record, {c.substeps});
  {
    auto f = dir.open("chm.csv");
    write_chm_csv(f, record, run);
  }
  Outcome o;
  o.results["n_steps"] = record.size();
  o.results["log_density"] = run.density.log_density;
  o.results["final_log_norm"] = run.final_state.log_norm();
  o.headline = "log density " + format_number(run.density.log_density) + "; wrote chm.csv";
  if (c.marginalize) {
    const DensityMatrix rho0 = DensityMatrix::pure(psi0);
    const std::vector<DensityMatrix> marginal = marginalize_readouts(model, rho0, record.grid(), c.quad_order);
    const LindbladTrajectory reference = integrate_lindblad(lindblad_of(c), rho0, record.grid());
    double worst = 0.0;
    for (std::size_t k = 0; k < marginal.size(); ++k)
      worst = std::max(worst, trace_distance(marginal[k], reference.states[k]));
    auto f = dir.open("marginal.csv");
    write_density_csv(f, record.grid(), marginal);
    o.results["marginal_vs_lindblad_max_trace_distance"] = worst;
    o.headline += ", marginal.csv";
  }
  return o;
}

Outcome run_sse_ensemble(const RunConfig& c, OutputDir& dir) {
  const TimeGrid grid = grid_of(c);
  const MonitoringModel model = monitoring_of(c);
  const QuantumState psi0 = initial_state(c);
  const EnsembleSummary ensemble = ensemble_average(model, psi0, grid, c.n_traj, c.seed, c.workers);
  const LindbladTrajectory reference = integrate_lindblad(lindblad_of(c), DensityMatrix::pure(psi0), grid);
  auto f = dir.open("ensemble.csv");
  write_ensemble_csv(f, ensemble, model.A, &reference.states);
  double worst = 0.0;
  for (std::size_t k = 0; k < reference.states.size(); ++k)
    worst = std::max(worst, trace_distance(ensemble.mean_rho[k], reference.states[k]));
  Outcome o;
  o.results["n_traj"] = c.n_traj;
  o.results["max_trace_distance"] = worst;
  o.results["final_mean_A"] = (ensemble.mean_rho.back().matrix() * model.A.matrix()).trace().real();
  o.headline = std::to_string(c.n_traj) + " trajectories, max trace distance to master equation " +
               format_number(worst) + "; wrote ensemble.csv";
  return o;
}

Outcome run_chain(const RunConfig& c, OutputDir& dir) {
  const FuzzyKraus kraus(HermitianOperator(c.A), c.strength);
  const QuantumState psi0 = initial_state(c);
  const std::size_t n_spaces = kraus.eigenspaces().size();
  std::vector<std::size_t> counts(n_spaces, 0);
  std::size_t undecided = 0;
  auto table = dir.open("chains.csv");
  table << "chain,seed,collapsed_to,shots\n";
  for (std::size_t k = 0; k < c.chains; ++k) {
    const std::uint64_t seed = c.seed + k;
    const ChainOutcome out = run_decoherence_chain(kraus, psi0, c.shots, seed, c.collapse_threshold);
    if (k == 0) {
      auto f = dir.open("chain.csv");
      write_chain_csv(f, out);
    }
    if (out.collapsed_to) ++counts[*out.collapsed_to];
    else ++undecided;
    table << k << ',' << seed << ',' << (out.collapsed_to ? std::to_string(*out.collapsed_to) : "none") << ','
          << out.readouts.size() << '\n';
  }
  Outcome o;
  std::vector<double> eigenvalues, born, freq;
  const std::vector<double> p0 = eigenspace_populations(kraus, psi0);
  for (std::size_t m = 0; m < n_spaces; ++m) {
    eigenvalues.push_back(kraus.eigenspaces()[m].value);
    born.push_back(p0[m]);
    freq.push_back(static_cast<double>(counts[m]) / static_cast<double>(c.chains));
  }
  o.results["eigenvalues"] = eigenvalues;
  o.results["born_probabilities"] = born;
  o.results["collapse_frequencies"] = freq;
  o.results["undecided"] = undecided;
  o.headline = std::to_string(c.chains) + " chains, " + std::to_string(undecided) +
               " undecided; wrote chain.csv, chains.csv";
  return o;
}

Outcome run_zeno(const RunConfig& c, OutputDir& dir) {
  ZenoOptions options;
  options.workers = c.workers;
  const ZenoScanResult scan =
      run_zeno_scan(DrivenTwoLevel(c.delta_e, c.rabi, c.kappa_list.front()), c.kappa_list, c.n_traj, c.seed, options);
  auto f = dir.open("zeno.csv");
  f << "kappa,transfer,sse_trace_distance\n";
  for (std::size_t i = 0; i < scan.kappa_values.size(); ++i)
    f << format_number(scan.kappa_values[i]) << ',' << format_number(scan.transfer_probabilities[i]) << ','
      << (scan.sse_trace_distance.empty() ? std::string() : format_number(scan.sse_trace_distance[i])) << '\n';
  Outcome o;
  o.results["kappa_values"] = scan.kappa_values;
  o.results["transfer_probabilities"] = scan.transfer_probabilities;
  o.results["sse_max_trace_distance"] = scan.sse_trace_distance;
  o.results["monotone"] = scan.monotone;
  o.headline = std::to_string(scan.kappa_values.size()) + " kappa values, transfer " +
               format_number(scan.transfer_probabilities.front()) + " -> " +
               format_number(scan.transfer_probabilities.back()) + (scan.monotone ? "" : " (NOT monotone)") +
               "; wrote zeno.csv";
  return o;
}

double driven_duration(const RunConfig& c, double multiple) {
  if (c.duration) return *c.duration;
  if (!(c.rabi > 0.0)) throw ValidationError("duration must be given when rabi = 0");
  return multiple / c.rabi;
}

Outcome run_rabi(const RunConfig& c, OutputDir& dir, std::ostream& err) {
  const DrivenTwoLevel system(c.delta_e, c.rabi, c.kappa);
  SpectrumOptions options;
  options.segment_duration = c.segment_duration;
  options.median_band = c.median_band;
  const RabiMonitorResult r =
      run_rabi_monitor(system, driven_duration(c, 50.0), c.dt.value_or(1e-3), c.seed, options);
  if (r.warning) err << "warning: " << *r.warning << '\n';
  {
    auto f = dir.open("record.csv");
    f << serialize_record(r.trajectory.record);
  }
  auto f = dir.open("spectrum.csv");
  f << "frequency,power\n";
  for (const SpectrumBin& bin : r.spectrum) f << format_number(bin.frequency) << ',' << format_number(bin.power) << '\n';
  Outcome o;
  o.results["rabi_frequency"] = r.rabi_frequency;
  o.results["rabi_bin_frequency"] = r.spectrum[r.rabi_bin].frequency;
  o.results["peak_frequency"] = r.spectrum[r.peak_bin].frequency;
  o.results["peak_to_median"] = r.peak_to_median;
  o.results["line_detected"] = r.line_detected;
  o.results["warning"] = r.warning ? Json(*r.warning) : Json(nullptr);
  o.headline = std::string("Rabi line ") + (r.line_detected ? "detected" : "not detected") + ", peak/median " +
               format_number(r.peak_to_median) + "; wrote record.csv, spectrum.csv";
  return o;
}

Outcome run_transition(const RunConfig& c, OutputDir& dir, std::ostream& err) {
  const DrivenTwoLevel system(c.delta_e, c.rabi, c.kappa);
  TransitionOptions options;
  options.window = c.window;
  options.threshold_fraction = c.threshold_fraction;
  const QuantumState psi0 = c.initial == "excited" ? DrivenTwoLevel::excited() : DrivenTwoLevel::ground();
  const TransitionMonitorResult r =
      run_transition_monitor(system, driven_duration(c, 20.0), c.dt.value_or(1e-3), c.seed, psi0, options);
  if (r.warning) err << "warning: " << *r.warning << '\n';
  const HermitianOperator h0 = system.observable();
  {
    auto f = dir.open("record.csv");
    f << "t,a,expectation\n";
    const TimeGrid& grid = r.trajectory.grid;
    for (std::size_t k = 0; k < grid.n_steps(); ++k)
      f << format_number(grid.midpoint(k)) << ',' << format_number(r.trajectory.record[k]) << ','
        << format_number(expectation(r.trajectory.states[k + 1], h0)) << '\n';
  }
  auto f = dir.open("smoothed.csv");
  f << "t,smoothed\n";
  for (std::size_t j = 0; j < r.smoothed.size(); ++j)
    f << format_number(r.smoothed_times[j]) << ',' << format_number(r.smoothed[j]) << '\n';
  Outcome o;
  o.results["window"] = r.window;
  o.results["thresholds"] = {-c.threshold_fraction * c.delta_e, c.threshold_fraction * c.delta_e};
  o.results["detections"] = r.detections;
  o.results["warning"] = r.warning ? Json(*r.warning) : Json(nullptr);
  o.headline = std::to_string(r.detections.size()) + " upward transition(s) detected; wrote record.csv, smoothed.csv";
  return o;
}

Outcome run_verify(const RunConfig& c, OutputDir& dir, std::ostream& out) {
  VerifyOptions options;
  options.workers = c.workers;
  options.seed = c.seed;
  options.scratch_dir = dir.path("scratch");
  const std::vector<CheckResult> results = run_verification(options, [&](const CheckResult& r) {
    if (!c.quiet) out << format_check(r) << '\n' << std::flush;
  });
  fs::remove_all(options.scratch_dir);
  auto f = dir.open("verify.csv");
  f << "criterion,name,status,detail\n";
  Outcome o;
  Json checks = Json::array();
  std::size_t passed = 0;
  for (const CheckResult& r : results) {
    f << r.id << ',' << csv_field(r.name) << ',' << (r.passed ? "PASS" : "FAIL") << ',' << csv_field(r.detail)
      << '\n';
    checks.push_back({{"criterion", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    if (r.passed) ++passed;
  }
  o.results["checks"] = checks;
  o.results["passed"] = passed;
  o.results["failed"] = results.size() - passed;
  o.failed = passed != results.size();
  o.headline = std::to_string(passed) + "/" + std::to_string(results.size()) + " checks passed; wrote verify.csv";
  return o;
}

}  // namespace

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const std::string name(scenario_name(config.scenario));
  try {
    OutputDir dir(config.output_dir);
    Outcome o;
    switch (config.scenario) {
      case Scenario::lindblad: o = run_lindblad(config, dir); break;
      case Scenario::chm: o = run_chm(config, dir); break;
      case Scenario::sse_ensemble: o = run_sse_ensemble(config, dir); break;
      case Scenario::chain: o = run_chain(config, dir); break;
      case Scenario::zeno: o = run_zeno(config, dir); break;
      case Scenario::rabi_monitor: o = run_rabi(config, dir, err); break;
      case Scenario::transition: o = run_transition(config, dir, err); break;
      case Scenario::verify: o = run_verify(config, dir, out); break;
    }
    Json summary;
    summary["scenario"] = name;
    summary["seed"] = config.seed;
    summary["config"] = config_echo(config);
    summary["results"] = o.results;
    auto f = dir.open("summary.json");
    f << summary.dump(2) << '\n';
    if (!config.quiet) out << name << ": " << o.headline << '\n';
    return o.failed ? kNumericalFailure : kSuccess;
  } catch (const ValidationError& e) {
    err << name << ": error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const NumericalError& e) {
    err << name << ": numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const fs::filesystem_error& e) {
    err << name << ": error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::exception& e) {
    err << name << ": numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace qmeas::cli
