#include "qmeas_cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "qmeas/chain.hpp"
#include "qmeas/chm.hpp"
#include "qmeas/experiments.hpp"
#include "qmeas/lindblad.hpp"
#include "qmeas/sse.hpp"
#include "qmeas_cli/config.hpp"
#include "qmeas_cli/dispatch.hpp"

namespace qmeas::cli {
namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

/// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double max_trace_distance(const std::vector<DensityMatrix>& a, const std::vector<DensityMatrix>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, trace_distance(a[k], b[k]));
  return worst;
}

MonitoringModel qubit_model(double kappa) {
  return MonitoringModel(pauli_x(), pauli_z(), kappa);
}

}  // namespace

CheckResult check_dephasing_rate(const VerifyOptions&) {
  const double kappa = 0.5;
  const LindbladModel model(HermitianOperator(Matrix::Zero(2, 2)), pauli_z(), kappa);
  Matrix rho(2, 2);
  rho << 0.5, 0.5, 0.5, 0.5;
  const TimeGrid grid(0.0, 0.01, 200);
  const LindbladTrajectory run = integrate_lindblad(model, DensityMatrix(rho), grid);
  std::vector<double> t, log_coherence;
  for (std::size_t k = 0; k <= grid.n_steps(); ++k) {
    t.push_back(grid.time(k));
    log_coherence.push_back(std::log(std::abs(run.states[k](0, 1))));
  }
  const double rate = -slope(t, log_coherence);
  const double expected = 0.5 * kappa * 4.0;
  const double rel = std::abs(rate - expected) / expected;
  return {"1", "dephasing rate", rel <= 5e-3,
          "rate " + fmt(rate) + " vs " + fmt(expected) + " (rel err " + fmt(rel) + ", tol 0.005)"};
}

CheckResult check_sse_equivalence(const VerifyOptions& options) {
  const MonitoringModel model = qubit_model(0.5);
  const TimeGrid grid(0.0, 1e-3, 2000);
  const QuantumState psi0 = QuantumState::basis(2, 0);
  const EnsembleSummary ensemble = ensemble_average(model, psi0, grid, 2000, options.seed, options.workers);
  const LindbladTrajectory reference =
      integrate_lindblad(LindbladModel(model.H, model.A, model.kappa), DensityMatrix::pure(psi0), grid);
  const double worst = max_trace_distance(ensemble.mean_rho, reference.states);
  return {"2a", "SSE ensemble vs master equation", worst <= 0.02,
          "max trace distance " + fmt(worst) + " (2000 trajectories, tol 0.02)"};
}

CheckResult check_marginal_equivalence(const VerifyOptions&) {
  const MonitoringModel model = qubit_model(0.5);
  const TimeGrid grid(0.0, 0.01, 200);
  const DensityMatrix rho0 = DensityMatrix::pure(QuantumState::basis(2, 0));
  const std::vector<DensityMatrix> marginal = marginalize_readouts(model, rho0, grid, 40);
  const LindbladTrajectory reference =
      integrate_lindblad(LindbladModel(model.H, model.A, model.kappa), rho0, grid);
  const double worst = max_trace_distance(marginal, reference.states);
  return {"2b", "readout-marginalized evolution vs master equation", worst <= 1e-3,
          "max trace distance " + fmt(worst) + " (tol 0.001)"};
}

CheckResult check_three_way_equivalence(const VerifyOptions& options) {
  const CheckResult sse = check_sse_equivalence(options);
  const CheckResult marginal = check_marginal_equivalence(options);
  return {"2", "three-way equivalence", sse.passed && marginal.passed,
          "(a) " + sse.detail + "; (b) " + marginal.detail};
}

CheckResult check_generalized_unitarity(const VerifyOptions&) {
  Matrix hop(3, 3);
  hop << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  const std::vector<std::pair<HermitianOperator, HermitianOperator>> systems = {
      {pauli_x(), pauli_z()}, {HermitianOperator(hop), diagonal_operator({0.0, 1.0, 3.0})}};
  double worst = 0.0;
  for (const auto& [h, a] : systems)
    for (double kappa : {0.1, 1.0, 10.0})
      for (double dt : {0.01, 0.1})
        worst = std::max(worst, generalized_unitarity_defect(MonitoringModel(h, a, kappa), dt, 40));
  return {"3", "generalized unitarity", worst <= 1e-8,
          "worst single-step defect " + fmt(worst) + " over 12 cases (tol 1e-8)"};
}

CheckResult check_slicing_convergence(const VerifyOptions&) {
  const MonitoringModel model = qubit_model(1.0);
  const double duration = 1.0;
  std::vector<double> log_dt, log_err;
  std::string errors;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    const auto n = static_cast<std::size_t>(std::llround(duration / dt));
    const TimeGrid grid(0.0, dt, n);
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) values[k] = 0.3 * std::cos(grid.midpoint(k));
    const ReadoutRecord record(grid, values);
    const Matrix sliced = sliced_propagator(model, record).matrix();
    const Matrix exact = chm_propagator_matrix(model, record, {64});
    const double err = (sliced - exact).norm();
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(err));
    errors += (errors.empty() ? "" : ", ") + fmt(err);
  }
  const double p = slope(log_dt, log_err);
  return {"4", "sliced propagator convergence", std::abs(p - 1.0) <= 0.1,
          "slope " + fmt(p) + " (tol 1.0 +- 0.1); errors " + errors};
}

CheckResult check_density_normalization(const VerifyOptions&) {
  const double kappa = 0.5;
  const double dt = 0.01;
  const MonitoringModel model = qubit_model(kappa);
  const TimeGrid grid(0.0, dt, 1);
  Vector v(2);
  v << Complex(0.6, 0.0), Complex(0.0, 0.8);
  const QuantumState psi0 = QuantumState::from_vector(v);
  const double center = 0.5 * (model.A.min_eigenvalue() + model.A.max_eigenvalue());
  const ReadoutQuadrature q = readout_quadrature(center, kappa, dt, 40);
  double worst_a = 0.0;
  for (double a : q.readouts) worst_a = std::max(worst_a, std::abs(a));
  // Hold the integrator inside its stability bound for the tail nodes.
  const double bound = kappa * std::pow(model.A.spectral_norm() + worst_a, 2) * dt;
  const int substeps = static_cast<int>(std::ceil(bound / 0.5));
  double total = 0.0;
  for (std::size_t k = 0; k < q.readouts.size(); ++k) {
    const ChmPropagation run = propagate_chm(model, psi0, constant_record(grid, q.readouts[k]), {substeps});
    // Weights integrate against da once the Gaussian reference factor is divided out.
    total += q.weights[k] * std::exp(run.density.log_density - reference_log_weight(grid, kappa));
  }
  const double dev = std::abs(total - 1.0);
  return {"5", "readout density normalization", dev <= 1e-6,
          "integral " + fmt(total) + " (|dev| " + fmt(dev) + ", tol 1e-6)"};
}

CheckResult check_collapse_statistics(const VerifyOptions& options) {
  const FuzzyKraus kraus(diagonal_operator({1.0, 2.0}), 0.1);
  Vector v(2);
  v << 0.6, 0.8;
  const QuantumState psi0 = QuantumState::from_vector(v);
  const std::size_t n_chains = 5000;
  const std::size_t shots = 500;
  std::size_t to_first = 0;
  std::size_t undecided = 0;
  std::vector<double> mean_path(shots + 1, 0.0);
  std::vector<double> finals;
  finals.reserve(n_chains);
  for (std::size_t c = 0; c < n_chains; ++c) {
    const ChainOutcome out = run_decoherence_chain(kraus, psi0, shots, options.seed + c);
    if (!out.collapsed_to) ++undecided;
    else if (*out.collapsed_to == 0) ++to_first;
    for (std::size_t n = 0; n <= shots; ++n) {
      // A collapsed chain keeps its last populations.
      const auto& p = out.populations[std::min(n, out.populations.size() - 1)];
      mean_path[n] += p[0];
    }
    finals.push_back(out.populations.back()[0]);
  }
  const auto N = static_cast<double>(n_chains);
  double drift = 0.0;
  for (double& m : mean_path) {
    m /= N;
    drift = std::max(drift, std::abs(m - 0.36));
  }
  double var = 0.0;
  for (double p : finals) var += (p - mean_path.back()) * (p - mean_path.back());
  const double standard_error = std::sqrt(var / (N - 1.0) / N);
  const double freq = static_cast<double>(to_first) / N;
  const double sigma = std::sqrt(0.36 * 0.64 / N);
  const bool ok = undecided == 0 && std::abs(freq - 0.36) <= 3.0 * sigma && drift <= 3.0 * standard_error;
  return {"6", "collapse statistics", ok,
          "frequency " + fmt(freq) + " (0.36 +- " + fmt(3.0 * sigma) + "), martingale drift " + fmt(drift) +
              " vs 3 SE " + fmt(3.0 * standard_error) + ", undecided " + std::to_string(undecided)};
}

CheckResult check_zeno_scan(const VerifyOptions& options) {
  const ZenoScanResult scan =
      run_zeno_scan(DrivenTwoLevel(2.0, 1.0, 1.0), {0.1, 1.0, 10.0, 100.0}, 0, options.seed);
  const auto& p = scan.transfer_probabilities;
  const bool ok = scan.monotone && p.back() < 0.1 && p.front() > 0.95;
  std::string detail = "transfer";
  for (std::size_t i = 0; i < p.size(); ++i) detail += " k=" + fmt(scan.kappa_values[i]) + ":" + fmt(p[i]);
  detail += std::string("; monotone ") + (scan.monotone ? "yes" : "no") + ", largest-kappa < 0.1 " +
            (p.back() < 0.1 ? "yes" : "no") + ", smallest-kappa > 0.95 " + (p.front() > 0.95 ? "yes" : "no");
  return {"7", "Zeno freezing", ok, detail};
}

CheckResult check_rabi_visibility(const VerifyOptions& options) {
  const RabiMonitorResult soft = run_rabi_monitor(DrivenTwoLevel(2.0, 1.0, 0.1), 2000.0, 2e-3, options.seed);
  const RabiMonitorResult frozen = run_rabi_monitor(DrivenTwoLevel(2.0, 1.0, 10.0), 2000.0, 2.5e-3, options.seed);
  const auto offset = [](const RabiMonitorResult& r) {
    return std::abs(static_cast<long>(r.peak_bin) - static_cast<long>(r.rabi_bin));
  };
  const bool ok = soft.line_detected && offset(soft) <= 2 && !frozen.line_detected;
  return {"8", "Rabi line visibility", ok,
          "soft kappa=0.1 ratio " + fmt(soft.peak_to_median) + " at bin offset " + std::to_string(offset(soft)) +
              " (need >= 3); frozen kappa=10 ratio " + fmt(frozen.peak_to_median) + " (need < 3)"};
}

CheckResult check_weak_series(const VerifyOptions&) {
  const HermitianOperator a = diagonal_operator({-1.0, 1.0, 2.0});
  std::vector<double> log_g, log_res;
  double worst_rel = 0.0;
  std::string fits;
  for (double g : {0.2, 0.1, 0.05, 0.025}) {
    const auto n = static_cast<std::size_t>(std::llround(4.0 / (g * g)));
    const NonHermitianOperator log_op = post_selected_log_operator({g, n}, a, 0);
    const QuadraticFit fit = fit_effective_quadratic(log_op, a, static_cast<double>(n));
    const double oracle = 0.5 * g * g;
    const double rel = std::abs(fit.kappa_eff - oracle) / oracle;
    worst_rel = std::max(worst_rel, rel);
    log_g.push_back(std::log(g));
    log_res.push_back(std::log(fit.residual));
    fits += (fits.empty() ? "" : ", ") + fmt(fit.kappa_eff / oracle);
  }
  const double p = slope(log_g, log_res);
  return {"9", "weak ancilla series", std::abs(p - 2.0) <= 0.3 && worst_rel <= 0.05,
          "residual slope " + fmt(p) + " (2.0 +- 0.3), worst kappa_eff rel err " + fmt(worst_rel) +
              " (tol 0.05); kappa_eff/oracle " + fits};
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Lists regular files under `dir` with their contents, sorted by relative path.
std::vector<std::pair<std::string, std::string>> snapshot(const std::filesystem::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file())
      files.emplace_back(std::filesystem::relative(entry.path(), dir).generic_string(), slurp(entry.path()));
  std::sort(files.begin(), files.end());
  return files;
}

const char* const kReproConfigs[][2] = {
    {"sse-ensemble",
     "scenario = sse-ensemble\nseed = 11\n[model]\npreset = two-level\nkappa = 0.5\n"
     "[grid]\ndt = 0.001\nn_steps = 400\n[ensemble]\nn_traj = 96\n"},
    {"zeno",
     "scenario = zeno\nseed = 12\n[drive]\ndelta_e = 2\nrabi = 1\nkappa_list = 0.1, 1, 10\n"
     "[ensemble]\nn_traj = 40\n"},
    {"chain",
     "scenario = chain\nseed = 13\n[model]\npreset = three-level\n[chain]\nstrength = 0.2\nshots = 200\n"
     "chains = 64\n"},
    {"transition",
     "scenario = transition\nseed = 14\n[model]\nkappa = 0.05\n[drive]\ndelta_e = 2\nrabi = 1\n"
     "duration = 20\n[grid]\ndt = 0.002\n"},
};

}  // namespace

CheckResult check_reproducibility(const VerifyOptions& options) {
  namespace fs = std::filesystem;
  const fs::path root = options.scratch_dir.empty() ? fs::temp_directory_path() / "qmeas-verify" : options.scratch_dir;
  std::string detail;
  bool ok = true;
  for (const auto& [name, text] : kReproConfigs) {
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    for (unsigned workers : {1u, 4u, 4u}) {
      const fs::path out = root / (std::string(name) + "-w" + std::to_string(workers) + "-" + std::to_string(runs.size()));
      fs::remove_all(out);
      RunConfig config = parse_config(text);
      config.output_dir = out;
      config.workers = workers;
      std::ostringstream sink;
      config.quiet = true;
      if (dispatch(config, sink, sink) != 0) ok = false;
      runs.push_back(snapshot(out));
      fs::remove_all(out);
    }
    const bool same = !runs[0].empty() && runs[0] == runs[1] && runs[1] == runs[2];
    ok = ok && same;
    detail += (detail.empty() ? "" : ", ") + std::string(name) + (same ? " identical" : " DIFFERS") + " (" +
              std::to_string(runs[0].size()) + " files)";
  }
  return {"10", "byte-identical reruns across worker counts", ok, detail};
}

const std::vector<NamedCheck>& all_checks() {
  static const std::vector<NamedCheck> checks = {
      {"1", check_dephasing_rate},        {"2", check_three_way_equivalence},
      {"3", check_generalized_unitarity},
      {"4", check_slicing_convergence},   {"5", check_density_normalization},
      {"6", check_collapse_statistics},   {"7", check_zeno_scan},
      {"8", check_rabi_visibility},       {"9", check_weak_series},
      {"10", check_reproducibility}};
  return checks;
}

std::vector<CheckResult> run_verification(const VerifyOptions& options,
                                          const std::function<void(const CheckResult&)>& report) {
  std::vector<CheckResult> results;
  for (const NamedCheck& check : all_checks()) {
    CheckResult r;
    try {
      r = check.run(options);
    } catch (const std::exception& e) {
      r = {check.id, "raised", false, e.what()};
    }
    if (report) report(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_check(const CheckResult& r) {
  return std::string(r.passed ? "PASS" : "FAIL") + " criterion " + r.id + " " + r.name + ": " + r.detail;
}

}  // namespace qmeas::cli
