#include "qmeas/chain.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qmeas/csv.hpp"
#include "qmeas/error.hpp"
#include "qmeas/readout.hpp"

namespace qmeas {
namespace {

std::vector<Eigenspace> group_eigenspaces(const HermitianOperator& a) {
  const Spectrum& sp = a.spectrum();
  const double tol = 1e-9 * std::max(1.0, a.spectral_norm());
  std::vector<Eigenspace> spaces;
  Index start = 0;
  for (Index k = 1; k <= a.dim(); ++k) {
    if (k == a.dim() || sp.eigenvalues(k) - sp.eigenvalues(start) > tol) {
      const Index count = k - start;
      spaces.push_back({sp.eigenvalues.segment(start, count).mean(),
                        sp.eigenvectors.middleCols(start, count)});
      start = k;
    }
  }
  return spaces;
}

double completeness(const HermitianOperator& a, double s, int order) {
  const double center = 0.5 * (a.min_eigenvalue() + a.max_eigenvalue());
  const ReadoutQuadrature q = readout_quadrature(center, s, 1.0, order);
  double defect = 0.0;
  for (Index m = 0; m < a.dim(); ++m) {
    double sum = 0.0;
    for (std::size_t k = 0; k < q.readouts.size(); ++k) {
      const double d = a.spectrum().eigenvalues(m) - q.readouts[k];
      sum += q.weights[k] * std::exp(-2.0 * s * d * d);
    }
    defect = std::max(defect, std::abs(sum - 1.0));
  }
  return defect;
}

}  // namespace

FuzzyKraus::FuzzyKraus(HermitianOperator observable, double strength)
    : observable_(std::move(observable)), strength_(strength) {
  if (!(strength_ > 0.0) || !std::isfinite(strength_))
    throw ValidationError("FuzzyKraus: strength must be positive");
  eigenspaces_ = group_eigenspaces(observable_);
  completeness_defect_ = 1.0;
  for (int order = 40; order <= 320; order *= 2) {
    completeness_defect_ = completeness(observable_, strength_, order);
    if (completeness_defect_ <= 1e-8) return;
  }
  std::ostringstream os;
  os << "FuzzyKraus: completeness defect " << completeness_defect_ << " exceeds 1e-8";
  throw ValidationError(os.str());
}

Matrix FuzzyKraus::outcome_operator(double a) const {
  return observable_.apply([&](double lambda) {
    const double d = lambda - a;
    return Complex(std::exp(-strength_ * d * d), 0.0);
  });
}

std::vector<double> eigenspace_populations(const FuzzyKraus& kraus, const QuantumState& psi) {
  if (psi.dim() != kraus.A().dim()) throw ValidationError("eigenspace_populations: dimension mismatch");
  std::vector<double> pops;
  pops.reserve(kraus.eigenspaces().size());
  for (const Eigenspace& space : kraus.eigenspaces())
    pops.push_back((space.basis.adjoint() * psi.amplitudes()).squaredNorm());
  return pops;
}

FuzzyShot sample_fuzzy_shot(const FuzzyKraus& kraus, const QuantumState& psi, CounterRng& rng) {
  const std::vector<double> pops = eigenspace_populations(kraus, psi);
  const double s = kraus.strength();
  const auto& spaces = kraus.eigenspaces();

  double u = rng.uniform();
  std::size_t chosen = spaces.size() - 1;
  for (std::size_t m = 0; m < spaces.size(); ++m) {
    if (u < pops[m]) {
      chosen = m;
      break;
    }
    u -= pops[m];
  }
  const double a = spaces[chosen].value + rng.normal() / (2.0 * std::sqrt(s));

  double density = 0.0;
  const double norm_factor = std::sqrt(2.0 * s / std::numbers::pi);
  for (std::size_t m = 0; m < spaces.size(); ++m) {
    const double d = a - spaces[m].value;
    density += pops[m] * norm_factor * std::exp(-2.0 * s * d * d);
  }

  // Apply R_a with the largest factor scaled to 1 so remote components cannot underflow the rest.
  double best = -std::numeric_limits<double>::infinity();
  for (const Eigenspace& space : spaces) best = std::max(best, -s * (space.value - a) * (space.value - a));
  Vector out = Vector::Zero(psi.dim());
  for (const Eigenspace& space : spaces) {
    const double d = space.value - a;
    const double factor = std::exp(-s * d * d - best);
    out += factor * (space.basis * (space.basis.adjoint() * psi.amplitudes()));
  }
  return {QuantumState::from_vector(out), a, density};
}

ChainOutcome run_decoherence_chain(const FuzzyKraus& kraus, const QuantumState& psi0,
                                   std::size_t n_steps, std::uint64_t seed,
                                   double collapse_threshold) {
  if (!(collapse_threshold > 0.0 && collapse_threshold < 1.0))
    throw ValidationError("run_decoherence_chain: collapse_threshold must be in (0, 1)");
  for (const Eigenspace& space : kraus.eigenspaces())
    if (space.basis.cols() > 1)
      throw ValidationError("run_decoherence_chain: observable has a degenerate spectrum");

  CounterRng rng(seed);
  QuantumState psi(psi0.amplitudes(), 0.0);
  ChainOutcome outcome{psi, {}, std::nullopt, {}};
  auto check_collapse = [&](const std::vector<double>& pops) {
    for (std::size_t m = 0; m < pops.size(); ++m)
      if (pops[m] > 1.0 - collapse_threshold) outcome.collapsed_to = m;
    return outcome.collapsed_to.has_value();
  };

  outcome.populations.push_back(eigenspace_populations(kraus, psi));
  if (check_collapse(outcome.populations.back())) return outcome;
  for (std::size_t shot = 0; shot < n_steps; ++shot) {
    FuzzyShot result = sample_fuzzy_shot(kraus, psi, rng);
    psi = std::move(result.state);
    outcome.readouts.push_back(result.readout);
    outcome.populations.push_back(eigenspace_populations(kraus, psi));
    if (check_collapse(outcome.populations.back())) break;
  }
  outcome.final_state = psi;
  return outcome;
}

void write_chain_csv(std::ostream& out, const ChainOutcome& outcome) {
  const std::size_t n_spaces = outcome.populations.empty() ? 0 : outcome.populations.front().size();
  out << "shot,readout";
  for (std::size_t m = 0; m < n_spaces; ++m) out << ",p_" << m;
  out << '\n';
  for (std::size_t k = 0; k < outcome.readouts.size(); ++k) {
    out << k + 1 << ',' << format_number(outcome.readouts[k]);
    for (double p : outcome.populations[k + 1]) out << ',' << format_number(p);
    out << '\n';
  }
}

BranchOperators ancilla_branch_operators(double g, const HermitianOperator& observable) {
  if (!std::isfinite(g)) throw ValidationError("ancilla coupling must be finite");
  const Index n = observable.dim();
  const Matrix sigma_y = pauli_y().matrix();
  Matrix coupling(2 * n, 2 * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) coupling.block(2 * i, 2 * j, 2, 2) = observable.matrix()(i, j) * sigma_y;
  const Matrix u = matrix_exponential(Complex(0, -g) * coupling, 1.0);
  BranchOperators ops{Matrix(n, n), Matrix(n, n)};
  // System index i, ancilla index o -> 2 i + o; the ancilla starts in |0>.
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      ops.m0(i, j) = u(2 * i, 2 * j);
      ops.m1(i, j) = u(2 * i + 1, 2 * j);
    }
  }
  return ops;
}

std::vector<AncillaBranch> weak_ancilla_shot(const AncillaScheme& scheme,
                                             const HermitianOperator& observable,
                                             const QuantumState& psi) {
  if (!(scheme.g >= 0.0)) throw ValidationError("weak_ancilla_shot: g must be >= 0");
  if (scheme.g * observable.spectral_norm() > 0.5) {
    std::ostringstream os;
    os << "weak_ancilla_shot: weakness condition violated (g |A| = "
       << scheme.g * observable.spectral_norm() << " > 0.5)";
    throw ValidationError(os.str());
  }
  if (psi.dim() != observable.dim()) throw ValidationError("weak_ancilla_shot: dimension mismatch");
  const BranchOperators ops = ancilla_branch_operators(scheme.g, observable);
  std::vector<AncillaBranch> branches;
  int outcome = 0;
  for (const Matrix* m : {&ops.m0, &ops.m1}) {
    const Vector branch = *m * psi.amplitudes();
    const double probability = branch.squaredNorm();
    if (probability > 0.0)
      branches.push_back({QuantumState::from_vector(branch), probability, outcome});
    ++outcome;
  }
  return branches;
}

NonHermitianOperator post_selected_log_operator(const AncillaScheme& scheme,
                                                const HermitianOperator& observable, int outcome) {
  if (outcome != 0 && outcome != 1) throw ValidationError("post_selected_log_operator: outcome must be 0 or 1");
  if (scheme.n_shots < 1) throw ValidationError("post_selected_log_operator: n_shots must be >= 1");
  const BranchOperators ops = ancilla_branch_operators(scheme.g, observable);
  const Matrix& m = outcome == 0 ? ops.m0 : ops.m1;
  const Index n = observable.dim();
  Matrix product = Matrix::Identity(n, n);
  for (std::size_t k = 0; k < scheme.n_shots; ++k) product = m * product;

  const Matrix& v = observable.spectrum().eigenvectors;
  const Matrix in_basis = v.adjoint() * product * v;
  const double scale = in_basis.diagonal().cwiseAbs().maxCoeff();
  Matrix off = in_basis;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1e-300))
    throw ValidationError("post_selected_log_operator: cumulative operator not diagonal in the A basis");
  Vector logs(n);
  for (Index k = 0; k < n; ++k) {
    if (in_basis(k, k) == Complex(0.0))
      throw NumericalError("post_selected_log_operator: branch operator is singular");
    logs(k) = Complex(0, 1) * std::log(in_basis(k, k));
  }
  return NonHermitianOperator(v * logs.asDiagonal() * v.adjoint());
}

QuadraticFit fit_effective_quadratic(const NonHermitianOperator& log_operator,
                                     const HermitianOperator& observable, double total_time) {
  if (log_operator.dim() != observable.dim())
    throw ValidationError("fit_effective_quadratic: dimension mismatch");
  if (!(total_time > 0.0)) throw ValidationError("fit_effective_quadratic: total_time must be positive");
  const Matrix& v = observable.spectrum().eigenvectors;
  const Matrix in_basis = v.adjoint() * log_operator.matrix() * v;
  const double scale = std::max(1.0, in_basis.diagonal().cwiseAbs().maxCoeff());
  Matrix off = in_basis;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 1e-9 * scale) {
    std::ostringstream os;
    os << "fit_effective_quadratic: input is not diagonal in the A eigenbasis (off-diagonal "
       << off.cwiseAbs().maxCoeff() << ")";
    throw ValidationError(os.str());
  }

  const Index n = observable.dim();
  const RealVector& a = observable.spectrum().eigenvalues;
  RealVector y(n);
  for (Index m = 0; m < n; ++m) y(m) = -in_basis(m, m).imag();
  const double t = total_time;

  auto coefficient = [&](double center) {
    double p = 0.0, q = 0.0;
    for (Index m = 0; m < n; ++m) {
      const double z = (a(m) - center) * (a(m) - center) * t;
      p += y(m) * z;
      q += z * z;
    }
    return q > 0.0 ? p / q : 0.0;
  };
  auto objective = [&](double center) {
    const double c = coefficient(center);
    double sum = 0.0;
    for (Index m = 0; m < n; ++m) {
      const double r = y(m) - c * (a(m) - center) * (a(m) - center) * t;
      sum += r * r;
    }
    return sum;
  };
  // Numerator of d objective / d center, up to the factor -p / q^2.
  auto slope = [&](double center) {
    double p = 0.0, q = 0.0, dp = 0.0, dq = 0.0;
    for (Index m = 0; m < n; ++m) {
      const double d = a(m) - center;
      const double z = d * d * t;
      const double dz = -2.0 * d * t;
      p += y(m) * z;
      q += z * z;
      dp += y(m) * dz;
      dq += 2.0 * z * dz;
    }
    return 2.0 * dp * q - p * dq;
  };

  double center = 0.5 * (a(0) + a(n - 1));
  const bool two_points = n == 2 && y(0) >= 0.0 && y(1) >= 0.0 && (y(0) + y(1)) > 0.0;
  if (two_points) {
    // Two points, two parameters: the fit is exact.
    const double r0 = std::sqrt(y(0));
    const double r1 = std::sqrt(y(1));
    center = (a(0) * r1 + a(1) * r0) / (r0 + r1);
  } else if (n > 2) {
    const double span = std::max(a(n - 1) - a(0), 1e-12);
    const double lo = a(0) - span;
    const int samples = 4000;
    const double step = 3.0 * span / samples;
    int best = 0;
    double best_value = objective(lo);
    for (int i = 1; i <= samples; ++i) {
      const double value = objective(lo + i * step);
      if (value < best_value) {
        best_value = value;
        best = i;
      }
    }
    center = lo + best * step;
    double left = lo + std::max(0, best - 1) * step;
    double right = lo + std::min(samples, best + 1) * step;
    const double s_left = slope(left);
    const double s_right = slope(right);
    if (s_left * s_right < 0.0) {
      double f_left = s_left;
      for (int iter = 0; iter < 200 && right - left > 0.0; ++iter) {
        const double mid = 0.5 * (left + right);
        if (mid <= left || mid >= right) break;
        const double f_mid = slope(mid);
        if (f_mid * f_left <= 0.0) {
          right = mid;
        } else {
          left = mid;
          f_left = f_mid;
        }
      }
      const double polished = 0.5 * (left + right);
      if (objective(polished) <= best_value) center = polished;
    }
  }

  const double kt = coefficient(center);
  double residual = 0.0;
  for (Index m = 0; m < n; ++m)
    residual = std::max(residual, std::abs(y(m) - kt * (a(m) - center) * (a(m) - center) * t));
  return {kt, center, residual};
}

}  // namespace qmeas
