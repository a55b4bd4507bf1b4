#pragma once

// Discrete models of gradual decoherence: a chain of Gaussian fuzzy
// measurements R_a = exp(-s (A - a)^2), and a series of weak interactions
// with a two-level ancilla.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qmeas/hilbert.hpp"
#include "qmeas/rng.hpp"

namespace qmeas {

struct Eigenspace {
  double value;
  Matrix basis;  // orthonormal columns
};

/// Gaussian POVM of strength s: outcome density sqrt(2 s / pi) ||R_a psi||^2.
class FuzzyKraus {
 public:
  /// Throws ValidationError unless s > 0 and the completeness relation
  /// integral sqrt(2 s / pi) R_a^2 da = 1 holds to 1e-8 under quadrature.
  FuzzyKraus(HermitianOperator observable, double strength);

  const HermitianOperator& A() const { return observable_; }
  double strength() const { return strength_; }
  const std::vector<Eigenspace>& eigenspaces() const { return eigenspaces_; }
  double completeness_defect() const { return completeness_defect_; }

  Matrix outcome_operator(double a) const;

 private:
  HermitianOperator observable_;
  double strength_;
  std::vector<Eigenspace> eigenspaces_;
  double completeness_defect_ = 0.0;
};

std::vector<double> eigenspace_populations(const FuzzyKraus& kraus, const QuantumState& psi);

struct FuzzyShot {
  QuantumState state;
  double readout;
  double density;  // p(a) of the sampled readout
};

/// Samples a from the exact outcome density (a mixture of Gaussians centred on
/// the eigenvalues, variance 1/(4 s)), applies R_a and renormalizes.
FuzzyShot sample_fuzzy_shot(const FuzzyKraus& kraus, const QuantumState& psi, CounterRng& rng);

struct ChainOutcome {
  QuantumState final_state;
  std::vector<double> readouts;
  std::optional<std::size_t> collapsed_to;       // eigenspace index, ascending eigenvalue
  std::vector<std::vector<double>> populations;  // per shot, entry 0 is the initial state
};

/// Repeats fuzzy shots until some eigenspace population exceeds
/// 1 - collapse_threshold or n_steps shots are used. Requires a nondegenerate A.
ChainOutcome run_decoherence_chain(const FuzzyKraus& kraus, const QuantumState& psi0,
                                   std::size_t n_steps, std::uint64_t seed,
                                   double collapse_threshold = 1e-4);

/// Columns shot, readout, p_0, p_1, ...; one row per shot.
void write_chain_csv(std::ostream& out, const ChainOutcome& outcome);

struct AncillaScheme {
  double g;             // per-shot coupling
  std::size_t n_shots;
};

/// M_0, M_1 from coupling a fresh ancilla |0> through exp(-i g A (x) sigma_y)
/// and reading it out in the computational basis.
struct BranchOperators {
  Matrix m0;
  Matrix m1;
};
BranchOperators ancilla_branch_operators(double g, const HermitianOperator& observable);

struct AncillaBranch {
  QuantumState state;
  double probability;
  int outcome;
};

/// Both outcome branches with nonzero probability. Requires g |A| <= 0.5.
std::vector<AncillaBranch> weak_ancilla_shot(const AncillaScheme& scheme,
                                             const HermitianOperator& observable,
                                             const QuantumState& psi);

/// i log(M_o^n) for the series post-selected on `outcome` in every shot, i.e. the
/// effective Hamiltonian times duration. Throws if M_o^n is not diagonal in the
/// eigenbasis of A.
NonHermitianOperator post_selected_log_operator(const AncillaScheme& scheme,
                                                const HermitianOperator& observable,
                                                int outcome = 0);

struct QuadraticFit {
  double kappa_eff;
  double offset;    // centre a-bar
  double residual;  // max |y_m - kappa_eff (a_m - a-bar)^2 T|
};

/// Least-squares fit of -Im(eigenvalues) of `log_operator` (diagonal in the A
/// basis) to kappa_eff (a_m - a-bar)^2 T over the eigenvalues a_m of A.
QuadraticFit fit_effective_quadratic(const NonHermitianOperator& log_operator,
                                     const HermitianOperator& observable,
                                     double total_time = 1.0);

}  // namespace qmeas
