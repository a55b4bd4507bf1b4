#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace qmeas::cli {

struct CheckResult {
  std::string id;  // criterion label, e.g. "2a"
  std::string name;
  bool passed;
  std::string detail;
};

struct VerifyOptions {
  unsigned workers = 0;
  std::uint64_t seed = 20240601;
  std::filesystem::path scratch_dir;  // used by the reproducibility check
};

CheckResult check_dephasing_rate(const VerifyOptions& options);
CheckResult check_sse_equivalence(const VerifyOptions& options);
CheckResult check_marginal_equivalence(const VerifyOptions& options);
CheckResult check_three_way_equivalence(const VerifyOptions& options);  // 2a and 2b together
CheckResult check_generalized_unitarity(const VerifyOptions& options);
CheckResult check_slicing_convergence(const VerifyOptions& options);
CheckResult check_density_normalization(const VerifyOptions& options);
CheckResult check_collapse_statistics(const VerifyOptions& options);
CheckResult check_zeno_scan(const VerifyOptions& options);
CheckResult check_rabi_visibility(const VerifyOptions& options);
CheckResult check_weak_series(const VerifyOptions& options);
CheckResult check_reproducibility(const VerifyOptions& options);

struct NamedCheck {
  const char* id;
  CheckResult (*run)(const VerifyOptions&);
};
const std::vector<NamedCheck>& all_checks();

/// Runs every check in order; `report` (if set) sees each result as it lands.
std::vector<CheckResult> run_verification(const VerifyOptions& options,
                                          const std::function<void(const CheckResult&)>& report = {});

std::string format_check(const CheckResult& result);

}  // namespace qmeas::cli
