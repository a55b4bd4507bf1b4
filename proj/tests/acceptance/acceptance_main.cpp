// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <cstring>
#include <iostream>
#include <string>

#include "qmeas_cli/verify.hpp"

int main(int argc, char** argv) {
  qmeas::cli::VerifyOptions options;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--scratch") == 0) options.scratch_dir = argv[i + 1];
    else if (std::strcmp(argv[i], "--workers") == 0) options.workers = static_cast<unsigned>(std::stoul(argv[i + 1]));
  }
  const auto results = qmeas::cli::run_verification(options, [](const qmeas::cli::CheckResult& r) {
    std::cout << qmeas::cli::format_check(r) << std::endl;
  });
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
