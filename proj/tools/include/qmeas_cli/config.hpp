#pragma once

// Run configuration: flat key = value text with [section] headers and '#'
// comments. Matrices are rows separated by ';' of complex entries such as
// "1", "-0.5i" or "0.3+2i".

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmeas/error.hpp"
#include "qmeas/hilbert.hpp"

namespace qmeas::cli {

enum class Scenario { lindblad, chm, sse_ensemble, chain, zeno, rabi_monitor, transition, verify };

std::string_view scenario_name(Scenario s);

class ConfigError : public ValidationError {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct RunConfig {
  Scenario scenario = Scenario::verify;
  std::uint64_t seed = 20240601;

  // [model]
  std::string preset = "two-level";  // "two-level", "three-level" or "custom"
  Matrix H;
  Matrix A;
  double kappa = 1.0;
  std::vector<Complex> psi0;  // empty: first basis state

  // [grid]
  double t0 = 0.0;
  std::optional<double> dt;  // scenario default when unset
  std::size_t n_steps = 100;

  // [ensemble]
  std::size_t n_traj = 100;

  // [chm]
  double readout = 0.0;
  std::filesystem::path record_file;
  int substeps = 1;
  int quad_order = 40;
  bool marginalize = false;

  // [chain]
  double strength = 0.1;
  std::size_t shots = 200;
  std::size_t chains = 1;
  double collapse_threshold = 1e-4;

  // [drive]
  double delta_e = 2.0;
  double rabi = 1.0;
  std::vector<double> kappa_list = {0.1, 1.0, 10.0, 100.0};
  std::optional<double> duration;  // scenario default when unset
  double window = 0.0;
  double threshold_fraction = 0.25;
  double segment_duration = 0.0;
  double median_band = 2.0;
  std::string initial = "ground";

  // [output] and command-line only
  std::filesystem::path output_dir = "out";
  unsigned workers = 0;
  bool quiet = false;

  std::size_t dim() const { return static_cast<std::size_t>(H.rows()); }
};

/// Parses and validates a configuration. Errors carry the offending line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Documented keys and defaults, for --help.
std::string config_reference();

Matrix parse_matrix(std::string_view text);
Complex parse_complex(std::string_view text);

}  // namespace qmeas::cli
