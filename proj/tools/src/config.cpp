#include "qmeas_cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qmeas/csv.hpp"

namespace qmeas::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double to_real(std::string_view v) {
  double x = 0.0;
  if (!parse_number(v, x) || !std::isfinite(x)) throw ValidationError("expected a number, got '" + std::string(v) + "'");
  return x;
}

std::uint64_t to_unsigned(std::string_view v) {
  v = trim(v);
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ValidationError("expected a non-negative integer, got '" + std::string(v) + "'");
  return x;
}

bool to_bool(std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ValidationError("expected true or false, got '" + std::string(v) + "'");
}

std::optional<Scenario> scenario_from(std::string_view v) {
  for (Scenario s : {Scenario::lindblad, Scenario::chm, Scenario::sse_ensemble, Scenario::chain, Scenario::zeno,
                     Scenario::rabi_monitor, Scenario::transition, Scenario::verify})
    if (scenario_name(s) == v) return s;
  return std::nullopt;
}

Matrix preset_hamiltonian(std::string_view preset) {
  if (preset == "two-level") return pauli_x().matrix();
  Matrix h = Matrix::Zero(3, 3);
  h(0, 1) = h(1, 0) = h(1, 2) = h(2, 1) = 1.0;
  return h;
}

Matrix preset_observable(std::string_view preset) {
  if (preset == "two-level") return pauli_z().matrix();
  return diagonal_operator({-1.0, 0.0, 2.0}).matrix();
}

void require_hermitian(const Matrix& m, const char* name, std::size_t line) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > kHermitianTolerance) {
        std::ostringstream os;
        os << name << " is not Hermitian: entry (" << i << "," << j << ") = " << format_number(m(i, j).real())
           << (m(i, j).imag() < 0 ? "" : "+") << format_number(m(i, j).imag()) << "i but entry (" << j << ","
           << i << ") = " << format_number(m(j, i).real()) << (m(j, i).imag() < 0 ? "" : "+")
           << format_number(m(j, i).imag()) << "i";
        throw ConfigError(line, os.str());
      }
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"scenario",
       [](RunConfig& c, std::string_view v) {
         const auto s = scenario_from(v);
         if (!s) throw ValidationError("unknown scenario '" + std::string(v) + "'");
         c.scenario = *s;
       }},
      {"seed", [](RunConfig& c, std::string_view v) { c.seed = to_unsigned(v); }},
      {"model.preset",
       [](RunConfig& c, std::string_view v) {
         if (v != "two-level" && v != "three-level" && v != "custom")
           throw ValidationError("unknown preset '" + std::string(v) + "' (two-level, three-level, custom)");
         c.preset = v;
       }},
      {"model.H", [](RunConfig& c, std::string_view v) { c.H = parse_matrix(v); }},
      {"model.A", [](RunConfig& c, std::string_view v) { c.A = parse_matrix(v); }},
      {"model.kappa", [](RunConfig& c, std::string_view v) { c.kappa = to_real(v); }},
      {"model.psi0",
       [](RunConfig& c, std::string_view v) {
         c.psi0.clear();
         for (std::string_view t : split_tokens(v)) c.psi0.push_back(parse_complex(t));
       }},
      {"grid.t0", [](RunConfig& c, std::string_view v) { c.t0 = to_real(v); }},
      {"grid.dt", [](RunConfig& c, std::string_view v) { c.dt = to_real(v); }},
      {"grid.n_steps", [](RunConfig& c, std::string_view v) { c.n_steps = to_unsigned(v); }},
      {"ensemble.n_traj", [](RunConfig& c, std::string_view v) { c.n_traj = to_unsigned(v); }},
      {"chm.readout", [](RunConfig& c, std::string_view v) { c.readout = to_real(v); }},
      {"chm.record_file", [](RunConfig& c, std::string_view v) { c.record_file = std::string(v); }},
      {"chm.substeps", [](RunConfig& c, std::string_view v) { c.substeps = static_cast<int>(to_unsigned(v)); }},
      {"chm.quad_order",
       [](RunConfig& c, std::string_view v) { c.quad_order = static_cast<int>(to_unsigned(v)); }},
      {"chm.marginalize", [](RunConfig& c, std::string_view v) { c.marginalize = to_bool(v); }},
      {"chain.strength", [](RunConfig& c, std::string_view v) { c.strength = to_real(v); }},
      {"chain.shots", [](RunConfig& c, std::string_view v) { c.shots = to_unsigned(v); }},
      {"chain.chains", [](RunConfig& c, std::string_view v) { c.chains = to_unsigned(v); }},
      {"chain.threshold", [](RunConfig& c, std::string_view v) { c.collapse_threshold = to_real(v); }},
      {"drive.delta_e", [](RunConfig& c, std::string_view v) { c.delta_e = to_real(v); }},
      {"drive.rabi", [](RunConfig& c, std::string_view v) { c.rabi = to_real(v); }},
      {"drive.kappa_list",
       [](RunConfig& c, std::string_view v) {
         c.kappa_list.clear();
         for (std::string_view t : split_tokens(v)) c.kappa_list.push_back(to_real(t));
       }},
      {"drive.duration", [](RunConfig& c, std::string_view v) { c.duration = to_real(v); }},
      {"drive.window", [](RunConfig& c, std::string_view v) { c.window = to_real(v); }},
      {"drive.threshold_fraction", [](RunConfig& c, std::string_view v) { c.threshold_fraction = to_real(v); }},
      {"drive.segment_duration", [](RunConfig& c, std::string_view v) { c.segment_duration = to_real(v); }},
      {"drive.median_band", [](RunConfig& c, std::string_view v) { c.median_band = to_real(v); }},
      {"drive.initial",
       [](RunConfig& c, std::string_view v) {
         if (v != "ground" && v != "excited") throw ValidationError("initial must be ground or excited");
         c.initial = v;
       }},
      {"output.dir", [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); }},
  };
  return table;
}

}  // namespace

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::lindblad: return "lindblad";
    case Scenario::chm: return "chm";
    case Scenario::sse_ensemble: return "sse-ensemble";
    case Scenario::chain: return "chain";
    case Scenario::zeno: return "zeno";
    case Scenario::rabi_monitor: return "rabi-monitor";
    case Scenario::transition: return "transition";
    case Scenario::verify: return "verify";
  }
  return "unknown";
}

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + message : "config: " + message),
      line_(line) {}

Complex parse_complex(std::string_view text) {
  const std::string_view s = trim(text);
  const auto bad = [&] { return ValidationError("malformed complex number '" + std::string(s) + "'"); };
  if (s.empty()) throw bad();
  if (s.back() != 'i' && s.back() != 'j') return {to_real(s), 0.0};
  const std::string_view body = s.substr(0, s.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;)
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  const auto imag_part = [&](std::string_view p) {
    if (p.empty() || p == "+") return 1.0;
    if (p == "-") return -1.0;
    double x = 0.0;
    if (!parse_number(p, x) || !std::isfinite(x)) throw bad();
    return x;
  };
  if (split == std::string_view::npos) return {0.0, imag_part(body)};
  double re = 0.0;
  if (!parse_number(body.substr(0, split), re) || !std::isfinite(re)) throw bad();
  return {re, imag_part(body.substr(split))};
}

Matrix parse_matrix(std::string_view text) {
  std::vector<std::vector<Complex>> rows;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    std::vector<Complex> row;
    for (std::string_view t : split_tokens(text.substr(start, end - start))) row.push_back(parse_complex(t));
    if (!row.empty()) rows.push_back(std::move(row));
    start = end + 1;
  }
  if (rows.empty()) throw ValidationError("empty matrix");
  const std::size_t n = rows.size();
  Matrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw ValidationError("matrix must be square: row " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const char* const known[] = {"model", "grid", "ensemble", "chm", "chain", "drive", "output"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        throw ConfigError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key = value");
    const std::string key = std::string(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) throw ConfigError(line_no, "unknown key '" + full + "'");
    if (seen.count(full)) throw ConfigError(line_no, "duplicate key '" + full + "'");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + full + "'");
    try {
      it->second(c, value);
    } catch (const ValidationError& e) {
      throw ConfigError(line_no, full + ": " + e.what());
    }
    seen[full] = line_no;
  }

  const auto line_of = [&](const char* key) -> std::size_t {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  if (!seen.count("scenario")) throw ConfigError(0, "missing required key 'scenario'");

  const bool explicit_matrices = seen.count("model.H") || seen.count("model.A");
  if (explicit_matrices) {
    if (seen.count("model.preset") && c.preset != "custom")
      throw ConfigError(line_of("model.preset"), "preset '" + c.preset + "' cannot be combined with explicit H or A");
    if (!seen.count("model.H") || !seen.count("model.A"))
      throw ConfigError(line_of(seen.count("model.H") ? "model.H" : "model.A"), "custom models need both H and A");
    c.preset = "custom";
  } else {
    if (c.preset == "custom") throw ConfigError(line_of("model.preset"), "preset custom needs H and A");
    c.H = preset_hamiltonian(c.preset);
    c.A = preset_observable(c.preset);
  }
  if (c.H.rows() < 2) throw ConfigError(line_of("model.H"), "dimension must be at least 2");
  if (c.A.rows() != c.H.rows())
    throw ConfigError(line_of("model.A"), "H and A dimensions differ");
  require_hermitian(c.H, "H", line_of("model.H"));
  require_hermitian(c.A, "A", line_of("model.A"));

  if (!(c.kappa > 0.0)) throw ConfigError(line_of("model.kappa"), "kappa must be positive");
  if (!c.psi0.empty()) {
    if (c.psi0.size() != c.dim())
      throw ConfigError(line_of("model.psi0"), "psi0 has " + std::to_string(c.psi0.size()) +
                                                  " entries, expected " + std::to_string(c.dim()));
    double norm = 0.0;
    for (Complex z : c.psi0) norm += std::norm(z);
    if (!(norm > 0.0)) throw ConfigError(line_of("model.psi0"), "psi0 must be nonzero");
  }
  if (c.dt && !(*c.dt > 0.0)) throw ConfigError(line_of("grid.dt"), "dt must be positive");
  if (c.n_steps < 1) throw ConfigError(line_of("grid.n_steps"), "n_steps must be >= 1");
  if (c.n_traj < 1) throw ConfigError(line_of("ensemble.n_traj"), "n_traj must be >= 1");
  if (c.substeps < 1) throw ConfigError(line_of("chm.substeps"), "substeps must be >= 1");
  if (c.quad_order < 10 || c.quad_order > 400)
    throw ConfigError(line_of("chm.quad_order"), "quad_order must lie in [10, 400]");
  if (!(c.strength > 0.0)) throw ConfigError(line_of("chain.strength"), "strength must be positive");
  if (c.shots < 1) throw ConfigError(line_of("chain.shots"), "shots must be >= 1");
  if (c.chains < 1) throw ConfigError(line_of("chain.chains"), "chains must be >= 1");
  if (!(c.collapse_threshold > 0.0 && c.collapse_threshold < 0.5))
    throw ConfigError(line_of("chain.threshold"), "threshold must lie in (0, 0.5)");
  if (!(c.delta_e > 0.0)) throw ConfigError(line_of("drive.delta_e"), "delta_e must be positive");
  if (!(c.rabi >= 0.0)) throw ConfigError(line_of("drive.rabi"), "rabi must be >= 0");
  if (c.kappa_list.empty()) throw ConfigError(line_of("drive.kappa_list"), "kappa_list is empty");
  for (std::size_t i = 0; i < c.kappa_list.size(); ++i) {
    if (!(c.kappa_list[i] > 0.0)) throw ConfigError(line_of("drive.kappa_list"), "kappa values must be positive");
    if (i > 0 && !(c.kappa_list[i] > c.kappa_list[i - 1]))
      throw ConfigError(line_of("drive.kappa_list"), "kappa values must be sorted ascending");
  }
  if (c.duration && !(*c.duration > 0.0)) throw ConfigError(line_of("drive.duration"), "duration must be positive");
  if (!(c.window >= 0.0)) throw ConfigError(line_of("drive.window"), "window must be >= 0");
  if (!(c.threshold_fraction > 0.0 && c.threshold_fraction <= 0.5))
    throw ConfigError(line_of("drive.threshold_fraction"), "threshold_fraction must lie in (0, 0.5]");
  if (!(c.segment_duration >= 0.0))
    throw ConfigError(line_of("drive.segment_duration"), "segment_duration must be >= 0");
  if (!(c.median_band >= 0.0)) throw ConfigError(line_of("drive.median_band"), "median_band must be >= 0");
  const bool driven = c.scenario == Scenario::zeno || c.scenario == Scenario::rabi_monitor;
  if (driven && !(c.rabi > 0.0)) throw ConfigError(line_of("drive.rabi"), "this scenario needs rabi > 0");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_reference() {
  return R"(Config keys (defaults in parentheses):
  scenario = lindblad | chm | sse-ensemble | chain | zeno | rabi-monitor | transition | verify
  seed (20240601)
  [model]    preset (two-level: H = sx, A = sz; three-level: H = tridiagonal ones, A = diag(-1,0,2); custom)
             H, A (rows separated by ';', entries like 1, -0.5i, 0.3+2i)
             kappa (1), psi0 (first basis state)
  [grid]     t0 (0), dt (0.01; 0.001 for rabi-monitor and transition), n_steps (100)
  [ensemble] n_traj (100)
  [chm]      readout (0, constant record), record_file (CSV t,a), substeps (1), quad_order (40),
             marginalize (false)
  [chain]    strength (0.1), shots (200), chains (1), threshold (1e-4)
  [drive]    delta_e (2), rabi (1), kappa_list (0.1, 1, 10, 100), duration (50/rabi for
             rabi-monitor, 20/rabi for transition), window (1/(2 rabi)), threshold_fraction (0.25),
             segment_duration (100/rabi), median_band (2), initial (ground)
  [output]   dir (out)
)";
}

}  // namespace qmeas::cli
