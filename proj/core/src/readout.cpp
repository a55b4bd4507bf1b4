#include "qmeas/readout.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qmeas/csv.hpp"
#include "qmeas/error.hpp"
#include "qmeas/quadrature.hpp"

namespace qmeas {

TimeGrid::TimeGrid(double t0, double dt, std::size_t n_steps)
    : t0_(t0), dt_(dt), n_steps_(n_steps) {
  if (!std::isfinite(t0)) throw ValidationError("TimeGrid: t0 must be finite");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (n_steps < 1) throw ValidationError("TimeGrid: n_steps must be >= 1");
}

TimeGrid TimeGrid::covering(double t0, double duration, double max_dt) {
  if (!(duration > 0.0)) throw ValidationError("TimeGrid::covering: duration must be positive");
  if (!(max_dt > 0.0)) throw ValidationError("dt must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(duration / max_dt - 1e-9));
  const std::size_t steps = std::max<std::size_t>(1, n);
  return TimeGrid(t0, duration / static_cast<double>(steps), steps);
}

ReadoutRecord::ReadoutRecord(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n_steps()) {
    std::ostringstream os;
    os << "ReadoutRecord: " << values_.size() << " values for a grid of " << grid_.n_steps()
       << " steps";
    throw ValidationError(os.str());
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      std::ostringstream os;
      os << "ReadoutRecord: non-finite value at step " << k;
      throw ValidationError(os.str());
    }
  }
}

double ReadoutRecord::mean() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / static_cast<double>(values_.size());
}

ReadoutRecord constant_record(const TimeGrid& grid, double a) {
  if (!std::isfinite(a)) throw ValidationError("constant_record: value must be finite");
  return ReadoutRecord(grid, std::vector<double>(grid.n_steps(), a));
}

double reference_log_weight(const TimeGrid& grid, double kappa) {
  if (!(kappa > 0.0)) throw ValidationError("reference_log_weight: kappa must be positive");
  return static_cast<double>(grid.n_steps()) * 0.5 *
         std::log(2.0 * kappa * grid.dt() / std::numbers::pi);
}

double reference_log_weight(const ReadoutRecord& record, double kappa) {
  return reference_log_weight(record.grid(), kappa);
}

ReadoutRecord concatenate(const ReadoutRecord& first, const ReadoutRecord& second) {
  const TimeGrid& g1 = first.grid();
  const TimeGrid& g2 = second.grid();
  if (g1.dt() != g2.dt()) throw ValidationError("concatenate: step sizes differ");
  if (std::abs(g2.t0() - g1.time(g1.n_steps())) > 1e-12 * std::max(1.0, std::abs(g2.t0())))
    throw ValidationError("concatenate: grids do not abut");
  std::vector<double> values = first.values();
  values.insert(values.end(), second.values().begin(), second.values().end());
  return ReadoutRecord(TimeGrid(g1.t0(), g1.dt(), g1.n_steps() + g2.n_steps()), std::move(values));
}

std::string serialize_record(const ReadoutRecord& record) {
  std::string out = "t,a\n";
  for (std::size_t k = 0; k < record.size(); ++k) {
    out += format_number(record.grid().midpoint(k));
    out += ',';
    out += format_number(record[k]);
    out += '\n';
  }
  return out;
}

namespace {

[[noreturn]] void parse_error(std::size_t row, const std::string& message) {
  std::ostringstream os;
  os << "record parse error at row " << row << ": " << message;
  throw ValidationError(os.str());
}

}  // namespace

ReadoutRecord parse_record(std::string_view text, std::optional<double> dt) {
  std::vector<double> times;
  std::vector<double> values;
  std::size_t row = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++row;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != "t,a") parse_error(row, "expected header \"t,a\"");
      header_seen = true;
      continue;
    }
    if (line.empty()) {
      if (text.empty()) break;
      parse_error(row, "empty line");
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
      parse_error(row, "expected two comma-separated fields");
    double t = 0.0, a = 0.0;
    if (!parse_number(line.substr(0, comma), t)) parse_error(row, "malformed time");
    if (!parse_number(line.substr(comma + 1), a)) parse_error(row, "malformed value");
    if (!std::isfinite(t) || !std::isfinite(a)) parse_error(row, "non-finite number");
    if (!times.empty() && !(t > times.back())) parse_error(row, "times must increase");
    times.push_back(t);
    values.push_back(a);
  }
  if (!header_seen) parse_error(1, "missing header");
  if (times.empty()) parse_error(row + 1, "record has no rows");

  double step = 0.0;
  if (dt) {
    if (!(*dt > 0.0)) throw ValidationError("dt must be positive");
    step = *dt;
  } else {
    if (times.size() < 2) parse_error(2, "cannot infer dt from a single row");
    step = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  }
  const double t0 = times.front() - 0.5 * step;
  const TimeGrid grid(t0, step, times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double expected = grid.midpoint(k);
    if (std::abs(times[k] - expected) > 1e-9 * std::max({1.0, std::abs(expected), step})) {
      std::ostringstream os;
      os << "time " << times[k] << " inconsistent with grid (expected " << expected << ")";
      parse_error(k + 2, os.str());
    }
  }
  return ReadoutRecord(grid, std::move(values));
}

ReadoutQuadrature readout_quadrature(double center, double kappa, double dt, int order) {
  if (!(kappa > 0.0)) throw ValidationError("readout_quadrature: kappa must be positive");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  const GaussHermiteRule rule = gauss_hermite(order);
  // a = center + x / s with s = sqrt(2 kappa dt); the measure factor cancels the Jacobian.
  const double scale = std::sqrt(2.0 * kappa * dt);
  ReadoutQuadrature q;
  q.readouts.resize(rule.nodes.size());
  q.weights.resize(rule.nodes.size());
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    q.readouts[k] = center + rule.nodes[k] / scale;
    q.weights[k] = rule.scaled_weights[k] / std::sqrt(std::numbers::pi);
  }
  return q;
}

}  // namespace qmeas
