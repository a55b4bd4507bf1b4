#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmeas/error.hpp"
#include "qmeas/experiments.hpp"

using namespace qmeas;

TEST(DrivenTwoLevel, Validation) {
  EXPECT_THROW(DrivenTwoLevel(0.0, 1.0, 1.0), ValidationError);
  EXPECT_THROW(DrivenTwoLevel(2.0, -1.0, 1.0), ValidationError);
  EXPECT_THROW(DrivenTwoLevel(2.0, 1.0, 0.0), ValidationError);
  const DrivenTwoLevel s(2.0, 1.0, 0.1);
  EXPECT_NEAR(expectation(DrivenTwoLevel::ground(), s.observable()), -1.0, 1e-15);
  EXPECT_NEAR(expectation(DrivenTwoLevel::excited(), s.observable()), 1.0, 1e-15);
  EXPECT_TRUE(s.soft_regime());
  EXPECT_FALSE(s.with_kappa(1.0).soft_regime());
}

TEST(ZenoScan, UnitaryLimitFlipsFully) {
  const ZenoScanResult r = run_zeno_scan(DrivenTwoLevel(2.0, 1.0, 1.0), {1e-6}, 0, 1);
  EXPECT_NEAR(r.transfer_probabilities[0], 1.0, 1e-5);
}

TEST(ZenoScan, BlochOracleAndMonotonicity) {
  // Rotating-frame Bloch equations with coherence decay g = kappa dE^2 / 2:
  // z' = -Omega y, y' = Omega z - g y, starting at z = -1.
  const auto oracle = [](double kappa) {
    const double g = kappa * 2.0, t_end = std::numbers::pi;
    double z = -1.0, y = 0.0;
    const int n = 200000;
    const double h = t_end / n;
    const auto f = [&](double zz, double yy, double& dz, double& dy) {
      dz = -yy;
      dy = zz - g * yy;
    };
    for (int i = 0; i < n; ++i) {
      double k1z, k1y, k2z, k2y, k3z, k3y, k4z, k4y;
      f(z, y, k1z, k1y);
      f(z + 0.5 * h * k1z, y + 0.5 * h * k1y, k2z, k2y);
      f(z + 0.5 * h * k2z, y + 0.5 * h * k2y, k3z, k3y);
      f(z + h * k3z, y + h * k3y, k4z, k4y);
      z += h / 6 * (k1z + 2 * k2z + 2 * k3z + k4z);
      y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    }
    return 0.5 * (1.0 + z);
  };
  const std::vector<double> kappas = {0.1, 1.0, 10.0, 100.0};
  const ZenoScanResult r = run_zeno_scan(DrivenTwoLevel(2.0, 1.0, 1.0), kappas, 0, 1);
  EXPECT_TRUE(r.monotone);
  for (std::size_t i = 0; i < kappas.size(); ++i) EXPECT_NEAR(r.transfer_probabilities[i], oracle(kappas[i]), 1e-7);
  // Overdamped: kappa dE^2 / 2 >= 10 Omega.
  EXPECT_LT(r.transfer_probabilities[2], 0.1);
}

TEST(ZenoScan, RejectsUnsortedKappas) {
  EXPECT_THROW(run_zeno_scan(DrivenTwoLevel(2.0, 1.0, 1.0), {1.0, 0.5}, 0, 1), ValidationError);
  EXPECT_THROW(run_zeno_scan(DrivenTwoLevel(2.0, 1.0, 1.0), {}, 0, 1), ValidationError);
}

TEST(ZenoScan, EnsembleCrossCheck) {
  const ZenoScanResult r = run_zeno_scan(DrivenTwoLevel(2.0, 1.0, 1.0), {0.5}, 400, 3);
  ASSERT_EQ(r.sse_trace_distance.size(), 1u);
  EXPECT_LT(r.sse_trace_distance[0], 0.1);
}

TEST(Periodogram, LocatesSinusoid) {
  const double dt = 0.01, f = 0.5;
  const std::size_t n = 4000;
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = 3.0 + std::cos(2 * std::numbers::pi * f * (k + 0.5) * dt);
  const auto s = record_periodogram(ReadoutRecord(TimeGrid(0.0, dt, n), v), 0.0, 1);
  std::size_t peak = 0;
  for (std::size_t b = 0; b < s.size(); ++b)
    if (s[b].power > s[peak].power) peak = b;
  EXPECT_NEAR(s[peak].frequency, f, 1e-12);
  // Parseval for a unit cosine: (T / 4) at the line.
  EXPECT_NEAR(s[peak].power, n * dt / 4.0, 1e-6);
}

TEST(RabiMonitor, UndrivenRecordShowsNoLine) {
  int detected = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SpectrumOptions o;
    const auto r = run_rabi_monitor(DrivenTwoLevel(2.0, 1.0, 10.0), 500.0, 2.5e-3, seed, o);
    detected += r.line_detected ? 1 : 0;
    EXPECT_TRUE(r.warning.has_value());
  }
  EXPECT_LE(detected, 1);
}

TEST(RabiMonitor, SoftRegimeShowsLine) {
  int detected = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = run_rabi_monitor(DrivenTwoLevel(2.0, 1.0, 0.1), 1000.0, 2e-3, seed);
    detected += r.line_detected ? 1 : 0;
    EXPECT_FALSE(r.warning.has_value());
    EXPECT_LE(std::abs(static_cast<long>(r.peak_bin) - static_cast<long>(r.rabi_bin)), 2);
  }
  EXPECT_GE(detected, 4);
}

TEST(Smoothing, MovingAverageAndHysteresis) {
  EXPECT_EQ(moving_average({1, 2, 3, 4}, 2), (std::vector<double>{1.5, 2.5, 3.5}));
  EXPECT_TRUE(moving_average({1, 2}, 3).empty());
  // Armed only after dipping below the low threshold.
  EXPECT_EQ(upward_crossings({0.9, -0.9, 0.0, 0.9, 0.2, -0.9, 0.9}, -0.5, 0.5), (std::vector<std::size_t>{3, 6}));
  EXPECT_TRUE(upward_crossings({0.9, 0.0, 0.9}, -0.5, 0.5).empty());
}

TEST(TransitionMonitor, ExcitedUndrivenNeverCrosses) {
  TransitionOptions o;
  o.window = 0.5;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = run_transition_monitor(DrivenTwoLevel(2.0, 0.0, 10.0), 20.0, 2.5e-3, seed, DrivenTwoLevel::excited(), o);
    EXPECT_TRUE(r.detections.empty());
  }
}

TEST(TransitionMonitor, NoiseOnlyFalsePositiveRate) {
  // Undriven ground state, kappa dE^2 T = 10.
  TransitionOptions o;
  o.window = 0.5;
  int false_positives = 0;
  const int n = 200;
  for (int seed = 0; seed < n; ++seed) {
    const auto r = run_transition_monitor(DrivenTwoLevel(2.0, 0.0, 2.5), 1.0, 1e-3, seed, DrivenTwoLevel::ground(), o);
    false_positives += r.detections.empty() ? 0 : 1;
  }
  EXPECT_LE(false_positives, n / 100);
}

TEST(TransitionMonitor, DetectionsMatchExpectationJumps) {
  // Frozen regime: rare jumps between the levels. Every detection must sit
  // next to an upward zero crossing of the trajectory's own <H0>, and every
  // jump that persists for two windows must be detected.
  const DrivenTwoLevel system(2.0, 1.0, 10.0);
  int detections = 0, precise = 0, sustained = 0, recalled = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = run_transition_monitor(system, 100.0, 2.5e-3, seed);
    const TimeGrid& grid = r.trajectory.grid;
    std::vector<double> h0;
    for (const auto& s : r.trajectory.states) h0.push_back(expectation(s, system.observable()));
    const auto crossings = upward_crossings(h0, -0.5, 0.5);
    const auto near = [&](double t, double tol) {
      for (std::size_t k : crossings)
        if (std::abs(grid.time(k) - t) <= tol) return true;
      return false;
    };
    for (double t : r.detections) {
      ++detections;
      precise += near(t, r.window) ? 1 : 0;
    }
    const auto hold = static_cast<std::size_t>(2.0 * r.window / grid.dt());
    for (std::size_t k : crossings) {
      if (k + hold >= h0.size()) continue;
      bool stays = true;
      for (std::size_t j = k; j <= k + hold && stays; ++j) stays = h0[j] > 0.0;
      if (!stays) continue;
      ++sustained;
      for (double t : r.detections)
        if (std::abs(t - grid.time(k)) <= r.window) {
          ++recalled;
          break;
        }
    }
  }
  ASSERT_GT(sustained, 5);
  EXPECT_EQ(precise, detections);
  EXPECT_GE(recalled, sustained * 9 / 10) << recalled << " of " << sustained;
}
