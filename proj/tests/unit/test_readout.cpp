#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmeas/error.hpp"
#include "qmeas/readout.hpp"

using namespace qmeas;

TEST(TimeGrid, Validation) {
  try {
    TimeGrid(0.0, 0.0, 10);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "dt must be positive");
  }
  EXPECT_THROW(TimeGrid(0.0, 0.1, 0), ValidationError);
}

TEST(TimeGrid, Covering) {
  const TimeGrid g = TimeGrid::covering(1.0, 2.0, 0.3);
  EXPECT_EQ(g.n_steps(), 7u);
  EXPECT_LE(g.dt(), 0.3);
  EXPECT_NEAR(g.time(g.n_steps()), 3.0, 1e-14);
  EXPECT_NEAR(g.midpoint(0), 1.0 + 0.5 * g.dt(), 1e-15);
}

TEST(ReadoutRecord, RejectsLengthMismatchAndNonFinite) {
  const TimeGrid g(0.0, 0.1, 3);
  EXPECT_THROW(ReadoutRecord(g, {1.0, 2.0}), ValidationError);
  EXPECT_THROW(ReadoutRecord(g, {1.0, std::nan(""), 2.0}), ValidationError);
  EXPECT_NEAR(ReadoutRecord(g, {1.0, 2.0, 3.0}).mean(), 2.0, 1e-15);
}

TEST(ReferenceWeight, ClosedForm) {
  const TimeGrid g(0.0, 0.01, 25);
  const double oracle = 25 * 0.5 * std::log(2.0 * 0.7 * 0.01 / std::numbers::pi);
  EXPECT_NEAR(reference_log_weight(g, 0.7), oracle, 1e-12);
  EXPECT_THROW(reference_log_weight(g, 0.0), ValidationError);
}

TEST(RecordText, RoundTrip) {
  const TimeGrid g(0.25, 0.1, 4);
  const ReadoutRecord r(g, {0.1, -2.0, 1.0 / 3.0, 7e-9});
  const ReadoutRecord back = parse_record(serialize_record(r));
  EXPECT_EQ(back.values(), r.values());
  EXPECT_NEAR(back.grid().t0(), 0.25, 1e-12);
  EXPECT_NEAR(back.grid().dt(), 0.1, 1e-12);
  // Serializing again gives identical text.
  EXPECT_EQ(serialize_record(parse_record(serialize_record(r), 0.1)), serialize_record(r));
}

TEST(RecordText, ErrorsNameTheRow) {
  const auto message = [](const char* text) {
    try {
      parse_record(text);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("time,a\n0.05,1\n").find("row 1"), std::string::npos);
  EXPECT_NE(message("t,a\n0.05,1\n0.15,x\n").find("row 3"), std::string::npos);
  EXPECT_NE(message("t,a\n0.05,1\n0.05,2\n").find("row 3"), std::string::npos);
  EXPECT_NE(message("t,a\n0.05,1\n").find("single row"), std::string::npos);
  EXPECT_NE(message("t,a\n0.05,1\n0.15,1\n0.35,1\n").find("inconsistent"), std::string::npos);
}

TEST(Concatenate, JoinsAbuttingRecords) {
  const ReadoutRecord a(TimeGrid(0.0, 0.1, 2), {1.0, 2.0});
  const ReadoutRecord b(TimeGrid(0.2, 0.1, 1), {3.0});
  const ReadoutRecord c = concatenate(a, b);
  EXPECT_EQ(c.values(), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_THROW(concatenate(a, ReadoutRecord(TimeGrid(0.5, 0.1, 1), {3.0})), ValidationError);
}

TEST(ReadoutQuadrature, IntegratesReferenceDensityToOne) {
  // Weights integrate against sqrt(2 kappa dt / pi) da.
  for (double center : {0.0, 1.5}) {
    const ReadoutQuadrature q = readout_quadrature(center, 0.5, 0.01, 40);
    double total = 0.0;
    for (std::size_t k = 0; k < q.readouts.size(); ++k)
      total += q.weights[k] * std::exp(-2.0 * 0.5 * 0.01 * std::pow(q.readouts[k] - 0.3, 2));
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}
