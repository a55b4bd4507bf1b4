#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qmeas/csv.hpp"

using namespace qmeas;

TEST(FormatNumber, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1.0}) {
    double back = 0.0;
    ASSERT_TRUE(parse_number(format_number(x), back));
    EXPECT_EQ(back, x);
  }
}

TEST(FormatNumber, Canonical) {
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(ParseNumber, AcceptsAndRejects) {
  double x = 0.0;
  EXPECT_TRUE(parse_number("  +1.5 ", x));
  EXPECT_EQ(x, 1.5);
  EXPECT_TRUE(parse_number("-2e-3", x));
  EXPECT_EQ(x, -2e-3);
  EXPECT_FALSE(parse_number("", x));
  EXPECT_FALSE(parse_number("1.5x", x));
  EXPECT_FALSE(parse_number("1,5", x));
}
