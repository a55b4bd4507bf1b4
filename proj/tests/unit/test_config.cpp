#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qmeas_cli/config.hpp"
#include "qmeas_cli/dispatch.hpp"

using namespace qmeas;
using namespace qmeas::cli;

namespace {

std::string error_of(const char* text) {
  try {
    parse_config(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST(Config, MinimalZenoGetsDefaults) {
  const RunConfig c = parse_config("scenario = zeno\n");
  EXPECT_EQ(c.scenario, Scenario::zeno);
  EXPECT_EQ(c.kappa_list, (std::vector<double>{0.1, 1.0, 10.0, 100.0}));
  EXPECT_EQ(c.dim(), 2u);
  EXPECT_EQ(c.preset, "two-level");
  EXPECT_DOUBLE_EQ(c.delta_e, 2.0);
}

TEST(Config, ThreeLevelPreset) {
  const RunConfig c = parse_config("scenario = chain\n[model]\npreset = three-level\n");
  EXPECT_EQ(c.dim(), 3u);
  EXPECT_EQ(c.A(2, 2), Complex(2.0, 0.0));
}

TEST(Config, ZeroDtReportsLine) {
  EXPECT_EQ(error_of("scenario = lindblad\n\n[grid]\ndt = 0\n"), "line 4: dt must be positive");
}

TEST(Config, NonHermitianNamesEntries) {
  const std::string e = error_of("scenario = lindblad\n[model]\nH = 0 1; 1 0\nA = 1 2; 0 -1\n");
  EXPECT_NE(e.find("line 4"), std::string::npos) << e;
  EXPECT_NE(e.find("(0,1)"), std::string::npos) << e;
  EXPECT_NE(e.find("(1,0)"), std::string::npos) << e;
}

TEST(Config, RejectsUnknownKeysSectionsAndScenarios) {
  EXPECT_NE(error_of("scenario = zeno\n[drive]\nrabbi = 1\n").find("line 3: unknown key 'drive.rabbi'"), std::string::npos);
  EXPECT_NE(error_of("scenario = zeno\n[colour]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(error_of("scenario = teleport\n").find("unknown scenario"), std::string::npos);
  EXPECT_NE(error_of("seed = 3\n").find("scenario"), std::string::npos);
  EXPECT_NE(error_of("scenario = zeno\nscenario = chm\n").find("duplicate"), std::string::npos);
}

TEST(Config, SemanticChecks) {
  EXPECT_NE(error_of("scenario = zeno\n[drive]\nkappa_list = 1, 0.5\n").find("ascending"), std::string::npos);
  EXPECT_NE(error_of("scenario = chm\n[model]\nkappa = -1\n").find("kappa must be positive"), std::string::npos);
  EXPECT_NE(error_of("scenario = chm\n[model]\npsi0 = 1 0 0\n").find("psi0"), std::string::npos);
  EXPECT_NE(error_of("scenario = chm\n[model]\npreset = two-level\nH = 1 0; 0 1\nA = 1 0; 0 1\n").find("cannot be combined"),
            std::string::npos);
}

TEST(Config, ComplexEntries) {
  EXPECT_EQ(parse_complex("1"), Complex(1, 0));
  EXPECT_EQ(parse_complex("-0.5i"), Complex(0, -0.5));
  EXPECT_EQ(parse_complex("0.3+2i"), Complex(0.3, 2));
  EXPECT_EQ(parse_complex("1e-3-1e+2i"), Complex(1e-3, -100));
  EXPECT_EQ(parse_complex("-i"), Complex(0, -1));
  EXPECT_THROW(parse_complex("1+xi"), ValidationError);
  const Matrix m = parse_matrix("0 -i; i 0");
  EXPECT_EQ(m, pauli_y().matrix());
  EXPECT_THROW(parse_matrix("1 0; 0"), ValidationError);
}

TEST(Dispatch, ZenoWritesOneRowPerKappa) {
  namespace fs = std::filesystem;
  RunConfig c = parse_config("scenario = zeno\n[ensemble]\nn_traj = 10\n");
  c.output_dir = fs::temp_directory_path() / "qmeas-test-zeno";
  c.quiet = true;
  fs::remove_all(c.output_dir);
  std::ostringstream out, err;
  ASSERT_EQ(dispatch(c, out, err), kSuccess) << err.str();
  std::ifstream f(c.output_dir / "zeno.csv");
  std::string line;
  int rows = -1;
  while (std::getline(f, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_TRUE(fs::exists(c.output_dir / "summary.json"));
  fs::remove_all(c.output_dir);
}

TEST(Dispatch, ExitCodes) {
  namespace fs = std::filesystem;
  RunConfig c = parse_config("scenario = chm\n[model]\nkappa = 10\n[grid]\ndt = 0.1\nn_steps = 2\n[chm]\nreadout = 50\n");
  c.output_dir = fs::temp_directory_path() / "qmeas-test-exit";
  std::ostringstream out, err;
  EXPECT_EQ(dispatch(c, out, err), kValidationFailure);
  RunConfig chain = parse_config("scenario = chain\n[model]\nH = 0 0 0; 0 0 0; 0 0 0\nA = 1 0 0; 0 1 0; 0 0 2\n");
  chain.output_dir = c.output_dir;
  EXPECT_EQ(dispatch(chain, out, err), kValidationFailure);
  fs::remove_all(c.output_dir);
}
