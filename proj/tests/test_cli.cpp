#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lubrex/parallel.hpp"

namespace {

using lubrex::cli::run;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult call(std::initializer_list<std::string> args) {
  std::ostringstream out, err;
  const int code = run(std::vector<std::string>(args), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lubrex_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"basis"}).code, 2);                        // missing --k
  EXPECT_EQ(call({"basis", "--k", "3", "--bogus"}).code, 2);  // unknown flag
}

TEST(Cli, DomainErrorsExitThree) {
  EXPECT_EQ(call({"bound", "--h", "sine:a=2", "--order", "0", "--eps", "0.1"}).code, 3);
  EXPECT_EQ(call({"moments", "--h", "junk", "--max-order", "2"}).code, 3);
}

TEST(Cli, BasisEmitsSortedTuples) {
  RunResult r = call({"basis", "--k", "3"});
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("# lubrex basis", 0), 0u);  // config echo
  std::vector<std::string> tuples;
  while (std::getline(lines, line)) tuples.push_back(line);
  ASSERT_EQ(tuples.size(), 3u);
  EXPECT_EQ(tuples[0], "0,3,0,0");
  EXPECT_EQ(tuples[1], "1,1,1,0");
  EXPECT_EQ(tuples[2], "2,0,0,1");
}

TEST(Cli, ConstantsCsvIsDeterministic) {
  RunResult a = call({"constants", "--max-order", "1", "--format", "csv"});
  RunResult b = call({"constants", "--max-order", "1", "--format", "csv"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("kappa,1,after,7.00e-01,9.83e-01,8.00e-01"), std::string::npos) << a.out;
  EXPECT_NE(a.out.find("rho_theta,0,final,0.197,1.34e+00"), std::string::npos) << a.out;
}

TEST(Cli, ExpandWritesExactRationals) {
  auto path = temp_file("expand.json");
  RunResult r = call({"expand", "--order", "2", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(doc["order"], 2);
  EXPECT_EQ(doc["dimension"], 2);
  EXPECT_EQ(doc["A0"][3][0], "7/15");
  EXPECT_EQ(doc["A0"][3][1], "2/15");
  EXPECT_EQ(doc["A1"][2][0], "-11/30");
  EXPECT_EQ(doc["B"][2][0], "9/5");
  std::filesystem::remove(path);
}

TEST(Cli, MomentsJson) {
  RunResult r = call({"moments", "--h", "sine:a=0.2", "--max-order", "2"});
  ASSERT_EQ(r.code, 0);
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["I1"].get<double>(), 2.236, 1e-3);
  EXPECT_NEAR(doc["I3"].get<double>(), 24.60, 1e-2);
  EXPECT_NEAR(doc["r"][0].get<double>(), 0.3559, 5e-4);
  EXPECT_EQ(doc["E2"][1].size(), 2u);
}

TEST(Cli, BoundJsonAndValidityWarning) {
  RunResult ok = call({"bound", "--h", "sine:a=0.2", "--order", "0", "--eps", "0.1"});
  ASSERT_EQ(ok.code, 0);
  auto doc = nlohmann::json::parse(ok.out);
  EXPECT_GT(doc["star"].get<double>(), 0.0);
  EXPECT_TRUE(doc["validity"].get<bool>());
  EXPECT_GT(doc["bound_p"].get<double>(), doc["star"].get<double>());

  RunResult warn = call({"bound", "--h", "sine:a=0.2", "--order", "0", "--eps", "0.2"});
  ASSERT_EQ(warn.code, 0);
  EXPECT_NE(warn.err.find("warning"), std::string::npos);
  EXPECT_FALSE(nlohmann::json::parse(warn.out)["validity"].get<bool>());
}

TEST(Cli, EvalCsvOnConstantShape) {
  auto path = temp_file("eval.csv");
  RunResult r = call({"eval", "--h", "const:c=1", "--order", "0", "--eps", "0.1", "--grid",
                      "8x5", "--fields", "u", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(slurp(path));
  std::string line;
  std::getline(lines, line);  // config
  std::getline(lines, line);
  EXPECT_EQ(line, "x,y,u_0,u_trunc");
  // Flat gap with these speeds: p_x = 0, so u is linear from V0 to V1.
  int rows = 0;
  while (std::getline(lines, line)) {
    double x, y, u0, ut;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &x, &y, &u0, &ut), 4);
    EXPECT_NEAR(u0, -0.5 + 1.5 * y, 1e-12);
    EXPECT_NEAR(ut, u0, 1e-15);
    ++rows;
  }
  EXPECT_EQ(rows, 8 * 5);
  std::filesystem::remove(path);
}

TEST(Cli, ThreadCapEnvVar) {
  setenv("LUBREX_THREADS", "1", 1);
  EXPECT_EQ(lubrex::worker_count(), 1);
  unsetenv("LUBREX_THREADS");
  EXPECT_GE(lubrex::worker_count(), 1);
}

TEST(Cli, ValidateSineSmokeWithSlopesOk) {
  auto path = temp_file("validate_sine.csv");
  RunResult r = call({"validate", "--h", "sine:a=0.2", "--orders", "0", "--eps-range",
                      "0.1:0.2:2", "--nx", "32", "--ny", "16", "--out", path.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(path);
  EXPECT_NE(csv.find("slope order 0"), std::string::npos);
  EXPECT_NE(csv.find(" ok"), std::string::npos);
  EXPECT_EQ(csv.find("FAIL"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, ValidateConstShapeReportsNoiseFloor) {
  auto path = temp_file("validate.csv");
  RunResult r = call({"validate", "--h", "const:c=1", "--orders", "0", "--eps-range",
                      "0.1:0.2:2", "--nx", "16", "--ny", "12", "--out", path.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(path);
  EXPECT_NE(csv.find("eps,order,norm_psi,norm_uv,norm_omega,norm_p,q_err,bound_star,bound_p,ratio"),
            std::string::npos);
  EXPECT_NE(csv.find("n/a (constant shape"), std::string::npos);
  std::filesystem::remove(path);
}
