#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lpgeom_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Outcome cli(const std::string& args, const fs::path& out) {
  const fs::path err = out / "stderr.txt";
  const std::string cmd = std::string(LPGEOM_CLI_PATH) + " " + args + " --out " + out.string() + " > " +
                          (out / "stdout.txt").string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, MahlerOfTheCube) {
  const fs::path d = scratch("mahler");
  ASSERT_EQ(cli("mahler --body cube3 --p 1", d).code, 0);
  const auto rows = read_csv(d / "mahler.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][1], "value");
  EXPECT_NEAR(std::stod(rows[1][1]) / std::pow(std::numbers::pi, 6), 1.0, 1e-6);
  const auto m = nlohmann::json::parse(slurp(d / "mahler.manifest.json"));
  EXPECT_EQ(m["subcommand"], "mahler");
  EXPECT_EQ(m["seed"], 20240601);
  EXPECT_TRUE(m.contains("git"));
  EXPECT_TRUE(m["tolerances"].contains("radial_tol"));
}

TEST(Cli, RatioCurveDecreases) {
  const fs::path d = scratch("ratio");
  ASSERT_EQ(cli("ratio --n 3 --p 0.5:20:40", d).code, 0);
  const auto rows = read_csv(d / "ratio.csv");
  ASSERT_EQ(rows.size(), 41u);
  double prev = INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double r = std::stod(rows[i][3]);
    EXPECT_GT(r, 1.0);
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(Cli, PolarCurvesOfTheTriangle) {
  const fs::path d = scratch("polar");
  ASSERT_EQ(cli("polar --body simplex2 --p 0,2,10,inf --points 72", d).code, 0);
  const auto rows = read_csv(d / "polar.csv");
  ASSERT_EQ(rows.size(), 1u + 4u * 72u);
  int on_line = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][0] != "0" || rows[i][6] != "1") continue;
    EXPECT_NEAR(std::stod(rows[i][3]) + std::stod(rows[i][4]), 3.0, 1e-9);
    ++on_line;
  }
  EXPECT_GT(on_line, 20);
}

TEST(Cli, MalformedSpecReportsPosition) {
  const fs::path d = scratch("malformed");
  const fs::path spec = d / "bad.json";
  std::ofstream(spec) << "{\n  \"type\": \"vpolytope\",\n  \"vertices\": [[0, 0], [1, 0]\n";
  const Outcome r = cli("mahler --body " + spec.string(), d);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("parse error: line 4, column"), std::string::npos) << r.err;
}

TEST(Cli, ExactSteinerInFiveDimensionsIsRefused) {
  const fs::path d = scratch("steiner5");
  const Outcome r = cli("steiner --body cube5 --exact", d);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("capability error"), std::string::npos);
}

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path d = scratch("rerun");
  ASSERT_EQ(cli("support --body simplex2 --p 0.5,inf --points 16", d).code, 0);
  const std::string a = slurp(d / "support.csv"), ma = slurp(d / "support.manifest.json");
  ASSERT_EQ(cli("support --body simplex2 --p 0.5,inf --points 16", d).code, 0);
  EXPECT_EQ(a, slurp(d / "support.csv"));
  EXPECT_EQ(ma, slurp(d / "support.manifest.json"));
  ASSERT_EQ(cli("mahler --body diamond2 --p 2 --mc-samples 20000 --seed 9", d).code, 0);
  const std::string b = slurp(d / "mahler.csv");
  ASSERT_EQ(cli("mahler --body diamond2 --p 2 --mc-samples 20000 --seed 9", d).code, 0);
  EXPECT_EQ(b, slurp(d / "mahler.csv"));
}

TEST(Cli, SantaloAndSteiner) {
  const fs::path d = scratch("santalo");
  ASSERT_EQ(cli("santalo --body simplex2 --p inf", d).code, 0);
  const auto rows = read_csv(d / "santalo.csv");
  EXPECT_NEAR(std::stod(rows[1][1]), 1.0 / 3.0, 1e-7);
  ASSERT_EQ(cli("steiner --body simplex2 --iterations 12 --p 1,inf", d).code, 0);
  const auto st = read_csv(d / "steiner.csv");
  ASSERT_EQ(st.size(), 13u);
  // polar volumes grow along the sequence towards the disc value 2 pi^2
  for (std::size_t r = 2; r < st.size(); ++r) EXPECT_GE(std::stod(st[r][7]), std::stod(st[r - 1][7]) * (1 - 1e-12));
  EXPECT_NEAR(std::stod(st.back()[7]), 2 * std::numbers::pi * std::numbers::pi, 0.05);
  EXPECT_TRUE(fs::exists(d / "steiner_vertices.csv"));
}

TEST(Cli, IsotropicMeasure) {
  const fs::path d = scratch("isotropic");
  ASSERT_EQ(cli("isotropic --body simplexmeasure2", d).code, 0);
  const auto rows = read_csv(d / "isotropic.csv");
  ASSERT_GE(rows.size(), 6u);
  EXPECT_EQ(rows[1][0], "C");
  EXPECT_NEAR(std::stod(rows[1][1]), 27.0 / 4.0, 1e-10);
  EXPECT_EQ(rows[5][1], "1");
}

TEST(Cli, VerifySuitePasses) {
  const fs::path d = scratch("verify");
  EXPECT_EQ(cli("verify --body cube2", d).code, 0);
  for (const auto& row : read_csv(d / "verify.csv"))
    if (row[0] != "check") EXPECT_EQ(row[3], "1") << row[0];
}

TEST(Cli, BadArguments) {
  const fs::path d = scratch("bad");
  EXPECT_NE(cli("mahler --body cube2 --p banana", d).code, 0);
  EXPECT_NE(cli("nonsense", d).code, 0);
}
