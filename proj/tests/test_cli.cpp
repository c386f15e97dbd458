#include "cli_app.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lipkin;
using lipkin::cli::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "lipkin");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  pclose(p);
  return out;
}

} // namespace

TEST(CliSchema, SpectrumHeaderAndRowCount) {
  auto r = run({"spectrum", "--n", "100", "--lambda", "5", "--sector", "merged", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto l = lines(r.out);
  ASSERT_EQ(l.size(), 102u);
  EXPECT_EQ(l[0], "k,x,E,eps,sector");
  EXPECT_EQ(r.out.find('\r'), std::string::npos);

  auto h = run({"spectrum", "--n", "100", "--lambda", "5", "--lower-half"});
  EXPECT_EQ(lines(h.out).size(), 51u);

  auto d = run({"spectrum", "--n", "100", "--lambda", "5", "--derivative"});
  EXPECT_EQ(lines(d.out)[0], "x_mid,deps_dx");
}

TEST(CliSchema, EpsHeaderAndOrdering) {
  auto r = run({"eps", "--n", "8", "--re-max", "3", "--im-max", "3", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto l = lines(r.out);
  ASSERT_GT(l.size(), 2u);
  EXPECT_EQ(l[0], "re_lambda,im_lambda,re_E,im_E,k,k_next,sector,residual");
  double pre = -1, pim = -1;
  for (std::size_t i = 1; i < l.size(); ++i) {
    double re, im;
    ASSERT_EQ(std::sscanf(l[i].c_str(), "%lf,%lf", &re, &im), 2);
    EXPECT_TRUE(re > pre || (re == pre && im > pim)) << l[i];
    pre = re;
    pim = im;
  }
  EXPECT_FALSE(r.err.empty()); // progress goes to the error stream
}

TEST(CliSchema, JsonEnvelope) {
  auto r = run({"gaps", "--n", "20", "--lambda", "0.5", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["config"]["command"], "gaps");
  EXPECT_EQ(j["config"]["sector"], "even");
  EXPECT_TRUE(j["meta"]["elapsed_seconds"].is_null());
  EXPECT_TRUE(j["meta"]["tool_version"].is_string());
  EXPECT_EQ(j["results"]["rows"].size(), 10u);
  EXPECT_EQ(j["results"]["min_gap"]["k"], 1);

  auto t = json::parse(run({"gaps", "--n", "20", "--lambda", "0.5", "--format", "json", "--timing"}).out);
  EXPECT_TRUE(t["meta"]["elapsed_seconds"].is_number());
}

TEST(CliSchema, ScalingReportsSlope) {
  auto r = run({"scaling", "--law", "eq2", "--k", "1", "--n-list", "256,512,1024,2048", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["results"]["rows"].size(), 4u);
  EXPECT_NEAR(j["results"]["slope"].get<double>(), -1.0 / 3.0, 0.05);
}

TEST(CliSchema, FitAndLocalization) {
  auto f = run({"fit", "--n", "1024", "--lambda", "5", "--side", "both"});
  ASSERT_EQ(f.code, 0) << f.err;
  auto l = lines(f.out);
  EXPECT_EQ(l[0], "side,x_c,a1,a2,a3,rms_residual,x_mid,deps_dx_fd,deps_dx_fit,rel_dev");
  bool left = false, right = false;
  for (std::size_t i = 1; i < l.size(); ++i) {
    left |= l[i].rfind("left,", 0) == 0;
    right |= l[i].rfind("right,", 0) == 0;
  }
  EXPECT_TRUE(left && right);

  auto z = run({"localization", "--n", "10", "--lambda", "2"});
  ASSERT_EQ(z.code, 0);
  EXPECT_EQ(lines(z.out)[0], "k,x,E,eps,ipr,dominant_m,dominant_weight,sector");
  EXPECT_EQ(lines(z.out).size(), 12u);
}

TEST(CliRoundTrip, JsonReproducesInMemorySpectrum) {
  for (double lambda : {0.3, 1.0, 5.0}) {
    std::ostringstream ls;
    ls << lambda;
    auto r = run({"spectrum", "--n", "57", "--lambda", ls.str(), "--format", "json"});
    ASSERT_EQ(r.code, 0);
    const auto rows = json::parse(r.out)["results"]["rows"];
    const auto ss = scaled_spectrum(full_spectrum(57, lambda), Selector::merged, false);
    ASSERT_EQ(rows.size(), ss.points.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_EQ(rows[i]["E"].get<double>(), ss.points[i].energy);
      EXPECT_EQ(rows[i]["eps"].get<double>(), ss.points[i].eps);
      EXPECT_EQ(rows[i]["x"].get<double>(), ss.points[i].x);
    }
  }
}

TEST(CliRoundTrip, CsvNumbersReadBackExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, -0.0})
    EXPECT_EQ(std::stod(cli::format_double(v)), v);
}

TEST(CliExit, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--n", "10"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--n", "0", "--lambda", "1"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--n", "10", "--lambda", "1", "--sector", "both"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--n", "10", "--lambda", "1", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"fit", "--n", "100", "--lambda", "0.5"}).code, 2);
  EXPECT_EQ(run({"fit", "--n", "100", "--lambda", "5", "--terms", "4"}).code, 2);
  EXPECT_EQ(run({"fit", "--n", "100", "--lambda", "5", "--sector", "merged"}).code, 2);
  EXPECT_EQ(run({"eps", "--n", "8", "--re-min", "2", "--re-max", "1"}).code, 2);
  EXPECT_EQ(run({"scaling", "--law", "eq3", "--lambda", "0.5", "--n-list", "10,20"}).code, 2);
  EXPECT_EQ(run({"scaling", "--law", "eq2", "--n-list", "10"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--help"}).code, 0);
}

TEST(CliExit, NumericalFailureLeavesNoFile) {
  // too few levels inside the fit window
  const auto dir = std::filesystem::temp_directory_path() / "lipkin_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "fit.csv";
  std::filesystem::remove(path);
  auto r = run({"fit", "--n", "3", "--lambda", "1.01", "--output", path.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
  EXPECT_FALSE(std::filesystem::exists(path));
  for (const auto& e : std::filesystem::directory_iterator(dir)) ADD_FAILURE() << "stray file " << e.path();
}

TEST(CliOutput, FileMatchesStdout) {
  const auto path = std::filesystem::temp_directory_path() / "lipkin_cli_out.csv";
  auto a = run({"spectrum", "--n", "30", "--lambda", "2"});
  auto b = run({"spectrum", "--n", "30", "--lambda", "2", "--output", path.string()});
  ASSERT_EQ(b.code, 0);
  EXPECT_TRUE(b.out.empty());
  EXPECT_EQ(slurp(path), a.out);
  std::filesystem::remove(path);
}

TEST(CliDeterminism, SeparateProcessesAgreeByteForByte) {
  const std::string cmd = std::string(LIPKIN_CLI_PATH) + " eps --n 16 --format json 2>/dev/null";
  const auto a = capture(cmd);
  const auto b = capture(cmd);
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_EQ(capture(cmd + " --threads 1"), capture(cmd + " --threads 5"));
}
