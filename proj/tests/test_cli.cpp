#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "fhardy/cli.hpp"

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "fhardy");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = fhardy::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) v.push_back(l);
  return v;
}

// splits one CSV record, honouring double quotes
std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (c == ',' && !quoted) {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace

TEST(Cli, ConstantsHalfspace) {
  const auto r = run({"constants", "--what", "sharp_halfspace", "-N", "1", "-s", "0.5", "-p", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "sharp_halfspace = 8  [closed_form]\n");
  const auto csv = run({"constants", "--what", "c", "-N", "3", "-q", "0.5", "--output", "csv"});
  const auto L = lines(csv.out);
  ASSERT_EQ(L.size(), 2u);
  EXPECT_EQ(L[0], "param,value,err_estimate,method");
  EXPECT_EQ(std::stod(csv_split(L[1])[1]), fhardy::c_constant(3, 0.5));
}

TEST(Cli, CheegerRoundTripsThroughQuotient) {
  const auto r = run({"cheeger", "--domain", "interval(-1,1)", "-s", "0.5", "--output", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto L = lines(r.out);
  ASSERT_EQ(L.size(), 2u);
  const auto f = csv_split(L[1]);
  ASSERT_EQ(f.size(), 4u);
  EXPECT_NEAR(std::stod(f[1]), std::pow(2.0, 1.5) / 0.5, 1e-6);
  EXPECT_EQ(f[3], "search");
  // the reported set reproduces the reported value exactly
  const auto q = run({"quotient", "--domain", "interval(-1,1)", "--set", f[0], "-s", "0.5", "--output", "csv"});
  ASSERT_EQ(q.code, 0) << q.err;
  EXPECT_EQ(csv_split(lines(q.out)[1])[1], f[1]);
}

TEST(Cli, SweepColumnsConverge) {
  const auto d = run({"sweep", "--what", "davila", "--domain", "interval(0,1)", "--output", "csv"});
  ASSERT_EQ(d.code, 0) << d.err;
  auto L = lines(d.out);
  ASSERT_EQ(L.size(), 7u);  // header, five rungs, extrapolated limit
  EXPECT_EQ(L[0], "param,value,err_estimate,method");
  EXPECT_EQ(csv_split(L.back())[0], "limit");
  EXPECT_NEAR(std::stod(csv_split(L.back())[1]), 4.0, 1e-4);
  // rungs are (1-s) P_s((0,1)) = 4/s, reproducible from the param column
  for (std::size_t i = 1; i + 1 < L.size(); ++i) {
    const auto f = csv_split(L[i]);
    const double s = std::stod(f[0]);
    EXPECT_NEAR(std::stod(f[1]), 4.0 / s, 1e-12);
  }
  const auto l = run({"sweep", "--what", "lambda", "-s", "0.5", "--rungs", "6", "--output", "csv"});
  L = lines(l.out);
  ASSERT_EQ(L.size(), 8u);
  EXPECT_NEAR(std::stod(csv_split(L.back())[1]), 8.0, 1e-4);
  const auto b = run({"sweep", "--what", "ball_ratio", "-N", "2", "--output", "csv"});
  EXPECT_NEAR(std::stod(csv_split(lines(b.out).back())[1]), 0.5, 1e-4);
  const auto m = run({"sweep", "--what", "mazya", "--domain", "union[(0,1),(2,3)]", "--output", "csv"});
  EXPECT_NEAR(std::stod(csv_split(lines(m.out).back())[1]), 8.0, 1e-3);
}

TEST(Cli, VerifyJsonl) {
  const auto r = run({"verify", "--suite", "all", "--seed", "7", "--output", "jsonl"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto L = lines(r.out);
  fhardy::VerifyConfig cfg;
  cfg.seed = 7;
  EXPECT_EQ(L.size(), fhardy::run_all(cfg).size());
  for (const auto& l : L) {
    const auto j = nlohmann::json::parse(l);
    EXPECT_EQ(j.size(), 8u);
    EXPECT_EQ(j["status"], "pass") << l;
  }
  const auto t = run({"verify", "--suite", "lambda"});
  EXPECT_EQ(t.code, 0);
  EXPECT_NE(t.out.find(" 0 fail"), std::string::npos);
}

TEST(Cli, ExitCodesAndTokens) {
  auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'frobnicate'"), std::string::npos) << r.err;
  r = run({"cheeger", "--domain", "intervl(0,1)", "-s", "0.5"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'intervl'"), std::string::npos) << r.err;
  r = run({"cheeger", "--domain", "interval(0,1"});
  EXPECT_EQ(r.code, 2);
  r = run({"cheeger", "--domain", "interval(0,1)"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'-s'"), std::string::npos) << r.err;
  r = run({"cheeger", "-s", "0.5"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'--domain'"), std::string::npos) << r.err;
  r = run({"constants", "--what", "nonsense"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'nonsense'"), std::string::npos);
  r = run({"constants", "--what", "c", "-N", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'-q'"), std::string::npos);
  r = run({"verify", "--suite", "bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'bogus'"), std::string::npos);
  r = run({"constants", "--what", "c", "-N", "2", "-q", "0.5", "--output", "xml"});
  EXPECT_EQ(r.code, 2);
  r = run({"cheeger", "--domain", "interval(-1,1)", "-s", "1.5"});
  EXPECT_EQ(r.code, 2);
  r = run({"cheeger", "--domain", "halfline", "-s", "0.5"});
  EXPECT_EQ(r.code, 2);
  r = run({"minimize", "--domain", "interval(-1,1)", "-s", "0.5", "-p", "3"});
  EXPECT_EQ(r.code, 2);
  r = run({"cheeger", "--domain", "interval(-1,1)", "-s", "abc"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("abc"), std::string::npos) << r.err;
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, MeasuresAndQuotients) {
  auto r = run({"perimeter", "--set", "union[(0,1),(2,3)]", "-s", "0.5", "--output", "jsonl"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(lines(r.out)[0]);
  EXPECT_NEAR(j["value"].get<double>(), 30.457978925162995, 1e-12);
  EXPECT_EQ(j["method"], "closed_form");
  r = run({"perimeter", "--set", "union[(0,1),(2,3)]", "-s", "0.5", "--what", "quadrature", "--output", "jsonl"});
  j = nlohmann::json::parse(lines(r.out)[0]);
  EXPECT_NEAR(j["value"].get<double>(), 30.457978925162995, 1e-8);
  EXPECT_EQ(j["method"], "quadrature");
  r = run({"volume", "--domain", "halfline", "--set", "interval(0,1)", "-q", "0.5", "--output", "jsonl"});
  EXPECT_NEAR(nlohmann::json::parse(lines(r.out)[0])["value"].get<double>(), 2.0, 1e-14);
  r = run({"quotient", "--domain", "halfline", "--set", "interval(0,1)", "-s", "0.25", "--output", "jsonl"});
  EXPECT_NEAR(nlohmann::json::parse(lines(r.out)[0])["value"].get<double>(), 16.0, 1e-12);
  r = run({"volume", "--domain", "punctured", "-q", "0.5"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'--set'"), std::string::npos);
}

TEST(Cli, SeedGivesIdenticalBytes) {
  const std::vector<std::string> cmd{"minimize", "--domain", "union[(-1,0.5),(0.5,2)]", "-s", "0.3", "-p", "1.5",
                                     "--grid-n", "24", "--seed", "11", "--output", "jsonl"};
  const auto a = run(cmd), b = run(cmd);
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const std::vector<std::string> ch{"cheeger", "--domain", "union[(0,1),(1.5,2.5)]", "-s", "0.4", "--k", "2", "--seed", "3"};
  EXPECT_EQ(run(ch).out, run(ch).out);
}

TEST(Cli, OutFileMatchesStdout) {
  const auto path = std::filesystem::temp_directory_path() / "fhardy_cli_test_out.csv";
  const auto a = run({"sweep", "--what", "ball_ratio", "-N", "3", "--output", "csv", "--out", path.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_TRUE(a.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), run({"sweep", "--what", "ball_ratio", "-N", "3", "--output", "csv"}).out);
  std::filesystem::remove(path);
  EXPECT_EQ(run({"sweep", "--what", "ball_ratio", "-N", "3", "--out", "/nonexistent/dir/x.csv"}).code, 2);
}

TEST(Cli, Binary) {
  const std::string cmd = std::string(FHARDY_CLI_PATH) + " constants --what sharp_halfspace -N 1 -s 0.5 -p 1 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string out;
  char buf[256];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(out, "sharp_halfspace = 8  [closed_form]\n");
  const int bad = std::system((std::string(FHARDY_CLI_PATH) + " cheeger --domain 'interval(0,1' -s 0.5 >/dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(bad), 2);
}
