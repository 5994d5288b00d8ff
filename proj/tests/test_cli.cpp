#include "dpcfade_app.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dpcfade");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dpcfade::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> r;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    // Fields used in these tests never contain quoted commas.
    r.push_back(dpcfade::split(line, ','));
  }
  return r;
}

std::string write_spec(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

double value_of(const std::vector<std::vector<std::string>>& r, std::size_t name_col, const std::string& name,
                std::size_t value_col) {
  for (const auto& row : r)
    if (row.size() > value_col && row[name_col] == name) return std::stod(row[value_col]);
  ADD_FAILURE() << "no row " << name;
  return NAN;
}

}  // namespace

TEST(CliBounds2, RowsMatchLibrary) {
  const auto r = run({"bounds2", "--power", "3", "--a1", "1", "--a2", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = rows(r.out);
  ASSERT_EQ(t.size(), 7u);
  EXPECT_EQ(t[0], (std::vector<std::string>{"P", "a1", "a2", "bound", "value_bits", "optimizer", "notes"}));
  std::vector<std::string> names;
  for (std::size_t i = 1; i < t.size(); ++i) names.push_back(t[i][3]);
  EXPECT_EQ(names, dpcfade::bounds2_names());
  const dpc::TwoFadingInstance inst{3.0, 1.0, 8.0};
  EXPECT_NEAR(value_of(t, 3, "outer2_closed", 4), dpc::outer2_closed(inst).value, 1e-11);
  EXPECT_NEAR(value_of(t, 3, "outer2_numeric", 4), dpc::outer2_numeric(inst).value, 1e-11);
  EXPECT_NEAR(value_of(t, 3, "inner2_closed", 4), 0.5, 1e-11);
  EXPECT_NEAR(value_of(t, 3, "carbon_inner", 4), dpc::carbon_inner(3.0, 8.0).value, 1e-11);
  EXPECT_NEAR(value_of(t, 3, "gap2", 4), dpc::gap2(inst).realized, 1e-11);
}

TEST(CliBounds2, ValidationErrors) {
  auto r = run({"bounds2", "--power", "3", "--a1", "2", "--a2", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("fading values must be strictly increasing"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(run({"bounds2", "--power", "0", "--a1", "0", "--a2", "2"}).code, 2);
  EXPECT_EQ(run({"bounds2", "--power", "3", "--a1", "0"}).code, 2);
  EXPECT_EQ(run({"bounds2", "--power", "x", "--a1", "0", "--a2", "1"}).code, 2);
  EXPECT_EQ(run({"nosuch"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(CliBounds2, NatsConvertOnOutput) {
  const auto bits = rows(run({"bounds2", "--power", "3", "--a1", "0", "--a2", "0.5"}).out);
  const auto nats = rows(run({"bounds2", "--power", "3", "--a1", "0", "--a2", "0.5", "--nats"}).out);
  EXPECT_EQ(nats[0][4], "value_nats");
  EXPECT_NEAR(value_of(nats, 3, "inner2_closed", 4), value_of(bits, 3, "inner2_closed", 4) * std::log(2.0),
              1e-11);
}

TEST(CliBounds2, CsvFormat) {
  const auto r = run({"bounds2", "--power", "3", "--a1", "1", "--a2", "8"});
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  EXPECT_EQ(r.out.back(), '\n');
  EXPECT_NE(r.out.find(",1.68128503969,"), std::string::npos);  // 12 significant digits
}

TEST(CliBoundsM, StrongChain) {
  const auto r = run({"boundsM", "--power", "255", "--fading", "0,16,4096"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = rows(r.out);
  EXPECT_EQ(t[0], (std::vector<std::string>{"P", "fading", "variant", "quantity", "value_bits", "status", "notes"}));
  EXPECT_NEAR(value_of(t, 3, "time_sharing_inner", 4), 4.0 / 3.0, 1e-11);
  EXPECT_NEAR(value_of(t, 3, "strong_fading", 4), 1.0, 0.0);
  EXPECT_NEAR(value_of(t, 3, "strong_fading_gap", 4), 3.0 + std::log2(3.0) / 3.0, 1e-11);
}

TEST(CliBoundsM, DegenerateSingleValue) {
  const auto r = run({"boundsM", "--power", "3", "--fading", "0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("degenerate (M=1)"), std::string::npos);
}

TEST(CliBoundsM, RegimeViolationIsARow) {
  const auto r = run({"boundsM", "--power", "3", "--fading", "0,4,4.1", "--variant", "power-sum"});
  ASSERT_EQ(r.code, 0);
  const auto t = rows(r.out);
  bool saw = false;
  for (const auto& row : t) {
    if (row[3] == "strong_fading_outer") {
      EXPECT_EQ(row[5], "regime-violation");
      EXPECT_TRUE(row[4].empty());
      saw = true;
    }
    if (row[3] == "subset_outer") {
      EXPECT_NE(row[6].find("K=2"), std::string::npos);
    }
  }
  EXPECT_TRUE(saw);
}

TEST(CliBoundsM, Validation) {
  EXPECT_EQ(run({"boundsM", "--power", "3", "--fading", "0,2,2"}).code, 2);
  EXPECT_EQ(run({"boundsM", "--power", "3", "--fading", "0,2,2", "--dedup"}).code, 0);
  EXPECT_EQ(run({"boundsM", "--power", "3", "--fading", "0,a"}).code, 2);
  EXPECT_EQ(run({"boundsM", "--power", "3", "--fading", "0,1", "--variant", "other"}).code, 2);
}

TEST(CliSimulate, RowsAndDeterminism) {
  const std::vector<std::string> args{"simulate", "--power", "3",  "--fading",  "2",
                                      "--scheme", "tin",     "-N", "1000000", "--seed", "42"};
  const auto a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  const auto t = rows(a.out);
  EXPECT_EQ(t[0], (std::vector<std::string>{"scheme", "receiver", "rate_bits", "stderr", "N", "seed"}));
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[2][1], "min");
  EXPECT_NEAR(std::stod(t[2][2]), 0.33903, 0.01);
  EXPECT_EQ(t[2][5], "42");
  EXPECT_EQ(run(args).out, a.out);
  const auto e = dpc::simulate(dpc::ChannelParams(3.0, dpc::FadingSet{2.0}), dpc::SchemeConfig::tin(), 1000000, 42);
  EXPECT_EQ(t[1][2], dpcfade::num(e.rates[0]));
}

TEST(CliSimulate, SchemesAndValidation) {
  auto r = run({"simulate", "--power", "3", "--fading", "2", "--scheme", "costa-matched", "--target", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(value_of(rows(r.out), 1, "min", 2), 1.0, 0.01);
  r = run({"simulate", "--power", "3", "--fading", "0,1.41421356237", "--scheme", "two-codeword"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(value_of(rows(r.out), 1, "min", 2), 0.54248, 0.02);
  EXPECT_EQ(run({"simulate", "--power", "3", "--fading", "2", "--scheme", "costa-matched"}).code, 2);
  EXPECT_EQ(run({"simulate", "--power", "3", "--fading", "2", "--scheme", "costa-matched", "--target", "1"}).code, 2);
  EXPECT_EQ(run({"simulate", "--power", "3", "--fading", "2", "--scheme", "tin", "-N", "100"}).code, 2);
  EXPECT_EQ(run({"simulate", "--power", "3", "--fading", "0,2", "--scheme", "two-codeword", "--beta", "2"}).code, 2);
  EXPECT_EQ(run({"simulate", "--power", "3", "--fading", "2", "--scheme", "lattice"}).code, 2);
}

TEST(CliVerify, SuitesPass) {
  auto r = run({"verify", "gap2", "--grid", "8"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("region_gap_bound,pass"), std::string::npos);
  r = run({"verify", "proofterms", "--M", "4"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("# P=1 A=[0,4] j=2"), std::string::npos);
  for (const char* s : {"strongfading", "oracle", "continuity", "normalization"}) {
    EXPECT_EQ(run({"verify", s, "--grid", "4"}).code, 0) << s;
  }
}

TEST(CliVerify, FailureAndUnknownSuite) {
  EXPECT_EQ(run({"verify", "nosuch"}).code, 2);
  EXPECT_EQ(run({"verify", "strongfading", "--tol", "-1"}).code, 2);
  // Zero tolerance trips on rounding-level slack in the region check.
  const auto r = run({"verify", "gap2", "--grid", "8", "--tol", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("region_gap_bound,FAIL"), std::string::npos);
}

TEST(CliSweep, OnePointEqualsBounds2) {
  const auto spec = write_spec("one.txt", "fixed.P = 3\nfixed.a1 = 1\nfixed.a2 = 8\n");
  const auto s = run({"sweep", spec});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto b = rows(run({"bounds2", "--power", "3", "--a1", "1", "--a2", "8"}).out);
  const auto t = rows(s.out);
  ASSERT_EQ(t.size(), b.size());
  for (std::size_t i = 1; i < t.size(); ++i) {
    EXPECT_EQ(t[i][7], b[i][3]);
    EXPECT_EQ(t[i][8], b[i][4]);
  }
}

TEST(CliSweep, LogAxisShapeAndOrder) {
  const auto spec = write_spec("log.txt",
                               "# power sweep\naxis.P = 1,1000,5,log\nfixed.a1 = 1   # trailing comment\n"
                               "fixed.a2 = 8\nselect = outer2_closed,inner2_closed\n");
  const auto r = run({"sweep", spec});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = rows(r.out);
  ASSERT_EQ(t.size(), 1u + 5u * 2u);
  EXPECT_EQ(t[0][8], "value_bits");
  EXPECT_EQ(t[1][0], "1");
  EXPECT_EQ(t[9][0], "1000");
  EXPECT_EQ(t[1][7], "outer2_closed");
  EXPECT_EQ(t[2][7], "inner2_closed");
}

TEST(CliSweep, AxisMajorOrderAndInnerFlattening) {
  const auto spec = write_spec("a2.txt", "fixed.P = 15\naxis.a2 = 1,8,8,lin\naxis.a1 = 0,0.5,2,lin\n"
                                         "select = inner2_closed\n");
  const auto r = run({"sweep", spec});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = rows(r.out);
  ASSERT_EQ(t.size(), 17u);
  EXPECT_EQ(t[1][2], "1");
  EXPECT_EQ(t[2][2], "1");  // a1 varies fastest
  EXPECT_EQ(t[1][1], "0");
  EXPECT_EQ(t[2][1], "0.5");
  // a2^2 > P+1 = 16 from a2 = 5 on: flat at 1/4 log2(16) = 1.
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::stod(t[i][2]) >= 5.0) {
      EXPECT_EQ(t[i][8], "1");
    }
  }
}

TEST(CliSweep, SimulatedSelectionUsesCellStreams) {
  const auto spec = write_spec("sim.txt", "axis.P = 1,10,2,lin\nfixed.fading = 2\nselect = sim:tin\n");
  const auto r = run({"sweep", spec, "-N", "20000", "--seed", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = rows(r.out);
  ASSERT_EQ(t.size(), 3u);
  const auto e = dpc::sweep_simulate({dpc::ChannelParams(1.0, dpc::FadingSet{2.0}), dpc::ChannelParams(10.0, dpc::FadingSet{2.0})},
                                     dpc::SchemeConfig::tin(), 20000, 4);
  EXPECT_EQ(t[1][8], dpcfade::num(e[0].compound));
  EXPECT_EQ(t[2][8], dpcfade::num(e[1].compound));
}

TEST(CliSweep, MAxisUsesStrongChains) {
  const auto spec = write_spec("m.txt", "fixed.P = 255\naxis.M = 2,4,3,lin\nselect = strong_fading_gap\n");
  const auto t = rows(run({"sweep", spec}).out);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_NEAR(std::stod(t[1][8]), 3.5, 1e-11);
  EXPECT_NEAR(std::stod(t[3][8]), 3.5, 1e-11);
}

TEST(CliSweep, ParseErrorsReportLine) {
  const std::pair<std::string, std::string> bad[] = {
      {"fixed.P = 3\naxis.a2 = 1,2,3\n", "line 2"},
      {"fixed.P = 3\n\nfixed.Q = 1\n", "line 3"},
      {"axis.P = 5,1,3,lin\n", "line 1"},
      {"axis.P = 0,1,3,log\n", "line 1"},
      {"axis.P = 1,2,0,lin\n", "line 1"},
      {"fixed.P = 3\nfixed.P = 4\n", "line 2"},
      {"fixed.P = 3\nselect = nothing\n", "line 2"},
      {"fixed.P = three\n", "line 1"},
      {"P = 3\n", "line 1"},
      {"fixed.P 3\n", "line 1"},
  };
  int k = 0;
  for (const auto& [text, where] : bad) {
    const auto r = run({"sweep", write_spec("bad" + std::to_string(k++) + ".txt", text)});
    EXPECT_EQ(r.code, 2) << text;
    EXPECT_NE(r.err.find(where), std::string::npos) << r.err;
  }
  EXPECT_EQ(run({"sweep", "/nonexistent/spec.txt"}).code, 2);
}

TEST(CliOutput, OutFileReceivesCsv) {
  const std::string path = ::testing::TempDir() + "bounds.csv";
  const auto r = run({"bounds2", "--power", "3", "--a1", "1", "--a2", "8", "--out", path});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), run({"bounds2", "--power", "3", "--a1", "1", "--a2", "8"}).out);
  std::remove(path.c_str());
}
