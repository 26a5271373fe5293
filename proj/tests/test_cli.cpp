#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lotka/cli.hpp"

using namespace lotka;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) {
  return std::string(LOTKA_FIXTURE_DIR) + "/" + name;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lotka_cli_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    cli::write_file(path(name), content);
    return path(name);
  }

  fs::path dir_;
};

std::vector<std::vector<std::string>> read_csv(const std::string& file) {
  std::ifstream in(file);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_F(CliTest, ReportTruncationEchoesTableRow) {
  const auto ca = run({"report", "truncation", "--dist", fixture("chemical_abstracts.csv"),
                       "--cutoff", "30"});
  ASSERT_EQ(ca.code, 0) << ca.err;
  EXPECT_NE(ca.out.find("0  0.00%  316  91.33%  3818  16.65%"), std::string::npos) << ca.out;

  const auto au =
      run({"report", "truncation", "--dist", fixture("auerbach.csv"), "--cutoff", "17"});
  ASSERT_EQ(au.code, 0) << au.err;
  EXPECT_NE(au.out.find("0  0.00%  31  64.58%  451  13.27%"), std::string::npos) << au.out;
}

TEST_F(CliTest, ReportTruncationBeyondMax) {
  const auto r =
      run({"report", "truncation", "--dist", fixture("auerbach.csv"), "--cutoff", "49"});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("exceeds max level"), std::string::npos);
}

TEST_F(CliTest, FitLogLogWritesFitResultJson) {
  std::string text = "level,count\n";
  for (int n = 1; n <= 40; ++n)
    text += std::to_string(n) + "," + std::to_string(std::llround(10000.0 / (n * n))) + "\n";
  const auto d = write("square.csv", text);
  const auto r = run({"fit", "loglog", "--dist", d, "--truncate", "30", "--denominator", "full"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  const auto expected = fit_historical(parse_distribution(text), 30, Denominator::full());
  EXPECT_EQ(j.at("slope").get<double>(), expected.slope);
  EXPECT_EQ(j.at("dof").get<int>(), 28);
  EXPECT_EQ(j.at("cutoff").get<int>(), 30);
  EXPECT_EQ(j.at("denominator").get<Count>(), expected.denominator);
  for (const char* key : {"slope", "intercept", "exponent", "r_squared", "f_stat", "dof",
                          "n_points", "denominator", "cutoff"})
    EXPECT_TRUE(j.contains(key)) << key;

  const auto t = run({"fit", "loglog", "--dist", d, "--truncate", "30", "--text"});
  ASSERT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("exponent 1.997"), std::string::npos) << t.out;

  const auto explicit_den =
      run({"fit", "loglog", "--dist", d, "--truncate", "30", "--denominator", "20000"});
  ASSERT_EQ(explicit_den.code, 0);
  EXPECT_EQ(Json::parse(explicit_den.out).at("denominator").get<int>(), 20000);
}

TEST_F(CliTest, FitLogLogErrors) {
  const auto single = write("single.csv", "level,count\n1,10\n");
  EXPECT_EQ(run({"fit", "loglog", "--dist", single}).code, cli::kExitNumeric);

  const auto bad = write("bad.csv", "level,count\n1,10\n2;3\n");
  const auto r = run({"fit", "loglog", "--dist", bad});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("bad.csv"), std::string::npos);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);

  EXPECT_EQ(run({"fit", "loglog", "--dist", path("missing.csv")}).code, cli::kExitInput);
  EXPECT_EQ(run({"fit", "loglog", "--dist", fixture("auerbach.csv"), "--denominator", "half"})
                .code,
            cli::kExitInput);
  const auto flag = run({"fit", "loglog", "--dist", fixture("auerbach.csv"), "--bogus"});
  EXPECT_EQ(flag.code, cli::kExitInput);
  EXPECT_NE(flag.err.find("bogus"), std::string::npos);
  EXPECT_EQ(run({}).code, cli::kExitInput);
  EXPECT_EQ(run({"fit"}).code, cli::kExitInput);
}

TEST_F(CliTest, SimulateThenFitMle) {
  const auto s = path("s.csv");
  ASSERT_EQ(run({"simulate", "--alpha", "2.0", "--authors", "1000", "--seed", "1", "--out", s})
                .code,
            0);
  const auto r = run({"fit", "mle", "--dist", s, "--xmin", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_NEAR(j.at("alpha_hat").get<double>(), 2.0, 0.15);
  EXPECT_EQ(j.at("xmin").get<int>(), 1);
  EXPECT_EQ(j.at("n_tail").get<int>(), 1000);

  const auto a = run({"fit", "mle", "--dist", s});
  ASSERT_EQ(a.code, 0);
  EXPECT_TRUE(Json::parse(a.out).contains("ks"));
}

TEST_F(CliTest, FitMleBootstrap) {
  const auto s = path("s.csv");
  ASSERT_EQ(run({"simulate", "--alpha", "2.0", "--authors", "500", "--seed", "2", "--out", s})
                .code,
            0);
  const auto a = run({"fit", "mle", "--dist", s, "--bootstrap", "100", "--seed", "4"});
  const auto b = run({"fit", "mle", "--dist", s, "--bootstrap", "100", "--seed", "4"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const double p = Json::parse(a.out).at("p_value").get<double>();
  EXPECT_GE(p, 0.0);
  EXPECT_LE(p, 1.0);

  EXPECT_EQ(run({"fit", "mle", "--dist", s, "--bootstrap", "100"}).code, cli::kExitInput);
  EXPECT_EQ(run({"fit", "mle", "--dist", s, "--bootstrap", "50", "--seed", "1"}).code,
            cli::kExitInput);
  EXPECT_EQ(run({"fit", "mle", "--dist", s, "--xmin", "zero"}).code, cli::kExitInput);
  const auto one_level = write("one.csv", "level,count\n3,10\n");
  EXPECT_EQ(run({"fit", "mle", "--dist", one_level, "--xmin", "1"}).code, cli::kExitNumeric);
}

TEST_F(CliTest, Ingest) {
  const auto records = write("records.csv",
                             "paper_id,position,author\n"
                             "P1,1,A\nP1,2,B\nP2,1,A\nP3,1,C\n");
  const auto out = path("dist.csv");
  const auto r = run({"ingest", "--records", records, "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(cli::read_file(out), "level,count\n1,1\n2,1\n");

  const auto dup = write("dup.csv", "paper_id,position,author\nP1,1,A\nP1,1,B\n");
  const auto e = run({"ingest", "--records", dup, "--out", out});
  EXPECT_EQ(e.code, cli::kExitInput);
  EXPECT_NE(e.err.find("line 3"), std::string::npos);
}

TEST_F(CliTest, Compare) {
  const auto text = run({"compare", "--dist", fixture("chemical_abstracts.csv"), "--truncate", "30"});
  ASSERT_EQ(text.code, 0) << text.err;
  EXPECT_NE(text.out.find("historical (log-log OLS, cutoff 30)"), std::string::npos);
  const auto json = run(
      {"compare", "--dist", fixture("chemical_abstracts.csv"), "--truncate", "30", "--json"});
  ASSERT_EQ(json.code, 0);
  const auto j = Json::parse(json.out);
  EXPECT_EQ(j.at("cutoff_used").get<int>(), 30);
  EXPECT_EQ(j.at("truncation").at("removed_works").get<int>(), 3818);

  const auto failed =
      run({"compare", "--dist", fixture("chemical_abstracts.csv"), "--truncate", "1", "--json"});
  ASSERT_EQ(failed.code, 0);
  EXPECT_TRUE(Json::parse(failed.out).at("historical").is_null());
}

TEST_F(CliTest, Bias) {
  const std::vector<std::string> args = {"bias", "--alpha", "2", "--authors", "2000",
                                         "--cutoffs", "15,max", "--replicates", "10",
                                         "--seed", "3"};
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("cutoff,mean_hist_err,sd_hist_err,mean_mle_err,sd_mle_err\n", 0), 0u);
  EXPECT_NE(r.out.find("\n15,"), std::string::npos);
  EXPECT_NE(r.out.find("\nmax,"), std::string::npos);
  EXPECT_EQ(run(args).out, r.out);

  auto json_args = args;
  json_args.push_back("--json");
  const auto j = Json::parse(run(json_args).out);
  EXPECT_EQ(j.at("rows").size(), 2u);

  EXPECT_EQ(run({"bias", "--alpha", "2", "--authors", "2000", "--cutoffs", "15,x",
                 "--replicates", "10", "--seed", "3"})
                .code,
            cli::kExitInput);
  EXPECT_EQ(run({"bias", "--alpha", "2", "--authors", "2000", "--cutoffs", "2",
                 "--replicates", "10", "--seed", "3"})
                .code,
            cli::kExitNumeric);
}

TEST_F(CliTest, PlotHistogramSidecar) {
  const auto out = path("hist.svg");
  const auto r = run({"plot", "histogram", "--dist", fixture("chemical_abstracts.csv"),
                      "--bin-width", "15", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(sidecar_path(out));
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "1");
  EXPECT_EQ(rows[1][1], "15");
  EXPECT_EQ(rows[1][2], "6354");
  EXPECT_EQ(rows[2][2], "424");
  EXPECT_NE(cli::read_file(out).find("<svg"), std::string::npos);
}

TEST_F(CliTest, PlotLogLogTrendlineOnExactLaw) {
  const auto d = write("exact.csv",
                       "level,count\n1,3600\n2,900\n3,400\n4,225\n5,144\n6,100\n");
  const auto fit_out = run({"fit", "loglog", "--dist", d});
  ASSERT_EQ(fit_out.code, 0);
  const auto fit_file = write("fit.json", fit_out.out);
  const auto svg = path("loglog.svg");
  ASSERT_EQ(run({"plot", "loglog", "--dist", d, "--fit", fit_file, "--out", svg}).code, 0);
  const auto rows = read_csv(sidecar_path(svg));
  ASSERT_EQ(rows.size(), 7u);
  ASSERT_EQ(rows[0].back(), "residual");
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_LT(std::abs(std::stod(rows[i].back())), 1e-9);
  EXPECT_NE(cli::read_file(svg).find("firebrick"), std::string::npos);
}

TEST_F(CliTest, PlotLogLogSidecarMatchesPercentSeries) {
  const auto dist_path = fixture("chemical_abstracts.csv");
  const auto fit_out = run({"fit", "loglog", "--dist", dist_path, "--truncate", "31"});
  ASSERT_EQ(fit_out.code, 0);
  const auto fit_file = write("fit.json", fit_out.out);
  const auto svg = path("ca.svg");
  ASSERT_EQ(run({"plot", "loglog", "--dist", dist_path, "--fit", fit_file, "--out", svg}).code,
            0);
  const auto dist = cli::read_distribution(dist_path);
  const auto series = to_percent_series(truncate_right(dist, 31), dist.total_authors());
  const auto rows = read_csv(sidecar_path(svg));
  ASSERT_EQ(rows.size(), series.points.size() + 1);
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    EXPECT_EQ(std::stoll(rows[i + 1][0]), series.points[i].level);
    EXPECT_EQ(std::strtod(rows[i + 1][1].c_str(), nullptr), series.points[i].percent);
  }

  // without a fit: the whole distribution, no trendline
  const auto bare = path("bare.svg");
  ASSERT_EQ(run({"plot", "loglog", "--dist", dist_path, "--out", bare}).code, 0);
  EXPECT_EQ(read_csv(sidecar_path(bare)).size(), 6u);
  EXPECT_EQ(cli::read_file(bare).find("firebrick"), std::string::npos);
}

TEST_F(CliTest, PlotErrors) {
  const auto bad_fit = write("fit.json", "{\"slope\": 1}");
  EXPECT_EQ(run({"plot", "loglog", "--dist", fixture("auerbach.csv"), "--fit", bad_fit,
                 "--out", path("x.svg")})
                .code,
            cli::kExitInput);
  const auto not_json = write("fit2.json", "slope");
  EXPECT_EQ(run({"plot", "loglog", "--dist", fixture("auerbach.csv"), "--fit", not_json,
                 "--out", path("x.svg")})
                .code,
            cli::kExitInput);
  PlotSpec spec;
  spec.include_trendline = true;
  EXPECT_THROW(emit_plot(cli::read_distribution(fixture("auerbach.csv")), std::nullopt, spec),
               InputError);
}

TEST_F(CliTest, SimulateIsByteIdentical) {
  const auto a = path("a.csv"), b = path("b.csv");
  run({"simulate", "--alpha", "2.1", "--authors", "3000", "--seed", "9", "--out", a});
  run({"simulate", "--alpha", "2.1", "--authors", "3000", "--seed", "9", "--out", b});
  EXPECT_EQ(cli::read_file(a), cli::read_file(b));
}

TEST_F(CliTest, Help) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}
