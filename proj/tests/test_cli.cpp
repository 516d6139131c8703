#include "cedtest/cli.hpp"
#include "cedtest/csv.hpp"
#include "cedtest/report.hpp"

#include "doctest.h"
#include "json.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace cedtest;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cedtest");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "cedtest_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

fs::path write_sample(const std::string& name, std::uint64_t seed, double shift, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::ostringstream s;
  s << "y,x\n";
  s.precision(17);
  for (int i = 0; i < n; ++i) {
    const double x = z(rng);
    s << 1.0 + x + shift + z(rng) << ',' << x << '\n';
  }
  return write_file(name, s.str());
}

}  // namespace

TEST_CASE("csv samples") {
  SUBCASE("shape") {
    const auto p = write_file("three.csv", "y,x1,x2\n1,2,3\n4,5,6\n7,8,9\n");
    const Sample s = csv::parse_csv_sample({p, {"y"}, {"x1", "x2"}, true});
    CHECK(s.size() == 3);
    CHECK(s.response_dim() == 1);
    CHECK(s.covariate_dim() == 2);
    CHECK(s.y(2, 0) == 7.0);
    CHECK(s.x(1, 1) == 6.0);
  }
  SUBCASE("indices without header") {
    const auto p = write_file("nohead.csv", "1,2\n3,4\n");
    const Sample s = csv::parse_csv_sample({p, {"1"}, {"0"}, false});
    CHECK(s.y(1, 0) == 4.0);
    CHECK(s.x(0, 0) == 1.0);
  }
  SUBCASE("quoted fields") {
    const auto t = csv::parse_table("\"a\",\"b\"\n\"1.5\",2\n", true);
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    CHECK(t.rows[0][0] == "1.5");
  }
  SUBCASE("header only") {
    const auto p = write_file("empty.csv", "y,x\n");
    CHECK_THROWS_WITH_AS(csv::parse_csv_sample({p, {"y"}, {"x"}, true}), doctest::Contains("no data"),
                         csv::ParseError);
  }
  SUBCASE("non-numeric cell") {
    const auto p = write_file("bad.csv", "1,2\nabc,4\n");
    CHECK_THROWS_WITH_AS(csv::parse_csv_sample({p, {"0"}, {"1"}, false}),
                         doctest::Contains("'abc' at row 2"), csv::ParseError);
  }
  SUBCASE("non-finite cell") {
    const auto p = write_file("nan.csv", "y,x\n1,nan\n");
    CHECK_THROWS_AS(csv::parse_csv_sample({p, {"y"}, {"x"}, true}), csv::ParseError);
  }
  SUBCASE("missing column and overlap") {
    const auto p = write_file("ok.csv", "y,x\n1,2\n3,4\n");
    CHECK_THROWS_WITH_AS(csv::parse_csv_sample({p, {"z"}, {"x"}, true}), doctest::Contains("'z'"),
                         csv::ParseError);
    CHECK_THROWS_AS(csv::parse_csv_sample({p, {"y"}, {"y"}, true}), csv::ParseError);
    CHECK_THROWS_AS(csv::parse_csv_sample({p, {}, {"x"}, true}), csv::ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(csv::parse_csv_sample({scratch_dir() / "nope.csv", {"y"}, {"x"}, true}),
                    csv::ParseError);
  }
}

TEST_CASE("result document round-trips through JSON") {
  report::ResultDocument d;
  d.tool = "cedtest";
  d.version = report::tool_version();
  d.label = "X<0.95";
  d.statistic = 0.123456789012345678;
  d.p_value = 0.02;
  d.B = 499;
  d.seed = 18446744073709551615ULL;
  d.measure = "rkhs";
  d.gamma = 1.25;
  d.kernel = "gaussian";
  d.bandwidth_rule = "rot";
  d.bandwidths1 = {0.1, 0.2};
  d.bandwidths2 = {0.3, 0.4};
  d.pooled_bandwidths = {0.5, 0.6};
  d.n1 = 23;
  d.n2 = 22;
  const nlohmann::json j = d;
  const auto back = nlohmann::json::parse(j.dump()).get<report::ResultDocument>();
  CHECK(back == d);
  d.gamma.reset();
  d.runtime_ms = 3.5;
  CHECK(nlohmann::json::parse(nlohmann::json(d).dump()).get<report::ResultDocument>() == d);
}

TEST_CASE("test subcommand") {
  const auto f1 = write_sample("s1.csv", 1, 0.0, 30).string();
  const auto f2 = write_sample("s2.csv", 2, 0.5, 35).string();
  const std::vector<std::string> base{"test", "--file1", f1, "--file2", f2, "--y-cols", "y", "--x-cols", "x",
                                      "-B", "49", "--seed", "7"};

  const Outcome a = run_cli(base);
  REQUIRE(a.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j.at("B") == 49);
  CHECK(j.at("n1") == 30);
  CHECK(j.at("n2") == 35);
  CHECK(j.at("measure") == "ced");
  CHECK(j.at("runtime_ms").is_null());
  const double p = j.at("p_value");
  CHECK(p >= 1.0 / 50.0);
  CHECK(p <= 1.0);

  SUBCASE("byte-identical across runs and thread counts") {
    for (const char* t : {"1", "4", "8"}) {
      auto args = base;
      args.insert(args.end(), {"--threads", t});
      CHECK(run_cli(args).out == a.out);
    }
  }
  SUBCASE("table renders the same document") {
    auto args = base;
    args.push_back("--table");
    const Outcome t = run_cli(args);
    CHECK(t.code == 0);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", j.at("statistic").get<double>());
    CHECK(t.out.find(buf) != std::string::npos);
  }
  SUBCASE("rkhs with fixed gamma") {
    auto args = base;
    args.insert(args.end(), {"--measure", "rkhs", "--gamma", "0.8"});
    const Outcome r = run_cli(args);
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).at("gamma") == 0.8);
  }
  SUBCASE("validation errors exit with 2") {
    auto zero = base;
    zero[10] = "0";
    const Outcome z = run_cli(zero);
    CHECK(z.code == cli::kExitUsage);
    CHECK(z.err.find("B") != std::string::npos);
    CHECK(z.out.empty());

    auto missing = base;
    missing[2] = (scratch_dir() / "absent.csv").string();
    CHECK(run_cli(missing).code == cli::kExitUsage);

    auto kernel = base;
    kernel.insert(kernel.end(), {"--kernel", "triangle"});
    CHECK(run_cli(kernel).code == cli::kExitUsage);

    CHECK(run_cli({"test", "--file1", f1}).code == cli::kExitUsage);
    CHECK(run_cli({}).code == cli::kExitUsage);
  }
  SUBCASE("runtime errors exit with 3") {
    // constant covariate: no rule-of-thumb bandwidth exists
    const auto flat = write_file("flat.csv", "y,x\n1,5\n2,5\n3,5\n");
    auto args = base;
    args[4] = flat.string();
    const Outcome r = run_cli(args);
    CHECK(r.code == cli::kExitRuntime);
    CHECK(!r.err.empty());
  }
}

TEST_CASE("simulate subcommand") {
  const std::vector<std::string> base{"simulate", "--setting", "B", "--hyp", "alt", "--n", "20",
                                      "--reps", "4", "-B", "19", "--seed", "3", "--measure", "both"};
  const Outcome a = run_cli(base);
  REQUIRE(a.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j.at("reps") == 4);
  CHECK(j.at("wall_time_ms").is_null());
  for (const char* t : {"1", "4", "8"}) {
    auto args = base;
    args.insert(args.end(), {"--threads", t});
    CHECK(run_cli(args).out == a.out);
  }
  const Outcome one = run_cli({"simulate", "--reps", "1", "-B", "9", "--n", "10"});
  REQUIRE(one.code == 0);
  CHECK(run_cli({"simulate", "--setting", "Q"}).code == cli::kExitUsage);
  CHECK(run_cli({"simulate", "--hyp", "maybe"}).code == cli::kExitUsage);
  CHECK(run_cli({"simulate", "--reps", "0"}).code == cli::kExitUsage);
  const Outcome table = run_cli({"simulate", "--reps", "2", "-B", "9", "--n", "10", "--table"});
  CHECK(table.code == 0);
  CHECK(table.out.find("A") != std::string::npos);
}

TEST_CASE("ethanol split") {
  cli::EthanolOptions opts;
  opts.B = 19;
  const cli::EthanolAnalysis a = cli::run_ethanol(opts);
  CHECK(a.n_low == 39);
  CHECK(a.n_high == 49);
  REQUIRE(a.regimes.size() == 2);
  CHECK(a.regimes[0].label == "X<0.95");
  CHECK(a.regimes[0].n_low + a.regimes[1].n_low == 39);
  CHECK(a.regimes[0].n_high + a.regimes[1].n_high == 49);
  REQUIRE(a.regimes[0].results.size() == 2);
  CHECK(a.regimes[0].results[0].measure == "ced");
  CHECK(a.regimes[0].results[1].measure == "rkhs");

  CHECK(run_cli({"ethanol", "--data", (scratch_dir() / "absent.csv").string()}).code == cli::kExitUsage);
}

#ifdef CEDTEST_CLI_BINARY
TEST_CASE("installed binary") {
  auto capture = [](const std::string& cmd, int& status) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    status = pclose(pipe);
    return out;
  };
  const std::string bin = CEDTEST_CLI_BINARY;
  int status = 0;
  const std::string version = capture("\"" + bin + "\" --version", status);
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(version.find(report::tool_version()) != std::string::npos);
  capture("\"" + bin + "\" simulate --reps 0 2>/dev/null", status);
  CHECK(WEXITSTATUS(status) == 2);
  const std::string sim = capture("\"" + bin + "\" simulate --reps 2 -B 9 --n 10", status);
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(nlohmann::json::parse(sim).at("reps") == 2);
}
#endif
