#include "cedtest/cli.hpp"

#include "cedtest/csv.hpp"
#include "cedtest/errors.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef CEDTEST_DATA_DIR
#define CEDTEST_DATA_DIR "data"
#endif

namespace cedtest::cli {

namespace {

unsigned threads_from_env() {
  if (const char* env = std::getenv("CEDTEST_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw ConfigError(std::string("CEDTEST_THREADS is not a number: '") + env + "'");
    }
  }
  return 0;
}

MeasureChoice parse_measure(const std::string& measure, const std::string& gamma) {
  if (measure == "ced") return MeasureChoice::euclidean();
  if (measure != "rkhs") throw ConfigError("unknown measure '" + measure + "' (expected ced or rkhs)");
  if (gamma == "median") return MeasureChoice::rkhs_median();
  double g = 0.0;
  try {
    std::size_t used = 0;
    g = std::stod(gamma, &used);
    if (used != gamma.size()) throw std::invalid_argument(gamma);
  } catch (const std::exception&) {
    throw ConfigError("--gamma must be 'median' or a positive number, got '" + gamma + "'");
  }
  return MeasureChoice::rkhs_fixed(g);
}

BandwidthRule parse_rule(const std::string& name, const std::vector<double>& grid) {
  if (name == "rot") return BandwidthRule::rule_of_thumb();
  if (name == "lscv") return BandwidthRule::lscv(grid);
  throw ConfigError("unknown bandwidth rule '" + name + "' (expected rot or lscv)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct TestArgs {
  std::string file1, file2, y_cols, x_cols;
  bool no_header = false;
  std::string measure = "ced";
  std::string gamma = "median";
  std::string bandwidth = "rot";
  std::vector<double> grid{0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
  std::string kernel = "gaussian";
  std::size_t B = 299;
  std::uint64_t seed = 0;
  std::optional<unsigned> threads;
  bool json = false;
  bool table = false;
  bool timing = false;
};

int cmd_test(const TestArgs& a, std::ostream& out) {
  TestConfig cfg;
  cfg.replicates = a.B;
  cfg.seed = a.seed;
  cfg.measure = parse_measure(a.measure, a.gamma);
  cfg.bandwidth_rule = parse_rule(a.bandwidth, a.grid);
  cfg.family = kernel_family_from_string(a.kernel);
  cfg.threads = a.threads ? *a.threads : threads_from_env();
  cfg.validate();

  const auto ys = split_list(a.y_cols);
  const auto xs = split_list(a.x_cols);
  const Sample s1 = csv::parse_csv_sample({a.file1, ys, xs, !a.no_header});
  const Sample s2 = csv::parse_csv_sample({a.file2, ys, xs, !a.no_header});

  const auto start = std::chrono::steady_clock::now();
  const TestResult result = run_test(s1, s2, cfg);
  report::ResultDocument doc = report::make_document(result, cfg);
  if (a.timing) {
    doc.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  if (a.table) out << report::format_table(doc);
  if (a.json || !a.table) out << nlohmann::json(doc).dump(2) << '\n';
  return kExitOk;
}

struct SimArgs {
  std::string setting = "A";
  std::string hyp = "null";
  std::size_t n = 50;
  std::optional<std::size_t> n1, n2;
  std::size_t reps = 200;
  std::size_t B = 99;
  std::uint64_t seed = 0;
  std::optional<unsigned> threads;
  std::string measure = "ced";
  std::vector<double> alphas{0.05, 0.10};
  bool full_scale = false;
  bool json = false;
  bool table = false;
  bool timing = false;
};

int cmd_simulate(const SimArgs& a, std::ostream& out) {
  sim::SimSetting s;
  s.setting = sim::setting_from_string(a.setting);
  s.hypothesis = sim::hypothesis_from_string(a.hyp);
  s.n1 = a.n1.value_or(a.n);
  s.n2 = a.n2.value_or(a.n);
  s.seed = a.seed;

  sim::ExperimentConfig cfg;
  cfg.reps = a.full_scale ? 1000 : a.reps;
  cfg.alphas = a.alphas;
  cfg.test.replicates = a.full_scale ? 299 : a.B;
  cfg.threads = a.threads ? *a.threads : threads_from_env();
  if (a.measure == "ced") {
    cfg.measures = {MeasureChoice::euclidean()};
  } else if (a.measure == "rkhs") {
    cfg.measures = {MeasureChoice::rkhs_median()};
  } else if (a.measure == "both") {
    cfg.measures = {MeasureChoice::euclidean(), MeasureChoice::rkhs_median()};
  } else {
    throw ConfigError("unknown measure '" + a.measure + "' (expected ced, rkhs or both)");
  }

  const sim::SimReport rep = sim::rejection_experiment(s, cfg);
  if (a.table) out << sim::format_table({rep});
  if (a.json || !a.table) out << report::sim_report_json(rep, a.timing).dump(2) << '\n';
  return kExitOk;
}

struct EthanolArgs {
  EthanolOptions opts;
  std::optional<unsigned> threads;
  bool json = false;
  bool table = false;
};

int cmd_ethanol(EthanolArgs a, std::ostream& out) {
  a.opts.threads = a.threads ? *a.threads : threads_from_env();
  const EthanolAnalysis res = run_ethanol(a.opts);
  if (a.table) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "Low (C<%g): %zu rows   High (C>=%g): %zu rows\n",
                  a.opts.compression_threshold, res.n_low, a.opts.compression_threshold,
                  res.n_high);
    out << buf;
    out << "regime      n_low  n_high  p(ced)   p(rkhs)\n";
    for (const auto& r : res.regimes) {
      std::snprintf(buf, sizeof buf, "%-10s  %5zu  %6zu  %-7.3f  %-7.3f\n", r.label.c_str(),
                    r.n_low, r.n_high, r.results[0].p_value, r.results[1].p_value);
      out << buf;
    }
  }
  if (a.json || !a.table) {
    nlohmann::json regimes = nlohmann::json::array();
    for (const auto& r : res.regimes) {
      regimes.push_back(
          {{"regime", r.label}, {"n_low", r.n_low}, {"n_high", r.n_high}, {"results", r.results}});
    }
    const nlohmann::json doc{{"dataset", a.opts.data.filename().string()},
                             {"n_low", res.n_low},
                             {"n_high", res.n_high},
                             {"regimes", regimes}};
    out << doc.dump(2) << '\n';
  }
  return kExitOk;
}

template <typename F>
int guarded(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

std::filesystem::path default_ethanol_path() {
  return std::filesystem::path(CEDTEST_DATA_DIR) / "ethanol.csv";
}

EthanolAnalysis run_ethanol(const EthanolOptions& opts) {
  const csv::Table table = csv::read_table(opts.data, true);
  if (table.rows.empty()) throw csv::ParseError("ethanol data file has no rows");
  const Matrix cols = csv::numeric_columns(table, {"NOx", "E", "C"});

  EthanolAnalysis out;
  for (Eigen::Index i = 0; i < cols.rows(); ++i) {
    (cols(i, 2) < opts.compression_threshold ? out.n_low : out.n_high) += 1;
  }

  auto subset = [&](bool low, bool below) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < cols.rows(); ++i) {
      const bool is_low = cols(i, 2) < opts.compression_threshold;
      const bool is_below = cols(i, 1) < opts.x_threshold;
      if (is_low == low && is_below == below) rows.push_back(i);
    }
    Matrix y(static_cast<Eigen::Index>(rows.size()), 1);
    Matrix x(static_cast<Eigen::Index>(rows.size()), 1);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      y(static_cast<Eigen::Index>(k), 0) = cols(rows[k], 0);
      x(static_cast<Eigen::Index>(k), 0) = cols(rows[k], 1);
    }
    if (rows.empty()) throw DataError("ethanol regime has an empty group");
    return Sample(std::move(y), std::move(x));
  };

  char lo[32];
  char hi[32];
  std::snprintf(lo, sizeof lo, "X<%g", opts.x_threshold);
  std::snprintf(hi, sizeof hi, "X>=%g", opts.x_threshold);
  for (const bool below : {true, false}) {
    EthanolRegime regime;
    regime.label = below ? lo : hi;
    const Sample low = subset(true, below);
    const Sample high = subset(false, below);
    regime.n_low = low.size();
    regime.n_high = high.size();
    for (const MeasureChoice m : {MeasureChoice::euclidean(), MeasureChoice::rkhs_median()}) {
      TestConfig cfg;
      cfg.replicates = opts.B;
      cfg.seed = opts.seed;
      cfg.measure = m;
      cfg.threads = opts.threads;
      report::ResultDocument doc = report::make_document(run_test(low, high, cfg), cfg);
      doc.label = regime.label;
      regime.results.push_back(std::move(doc));
    }
    out.regimes.push_back(std::move(regime));
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-sample conditional distribution tests based on the conditional energy distance"};
  app.set_version_flag("--version", report::tool_version());
  app.require_subcommand(1);

  TestArgs ta;
  auto* test = app.add_subcommand("test", "Test equality of Y|X between two CSV samples");
  test->add_option("--file1", ta.file1, "CSV file of the first sample")->required();
  test->add_option("--file2", ta.file2, "CSV file of the second sample")->required();
  test->add_option("--y-cols", ta.y_cols, "Comma-separated response columns")->required();
  test->add_option("--x-cols", ta.x_cols, "Comma-separated covariate columns")->required();
  test->add_flag("--no-header", ta.no_header, "Files have no header row; columns are 0-based indices");
  test->add_option("--measure", ta.measure, "ced or rkhs")->capture_default_str();
  test->add_option("--gamma", ta.gamma, "RKHS scale: 'median' or a positive number")->capture_default_str();
  test->add_option("--bandwidth", ta.bandwidth, "rot or lscv")->capture_default_str();
  test->add_option("--lscv-grid", ta.grid, "Multiplicative factors searched by lscv")->delimiter(',');
  test->add_option("--kernel", ta.kernel, "gaussian, epanechnikov or rectangular")->capture_default_str();
  test->add_option("-B,--bootstrap", ta.B, "Bootstrap replicates")->capture_default_str();
  test->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
  test->add_option("--threads", ta.threads, "Worker threads (default: $CEDTEST_THREADS or all cores)");
  test->add_flag("--json", ta.json, "Emit JSON (default)");
  test->add_flag("--table", ta.table, "Emit an aligned text table");
  test->add_flag("--timing", ta.timing, "Record runtime_ms in the output");

  SimArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo size/power experiment for settings A-D");
  simulate->add_option("--setting", sa.setting, "A, B, C or D")->capture_default_str();
  simulate->add_option("--hyp", sa.hyp, "null or alt")->capture_default_str();
  simulate->add_option("--n", sa.n, "Per-group sample size")->capture_default_str();
  simulate->add_option("--n1", sa.n1, "Size of group 1 (overrides --n)");
  simulate->add_option("--n2", sa.n2, "Size of group 2 (overrides --n)");
  simulate->add_option("--reps", sa.reps, "Monte-Carlo replicates")->capture_default_str();
  simulate->add_option("-B,--bootstrap", sa.B, "Bootstrap replicates per test")->capture_default_str();
  simulate->add_option("--seed", sa.seed, "Master seed")->capture_default_str();
  simulate->add_option("--threads", sa.threads, "Worker threads (default: $CEDTEST_THREADS or all cores)");
  simulate->add_option("--measure", sa.measure, "ced, rkhs or both")->capture_default_str();
  simulate->add_option("--alpha", sa.alphas, "Significance levels")->delimiter(',');
  simulate->add_flag("--full-scale", sa.full_scale, "Use 1000 replicates and B=299");
  simulate->add_flag("--json", sa.json, "Emit JSON (default)");
  simulate->add_flag("--table", sa.table, "Emit a rejection-rate table");
  simulate->add_flag("--timing", sa.timing, "Record wall_time_ms in the output");

  EthanolArgs ea;
  std::string data_path = ea.opts.data.string();
  auto* ethanol = app.add_subcommand("ethanol", "Low vs high compression ratio analysis of the ethanol data");
  ethanol->add_option("--data", data_path, "Ethanol CSV with columns NOx, E, C")->capture_default_str();
  ethanol->add_option("-B,--bootstrap", ea.opts.B, "Bootstrap replicates")->capture_default_str();
  ethanol->add_option("--seed", ea.opts.seed, "Random seed")->capture_default_str();
  ethanol->add_option("--threads", ea.threads, "Worker threads (default: $CEDTEST_THREADS or all cores)");
  ethanol->add_option("--threshold", ea.opts.x_threshold, "Equivalence-ratio split point")->capture_default_str();
  ethanol->add_flag("--json", ea.json, "Emit JSON (default)");
  ethanol->add_flag("--table", ea.table, "Emit a p-value table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (test->parsed()) return guarded([&] { return cmd_test(ta, out); }, err);
  if (simulate->parsed()) return guarded([&] { return cmd_simulate(sa, out); }, err);
  ea.opts.data = data_path;
  return guarded([&] { return cmd_ethanol(ea, out); }, err);
}

}  // namespace cedtest::cli
