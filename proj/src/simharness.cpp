#include "cedtest/simharness.hpp"

#include "cedtest/errors.hpp"
#include "cedtest/parallel.hpp"
#include "cedtest/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cedtest::sim {

namespace {

constexpr std::uint64_t kDataStream = 0xDA7A;
constexpr std::uint64_t kBootstrapStream = 0xB007;

struct GroupModel {
  double x_mean = 0.0;
  double x_var = 1.0;
  double intercept = 1.0;
  double slope = 1.0;
  enum class Noise { Normal, StudentT5, Heteroscedastic } noise = Noise::Normal;
  double noise_scale = 1.0;  // variance for Normal, numerator for Heteroscedastic
};

GroupModel model_for(Setting setting, Hypothesis hyp, int group) {
  const bool alt = hyp == Hypothesis::Alternative && group == 2;
  GroupModel m;
  m.x_mean = group == 2 ? 1.0 : 0.0;
  switch (setting) {
    case Setting::A:
      m.slope = alt ? 2.0 : 1.0;
      break;
    case Setting::B:
      m.noise = GroupModel::Noise::StudentT5;
      m.intercept = alt ? 0.0 : 1.0;
      break;
    case Setting::C:
      m.noise = GroupModel::Noise::Heteroscedastic;
      m.noise_scale = alt ? 1.0 : 4.0;
      break;
    case Setting::D:
      m.x_mean = 0.0;
      m.x_var = group == 2 ? 2.0 : 1.0;
      m.noise_scale = alt ? 2.0 : 1.0;
      break;
  }
  return m;
}

Sample draw_group(const GroupModel& m, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> x_dist(m.x_mean, std::sqrt(m.x_var));
  std::normal_distribution<double> z_dist(0.0, 1.0);
  std::student_t_distribution<double> t_dist(5.0);
  Matrix y(static_cast<Eigen::Index>(n), 1);
  Matrix x(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x_dist(rng);
    double eps = 0.0;
    switch (m.noise) {
      case GroupModel::Noise::Normal:
        eps = std::sqrt(m.noise_scale) * z_dist(rng);
        break;
      case GroupModel::Noise::StudentT5:
        eps = t_dist(rng);
        break;
      case GroupModel::Noise::Heteroscedastic:
        eps = std::sqrt(m.noise_scale / (1.0 + xi * xi)) * z_dist(rng);
        break;
    }
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = xi;
    y(r, 0) = m.intercept + m.slope * xi + eps;
  }
  return Sample(std::move(y), std::move(x));
}

}  // namespace

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::A:
      return "A";
    case Setting::B:
      return "B";
    case Setting::C:
      return "C";
    case Setting::D:
      return "D";
  }
  return "?";
}

std::string_view to_string(Hypothesis h) {
  return h == Hypothesis::Null ? "null" : "alternative";
}

Setting setting_from_string(std::string_view name) {
  if (name == "A" || name == "a") return Setting::A;
  if (name == "B" || name == "b") return Setting::B;
  if (name == "C" || name == "c") return Setting::C;
  if (name == "D" || name == "d") return Setting::D;
  throw ConfigError("unknown setting '" + std::string(name) + "' (expected A, B, C or D)");
}

Hypothesis hypothesis_from_string(std::string_view name) {
  if (name == "null" || name == "h0") return Hypothesis::Null;
  if (name == "alt" || name == "alternative" || name == "h1") return Hypothesis::Alternative;
  throw ConfigError("unknown hypothesis '" + std::string(name) + "' (expected null or alt)");
}

void SimSetting::validate() const {
  if (n1 < 2 || n2 < 2) throw ConfigError("simulated samples need at least two observations each");
}

std::pair<Sample, Sample> generate_setting(const SimSetting& s, std::mt19937_64& rng) {
  s.validate();
  Sample g1 = draw_group(model_for(s.setting, s.hypothesis, 1), s.n1, rng);
  Sample g2 = draw_group(model_for(s.setting, s.hypothesis, 2), s.n2, rng);
  return {std::move(g1), std::move(g2)};
}

std::pair<Sample, Sample> generate_setting(const SimSetting& s) {
  std::mt19937_64 rng(s.seed);
  return generate_setting(s, rng);
}

SimReport rejection_experiment(const SimSetting& s, const ExperimentConfig& cfg) {
  s.validate();
  if (cfg.reps < 1) throw ConfigError("experiment needs at least one replicate");
  if (cfg.measures.empty()) throw ConfigError("experiment needs at least one measure");
  for (double a : cfg.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("significance levels must lie in (0, 1)");
  }
  cfg.test.validate();

  const auto start = std::chrono::steady_clock::now();
  const std::size_t n_measures = cfg.measures.size();
  std::vector<double> p(cfg.reps * n_measures);

  parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
    SimSetting draw = s;
    draw.seed = derive_seed(s.seed, kDataStream, rep);
    const auto [s1, s2] = generate_setting(draw);
    for (std::size_t k = 0; k < n_measures; ++k) {
      TestConfig tc = cfg.test;
      tc.measure = cfg.measures[k];
      tc.seed = derive_seed(s.seed, kBootstrapStream, rep);
      tc.threads = 1;
      p[rep * n_measures + k] = run_test(s1, s2, tc).p_value;
    }
  });

  SimReport report;
  report.setting = s.setting;
  report.hypothesis = s.hypothesis;
  report.n1 = s.n1;
  report.n2 = s.n2;
  report.seed = s.seed;
  report.reps = cfg.reps;
  report.bootstrap_replicates = cfg.test.replicates;
  report.alphas = cfg.alphas;
  for (std::size_t k = 0; k < n_measures; ++k) {
    MeasureReport mr;
    mr.measure = cfg.measures[k];
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) mr.p_values.push_back(p[rep * n_measures + k]);
    for (double a : cfg.alphas) {
      std::size_t rejected = 0;
      for (double pv : mr.p_values) rejected += pv <= a ? 1 : 0;
      const double r = static_cast<double>(rejected) / static_cast<double>(cfg.reps);
      mr.rejection_rate.push_back(r);
      mr.standard_error.push_back(std::sqrt(r * (1.0 - r) / static_cast<double>(cfg.reps)));
    }
    report.measures.push_back(std::move(mr));
  }
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string format_table(const std::vector<SimReport>& reports) {
  std::ostringstream out;
  if (reports.empty()) return {};
  const SimReport& head = reports.front();
  char buf[64];
  out << "Setting  Hyp          n1=n2";
  for (const auto& m : head.measures) {
    for (double a : head.alphas) {
      std::snprintf(buf, sizeof buf, "  %11s@%-4g", std::string(to_string(m.measure.kind)).c_str(),
                    a * 100.0);
      out << buf;
    }
  }
  out << '\n';
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-8s %-12s %5zu", std::string(to_string(r.setting)).c_str(),
                  std::string(to_string(r.hypothesis)).c_str(), r.n1);
    out << buf;
    for (const auto& m : r.measures) {
      for (double rate : m.rejection_rate) {
        std::snprintf(buf, sizeof buf, "  %16.3f", rate);
        out << buf;
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cedtest::sim
