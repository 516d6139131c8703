#include "cedtest/report.hpp"

#include <cstdio>
#include <sstream>

#ifndef CEDTEST_VERSION
#define CEDTEST_VERSION "0.0.0"
#endif

namespace cedtest::report {

namespace {

std::string measure_name(MeasureChoice::Kind kind) {
  return kind == MeasureChoice::Kind::Euclidean ? "ced" : "rkhs";
}

std::string rule_name(const BandwidthRule& rule) {
  return rule.kind == BandwidthRule::Kind::RuleOfThumb ? "rot" : "lscv";
}

std::string join(const std::vector<double>& v) {
  std::ostringstream out;
  char buf[32];
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.6g", v[k]);
    out << (k ? ", " : "") << buf;
  }
  return out.str();
}

}  // namespace

std::string tool_version() { return CEDTEST_VERSION; }

ResultDocument make_document(const TestResult& r, const TestConfig& cfg) {
  ResultDocument d;
  d.version = tool_version();
  d.statistic = r.statistic;
  d.p_value = r.p_value;
  d.B = r.replicates.size();
  d.seed = r.seed;
  d.measure = measure_name(r.measure.kind);
  d.gamma = r.gamma;
  d.kernel = std::string(to_string(cfg.family));
  d.bandwidth_rule = rule_name(cfg.bandwidth_rule);
  d.bandwidths1 = r.bandwidths1.values();
  d.bandwidths2 = r.bandwidths2.values();
  d.pooled_bandwidths = r.pooled_bandwidths.values();
  d.n1 = r.n1;
  d.n2 = r.n2;
  return d;
}

void to_json(nlohmann::json& j, const ResultDocument& d) {
  j = nlohmann::json{
      {"tool", d.tool},
      {"version", d.version},
      {"statistic", d.statistic},
      {"p_value", d.p_value},
      {"B", d.B},
      {"seed", d.seed},
      {"measure", d.measure},
      {"gamma", d.gamma ? nlohmann::json(*d.gamma) : nlohmann::json(nullptr)},
      {"kernel", d.kernel},
      {"bandwidth_rule", d.bandwidth_rule},
      {"bandwidths",
       {{"sample1", d.bandwidths1}, {"sample2", d.bandwidths2}, {"pooled", d.pooled_bandwidths}}},
      {"n1", d.n1},
      {"n2", d.n2},
      {"runtime_ms", d.runtime_ms ? nlohmann::json(*d.runtime_ms) : nlohmann::json(nullptr)},
  };
  if (!d.label.empty()) j["label"] = d.label;
}

void from_json(const nlohmann::json& j, ResultDocument& d) {
  auto optional_number = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  j.at("tool").get_to(d.tool);
  j.at("version").get_to(d.version);
  d.label = j.value("label", std::string{});
  j.at("statistic").get_to(d.statistic);
  j.at("p_value").get_to(d.p_value);
  j.at("B").get_to(d.B);
  j.at("seed").get_to(d.seed);
  j.at("measure").get_to(d.measure);
  d.gamma = optional_number("gamma");
  j.at("kernel").get_to(d.kernel);
  j.at("bandwidth_rule").get_to(d.bandwidth_rule);
  const auto& bw = j.at("bandwidths");
  bw.at("sample1").get_to(d.bandwidths1);
  bw.at("sample2").get_to(d.bandwidths2);
  bw.at("pooled").get_to(d.pooled_bandwidths);
  j.at("n1").get_to(d.n1);
  j.at("n2").get_to(d.n2);
  d.runtime_ms = optional_number("runtime_ms");
}

std::string format_table(const ResultDocument& d) {
  std::ostringstream out;
  char buf[128];
  auto line = [&](const char* key, const std::string& value) {
    std::snprintf(buf, sizeof buf, "%-20s %s\n", key, value.c_str());
    out << buf;
  };
  auto num = [&](double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return std::string(b);
  };
  if (!d.label.empty()) line("label", d.label);
  line("measure", d.measure);
  line("statistic", num(d.statistic));
  line("p_value", num(d.p_value));
  line("B", std::to_string(d.B));
  line("seed", std::to_string(d.seed));
  line("n1", std::to_string(d.n1));
  line("n2", std::to_string(d.n2));
  line("kernel", d.kernel);
  line("bandwidth_rule", d.bandwidth_rule);
  line("bandwidths.sample1", join(d.bandwidths1));
  line("bandwidths.sample2", join(d.bandwidths2));
  line("bandwidths.pooled", join(d.pooled_bandwidths));
  line("gamma", d.gamma ? num(*d.gamma) : "-");
  line("runtime_ms", d.runtime_ms ? num(*d.runtime_ms) : "-");
  line("version", d.tool + " " + d.version);
  return out.str();
}

nlohmann::json sim_report_json(const sim::SimReport& r, bool include_timing) {
  nlohmann::json measures = nlohmann::json::array();
  for (const auto& m : r.measures) {
    measures.push_back({
        {"measure", measure_name(m.measure.kind)},
        {"rejection_rate", m.rejection_rate},
        {"standard_error", m.standard_error},
        {"p_values", m.p_values},
    });
  }
  return {
      {"tool", "cedtest"},
      {"version", tool_version()},
      {"setting", std::string(sim::to_string(r.setting))},
      {"hypothesis", std::string(sim::to_string(r.hypothesis))},
      {"n1", r.n1},
      {"n2", r.n2},
      {"seed", r.seed},
      {"reps", r.reps},
      {"B", r.bootstrap_replicates},
      {"alphas", r.alphas},
      {"measures", measures},
      {"wall_time_ms", include_timing ? nlohmann::json(r.wall_time_ms) : nlohmann::json(nullptr)},
  };
}

}  // namespace cedtest::report
