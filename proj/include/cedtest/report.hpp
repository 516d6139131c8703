#pragma once

#include "cedtest/bootstrap.hpp"
#include "cedtest/simharness.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cedtest::report {

std::string tool_version();

// Serialized outcome of one test run; snake_case JSON keys.
struct ResultDocument {
  std::string tool = "cedtest";
  std::string version;
  std::string label;  // optional free-form tag, e.g. the ethanol regime
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t B = 0;
  std::uint64_t seed = 0;
  std::string measure;  // "ced" or "rkhs"
  std::optional<double> gamma;
  std::string kernel;
  std::string bandwidth_rule;
  std::vector<double> bandwidths1;
  std::vector<double> bandwidths2;
  std::vector<double> pooled_bandwidths;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::optional<double> runtime_ms;  // only filled when timing is requested

  friend bool operator==(const ResultDocument&, const ResultDocument&) = default;
};

ResultDocument make_document(const TestResult& r, const TestConfig& cfg);

void to_json(nlohmann::json& j, const ResultDocument& d);
void from_json(const nlohmann::json& j, ResultDocument& d);

// Aligned key/value rendering of the same fields.
std::string format_table(const ResultDocument& d);

nlohmann::json sim_report_json(const sim::SimReport& r, bool include_timing);

}  // namespace cedtest::report
