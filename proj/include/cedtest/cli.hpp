#pragma once

#include "cedtest/report.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cedtest::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Entry point shared by the executable and the tests. Writes results to
// `out` and diagnostics to `err`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Location of the bundled ethanol CSV.
std::filesystem::path default_ethanol_path();

struct EthanolOptions {
  std::filesystem::path data = default_ethanol_path();
  std::size_t B = 499;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double x_threshold = 0.95;           // splits the equivalence ratio E
  double compression_threshold = 10.0; // Low: C < threshold, High: C >= threshold
};

struct EthanolRegime {
  std::string label;  // "X<0.95" or "X>=0.95"
  std::size_t n_low = 0;
  std::size_t n_high = 0;
  std::vector<report::ResultDocument> results;  // CED first, then RKHS
};

struct EthanolAnalysis {
  std::size_t n_low = 0;
  std::size_t n_high = 0;
  std::vector<EthanolRegime> regimes;
};

// Groups rows by compression ratio, then tests Low against High separately
// on the rows with E below and at-or-above the threshold, with both measures.
EthanolAnalysis run_ethanol(const EthanolOptions& opts);

}  // namespace cedtest::cli
