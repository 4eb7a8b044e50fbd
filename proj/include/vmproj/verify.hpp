#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vmproj/config.hpp"

namespace vmproj {

struct SuiteResult {
  std::string name;
  int dim = 2;
  long cases = 0;
  double maxViolation = 0.0;
  double tolerance = 0.0;
  bool gating = true;

  bool passed() const { return maxViolation <= tolerance; }
};

struct VerifyReport {
  std::vector<SuiteResult> suites;

  /// True when every gating suite passed.
  bool passed() const;
  void print(std::ostream& out) const;
  void writeCsv(std::ostream& out) const;
};

// Violation conventions: inequality suites report max(0, lhs - rhs) and
// compare against the absolute tolerance; identity suites report
// |lhs - rhs| / max(1, scale) and compare against the relative tolerance;
// agreement suites report the number of disagreements.

/// Items (i)-(iv) of the projection properties (orthogonal split, radius Lipschitz,
/// variational inequality, nonexpansive), plus idempotence and trace preservation.
std::vector<SuiteResult> phiSuites(int dim, int samples, std::uint64_t seed, double tolerance,
                                   double identityTolerance);
/// Chart isometry, orthogonal ranges, decompose round trip, membership agreement.
std::vector<SuiteResult> chartSuites(int dim, int samples, std::uint64_t seed, double identityTolerance);
/// |P_R(F) - F| against the brute-force chart minimiser, d = 2.
SuiteResult oracleSuite(int cases, int samplesPerCase, std::uint64_t seed, double tolerance);
/// Projection step against its variational inequality with random witnesses.
SuiteResult inclusionSuite(int dim, int setups, int witnesses, std::uint64_t seed, double tolerance);
/// Explicit-variant blow-up: ratio of peak |v|_H explicit / projection. Never gating.
SuiteResult explicitDemo();

VerifyReport runVerify(const VerifyConfig& cfg, std::uint64_t seed);

/// Runs the suites, writes verify.csv into `out` and prints the report.
/// Returns true when every gating suite passed.
bool cmdVerify(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

}  // namespace vmproj
