#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmproj/problem.hpp"
#include "vmproj/stepper.hpp"

namespace vmproj {

/// Invalid configuration; the message carries "<source>:<line>: <field>: ...".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StudyConfig {
  /// Step counts of the study, strictly increasing (so dt strictly decreasing).
  std::vector<int> stepsList;
  /// Reference step count for convergence studies; larger than every entry above.
  int referenceSteps = 0;
};

struct VerifyConfig {
  int propertySamples = 10000;
  int oracleCases = 100;
  int oracleSamples = 100000;
  int viSetups = 1000;
  int viWitnesses = 100;
  /// Absolute slack for the inequality suites.
  double tolerance = 1e-10;
  /// Relative slack for the identity suites.
  double identityTolerance = 1e-12;
  bool explicitDemo = true;
};

struct RunConfig {
  ProblemSpec problem;
  Scheme scheme = Scheme::Projection;
  StepperOptions stepper;
  StudyConfig study;
  VerifyConfig verify;
  int vtkStride = 0;  ///< 0 disables snapshots
  std::uint64_t seed = 1;
};

RunConfig parseConfig(const std::filesystem::path& path);
RunConfig parseConfigText(const std::string& text, const std::string& sourceName = "<config>");

/// Checks the study block: stepsList strictly increasing and, when
/// `needReference`, referenceSteps larger than all of them.
void validateStudy(const StudyConfig& study, bool needReference);

}  // namespace vmproj
