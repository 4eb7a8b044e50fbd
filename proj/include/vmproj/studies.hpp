#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "vmproj/config.hpp"
#include "vmproj/norms.hpp"
#include "vmproj/stepper.hpp"

namespace vmproj {

/// H norm of a stress field; the Frobenius norm of the single value in pointwise mode.
double stressNorm(const FemSpace* space, const StressField& s);

/// Smallest g_n - |(sigma_n + p_n)^D| over the elements of a state.
double minYieldSlack(const SchemeState& state, const StepData& data);

struct ConvergenceErrors {
  int steps = 0;
  double dt = 0.0;
  double sigmaLinfH = 0.0;  ///< max over reference grid times of |sigma^ - sigma_ref|_H
  double vLinfH = 0.0;      ///< same for v^
  double vL2V = 0.0;        ///< L2(V) error of v-bar against the reference v-bar
};

/// Errors of stored coarse trajectories against a reference streamed from `reference`.
std::vector<ConvergenceErrors> trajectoryErrors(const std::vector<Trajectory>& coarse,
                                                const ProblemSpec& reference, Scheme scheme,
                                                const StepperOptions& options);

/// Least-squares slope of log(y) against log(x); entries with y <= 0 are skipped.
double logLogSlope(const std::vector<double>& x, const std::vector<double>& y);

struct AgreementRow {
  int steps = 0;
  double sigmaDiffLinfH = 0.0;  ///< max_n |sigma_n(projection) - sigma_n(implicit)|_H
  int maxFixedPointIterations = 0;
  std::vector<int> flaggedSteps;
};

std::vector<AgreementRow> schemeAgreement(const ProblemSpec& spec, const std::vector<int>& stepsList,
                                          const StepperOptions& options);

/// Pointwise mode: sup over t in (0, T] of |sigma-bar(t) - exact(t)|, for
/// exact solutions that move monotonically along a ray (the supremum on each
/// interval is attained at an endpoint). Streams the run.
double barSupError(const ProblemSpec& spec, Scheme scheme, const StepperOptions& options,
                   const std::function<SymMatd(double)>& exact);
/// Pointwise mode: max over grid times of |sigma_n - exact(t_n)|.
double gridError(const ProblemSpec& spec, Scheme scheme, const StepperOptions& options,
                 const std::function<SymMatd(double)>& exact);

// Subcommands. Each writes into `out` (created if needed) and throws on failure.
void cmdRun(const RunConfig& cfg, const std::filesystem::path& out);
void cmdStability(const RunConfig& cfg, const std::filesystem::path& out);
void cmdConvergence(const RunConfig& cfg, const std::filesystem::path& out);

}  // namespace vmproj
