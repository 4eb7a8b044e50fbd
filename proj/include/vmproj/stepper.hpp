#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmproj/fem2d.hpp"
#include "vmproj/linalg.hpp"
#include "vmproj/problem.hpp"

namespace vmproj {

enum class Scheme {
  Projection,  ///< momentum with the trial stress, then pointwise projection
  Implicit,    ///< fully implicit stress, solved by fixed-point iteration
  Explicit,    ///< momentum with the previous stress (conditionally stable)
};

std::string toString(Scheme s);

/// Relative slack for yield feasibility: |(s + p)^D| <= g + kFeasibilityTol * max(1, g).
inline constexpr double kFeasibilityTol = 1e-10;

struct StepperOptions {
  CgOptions cg{1e-12, 20000, false};
  double fixedPointTolerance = 1e-10;
  int fixedPointMaxIterations = 200;
};

/// Failure inside a time step (linear solver breakdown, invalid data).
class StepError : public std::runtime_error {
 public:
  StepError(int step, const std::string& what);
  int step() const { return step_; }

 private:
  int step_;
};

struct SchemeState {
  int step = 0;
  double time = 0.0;
  Vector velocity;          ///< empty in pointwise mode
  StressField trialStress;  ///< sigma*_n (sigma*_0 = sigma_0)
  StressField stress;       ///< sigma_n
  int cgIterations = 0;
  int fixedPointIterations = 0;
  bool fixedPointConverged = true;
};

/// Data of step n sampled per element: time-averaged f and h, point values of p and g.
struct StepData {
  Vector force;        ///< (f_n, phi_i); empty in pointwise mode
  StressField source;  ///< h_n
  StressField shift;   ///< p_n (n = 0 allowed)
  std::vector<double> yield;  ///< g_n
  StressField strainRate;     ///< pointwise mode: prescribed E(v_n)
};

class Stepper {
 public:
  Stepper(ProblemSpec spec, Scheme scheme, StepperOptions options = {});

  const ProblemSpec& spec() const { return spec_; }
  Scheme scheme() const { return scheme_; }
  /// Null in pointwise mode.
  std::shared_ptr<const FemSpace> space() const { return space_; }
  int elementCount() const;

  /// Checks g >= 0 and sigma_0 in K(0); throws std::invalid_argument otherwise.
  SchemeState initialState() const;
  SchemeState step(const SchemeState& previous) const;
  StepData data(int n) const;

 private:
  Vector solveMomentum(const SparseSym& matrix, const Vector& rhs, const Vector& guess, int step,
                       int& iterations) const;
  StressField project(const StressField& trial, const StepData& d, int step) const;
  SchemeState stepPointwise(const SchemeState& previous, const StepData& d) const;

  ProblemSpec spec_;
  Scheme scheme_;
  StepperOptions options_;
  std::shared_ptr<const FemSpace> space_;
  SparseSym projectionMatrix_;  ///< M/dt + (nu + dt) K, constrained
  SparseSym plainMatrix_;       ///< M/dt + nu K, constrained
};

class Trajectory {
 public:
  Trajectory(double finalTime, int steps, std::shared_ptr<const FemSpace> space)
      : finalTime_(finalTime), steps_(steps), space_(std::move(space)) {}

  double dt() const { return finalTime_ / steps_; }
  double finalTime() const { return finalTime_; }
  int steps() const { return steps_; }
  std::shared_ptr<const FemSpace> space() const { return space_; }

  std::vector<SchemeState>& states() { return states_; }
  const std::vector<SchemeState>& states() const { return states_; }
  const SchemeState& operator[](int n) const { return states_[n]; }

  /// Steps whose implicit fixed-point iteration hit the iteration cap.
  std::vector<int> flaggedSteps() const;

 private:
  double finalTime_;
  int steps_;
  std::shared_ptr<const FemSpace> space_;
  std::vector<SchemeState> states_;
};

using StepObserver = std::function<void(const SchemeState&)>;

/// Runs n = 1..N, storing every state.
Trajectory run(const ProblemSpec& spec, Scheme scheme, const StepperOptions& options = {});
/// Streaming variant: the observer sees states 0..N in order, none are kept.
void run(const ProblemSpec& spec, Scheme scheme, const StepperOptions& options, const StepObserver& observer);

enum class Interp {
  Hat,  ///< piecewise linear through (t_k, x_k)
  Bar,  ///< piecewise constant, x_k on (t_{k-1}, t_k]
};
enum class StressKind { Stress, Trial };

/// Velocity interpolant at t in [0, T]. Bar at t = 0 returns v_1 (the right limit).
Vector velocityAt(const Trajectory& traj, double t, Interp kind);
StressField stressAt(const Trajectory& traj, double t, Interp kind, StressKind which = StressKind::Stress);

/// Displacement u_n = u_{n-1} + dt v_n, u_0 given.
std::vector<Vector> accumulateDisplacement(const Trajectory& traj, const Vector& u0);
/// eps_p,n = E(u_n) - sigma_n per element.
std::vector<StressField> plasticStrain(const Trajectory& traj, const std::vector<Vector>& displacement);

}  // namespace vmproj
